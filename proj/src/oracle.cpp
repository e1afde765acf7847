#include "omtk/oracle.hpp"

#include "omtk/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace omtk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool compare(const Rational& lhs, Sense sense, const Rational& rhs)
{
    switch (sense) {
    case Sense::LE: return lhs <= rhs;
    case Sense::EQ: return lhs == rhs;
    case Sense::GE: return lhs >= rhs;
    }
    return false;
}

Rational bound_value(const BoundSpec& bound, const Assignment& a)
{
    if (const auto* c = std::get_if<Rational>(&bound)) {
        return *c;
    }
    return evaluate(std::get<LinearExpr>(bound), a);
}

template <class Set>
bool set_holds(const Set& s, const Assignment& a)
{
    Rational total;
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        total += s.weight(i) * a.at(s.members[i]);
    }
    constexpr Sense sense = Set::kind == SetKind::Packing ? Sense::LE
                            : Set::kind == SetKind::Partitioning ? Sense::EQ
                                                                 : Sense::GE;
    return compare(total, sense, Rational(s.rhs));
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return r;
}

} // namespace

bool satisfies(const TypedConstraint& constraint, const Assignment& a)
{
    return std::visit(
        overloaded{
            [&](const Bound& c) { return compare(evaluate(c.expr, a), c.sense, bound_value(c.bound, a)); },
            [&](const ConditionalBound& c) {
                const Rational& y = a.at(c.indicator);
                if (y == Rational(1)) {
                    return compare(evaluate(c.expr, a), c.sense, bound_value(c.bound, a));
                }
                if (y.is_zero()) {
                    return c.off_behavior == OffBehavior::Free || evaluate(c.expr, a).is_zero();
                }
                return false;
            },
            [&](const Balance& c) { return evaluate(c.lhs, a) == evaluate(c.rhs, a); },
            [&](const VariableFix& c) { return a.at(c.var) == c.value; },
            [&](const IfThen& c) {
                bool fired = std::all_of(c.antecedents.begin(), c.antecedents.end(),
                    [&](VarId v) { return a.at(v) == Rational(1); });
                bool all_consequents = std::all_of(c.consequents.begin(), c.consequents.end(),
                    [&](VarId v) { return a.at(v) == Rational(1); });
                return !fired || all_consequents;
            },
            [&](const EitherOr& c) {
                return std::any_of(c.alternatives.begin(), c.alternatives.end(),
                    [&](const Alternative& alt) { return compare(evaluate(alt.expr, a), alt.sense, alt.rhs); });
            },
            [&](const RawRow& c) { return compare(evaluate(c.expr, a), c.sense, c.rhs); },
            [&](const auto& set) { return set_holds(set, a); },
        },
        constraint.body);
}

bool satisfies(const Model& model, const Assignment& assignment)
{
    return std::all_of(model.constraints().begin(), model.constraints().end(),
        [&](const TypedConstraint& c) { return satisfies(c, assignment); });
}

// ---------------------------------------------------------------------------
// boxes and equivalence

std::uint64_t SampleBox::cardinality() const
{
    std::uint64_t n = 1;
    for (const auto& [var, values] : domains) {
        n = saturating_mul(n, values.size());
    }
    return n;
}

namespace {

std::vector<Rational> integer_samples(const Variable& v)
{
    auto sample_open = [](std::int64_t anchor, int direction) {
        return std::vector<Rational>{Rational(anchor), Rational(anchor + direction), Rational(anchor + 10 * direction)};
    };
    if (v.lower && v.upper) {
        std::vector<Rational> out;
        for (std::int64_t x = v.lower->ceil(); x <= v.upper->floor(); ++x) {
            out.emplace_back(x);
            if (out.size() > 100'000'000) {
                break;
            }
        }
        return out;
    }
    if (v.lower) {
        return sample_open(v.lower->ceil(), 1);
    }
    if (v.upper) {
        auto s = sample_open(v.upper->floor(), -1);
        std::reverse(s.begin(), s.end());
        return s;
    }
    return {Rational(-10), Rational(-1), Rational(0), Rational(1), Rational(10)};
}

std::vector<Rational> continuous_samples(const Variable& v, int interior)
{
    if (!v.lower || !v.upper) {
        if (v.lower) {
            return {*v.lower, *v.lower + Rational(1), *v.lower + Rational(10)};
        }
        if (v.upper) {
            return {*v.upper - Rational(10), *v.upper - Rational(1), *v.upper};
        }
        return {Rational(-10), Rational(-1), Rational(0), Rational(1), Rational(10)};
    }
    std::vector<Rational> out{*v.lower, *v.upper};
    Rational width = *v.upper - *v.lower;
    out.push_back(*v.lower + width / Rational(2));
    for (int i = 1; i <= interior; ++i) {
        out.push_back(*v.lower + width * Rational(i, interior + 1));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

SampleBox make_box(std::span<const Variable> variables, std::span<const VarId> vars, const BoxOptions& options)
{
    SampleBox box;
    for (VarId id : vars) {
        const Variable& v = variables[id.value];
        box.domains.emplace_back(id,
            v.kind == VarKind::Continuous ? continuous_samples(v, options.continuous_interior) : integer_samples(v));
    }
    return box;
}

EquivalenceReport check_equivalence(const TypedConstraint& constraint, const LoweredConstraint& lowered,
    VarId first_aux, const SampleBox& box, const CheckLimits& limits)
{
    const std::size_t aux = lowered.auxiliaries.size();
    if (aux > 16) {
        throw Error(ErrorCode::BoxTooLarge, "more than 16 auxiliary binaries to project out");
    }
    const std::uint64_t points = box.cardinality();
    const std::uint64_t work = saturating_mul(points, std::uint64_t{1} << aux);
    if (work > limits.cap) {
        throw Error(ErrorCode::BoxTooLarge,
            "box of " + std::to_string(points) + " points x 2^" + std::to_string(aux) + " auxiliaries exceeds cap " +
                std::to_string(limits.cap));
    }

    std::uint32_t width = first_aux.value + static_cast<std::uint32_t>(aux);
    for (const auto& [var, values] : box.domains) {
        width = std::max(width, var.value + 1);
    }
    Assignment a(width);
    EquivalenceReport report;
    if (points == 0) {
        return report;
    }

    std::vector<std::size_t> index(box.domains.size(), 0);
    for (std::size_t i = 0; i < box.domains.size(); ++i) {
        a.set(box.domains[i].first, box.domains[i].second[0]);
    }
    while (true) {
        bool semantic = satisfies(constraint, a);
        bool lowered_ok = false;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << aux) && !lowered_ok; ++mask) {
            for (std::size_t j = 0; j < aux; ++j) {
                a.set(VarId{first_aux.value + static_cast<std::uint32_t>(j)}, Rational((mask >> j) & 1u ? 1 : 0));
            }
            lowered_ok = std::all_of(lowered.rows.begin(), lowered.rows.end(),
                [&](const CanonicalRow& row) { return row_holds(row, a); });
        }
        ++report.points_checked;
        if (semantic != lowered_ok) {
            ++report.mismatch_count;
            if (report.mismatches.size() < limits.max_reported) {
                Assignment snapshot(width);
                for (const auto& [var, values] : box.domains) {
                    snapshot.set(var, a.at(var));
                }
                report.mismatches.push_back({std::move(snapshot), semantic, lowered_ok});
            }
        }
        // odometer over the box, last variable fastest
        std::size_t pos = box.domains.size();
        while (pos > 0) {
            --pos;
            auto& [var, values] = box.domains[pos];
            if (++index[pos] < values.size()) {
                a.set(var, values[index[pos]]);
                break;
            }
            index[pos] = 0;
            a.set(var, values[0]);
            if (pos == 0) {
                return report;
            }
        }
        if (box.domains.empty()) {
            return report;
        }
    }
}

std::uint64_t ModelCheckReport::points_checked() const
{
    std::uint64_t n = 0;
    for (const auto& c : constraints) {
        n += c.report.points_checked;
    }
    return n;
}

std::uint64_t ModelCheckReport::mismatch_count() const
{
    std::uint64_t n = 0;
    for (const auto& c : constraints) {
        n += c.report.mismatch_count;
    }
    return n;
}

ModelCheckReport check_model(const Model& model, const LowerOptions& lower, const CheckLimits& limits,
    const BoxOptions& box_options)
{
    if (has_errors(validate(model))) {
        throw Error(ErrorCode::ValidationFailed, "model does not validate");
    }
    ModelCheckReport out;
    const VarId first_aux{static_cast<std::uint32_t>(model.variables().size())};
    for (std::size_t i = 0; i < model.constraints().size(); ++i) {
        const auto& c = model.constraints()[i];
        ConstraintId id{static_cast<std::uint32_t>(i)};
        auto lowered = lower_constraint(c, id, model.variables(), lower, first_aux);
        auto vars = referenced_variables(c);
        SampleBox box = make_box(model.variables(), vars, box_options);
        out.constraints.push_back({id, c.label, check_equivalence(c, lowered, first_aux, box, limits)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// enumeration

std::string_view to_string(SolveStatus status)
{
    return status == SolveStatus::Optimal ? "optimal" : "infeasible";
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw Error(ErrorCode::Overflow, "row activity exceeds 64-bit range");
    }
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw Error(ErrorCode::Overflow, "row activity exceeds 64-bit range");
    }
    return r;
}

struct IntRow {
    std::vector<std::pair<std::uint32_t, std::int64_t>> terms; // ascending variable index
    Sense sense = Sense::LE;
    std::int64_t rhs = 0;
    std::vector<std::int64_t> rest_min; // rest_min[k]: least value of terms k.. over their domains
    std::vector<std::int64_t> rest_max;
};

struct Predicate {
    std::uint32_t depth = 0;
    const TypedConstraint* constraint = nullptr;
};

bool row_ok(Sense sense, std::int64_t lo, std::int64_t hi, std::int64_t rhs)
{
    switch (sense) {
    case Sense::LE: return lo <= rhs;
    case Sense::GE: return hi >= rhs;
    case Sense::EQ: return lo <= rhs && hi >= rhs;
    }
    return false;
}

/// Depth-first walk over an integer box in lexicographic order. Rows are
/// checked incrementally against the range still reachable by unassigned
/// variables; other constraints once their last variable is fixed.
class Search {
public:
    Search(std::vector<std::pair<std::int64_t, std::int64_t>> domains, std::size_t assignment_width)
        : domains_(std::move(domains)), assignment_(assignment_width)
    {
        const std::size_t n = domains_.size();
        suffix_.assign(n + 1, 1);
        for (std::size_t d = n; d-- > 0;) {
            auto size = domains_[d].second >= domains_[d].first
                            ? static_cast<std::uint64_t>(domains_[d].second - domains_[d].first) + 1
                            : std::uint64_t{0};
            suffix_[d] = saturating_mul(suffix_[d + 1], size);
        }
        touches_.resize(n);
        predicates_at_.resize(n);
    }

    [[nodiscard]] std::uint64_t cardinality() const { return suffix_[0]; }

    void add_row(const std::map<VarId, Rational>& coefficients, Sense sense, const Rational& rhs)
    {
        std::int64_t scale = rhs.den();
        for (const auto& [var, coef] : coefficients) {
            scale = std::lcm(scale, coef.den());
        }
        IntRow row;
        row.sense = sense;
        row.rhs = (rhs * Rational(scale)).num();
        for (const auto& [var, coef] : coefficients) {
            row.terms.emplace_back(var.value, (coef * Rational(scale)).num());
        }
        const std::size_t k = row.terms.size();
        row.rest_min.assign(k + 1, 0);
        row.rest_max.assign(k + 1, 0);
        for (std::size_t j = k; j-- > 0;) {
            auto [var, a] = row.terms[j];
            std::int64_t x = checked_mul(a, domains_[var].first);
            std::int64_t y = checked_mul(a, domains_[var].second);
            row.rest_min[j] = checked_add(row.rest_min[j + 1], std::min(x, y));
            row.rest_max[j] = checked_add(row.rest_max[j + 1], std::max(x, y));
        }
        const std::size_t index = rows_.size();
        for (std::size_t j = 0; j < k; ++j) {
            touches_[row.terms[j].first].push_back({index, j});
        }
        if (k == 0 && !row_ok(row.sense, 0, 0, row.rhs)) {
            infeasible_at_root_ = true;
        }
        rows_.push_back(std::move(row));
        partial_.push_back(0);
    }

    void add_predicate(const TypedConstraint& constraint)
    {
        auto vars = referenced_variables(constraint);
        if (vars.empty()) {
            if (!satisfies(constraint, assignment_)) {
                infeasible_at_root_ = true;
            }
            return;
        }
        predicates_at_[vars.back().value].push_back(&constraint);
    }

    /// Returns points covered (== cardinality unless the visitor stopped early).
    std::uint64_t run(const std::function<bool(const Assignment&)>& visit)
    {
        visit_ = &visit;
        covered_ = 0;
        stopped_ = false;
        if (infeasible_at_root_ || suffix_[0] == 0) {
            return suffix_[0];
        }
        dfs(0);
        return covered_;
    }

private:
    struct Touch {
        std::size_t row;
        std::size_t position;
    };

    void dfs(std::size_t d)
    {
        if (d == domains_.size()) {
            covered_ += 1;
            if (!(*visit_)(assignment_)) {
                stopped_ = true;
            }
            return;
        }
        const VarId var{static_cast<std::uint32_t>(d)};
        for (std::int64_t v = domains_[d].first; v <= domains_[d].second && !stopped_; ++v) {
            assignment_.set(var, Rational(v));
            bool ok = true;
            for (const Touch& t : touches_[d]) {
                const IntRow& row = rows_[t.row];
                partial_[t.row] += row.terms[t.position].second * v;
            }
            for (const Touch& t : touches_[d]) {
                const IntRow& row = rows_[t.row];
                std::int64_t p = partial_[t.row];
                if (!row_ok(row.sense, p + row.rest_min[t.position + 1], p + row.rest_max[t.position + 1], row.rhs)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                for (const TypedConstraint* c : predicates_at_[d]) {
                    if (!satisfies(*c, assignment_)) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) {
                dfs(d + 1);
            } else {
                covered_ += suffix_[d + 1];
            }
            for (const Touch& t : touches_[d]) {
                partial_[t.row] -= rows_[t.row].terms[t.position].second * v;
            }
        }
    }

    std::vector<std::pair<std::int64_t, std::int64_t>> domains_;
    Assignment assignment_;
    std::vector<std::uint64_t> suffix_;
    std::vector<IntRow> rows_;
    std::vector<std::int64_t> partial_;
    std::vector<std::vector<Touch>> touches_;
    std::vector<std::vector<const TypedConstraint*>> predicates_at_;
    bool infeasible_at_root_ = false;
    const std::function<bool(const Assignment&)>* visit_ = nullptr;
    std::uint64_t covered_ = 0;
    bool stopped_ = false;
};

template <class Vars>
std::vector<std::pair<std::int64_t, std::int64_t>> integer_domains(const Vars& variables, const EnumerationLimits& limits)
{
    std::vector<std::pair<std::int64_t, std::int64_t>> domains;
    std::uint64_t total = 1;
    for (const auto& v : variables) {
        if (v.kind == VarKind::Continuous) {
            throw Error(ErrorCode::ContinuousUnsupported,
                "enumeration needs integer or binary variables; '" + v.name + "' is continuous", v.name);
        }
        if (!v.lower || !v.upper) {
            throw Error(ErrorCode::TooLarge, "variable '" + v.name + "' has an infinite domain", v.name);
        }
        std::int64_t lo = v.lower->ceil();
        std::int64_t hi = v.upper->floor();
        domains.emplace_back(lo, hi);
        std::uint64_t size = hi >= lo ? static_cast<std::uint64_t>(hi - lo) + 1 : 0;
        total = saturating_mul(total, size);
    }
    if (total > limits.max_points) {
        throw Error(ErrorCode::TooLarge,
            "box of " + std::to_string(total) + " points exceeds the limit of " + std::to_string(limits.max_points));
    }
    return domains;
}

/// Linear families whose meaning is exactly one row.
std::optional<std::pair<LinearExpr, std::pair<Sense, Rational>>> exact_row(const TypedConstraint& c)
{
    using Out = std::optional<std::pair<LinearExpr, std::pair<Sense, Rational>>>;
    return std::visit(
        overloaded{
            [](const Bound& b) -> Out {
                if (const auto* k = std::get_if<Rational>(&b.bound)) {
                    return std::pair{b.expr, std::pair{b.sense, *k}};
                }
                return std::pair{b.expr - std::get<LinearExpr>(b.bound), std::pair{b.sense, Rational(0)}};
            },
            [](const Balance& b) -> Out { return std::pair{b.lhs - b.rhs, std::pair{Sense::EQ, Rational(0)}}; },
            [](const VariableFix& f) -> Out { return std::pair{LinearExpr(f.var), std::pair{Sense::EQ, f.value}}; },
            [](const RawRow& r) -> Out { return std::pair{r.expr, std::pair{r.sense, r.rhs}}; },
            [](const SetPacking& s) -> Out {
                return std::pair{sum_of(s.members, s.weights ? std::span<const Rational>(*s.weights) : std::span<const Rational>{}),
                    std::pair{Sense::LE, Rational(s.rhs)}};
            },
            [](const SetPartitioning& s) -> Out {
                return std::pair{sum_of(s.members, s.weights ? std::span<const Rational>(*s.weights) : std::span<const Rational>{}),
                    std::pair{Sense::EQ, Rational(s.rhs)}};
            },
            [](const SetCovering& s) -> Out {
                return std::pair{sum_of(s.members, s.weights ? std::span<const Rational>(*s.weights) : std::span<const Rational>{}),
                    std::pair{Sense::GE, Rational(s.rhs)}};
            },
            [](const auto&) -> Out { return std::nullopt; },
        },
        c.body);
}

void build_model_search(Search& search, const Model& model)
{
    for (const auto& c : model.constraints()) {
        if (auto row = exact_row(c)) {
            const auto& [expr, rest] = *row;
            search.add_row(expr.terms(), rest.first, rest.second - expr.constant());
        } else {
            search.add_predicate(c);
        }
    }
}

OptimumReport optimize(Search& search, const Objective& objective)
{
    OptimumReport report;
    const bool maximize = objective.direction == Direction::Maximize;
    report.points_enumerated = search.run([&](const Assignment& a) {
        Rational value = evaluate(objective.expr, a);
        if (report.status == SolveStatus::Infeasible ||
            (maximize ? value > report.objective_value : value < report.objective_value)) {
            report.status = SolveStatus::Optimal;
            report.objective_value = value;
            report.witness = a;
        }
        return true;
    });
    return report;
}

} // namespace

OptimumReport solve_by_enumeration(const Model& model, const EnumerationLimits& limits)
{
    if (has_errors(validate(model))) {
        throw Error(ErrorCode::ValidationFailed, "model does not validate");
    }
    Search search(integer_domains(model.variables(), limits), model.variables().size());
    build_model_search(search, model);
    return optimize(search, model.objective().value_or(Objective{}));
}

OptimumReport solve_canonical(const CanonicalForm& form, const EnumerationLimits& limits)
{
    Search search(integer_domains(form.variables, limits), form.variables.size());
    for (const auto& row : form.rows) {
        search.add_row(row.coefficients, row.sense, row.rhs);
    }
    return optimize(search, form.objective);
}

std::uint64_t enumerate_feasible(const Model& model, const EnumerationLimits& limits,
    const std::function<bool(const Assignment&)>& visitor)
{
    if (has_errors(validate(model))) {
        throw Error(ErrorCode::ValidationFailed, "model does not validate");
    }
    Search search(integer_domains(model.variables(), limits), model.variables().size());
    build_model_search(search, model);
    search.run(visitor);
    return search.cardinality();
}

} // namespace omtk
