// Acceptance suite: one PASS/FAIL line per criterion.

#include "omtk/corpus.hpp"
#include "omtk/emit.hpp"
#include "omtk/implicit_maps.hpp"
#include "omtk/lowering.hpp"
#include "omtk/model_json.hpp"
#include "omtk/omt_tree.hpp"
#include "omtk/oracle.hpp"

#include "../support/random_models.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

using namespace omtk;
using omtk::testing::Gen;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Timer {
public:
    [[nodiscard]] double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt_seconds(double s)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    return buf;
}

// ---------------------------------------------------------------------------

std::uint64_t box_points(const Model& m)
{
    const auto vars = referenced_variables(m.constraints().front());
    return make_box(m.variables(), vars, BoxOptions{1}).cardinality();
}

/// Copy of `m` with integer ranges grown one step at a time, round robin,
/// while the constraint's box stays within `limit` points.
Model widen(const Model& m, std::uint64_t limit, Gen& g)
{
    std::vector<Variable> vars = m.variables();
    const auto referenced = referenced_variables(m.constraints().front());
    auto rebuild = [&] {
        Model out(m.name());
        for (const auto& v : vars) {
            out.append_variable_unchecked(v);
        }
        for (const auto& c : m.constraints()) {
            out.append_unchecked(c);
        }
        return out;
    };
    bool grew = true;
    while (grew) {
        grew = false;
        for (VarId id : referenced) {
            Variable& v = vars[id.value];
            if (v.kind != VarKind::Integer) {
                continue;
            }
            const bool up = g.coin();
            (up ? v.upper : v.lower) = *(up ? v.upper : v.lower) + Rational(up ? 1 : -1);
            if (box_points(rebuild()) <= limit) {
                grew = true;
            } else {
                (up ? v.upper : v.lower) = *(up ? v.upper : v.lower) - Rational(up ? 1 : -1);
            }
        }
    }
    return rebuild();
}

/// A family instance whose box is as close to `limit` points as the family allows.
Model wide_instance(Family family, std::uint64_t limit, Gen& g)
{
    switch (family) {
    case Family::SetPacking:
    case Family::SetPartitioning:
    case Family::SetCovering: {
        Model m("wide-set");
        std::vector<VarId> members;
        for (int i = 0; i < 14; ++i) {
            members.push_back(m.add_binary("b" + std::to_string(i)));
        }
        const auto rhs = g.uniform(1, 4);
        if (family == Family::SetPacking) {
            m.add_constraint({SetPacking{members, std::nullopt, rhs}, "set", std::nullopt});
        } else if (family == Family::SetPartitioning) {
            m.add_constraint({SetPartitioning{members, std::nullopt, rhs}, "set", std::nullopt});
        } else {
            m.add_constraint({SetCovering{members, std::nullopt, rhs}, "set", std::nullopt});
        }
        return m;
    }
    case Family::IfThen: {
        Model m("wide-ifthen");
        const auto k = g.uniform(1, 13);
        IfThen c;
        for (int i = 0; i < 14; ++i) {
            (i < k ? c.antecedents : c.consequents).push_back(m.add_binary("b" + std::to_string(i)));
        }
        m.add_constraint({c, "ifthen", std::nullopt});
        return m;
    }
    default: return widen(testing::random_family_instance(family, g), limit, g);
    }
}

Outcome lowering_equivalence()
{
    constexpr int kPerFamily = 60;
    constexpr int kWidePerFamily = 10;
    constexpr std::uint64_t kMaxPoints = 20'000;
    Timer timer;
    Gen g(20240611);
    std::uint64_t points = 0;
    std::uint64_t instances = 0;
    std::uint64_t largest = 0;
    std::ostringstream failures;
    bool pass = true;
    CheckLimits limits;
    limits.cap = kMaxPoints << 16;
    for (std::size_t f = 0; f < kFamilyCount; ++f) {
        const auto family = static_cast<Family>(f);
        // Small random boxes first, then boxes grown towards the point limit.
        for (int i = 0; i < kPerFamily; ++i) {
            Model m = i < kPerFamily - kWidePerFamily ? testing::random_family_instance(family, g)
                                                      : wide_instance(family, kMaxPoints, g);
            for (auto strength : {IfThenStrength::Strong, IfThenStrength::Weak}) {
                auto report = check_model(m, LowerOptions{strength}, limits, BoxOptions{1});
                const auto checked = report.points_checked();
                if (checked > kMaxPoints) {
                    pass = false;
                    failures << " box too large for " << to_string(family);
                }
                if (report.mismatch_count() != 0) {
                    pass = false;
                    failures << " " << to_string(family) << "#" << i;
                }
                points += checked;
                largest = std::max(largest, checked);
            }
            ++instances;
        }
    }
    const double t = timer.seconds();
    pass = pass && t < 60.0;
    return {pass, std::to_string(instances) + " instances over " + std::to_string(kFamilyCount) + " families, " +
                      std::to_string(points) + " points, largest box " + std::to_string(largest) + ", " + fmt_seconds(t) +
                      failures.str()};
}

// ---------------------------------------------------------------------------

bool row_set_holds(const std::vector<CanonicalRow>& rows, const Assignment& a)
{
    return std::all_of(rows.begin(), rows.end(), [&](const CanonicalRow& r) { return row_holds(r, a); });
}

Outcome if_then_weak_vs_strong()
{
    std::ostringstream detail;
    bool pass = true;

    // (a) the X -> (Y and Z) instance over all eight binary points
    Model triple("x-implies-y-and-z");
    VarId X = triple.add_binary("X");
    VarId Y = triple.add_binary("Y");
    VarId Z = triple.add_binary("Z");
    TypedConstraint c{IfThen{{X}, {Y, Z}}, "", std::nullopt};
    auto weak = lower_constraint(c, triple.variables(), LowerOptions{IfThenStrength::Weak}).rows;
    auto strong = lower_constraint(c, triple.variables(), LowerOptions{IfThenStrength::Strong}).rows;
    int agree = 0;
    for (int mask = 0; mask < 8; ++mask) {
        Assignment a(3);
        a.set(X, Rational(mask & 1));
        a.set(Y, Rational(mask >> 1 & 1));
        a.set(Z, Rational(mask >> 2 & 1));
        bool truth = !(mask & 1) || ((mask >> 1 & 1) && (mask >> 2 & 1));
        bool w = row_set_holds(weak, a);
        bool s = row_set_holds(strong, a);
        agree += (w == s && s == truth) ? 1 : 0;
    }
    pass = pass && agree == 8 && weak.size() == 1 && strong.size() == 2;
    detail << "X->(Y,Z) agrees on " << agree << "/8";

    // (a) randomized k antecedents, m consequents, k + m <= 12
    Gen g(77);
    int instances = 0;
    std::uint64_t points = 0;
    bool random_ok = true;
    for (int i = 0; i < 40; ++i) {
        const auto k = g.uniform(1, 6);
        const auto m = g.uniform(1, 12 - k);
        Model model("random-if-then");
        std::vector<VarId> vars;
        for (std::int64_t v = 0; v < k + m; ++v) {
            vars.push_back(model.add_binary("v" + std::to_string(v)));
        }
        TypedConstraint rc{IfThen{{vars.begin(), vars.begin() + k}, {vars.begin() + k, vars.end()}}, "", std::nullopt};
        auto rw = lower_constraint(rc, model.variables(), LowerOptions{IfThenStrength::Weak}).rows;
        auto rs = lower_constraint(rc, model.variables(), LowerOptions{IfThenStrength::Strong}).rows;
        const std::uint32_t n = static_cast<std::uint32_t>(k + m);
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            Assignment a(n);
            bool all_a = true;
            bool all_c = true;
            for (std::uint32_t v = 0; v < n; ++v) {
                bool bit = mask >> v & 1u;
                a.set(vars[v], Rational(bit ? 1 : 0));
                (v < k ? all_a : all_c) = (v < k ? all_a : all_c) && bit;
            }
            bool truth = !all_a || all_c;
            if (row_set_holds(rw, a) != truth || row_set_holds(rs, a) != truth) {
                random_ok = false;
            }
            ++points;
        }
        ++instances;
    }
    pass = pass && random_ok;
    detail << "; " << instances << " random instances, " << points << " points " << (random_ok ? "agree" : "DISAGREE");

    // (b) fractional witness
    Assignment frac(3);
    frac.set(X, Rational(1, 2));
    frac.set(Y, Rational(1));
    frac.set(Z, Rational(0));
    bool weak_holds = row_set_holds(weak, frac);
    bool strong_holds = row_set_holds(strong, frac);
    pass = pass && weak_holds && !strong_holds;
    detail << "; (1/2,1,0) weak " << (weak_holds ? "holds" : "violated") << ", strong "
           << (strong_holds ? "holds" : "violated");
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------

/// Largest relaxation constant lowering derives for the instance.
Rational largest_m(const TypedConstraint& c, const Model& m)
{
    Rational best(0);
    if (const auto* cb = std::get_if<ConditionalBound>(&c.body)) {
        if (const auto* k = std::get_if<Rational>(&cb->bound)) {
            best = derive_big_m(cb->expr, cb->sense, *k, m.variables());
        } else {
            best = derive_big_m(cb->expr - std::get<LinearExpr>(cb->bound), cb->sense, Rational(0), m.variables());
        }
    } else if (const auto* e = std::get_if<EitherOr>(&c.body)) {
        for (const auto& a : e->alternatives) {
            best = std::max(best, derive_big_m(a.expr, a.sense, a.rhs, m.variables()));
        }
    }
    return best;
}

Outcome big_m_tightness()
{
    Gen g(4242);
    int instances = 0;
    int positive = 0;
    int tight = 0;
    bool pass = true;
    std::ostringstream failures;
    for (int i = 0; i < 26; ++i) {
        Model m("tightness");
        if (i % 2 == 0) {
            VarId y = m.add_binary("y");
            std::vector<VarId> vars;
            for (int k = 0; k < 3; ++k) {
                std::int64_t lo = g.uniform(-3, 1);
                vars.push_back(m.add_integer("n" + std::to_string(k), lo, lo + g.uniform(1, 4)));
            }
            ConditionalBound c;
            c.expr = testing::random_expr(g, vars, 2, false, false);
            c.sense = testing::random_inequality(g);
            c.indicator = y;
            c.off_behavior = OffBehavior::Free;
            if (g.coin(0.4)) {
                c.bound = testing::random_expr(g, vars, 1);
            } else {
                c.bound = testing::interior_rhs(g, c.expr, m);
            }
            m.add_constraint({c, "conditional", std::nullopt});
        } else {
            // Alternatives over disjoint variables, each satisfiable on its own.
            EitherOr e;
            for (int k = 0; k < 2; ++k) {
                std::vector<VarId> vars;
                for (int j = 0; j < 2; ++j) {
                    std::int64_t lo = g.uniform(-3, 1);
                    vars.push_back(m.add_integer("a" + std::to_string(k) + "_" + std::to_string(j), lo, lo + g.uniform(1, 4)));
                }
                Alternative a;
                a.expr = testing::random_expr(g, vars, 2, false, false);
                a.sense = testing::random_inequality(g);
                a.rhs = testing::interior_rhs(g, a.expr, m);
                e.alternatives.push_back(std::move(a));
            }
            m.add_constraint({e, "either-or", std::nullopt});
        }
        const TypedConstraint& c = m.constraints().front();
        const auto derived = check_model(m);
        LowerOptions shrunk;
        shrunk.big_m_adjustment = Rational(-1);
        const auto reduced = check_model(m, shrunk);
        const bool m_positive = largest_m(c, m).sign() > 0;
        ++instances;
        positive += m_positive ? 1 : 0;
        if (derived.mismatch_count() != 0) {
            pass = false;
            failures << " derived-M mismatch #" << i;
        }
        if (m_positive) {
            if (reduced.mismatch_count() > 0) {
                ++tight;
            } else {
                pass = false;
                failures << " M-1 still sound #" << i;
            }
        }
        if (derived.points_checked() > 10'000) {
            pass = false;
            failures << " box over 10^4 #" << i;
        }
    }
    pass = pass && instances >= 25;
    return {pass, std::to_string(instances) + " instances; derived M sound on all; M-1 breaks " + std::to_string(tight) +
                      "/" + std::to_string(positive) + " with M>0" + failures.str()};
}

// ---------------------------------------------------------------------------

Outcome corpus_node_maps()
{
    Timer timer;
    bool pass = true;
    std::ostringstream detail;
    for (const auto& c : list_cases()) {
        Model m = build_case(c.id);
        bool tags = std::all_of(m.constraints().begin(), m.constraints().end(),
            [](const TypedConstraint& tc) { return tc.omt_node == classify(tc); });
        bool ok = tags && observed_node_map(m) == expected_node_map(c.id);
        pass = pass && ok;
        std::set<int> nodes;
        for (const auto& [label, ids] : expected_node_map(c.id)) {
            nodes.insert(ids.begin(), ids.end());
        }
        detail << c.id << (ok ? " ok {" : " MISMATCH {");
        bool first = true;
        for (int n : nodes) {
            detail << (first ? "" : ",") << n;
            first = false;
        }
        detail << "}; ";
    }
    const double t = timer.seconds();
    pass = pass && t < 5.0;
    detail << fmt_seconds(t);
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------

/// Cheapest tour over all (n-1)! orders of cities 1..n-1 after city 0.
Rational brute_force_tour(const std::vector<std::vector<std::int64_t>>& d)
{
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n - 1);
    std::iota(order.begin(), order.end(), 1);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    do {
        std::int64_t cost = d[0][order.front()] + d[order.back()][0];
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            cost += d[order[i]][order[i + 1]];
        }
        best = std::min(best, cost);
    } while (std::next_permutation(order.begin(), order.end()));
    return Rational(best);
}

/// True iff the arc values describe one circuit through all n cities.
bool is_hamiltonian(const Assignment& a, const std::vector<std::vector<VarId>>& arc, std::size_t n)
{
    std::vector<int> next(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && a.at(arc[i][j]) == Rational(1)) {
                if (next[i] != -1) {
                    return false;
                }
                next[i] = static_cast<int>(j);
            }
        }
        if (next[i] == -1) {
            return false;
        }
    }
    std::size_t at = 0;
    std::vector<bool> seen(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        if (seen[at]) {
            return false;
        }
        seen[at] = true;
        at = static_cast<std::size_t>(next[at]);
    }
    return at == 0;
}

Outcome atsp_mapping()
{
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t n : {4u, 5u, 6u}) {
        Timer timer;
        std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, 0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) {
                    d[i][j] = static_cast<std::int64_t>((7 * i + 3 * j + i * j) % 11 + 1);
                }
            }
        }
        Model m("atsp-" + std::to_string(n));
        ExpandParams params;
        params.n = static_cast<std::int64_t>(n);
        apply_expansion(m, expand(m, "atsp-tour", params));
        std::vector<std::vector<VarId>> arc(n, std::vector<VarId>(n));
        LinearExpr cost;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) {
                    arc[i][j] = *m.find_variable("x_" + std::to_string(i) + "_" + std::to_string(j));
                    cost.add_term(arc[i][j], Rational(d[i][j]));
                }
            }
        }
        m.set_objective(Objective{Direction::Minimize, cost});
        EnumerationLimits limits{std::uint64_t{1} << 40};
        OptimumReport report = solve_by_enumeration(m, limits);
        Rational expected = brute_force_tour(d);
        std::uint64_t feasible = 0;
        bool circuits = true;
        enumerate_feasible(m, limits, [&](const Assignment& a) {
            ++feasible;
            circuits = circuits && is_hamiltonian(a, arc, n);
            return true;
        });
        std::uint64_t tours = 1;
        for (std::size_t k = 2; k < n; ++k) {
            tours *= k;
        }
        const double t = timer.seconds();
        bool ok = report.status == SolveStatus::Optimal && report.objective_value == expected && circuits &&
                  feasible == tours && t < 120.0;
        pass = pass && ok;
        detail << "n=" << n << (ok ? " ok" : " FAIL") << " value " << report.objective_value << " (brute force "
               << expected << "), " << feasible << "/" << tours << " feasible points are circuits, " << fmt_seconds(t)
               << "; ";
    }
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------

Outcome emitter_round_trips()
{
    std::vector<std::pair<Model, LowerOptions>> models;
    for (const auto& c : list_cases()) {
        models.emplace_back(build_case(c.id), default_lower_options(c.id));
    }
    Gen g(9001);
    for (int i = 0; i < 100; ++i) {
        models.emplace_back(testing::random_model(g, i), LowerOptions{g.coin() ? IfThenStrength::Weak : IfThenStrength::Strong});
    }
    int lp_ok = 0;
    int mps_ok = 0;
    int json_ok = 0;
    int deterministic = 0;
    for (const auto& [model, options] : models) {
        CanonicalForm form = lower_model(model, options);
        const std::string lp = emit_lp(form);
        const std::string mps = emit_mps(form);
        const std::string doc = write_model(model);
        lp_ok += parse_canonical(lp) == form ? 1 : 0;
        mps_ok += parse_canonical(mps) == form ? 1 : 0;
        json_ok += (parse_model(doc) == model && write_model(parse_model(doc)) == doc) ? 1 : 0;
        CanonicalForm again = lower_model(model, options);
        deterministic += (emit_lp(again) == lp && emit_mps(again) == mps && write_model(model) == doc) ? 1 : 0;
    }
    // Corpus builders are deterministic too.
    bool builds = std::all_of(list_cases().begin(), list_cases().end(),
        [](const CaseStudy& c) { return write_model(build_case(c.id)) == write_model(build_case(c.id)); });
    const int total = static_cast<int>(models.size());
    bool pass = lp_ok == total && mps_ok == total && json_ok == total && deterministic == total && builds;
    return {pass, std::to_string(total) + " models (4 corpus + 100 random): LP " + std::to_string(lp_ok) + ", MPS " +
                      std::to_string(mps_ok) + ", ModelDocument " + std::to_string(json_ok) + ", byte-deterministic " +
                      std::to_string(deterministic)};
}

// ---------------------------------------------------------------------------

Outcome corpus_solvability()
{
    bool pass = true;
    std::ostringstream detail;
    Gen g(31337);
    for (const auto& c : list_cases()) {
        Timer timer;
        Model m = build_case(c.id);
        EnumerationLimits limits{std::numeric_limits<std::uint64_t>::max()};
        OptimumReport direct = solve_by_enumeration(m, limits);
        const double t = timer.seconds();

        // Lowered rows, shuffled and scaled by positive factors, enumerated afresh.
        CanonicalForm form = lower_model(m, default_lower_options(c.id));
        g.shuffle(form.rows);
        for (auto& row : form.rows) {
            Rational factor(g.uniform(1, 4), g.uniform(1, 3));
            for (auto& [var, coef] : row.coefficients) {
                coef *= factor;
            }
            row.rhs *= factor;
        }
        OptimumReport shuffled = solve_canonical(form, limits);
        bool same_witness = true;
        for (const auto& v : m.variables()) {
            same_witness = same_witness && shuffled.witness.at(v.id) == direct.witness.at(v.id);
        }
        bool ok = direct.status == SolveStatus::Optimal && shuffled.status == SolveStatus::Optimal &&
                  direct.objective_value == shuffled.objective_value && same_witness && satisfies(m, direct.witness) &&
                  t < 60.0;
        pass = pass && ok;
        detail << c.id << (ok ? " ok " : " FAIL ") << direct.objective_value << " in " << fmt_seconds(t) << "; ";
    }
    return {pass, detail.str()};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {"lowering-semantics equivalence", lowering_equivalence},
        {"if-then weak vs strong", if_then_weak_vs_strong},
        {"big-M tightness", big_m_tightness},
        {"corpus node-map fidelity", corpus_node_maps},
        {"ATSP implicit mapping", atsp_mapping},
        {"emitter round-trips", emitter_round_trips},
        {"corpus solvability", corpus_solvability},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].name << ": " << o.detail << "\n"
                  << std::flush;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
