#include "omtk/model.hpp"

#include "omtk/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>

namespace omtk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string lower_case(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string_view to_string(VarKind kind)
{
    switch (kind) {
    case VarKind::Binary: return "binary";
    case VarKind::Integer: return "integer";
    case VarKind::Continuous: return "continuous";
    }
    return "?";
}

std::string_view to_string(Sense sense)
{
    switch (sense) {
    case Sense::LE: return "LE";
    case Sense::EQ: return "EQ";
    case Sense::GE: return "GE";
    }
    return "?";
}

std::optional<VarKind> parse_var_kind(std::string_view text)
{
    if (text == "binary") return VarKind::Binary;
    if (text == "integer") return VarKind::Integer;
    if (text == "continuous") return VarKind::Continuous;
    return std::nullopt;
}

std::optional<Sense> parse_sense(std::string_view text)
{
    if (text == "LE") return Sense::LE;
    if (text == "EQ") return Sense::EQ;
    if (text == "GE") return Sense::GE;
    return std::nullopt;
}

std::string_view to_string(OffBehavior off)
{
    return off == OffBehavior::ForceZero ? "ForceZero" : "Free";
}

std::string_view to_string(BalanceFlavor flavor)
{
    switch (flavor) {
    case BalanceFlavor::Interperiod: return "interperiod";
    case BalanceFlavor::Assignment: return "assignment";
    case BalanceFlavor::Flow: return "flow";
    case BalanceFlavor::Blending: return "blending";
    case BalanceFlavor::Initial: return "initial";
    }
    return "?";
}

std::optional<OffBehavior> parse_off_behavior(std::string_view text)
{
    if (text == "ForceZero") return OffBehavior::ForceZero;
    if (text == "Free") return OffBehavior::Free;
    return std::nullopt;
}

std::optional<BalanceFlavor> parse_balance_flavor(std::string_view text)
{
    for (auto f : {BalanceFlavor::Interperiod, BalanceFlavor::Assignment, BalanceFlavor::Flow, BalanceFlavor::Blending,
             BalanceFlavor::Initial}) {
        if (to_string(f) == text) {
            return f;
        }
    }
    return std::nullopt;
}

namespace {
constexpr std::array<std::string_view, kFamilyCount> kFamilyNames = {"Bound", "ConditionalBound", "Balance",
    "SetPacking", "SetPartitioning", "SetCovering", "VariableFix", "IfThen", "EitherOr", "RawRow"};
}

std::string_view to_string(Family family)
{
    return kFamilyNames.at(static_cast<std::size_t>(family));
}

std::optional<Family> parse_family(std::string_view text)
{
    for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
        if (kFamilyNames[i] == text) {
            return static_cast<Family>(i);
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// LinearExpr

void LinearExpr::add_term(VarId var, const Rational& coef)
{
    if (coef.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(var, coef);
    if (!inserted) {
        it->second += coef;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

Rational LinearExpr::coefficient(VarId var) const
{
    auto it = terms_.find(var);
    return it == terms_.end() ? Rational(0) : it->second;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& rhs)
{
    for (const auto& [var, coef] : rhs.terms_) {
        add_term(var, coef);
    }
    constant_ += rhs.constant_;
    return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& rhs)
{
    for (const auto& [var, coef] : rhs.terms_) {
        add_term(var, -coef);
    }
    constant_ -= rhs.constant_;
    return *this;
}

LinearExpr& LinearExpr::operator*=(const Rational& factor)
{
    if (factor.is_zero()) {
        terms_.clear();
        constant_ = Rational(0);
        return *this;
    }
    for (auto& [var, coef] : terms_) {
        coef *= factor;
    }
    constant_ *= factor;
    return *this;
}

LinearExpr sum_of(std::span<const VarId> vars, std::span<const Rational> weights)
{
    LinearExpr e;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        e.add_term(vars[i], weights.empty() ? Rational(1) : weights[i]);
    }
    return e;
}

// ---------------------------------------------------------------------------
// referenced variables

namespace {

void collect(const LinearExpr& e, std::vector<VarId>& out)
{
    for (const auto& [var, coef] : e.terms()) {
        out.push_back(var);
    }
}

void collect(const BoundSpec& b, std::vector<VarId>& out)
{
    if (const auto* e = std::get_if<LinearExpr>(&b)) {
        collect(*e, out);
    }
}

} // namespace

std::vector<VarId> referenced_variables(const TypedConstraint& constraint)
{
    std::vector<VarId> out;
    std::visit(overloaded{
                   [&](const Bound& c) {
                       collect(c.expr, out);
                       collect(c.bound, out);
                   },
                   [&](const ConditionalBound& c) {
                       collect(c.expr, out);
                       collect(c.bound, out);
                       out.push_back(c.indicator);
                   },
                   [&](const Balance& c) {
                       collect(c.lhs, out);
                       collect(c.rhs, out);
                   },
                   [&](const VariableFix& c) { out.push_back(c.var); },
                   [&](const IfThen& c) {
                       out.insert(out.end(), c.antecedents.begin(), c.antecedents.end());
                       out.insert(out.end(), c.consequents.begin(), c.consequents.end());
                   },
                   [&](const EitherOr& c) {
                       for (const auto& alt : c.alternatives) {
                           collect(alt.expr, out);
                       }
                   },
                   [&](const RawRow& c) { collect(c.expr, out); },
                   [&](const auto& set) { out.insert(out.end(), set.members.begin(), set.members.end()); },
               },
        constraint.body);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Assignment / evaluation

void Assignment::set(VarId var, const Rational& value)
{
    if (var.value >= values_.size()) {
        values_.resize(var.value + 1);
        present_.resize(var.value + 1, false);
    }
    values_[var.value] = value;
    present_[var.value] = true;
}

void Assignment::erase(VarId var)
{
    if (var.value < present_.size()) {
        present_[var.value] = false;
        values_[var.value] = Rational(0);
    }
}

const Rational& Assignment::at(VarId var) const
{
    if (!contains(var)) {
        throw Error(ErrorCode::MissingValue, "no value for variable #" + std::to_string(var.value),
            "#" + std::to_string(var.value));
    }
    return values_[var.value];
}

Rational evaluate(const LinearExpr& expr, const Assignment& assignment)
{
    Rational total = expr.constant();
    for (const auto& [var, coef] : expr.terms()) {
        total += coef * assignment.at(var);
    }
    return total;
}

Range expr_range(const LinearExpr& expr, std::span<const Variable> variables)
{
    Range r{expr.constant(), expr.constant()};
    for (const auto& [var, coef] : expr.terms()) {
        const Variable& v = variables[var.value];
        const auto& for_lo = coef.sign() > 0 ? v.lower : v.upper;
        const auto& for_hi = coef.sign() > 0 ? v.upper : v.lower;
        if (r.lo) {
            r.lo = for_lo ? std::optional<Rational>(*r.lo + coef * *for_lo) : std::nullopt;
        }
        if (r.hi) {
            r.hi = for_hi ? std::optional<Rational>(*r.hi + coef * *for_hi) : std::nullopt;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Model

bool is_valid_variable_name(std::string_view name)
{
    if (name.empty() || name.size() > 255) {
        return false;
    }
    auto head = static_cast<unsigned char>(name.front());
    if (!(std::isalpha(head) || head == '_')) {
        return false;
    }
    for (char ch : name) {
        auto c = static_cast<unsigned char>(ch);
        if (!(std::isalnum(c) || c == '_' || c == '.')) {
            return false;
        }
    }
    // Section keywords of the LP dialect cannot double as names.
    static const std::set<std::string, std::less<>> reserved = {"end", "bounds", "bound", "binaries", "binary",
        "bin", "generals", "general", "gen", "free", "inf", "infinity", "st", "s.t.", "subject", "maximize",
        "minimize", "maximum", "minimum", "max", "min"};
    return !reserved.contains(lower_case(name));
}

VarId Model::add_variable(std::string name, VarKind kind, std::optional<Rational> lower, std::optional<Rational> upper)
{
    if (!is_valid_variable_name(name) || name.starts_with(kAuxPrefix)) {
        throw Error(ErrorCode::InvalidName, "invalid variable name '" + name + "'", name);
    }
    if (by_name_.contains(name)) {
        throw Error(ErrorCode::DuplicateName, "variable '" + name + "' already declared", name);
    }
    if (lower && upper && *lower > *upper) {
        throw Error(ErrorCode::InvalidBounds, "lower bound exceeds upper bound for '" + name + "'", name);
    }
    if (kind == VarKind::Binary && (lower != Rational(0) || upper != Rational(1))) {
        throw Error(ErrorCode::InvalidBounds, "binary variable '" + name + "' must have bounds [0,1]", name);
    }
    return append_variable_unchecked(Variable{VarId{}, std::move(name), kind, lower, upper});
}

VarId Model::append_variable_unchecked(Variable variable)
{
    VarId id{static_cast<std::uint32_t>(variables_.size())};
    variable.id = id;
    by_name_.try_emplace(variable.name, id);
    variables_.push_back(std::move(variable));
    return id;
}

std::optional<VarId> Model::find_variable(std::string_view name) const
{
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) {
        return std::nullopt;
    }
    return it->second;
}

ConstraintId Model::add_constraint(TypedConstraint constraint)
{
    ConstraintId id{static_cast<std::uint32_t>(constraints_.size())};
    raise_first_error(check_constraint(*this, constraint, id));
    return append_unchecked(std::move(constraint));
}

ConstraintId Model::append_unchecked(TypedConstraint constraint)
{
    ConstraintId id{static_cast<std::uint32_t>(constraints_.size())};
    constraints_.push_back(std::move(constraint));
    return id;
}

// ---------------------------------------------------------------------------
// validation

namespace {

class Checker {
public:
    Checker(const Model& model, ConstraintId id, std::vector<Diagnostic>& out)
        : model_(model), subject_{SubjectRef::Kind::Constraint, id.value}, out_(out)
    {
    }

    void error(std::string code, std::string message) { emit(Severity::Error, std::move(code), std::move(message)); }
    void warning(std::string code, std::string message) { emit(Severity::Warning, std::move(code), std::move(message)); }

    bool known(VarId v)
    {
        if (model_.has_variable(v)) {
            return true;
        }
        error("UnknownVariable", "reference to unknown variable #" + std::to_string(v.value));
        return false;
    }

    void expr(const LinearExpr& e)
    {
        for (const auto& [var, coef] : e.terms()) {
            known(var);
        }
    }

    void bound(const BoundSpec& b)
    {
        if (const auto* e = std::get_if<LinearExpr>(&b)) {
            expr(*e);
        }
    }

    void binary(VarId v, std::string_view role)
    {
        if (known(v) && model_.variable(v).kind != VarKind::Binary) {
            error("NonBinaryLiteral",
                std::string(role) + " '" + model_.variable(v).name + "' must be a binary variable");
        }
    }

    void binary_list(const std::vector<VarId>& vars, std::string_view role)
    {
        if (vars.empty()) {
            error("EmptyMemberList", std::string(role) + " list is empty");
            return;
        }
        std::set<VarId> seen;
        for (VarId v : vars) {
            binary(v, role);
            if (!seen.insert(v).second) {
                error("DuplicateMember", std::string(role) + " list repeats variable #" + std::to_string(v.value));
            }
        }
    }

    void inequality(Sense s, std::string_view what)
    {
        if (s == Sense::EQ) {
            error("InvalidSense", std::string(what) + " sense must be LE or GE");
        }
    }

private:
    void emit(Severity severity, std::string code, std::string message)
    {
        out_.push_back(Diagnostic{severity, std::move(code), std::move(message), subject_});
    }

    const Model& model_;
    SubjectRef subject_;
    std::vector<Diagnostic>& out_;
};

bool all_known(const Model& model, const TypedConstraint& c)
{
    auto vars = referenced_variables(c);
    return std::all_of(vars.begin(), vars.end(), [&](VarId v) { return model.has_variable(v); });
}

} // namespace

std::vector<Diagnostic> check_constraint(const Model& model, const TypedConstraint& constraint, ConstraintId id)
{
    std::vector<Diagnostic> out;
    Checker check(model, id, out);
    if (constraint.label.find_first_of("\r\n") != std::string::npos) {
        check.error("InvalidLabel", "labels must be single-line");
    }
    std::visit(overloaded{
                   [&](const Bound& c) {
                       check.expr(c.expr);
                       check.bound(c.bound);
                       check.inequality(c.sense, "bound");
                   },
                   [&](const ConditionalBound& c) {
                       check.expr(c.expr);
                       check.bound(c.bound);
                       check.binary(c.indicator, "indicator");
                       check.inequality(c.sense, "conditional bound");
                   },
                   [&](const Balance& c) {
                       check.expr(c.lhs);
                       check.expr(c.rhs);
                   },
                   [&](const VariableFix& c) { check.known(c.var); },
                   [&](const IfThen& c) {
                       check.binary_list(c.antecedents, "antecedent");
                       check.binary_list(c.consequents, "consequent");
                   },
                   [&](const EitherOr& c) {
                       if (c.alternatives.size() < 2) {
                           check.error("TooFewAlternatives", "either-or needs at least two alternatives");
                       }
                       for (const auto& alt : c.alternatives) {
                           check.expr(alt.expr);
                           check.inequality(alt.sense, "alternative");
                       }
                   },
                   [&](const RawRow& c) {
                       check.expr(c.expr);
                       check.warning("RawRow", "untyped row bypasses the constraint typology");
                   },
                   [&](const auto& set) {
                       check.binary_list(set.members, "member");
                       if (set.weights && set.weights->size() != set.members.size()) {
                           check.error("WeightMismatch", "weight count differs from member count");
                       }
                       if (set.rhs < 1) {
                           check.error("InvalidRhs", "set constraint right-hand side must be a positive integer");
                       }
                   },
               },
        constraint.body);

    bool unknown = std::any_of(out.begin(), out.end(), [](const Diagnostic& d) { return d.code == "UnknownVariable"; });
    if (!unknown && all_known(model, constraint) && !big_m_derivable(constraint, model.variables())) {
        check.warning("BigMUnderivable", "a big-M constant for this constraint needs finite variable bounds");
    }
    return out;
}

std::vector<Diagnostic> validate(const Model& model)
{
    std::vector<Diagnostic> out;
    std::set<std::string, std::less<>> names;
    for (const auto& v : model.variables()) {
        SubjectRef subject{SubjectRef::Kind::Variable, v.id.value};
        if (!is_valid_variable_name(v.name) || v.name.starts_with(kAuxPrefix)) {
            out.push_back({Severity::Error, "InvalidName", "invalid variable name '" + v.name + "'", subject});
        }
        if (!names.insert(v.name).second) {
            out.push_back({Severity::Error, "DuplicateName", "variable '" + v.name + "' declared twice", subject});
        }
        bool inverted = v.lower && v.upper && *v.lower > *v.upper;
        bool bad_binary = v.kind == VarKind::Binary && (v.lower != Rational(0) || v.upper != Rational(1));
        if (inverted || bad_binary) {
            out.push_back({Severity::Error, "InvalidBounds", "inconsistent bounds for '" + v.name + "'", subject});
        }
    }
    for (std::size_t i = 0; i < model.constraints().size(); ++i) {
        auto diags = check_constraint(model, model.constraints()[i], ConstraintId{static_cast<std::uint32_t>(i)});
        out.insert(out.end(), diags.begin(), diags.end());
    }
    if (model.objective()) {
        for (const auto& [var, coef] : model.objective()->expr.terms()) {
            if (!model.has_variable(var)) {
                out.push_back({Severity::Error, "UnknownVariable",
                    "objective references unknown variable #" + std::to_string(var.value), SubjectRef{}});
            }
        }
    }
    return out;
}

ErrorCode error_code_for(std::string_view diagnostic_code)
{
    static const std::map<std::string_view, ErrorCode> codes = {
        {"DuplicateName", ErrorCode::DuplicateName},
        {"InvalidBounds", ErrorCode::InvalidBounds},
        {"InvalidName", ErrorCode::InvalidName},
        {"UnknownVariable", ErrorCode::UnknownVariable},
        {"NonBinaryLiteral", ErrorCode::NonBinaryLiteral},
        {"EmptyMemberList", ErrorCode::EmptyMemberList},
    };
    auto it = codes.find(diagnostic_code);
    return it == codes.end() ? ErrorCode::ValidationFailed : it->second;
}

void raise_first_error(std::span<const Diagnostic> diagnostics)
{
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::Error) {
            std::string subject = (d.subject.kind == SubjectRef::Kind::Variable ? "variable #" : "constraint #") +
                                  std::to_string(d.subject.index);
            throw Error(error_code_for(d.code), d.code + ": " + d.message, subject);
        }
    }
}

bool has_errors(std::span<const Diagnostic> diagnostics)
{
    return std::any_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

bool big_m_derivable(const TypedConstraint& constraint, std::span<const Variable> variables)
{
    auto range = [&](const LinearExpr& e) { return expr_range(e, variables); };
    return std::visit(overloaded{
                          [&](const ConditionalBound& c) {
                              Range r = range(c.expr);
                              if (const auto* b = std::get_if<LinearExpr>(&c.bound)) {
                                  Range g = range(c.expr - *b);
                                  bool relax_ok = c.sense == Sense::LE ? g.hi.has_value() : g.lo.has_value();
                                  bool zero_ok = c.off_behavior == OffBehavior::Free || (r.lo && r.hi);
                                  return relax_ok && zero_ok;
                              }
                              if (c.off_behavior == OffBehavior::ForceZero) {
                                  // The main row already pins the sense side to zero; the other side needs a finite end.
                                  return c.sense == Sense::LE ? r.lo.has_value() : r.hi.has_value();
                              }
                              return c.sense == Sense::LE ? r.hi.has_value() : r.lo.has_value();
                          },
                          [&](const EitherOr& c) {
                              return std::all_of(c.alternatives.begin(), c.alternatives.end(), [&](const Alternative& a) {
                                  Range r = range(a.expr);
                                  return a.sense == Sense::LE ? r.hi.has_value() : r.lo.has_value();
                              });
                          },
                          [](const auto&) { return true; },
                      },
        constraint.body);
}

} // namespace omtk
