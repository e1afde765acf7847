#pragma once

#include "omtk/error.hpp"
#include "omtk/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace omtk {

struct VarId {
    std::uint32_t value = 0;
    friend constexpr auto operator<=>(VarId, VarId) = default;
};

struct ConstraintId {
    std::uint32_t value = 0;
    friend constexpr auto operator<=>(ConstraintId, ConstraintId) = default;
};

enum class VarKind { Binary, Integer, Continuous };
enum class Sense { LE, EQ, GE };
enum class Direction { Minimize, Maximize };

std::string_view to_string(VarKind kind);
std::string_view to_string(Sense sense);
std::optional<VarKind> parse_var_kind(std::string_view text);
std::optional<Sense> parse_sense(std::string_view text);

/// Reserved prefix for auxiliary binaries introduced by lowering.
inline constexpr std::string_view kAuxPrefix = "__aux";

struct Variable {
    VarId id;
    std::string name;
    VarKind kind = VarKind::Continuous;
    std::optional<Rational> lower; // nullopt: -inf
    std::optional<Rational> upper; // nullopt: +inf

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Sparse affine expression: constant + sum of coefficient * variable.
/// Zero coefficients are never stored.
class LinearExpr {
public:
    LinearExpr() = default;
    LinearExpr(VarId var) { add_term(var, Rational(1)); }       // NOLINT(implicit)
    LinearExpr(Rational constant) : constant_(constant) {}      // NOLINT(implicit)

    void add_term(VarId var, const Rational& coef);
    void set_constant(const Rational& value) { constant_ = value; }

    [[nodiscard]] const std::map<VarId, Rational>& terms() const noexcept { return terms_; }
    [[nodiscard]] const Rational& constant() const noexcept { return constant_; }
    [[nodiscard]] Rational coefficient(VarId var) const;
    [[nodiscard]] bool is_constant() const noexcept { return terms_.empty(); }

    LinearExpr& operator+=(const LinearExpr& rhs);
    LinearExpr& operator-=(const LinearExpr& rhs);
    LinearExpr& operator*=(const Rational& factor);

    friend LinearExpr operator+(LinearExpr lhs, const LinearExpr& rhs) { return lhs += rhs; }
    friend LinearExpr operator-(LinearExpr lhs, const LinearExpr& rhs) { return lhs -= rhs; }
    friend LinearExpr operator-(LinearExpr e) { return e *= Rational(-1); }
    friend LinearExpr operator*(const Rational& factor, LinearExpr e) { return e *= factor; }

    friend bool operator==(const LinearExpr&, const LinearExpr&) = default;

private:
    std::map<VarId, Rational> terms_;
    Rational constant_;
};

inline LinearExpr operator*(const Rational& coef, VarId var)
{
    LinearExpr e;
    e.add_term(var, coef);
    return e;
}

/// Sum of the listed variables, optionally weighted.
LinearExpr sum_of(std::span<const VarId> vars, std::span<const Rational> weights = {});

using BoundSpec = std::variant<Rational, LinearExpr>;

enum class OffBehavior { ForceZero, Free };
enum class BalanceFlavor { Interperiod, Assignment, Flow, Blending, Initial };
enum class SetKind { Packing, Partitioning, Covering };

std::string_view to_string(OffBehavior off);
std::string_view to_string(BalanceFlavor flavor);
std::optional<OffBehavior> parse_off_behavior(std::string_view text);
std::optional<BalanceFlavor> parse_balance_flavor(std::string_view text);

/// Type I: supply (LE) or demand (GE) limit on an expression.
struct Bound {
    LinearExpr expr;
    Sense sense = Sense::LE;
    BoundSpec bound = Rational(0);
    friend bool operator==(const Bound&, const Bound&) = default;
};

/// A bound that applies only while a binary indicator is 1. With ForceZero the
/// expression must also vanish while the indicator is 0.
struct ConditionalBound {
    LinearExpr expr;
    Sense sense = Sense::LE;
    BoundSpec bound = Rational(0);
    VarId indicator;
    OffBehavior off_behavior = OffBehavior::ForceZero;
    friend bool operator==(const ConditionalBound&, const ConditionalBound&) = default;
};

/// Type II: lhs = rhs. The flavor only steers classification.
struct Balance {
    LinearExpr lhs;
    LinearExpr rhs;
    BalanceFlavor flavor = BalanceFlavor::Assignment;
    friend bool operator==(const Balance&, const Balance&) = default;
};

/// Choose at most / exactly / at least `rhs` (weighted) out of the members.
template <SetKind K>
struct SetConstraint {
    static constexpr SetKind kind = K;
    std::vector<VarId> members;
    std::optional<std::vector<Rational>> weights;
    std::int64_t rhs = 1;

    [[nodiscard]] Rational weight(std::size_t i) const { return weights ? (*weights)[i] : Rational(1); }
    friend bool operator==(const SetConstraint&, const SetConstraint&) = default;
};

using SetPacking = SetConstraint<SetKind::Packing>;
using SetPartitioning = SetConstraint<SetKind::Partitioning>;
using SetCovering = SetConstraint<SetKind::Covering>;

struct VariableFix {
    VarId var;
    Rational value;
    friend bool operator==(const VariableFix&, const VariableFix&) = default;
};

/// All antecedents 1 implies all consequents 1.
struct IfThen {
    std::vector<VarId> antecedents;
    std::vector<VarId> consequents;
    friend bool operator==(const IfThen&, const IfThen&) = default;
};

struct Alternative {
    LinearExpr expr;
    Sense sense = Sense::LE;
    Rational rhs;
    friend bool operator==(const Alternative&, const Alternative&) = default;
};

/// At least one alternative holds.
struct EitherOr {
    std::vector<Alternative> alternatives;
    friend bool operator==(const EitherOr&, const EitherOr&) = default;
};

/// Untyped row, accepted with a warning.
struct RawRow {
    LinearExpr expr;
    Sense sense = Sense::LE;
    Rational rhs;
    friend bool operator==(const RawRow&, const RawRow&) = default;
};

using ConstraintBody = std::variant<Bound, ConditionalBound, Balance, SetPacking, SetPartitioning, SetCovering,
    VariableFix, IfThen, EitherOr, RawRow>;

enum class Family { Bound, ConditionalBound, Balance, SetPacking, SetPartitioning, SetCovering, VariableFix, IfThen, EitherOr, RawRow };

inline constexpr std::size_t kFamilyCount = std::variant_size_v<ConstraintBody>;

std::string_view to_string(Family family);
std::optional<Family> parse_family(std::string_view text);

struct TypedConstraint {
    ConstraintBody body;
    std::string label;
    std::optional<int> omt_node;

    [[nodiscard]] Family family() const noexcept { return static_cast<Family>(body.index()); }
    friend bool operator==(const TypedConstraint&, const TypedConstraint&) = default;
};

/// Every variable id a constraint mentions, ascending and deduplicated.
std::vector<VarId> referenced_variables(const TypedConstraint& constraint);

struct Objective {
    Direction direction = Direction::Minimize;
    LinearExpr expr;
    friend bool operator==(const Objective&, const Objective&) = default;
};

/// Dense, possibly partial, map from variable id to value.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(std::size_t variable_count) : values_(variable_count), present_(variable_count, false) {}

    void set(VarId var, const Rational& value);
    void erase(VarId var);
    [[nodiscard]] bool contains(VarId var) const noexcept { return var.value < present_.size() && present_[var.value]; }
    /// Throws Error{MissingValue}.
    [[nodiscard]] const Rational& at(VarId var) const;
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::vector<Rational> values_;
    std::vector<bool> present_;
};

/// Throws Error{MissingValue} when a referenced variable has no value.
Rational evaluate(const LinearExpr& expr, const Assignment& assignment);

/// Closed interval with optional (infinite) ends.
struct Range {
    std::optional<Rational> lo;
    std::optional<Rational> hi;
};

/// Tightest interval of `expr` over the variables' boxes (interval arithmetic).
Range expr_range(const LinearExpr& expr, std::span<const Variable> variables);

enum class Severity { Error, Warning };

struct SubjectRef {
    enum class Kind { Model, Variable, Constraint };
    Kind kind = Kind::Model;
    std::uint32_t index = 0;
    friend bool operator==(const SubjectRef&, const SubjectRef&) = default;
};

/// Diagnostic codes (closed set):
///   errors   DuplicateName InvalidBounds InvalidName UnknownVariable NonBinaryLiteral
///            EmptyMemberList DuplicateMember InvalidSense InvalidRhs WeightMismatch
///            TooFewAlternatives InvalidLabel
///   warnings RawRow BigMUnderivable
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SubjectRef subject;
    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

class Model {
public:
    explicit Model(std::string name = {}) : name_(std::move(name)) {}

    /// Throws DuplicateName, InvalidName or InvalidBounds.
    VarId add_variable(std::string name, VarKind kind, std::optional<Rational> lower, std::optional<Rational> upper);
    VarId add_binary(std::string name) { return add_variable(std::move(name), VarKind::Binary, Rational(0), Rational(1)); }
    VarId add_integer(std::string name, std::int64_t lower, std::int64_t upper)
    {
        return add_variable(std::move(name), VarKind::Integer, Rational(lower), Rational(upper));
    }

    /// Throws the first error diagnostic of the constraint (UnknownVariable,
    /// NonBinaryLiteral, EmptyMemberList, ...) as an Error.
    ConstraintId add_constraint(TypedConstraint constraint);

    /// Appends without checks; parsers use this and report through validate().
    ConstraintId append_unchecked(TypedConstraint constraint);
    VarId append_variable_unchecked(Variable variable);

    void set_objective(Objective objective) { objective_ = std::move(objective); }
    void clear_objective() { objective_.reset(); }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }
    [[nodiscard]] const std::vector<Variable>& variables() const noexcept { return variables_; }
    [[nodiscard]] const Variable& variable(VarId id) const { return variables_.at(id.value); }
    [[nodiscard]] bool has_variable(VarId id) const noexcept { return id.value < variables_.size(); }
    [[nodiscard]] std::optional<VarId> find_variable(std::string_view name) const;
    [[nodiscard]] const std::vector<TypedConstraint>& constraints() const noexcept { return constraints_; }
    [[nodiscard]] const TypedConstraint& constraint(ConstraintId id) const { return constraints_.at(id.value); }
    [[nodiscard]] const std::optional<Objective>& objective() const noexcept { return objective_; }

    friend bool operator==(const Model& a, const Model& b)
    {
        return a.name_ == b.name_ && a.variables_ == b.variables_ && a.constraints_ == b.constraints_ &&
               a.objective_ == b.objective_;
    }

private:
    std::string name_;
    std::vector<Variable> variables_;
    std::vector<TypedConstraint> constraints_;
    std::optional<Objective> objective_;
    std::unordered_map<std::string, VarId> by_name_;
};

/// Deterministic diagnostics, ordered by subject insertion order (variables first).
std::vector<Diagnostic> validate(const Model& model);

/// Diagnostics for one constraint against a model (used by add_constraint and validate).
std::vector<Diagnostic> check_constraint(const Model& model, const TypedConstraint& constraint, ConstraintId id);

bool has_errors(std::span<const Diagnostic> diagnostics);

/// Error code raised for a diagnostic code (ValidationFailed when there is no closer match).
ErrorCode error_code_for(std::string_view diagnostic_code);

/// Throws the first error-severity diagnostic as an Error.
void raise_first_error(std::span<const Diagnostic> diagnostics);

/// True iff every big-M and zero-forcing constant that lowering needs for this
/// constraint is finite over the variables' boxes.
bool big_m_derivable(const TypedConstraint& constraint, std::span<const Variable> variables);

/// Variable names must match [A-Za-z_][A-Za-z0-9_.]* so every emitter can print them verbatim.
bool is_valid_variable_name(std::string_view name);

} // namespace omtk
