#pragma once

#include "omtk/model.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace omtk {

struct CanonicalVariable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    std::optional<Rational> lower;
    std::optional<Rational> upper;
    friend bool operator==(const CanonicalVariable&, const CanonicalVariable&) = default;
};

/// coefficients . x  (sense)  rhs, tagged with the typed constraint it came from.
struct CanonicalRow {
    std::map<VarId, Rational> coefficients;
    Sense sense = Sense::LE;
    Rational rhs;
    ConstraintId source;
    std::optional<int> omt_node;
    std::string label;
    friend bool operator==(const CanonicalRow&, const CanonicalRow&) = default;
};

/// Model variables first, then auxiliary binaries named __aux<k>.
struct CanonicalForm {
    std::string name;
    std::vector<CanonicalVariable> variables;
    std::vector<CanonicalRow> rows;
    Objective objective;
    friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

enum class IfThenStrength { Weak, Strong };
enum class ConditionalStyle { Derived };

std::string_view to_string(IfThenStrength strength);
std::optional<IfThenStrength> parse_if_then_strength(std::string_view text);

struct LowerOptions {
    IfThenStrength if_then_strength = IfThenStrength::Strong;
    ConditionalStyle conditional_style = ConditionalStyle::Derived;
    /// Added to every derived relaxation constant (clamped at 0). Anything other
    /// than 0 yields an unsound or looser lowering; it exists to probe tightness.
    Rational big_m_adjustment{0};
};

struct LoweredConstraint {
    std::vector<CanonicalRow> rows;
    std::vector<CanonicalVariable> auxiliaries; // ids first_aux, first_aux+1, ...
};

/// LE: max(0, sup(expr) - rhs); GE: max(0, rhs - inf(expr)); over the variable
/// boxes. Throws UnboundedVariable when the needed end is infinite.
Rational derive_big_m(const LinearExpr& expr, Sense sense, const Rational& rhs, std::span<const Variable> variables);

/// Lower one typed constraint. `variables` are the model variables; auxiliaries
/// get ids starting at `first_aux` (which must be >= variables.size()).
LoweredConstraint lower_constraint(const TypedConstraint& constraint, ConstraintId source,
    std::span<const Variable> variables, const LowerOptions& options, VarId first_aux);

inline LoweredConstraint lower_constraint(const TypedConstraint& constraint, std::span<const Variable> variables,
    const LowerOptions& options = {})
{
    return lower_constraint(constraint, ConstraintId{0}, variables, options,
        VarId{static_cast<std::uint32_t>(variables.size())});
}

/// Throws ValidationFailed, or UnboundedVariable naming the offending constraint.
CanonicalForm lower_model(const Model& model, const LowerOptions& options = {});

bool row_holds(const CanonicalRow& row, const Assignment& assignment);
Rational row_activity(const CanonicalRow& row, const Assignment& assignment);

/// Number of leading variables that are not lowering auxiliaries.
std::size_t model_variable_count(const CanonicalForm& form);

} // namespace omtk
