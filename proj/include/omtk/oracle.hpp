#pragma once

#include "omtk/lowering.hpp"
#include "omtk/model.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace omtk {

/// Direct (non-linearized) meaning of a typed constraint.
/// Throws MissingValue if the assignment does not cover the constraint.
bool satisfies(const TypedConstraint& constraint, const Assignment& assignment);
bool satisfies(const Model& model, const Assignment& assignment);

/// Finite sample values per variable.
struct SampleBox {
    std::vector<std::pair<VarId, std::vector<Rational>>> domains;

    /// Product of domain sizes, saturating at UINT64_MAX.
    [[nodiscard]] std::uint64_t cardinality() const;
};

struct BoxOptions {
    /// Evenly spaced interior samples added to {lower, midpoint, upper} for continuous variables.
    int continuous_interior = 0;
};

/// Integer and binary variables contribute every integer in range; continuous
/// ones their bounds and midpoint. An infinite end is replaced by samples at
/// distance 1 and 10 from the finite end (or -10..10 when both are infinite).
SampleBox make_box(std::span<const Variable> variables, std::span<const VarId> vars, const BoxOptions& options = {});

struct Mismatch {
    Assignment assignment;
    bool semantic = false;
    bool lowered = false;
};

struct EquivalenceReport {
    std::uint64_t points_checked = 0;
    std::uint64_t mismatch_count = 0;
    std::vector<Mismatch> mismatches; // first max_reported mismatches

    [[nodiscard]] bool equivalent() const noexcept { return mismatch_count == 0; }
};

struct CheckLimits {
    std::uint64_t cap = 1'000'000; // points x 2^auxiliaries
    std::size_t max_reported = 100;
};

/// For every box point compare satisfies() with "some 0/1 setting of the
/// auxiliaries satisfies every lowered row". Throws BoxTooLarge.
EquivalenceReport check_equivalence(const TypedConstraint& constraint, const LoweredConstraint& lowered,
    VarId first_aux, const SampleBox& box, const CheckLimits& limits = {});

struct ConstraintCheck {
    ConstraintId id;
    std::string label;
    EquivalenceReport report;
};

struct ModelCheckReport {
    std::vector<ConstraintCheck> constraints;
    [[nodiscard]] std::uint64_t points_checked() const;
    [[nodiscard]] std::uint64_t mismatch_count() const;
};

/// check_equivalence for every constraint of a model over boxes built from its variable bounds.
ModelCheckReport check_model(const Model& model, const LowerOptions& lower = {}, const CheckLimits& limits = {},
    const BoxOptions& box = {});

enum class SolveStatus { Optimal, Infeasible };
std::string_view to_string(SolveStatus status);

struct OptimumReport {
    SolveStatus status = SolveStatus::Infeasible;
    Rational objective_value;
    Assignment witness;
    std::uint64_t points_enumerated = 0;
};

struct EnumerationLimits {
    std::uint64_t max_points = 10'000'000;
};

/// Exact optimum by exhaustive enumeration with constraint short-circuiting.
/// Ties go to the lexicographically smallest witness in variable order.
/// Throws ContinuousUnsupported or TooLarge.
OptimumReport solve_by_enumeration(const Model& model, const EnumerationLimits& limits = {});

/// Same over a lowered form (auxiliaries are enumerated like any binary).
OptimumReport solve_canonical(const CanonicalForm& form, const EnumerationLimits& limits = {});

/// Visit every feasible point in lexicographic order until the visitor returns false.
/// Returns the box cardinality.
std::uint64_t enumerate_feasible(const Model& model, const EnumerationLimits& limits,
    const std::function<bool(const Assignment&)>& visitor);

} // namespace omtk
