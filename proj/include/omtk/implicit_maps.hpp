#pragma once

#include "omtk/model.hpp"
#include "omtk/omt_tree.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace omtk {

/// A named expansion from a requirement an end user would state ("visit every
/// city once and come home") to typed constraints on known tree leaves.
struct ImplicitMapping {
    std::string id;
    std::string description;
    std::vector<SlotSpec> parameters;
    std::vector<int> target_nodes;
};

struct ExpandParams {
    std::int64_t n = 0;
    /// n x n arc variable names; diagonal entries (and absent arcs) are empty.
    /// When empty, binaries "<prefix>_<i>_<j>" are created.
    std::vector<std::vector<std::string>> arcs;
    std::string prefix = "x";
};

struct ExpansionResult {
    /// Ids continue after the model's variables, in this order.
    std::vector<Variable> new_variables;
    std::vector<TypedConstraint> constraints;
};

inline constexpr std::int64_t kMaxTourCities = 12;

/// Stable order: atsp-tour, routing-flow-balance.
const std::vector<ImplicitMapping>& list_mappings();

/// Throws UnknownMapping, BadParams or TooLarge.
const ImplicitMapping& find_mapping(std::string_view id);

/// Throws UnknownMapping, BadParams, TooLarge, or UnknownVariable for arc names
/// the model does not declare.
ExpansionResult expand(const Model& model, std::string_view mapping_id, const ExpandParams& params);

/// Adds the new variables, then the constraints (tagged with their classified node).
std::vector<ConstraintId> apply_expansion(Model& model, const ExpansionResult& expansion);

} // namespace omtk
