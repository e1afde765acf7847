#pragma once

#include "omtk/lowering.hpp"
#include "omtk/model.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace omtk {

using Scale = std::map<std::string, std::int64_t>;

/// Constraint-set label ("set4") to the tree leaves its constraints classify to.
using NodeMap = std::map<std::string, std::set<int>>;

struct ScaleParam {
    std::string name;
    std::int64_t minimum = 1;
    std::int64_t default_value = 1;
    std::int64_t maximum = 1;
};

struct CaseStudy {
    std::string id;
    std::string description;
    std::vector<ScaleParam> scale;
    /// Sets of the original model that have no counterpart here.
    std::vector<std::string> omitted_sets;
};

/// chemical-scheduling, supply-chain-planning, course-timetabling, vrptw-multitrip.
const std::vector<CaseStudy>& list_cases();

/// Throws UnknownCase.
const CaseStudy& find_case(std::string_view id);

Scale default_scale(std::string_view id);

/// Missing entries take their defaults. Throws UnknownCase, BadParams (unknown
/// key or below minimum) or ScaleTooLarge.
Model build_case(std::string_view id, const Scale& scale = {});

/// Throws UnknownCase.
const NodeMap& expected_node_map(std::string_view id);

/// The set label is everything before the first '/' of a constraint label.
std::string set_label(std::string_view constraint_label);

/// classify() of every constraint, grouped by set label.
NodeMap observed_node_map(const Model& model);

/// Lowering options the case is meant to be compiled with (course-timetabling
/// keeps its implications in weak form).
LowerOptions default_lower_options(std::string_view id);

nlohmann::json node_map_to_json(std::string_view id);

} // namespace omtk
