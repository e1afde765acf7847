#pragma once

#include "omtk/oracle.hpp"

#include "json.hpp"

#include <span>

namespace omtk {

/// Values keyed by variable name; variables without a value are left out.
nlohmann::json assignment_to_json(const Assignment& assignment, std::span<const Variable> variables);

/// {"status", "value" (null when infeasible), "witness", "points_enumerated"}
nlohmann::json to_json(const OptimumReport& report, std::span<const Variable> variables);

/// {"points_checked", "mismatch_count", "equivalent", "constraints": [...]}
nlohmann::json to_json(const ModelCheckReport& report, std::span<const Variable> variables);

/// {"code", "message", "subject"}
nlohmann::json error_envelope(std::string_view code, std::string_view message, std::string_view subject);

} // namespace omtk
