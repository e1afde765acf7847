#include "omtk/reports.hpp"

#include "omtk/model_json.hpp"

namespace omtk {

using nlohmann::json;

json assignment_to_json(const Assignment& assignment, std::span<const Variable> variables)
{
    json out = json::object();
    for (const auto& v : variables) {
        if (assignment.contains(v.id)) {
            out[v.name] = to_json(assignment.at(v.id));
        }
    }
    return out;
}

json to_json(const OptimumReport& report, std::span<const Variable> variables)
{
    const bool optimal = report.status == SolveStatus::Optimal;
    return {{"status", to_string(report.status)}, {"value", optimal ? to_json(report.objective_value) : json(nullptr)},
        {"witness", optimal ? assignment_to_json(report.witness, variables) : json::object()},
        {"points_enumerated", report.points_enumerated}};
}

json to_json(const ModelCheckReport& report, std::span<const Variable> variables)
{
    json constraints = json::array();
    for (const auto& c : report.constraints) {
        json mismatches = json::array();
        for (const auto& m : c.report.mismatches) {
            mismatches.push_back({{"assignment", assignment_to_json(m.assignment, variables)}, {"semantic", m.semantic},
                {"lowered", m.lowered}});
        }
        constraints.push_back({{"id", c.id.value}, {"label", c.label}, {"points_checked", c.report.points_checked},
            {"mismatch_count", c.report.mismatch_count}, {"mismatches", mismatches}});
    }
    return {{"points_checked", report.points_checked()}, {"mismatch_count", report.mismatch_count()},
        {"equivalent", report.mismatch_count() == 0}, {"constraints", constraints}};
}

json error_envelope(std::string_view code, std::string_view message, std::string_view subject)
{
    return {{"code", code}, {"message", message}, {"subject", subject}};
}

} // namespace omtk
