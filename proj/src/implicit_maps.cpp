#include "omtk/implicit_maps.hpp"

#include "omtk/error.hpp"

#include <algorithm>
#include <bit>

namespace omtk {

const std::vector<ImplicitMapping>& list_mappings()
{
    static const std::vector<ImplicitMapping> mappings = {
        {"atsp-tour",
            "visit each of n cities exactly once and return to the home city: one arc out of and one arc into every "
            "city, and no closed tour on a proper subset of cities",
            {{"n", SlotKind::PositiveInteger}, {"arcs", SlotKind::VariableList}},
            {17, 18}},
        {"routing-flow-balance",
            "a visited location has a visit before it and a visit after it: arcs into a node equal arcs out of it",
            {{"n", SlotKind::PositiveInteger}, {"arcs", SlotKind::VariableList}},
            {14}},
    };
    return mappings;
}

const ImplicitMapping& find_mapping(std::string_view id)
{
    for (const auto& m : list_mappings()) {
        if (m.id == id) {
            return m;
        }
    }
    throw Error(ErrorCode::UnknownMapping, "no implicit mapping named '" + std::string(id) + "'", std::string(id));
}

namespace {

/// arc[i][j] as a variable id, or nullopt when absent.
using ArcMatrix = std::vector<std::vector<std::optional<VarId>>>;

ArcMatrix resolve_arcs(const Model& model, const ExpandParams& params, ExpansionResult& out, bool all_required)
{
    const auto n = static_cast<std::size_t>(params.n);
    ArcMatrix arcs(n, std::vector<std::optional<VarId>>(n));
    if (params.arcs.empty()) {
        auto next = static_cast<std::uint32_t>(model.variables().size());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    continue;
                }
                std::string name = params.prefix + "_" + std::to_string(i) + "_" + std::to_string(j);
                if (model.find_variable(name) || !is_valid_variable_name(name)) {
                    throw Error(ErrorCode::BadParams, "cannot create arc variable '" + name + "'", name);
                }
                Variable v{VarId{next++}, name, VarKind::Binary, Rational(0), Rational(1)};
                arcs[i][j] = v.id;
                out.new_variables.push_back(std::move(v));
            }
        }
        return arcs;
    }
    if (params.arcs.size() != n) {
        throw Error(ErrorCode::BadParams, "arc matrix must have n rows", "arcs");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (params.arcs[i].size() != n) {
            throw Error(ErrorCode::BadParams, "arc matrix must be n x n", "arcs");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const std::string& name = params.arcs[i][j];
            if (i == j) {
                if (!name.empty()) {
                    throw Error(ErrorCode::BadParams, "diagonal arc entries must be empty", name);
                }
                continue;
            }
            if (name.empty()) {
                if (all_required) {
                    throw Error(ErrorCode::BadParams,
                        "arc " + std::to_string(i) + "->" + std::to_string(j) + " is missing", "arcs");
                }
                continue;
            }
            auto id = model.find_variable(name);
            if (!id) {
                throw Error(ErrorCode::UnknownVariable, "unknown arc variable '" + name + "'", name);
            }
            if (model.variable(*id).kind != VarKind::Binary) {
                throw Error(ErrorCode::NonBinaryLiteral, "arc variable '" + name + "' must be binary", name);
            }
            arcs[i][j] = *id;
        }
    }
    return arcs;
}

void check_n(const ExpandParams& params, std::int64_t minimum)
{
    if (params.n < minimum) {
        throw Error(ErrorCode::BadParams, "n must be at least " + std::to_string(minimum), "n");
    }
    if (params.n > kMaxTourCities) {
        throw Error(ErrorCode::TooLarge, "n = " + std::to_string(params.n) + " exceeds " + std::to_string(kMaxTourCities), "n");
    }
}

TypedConstraint tagged(ConstraintBody body, std::string label)
{
    TypedConstraint c{std::move(body), std::move(label), std::nullopt};
    c.omt_node = classify(c);
    return c;
}

ExpansionResult expand_atsp(const Model& model, const ExpandParams& params)
{
    check_n(params, 3);
    ExpansionResult out;
    const ArcMatrix arcs = resolve_arcs(model, params, out, true);
    const auto n = static_cast<std::size_t>(params.n);
    for (std::size_t i = 0; i < n; ++i) {
        SetPartitioning leave;
        SetPartitioning enter;
        for (std::size_t j = 0; j < n; ++j) {
            if (arcs[i][j]) {
                leave.members.push_back(*arcs[i][j]);
            }
            if (arcs[j][i]) {
                enter.members.push_back(*arcs[j][i]);
            }
        }
        out.constraints.push_back(tagged(std::move(leave), "atsp-tour/out/" + std::to_string(i)));
        out.constraints.push_back(tagged(std::move(enter), "atsp-tour/in/" + std::to_string(i)));
    }
    const std::uint32_t full = (1u << n) - 1;
    for (std::uint32_t s = 1; s < full; ++s) {
        auto size = std::popcount(s);
        if (size < 2) {
            continue;
        }
        SetCovering cut;
        std::string label = "atsp-tour/cut/";
        for (std::size_t i = 0; i < n; ++i) {
            if (!(s >> i & 1u)) {
                continue;
            }
            label += (label.back() == '/' ? "" : ".") + std::to_string(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (!(s >> j & 1u) && arcs[i][j]) {
                    cut.members.push_back(*arcs[i][j]);
                }
            }
        }
        std::sort(cut.members.begin(), cut.members.end());
        out.constraints.push_back(tagged(std::move(cut), std::move(label)));
    }
    return out;
}

ExpansionResult expand_flow(const Model& model, const ExpandParams& params)
{
    check_n(params, 2);
    ExpansionResult out;
    const ArcMatrix arcs = resolve_arcs(model, params, out, false);
    const auto n = static_cast<std::size_t>(params.n);
    for (std::size_t i = 0; i < n; ++i) {
        Balance b;
        b.flavor = BalanceFlavor::Flow;
        for (std::size_t j = 0; j < n; ++j) {
            if (arcs[i][j]) {
                b.lhs.add_term(*arcs[i][j], Rational(1));
            }
            if (arcs[j][i]) {
                b.rhs.add_term(*arcs[j][i], Rational(1));
            }
        }
        if (b.lhs.is_constant() && b.rhs.is_constant()) {
            continue;
        }
        out.constraints.push_back(tagged(std::move(b), "routing-flow-balance/" + std::to_string(i)));
    }
    return out;
}

} // namespace

ExpansionResult expand(const Model& model, std::string_view mapping_id, const ExpandParams& params)
{
    const ImplicitMapping& mapping = find_mapping(mapping_id);
    if (mapping.id == "atsp-tour") {
        return expand_atsp(model, params);
    }
    return expand_flow(model, params);
}

std::vector<ConstraintId> apply_expansion(Model& model, const ExpansionResult& expansion)
{
    Model next = model;
    for (const auto& v : expansion.new_variables) {
        next.add_variable(v.name, v.kind, v.lower, v.upper);
    }
    std::vector<ConstraintId> ids;
    for (const auto& c : expansion.constraints) {
        ids.push_back(next.add_constraint(c));
    }
    model = std::move(next);
    return ids;
}

} // namespace omtk
