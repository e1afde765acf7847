#include "omtk/model_json.hpp"

#include "omtk/error.hpp"

namespace omtk {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what, const std::string& subject = {})
{
    throw Error(ErrorCode::MalformedDocument, what, subject);
}

const json& field(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object()) {
        malformed(where + ": expected an object", where);
    }
    auto it = j.find(key);
    if (it == j.end()) {
        malformed(where + ": missing field '" + key + "'", where);
    }
    return *it;
}

std::string string_field(const json& j, const char* key, const std::string& where)
{
    const json& v = field(j, key, where);
    if (!v.is_string()) {
        malformed(where + ": field '" + key + "' must be a string", where);
    }
    return v.get<std::string>();
}

json optional_rational(const std::optional<Rational>& r)
{
    return r ? to_json(*r) : json(nullptr);
}

std::optional<Rational> optional_rational_from(const json& j)
{
    if (j.is_null()) {
        return std::nullopt;
    }
    return rational_from_json(j);
}

VarId var_from_json(const json& j, const Model& model, const std::string& where)
{
    if (!j.is_string()) {
        malformed(where + ": variable references must be names", where);
    }
    auto name = j.get<std::string>();
    auto id = model.find_variable(name);
    if (!id) {
        throw Error(ErrorCode::UnknownVariable, where + ": unknown variable '" + name + "'", name);
    }
    return *id;
}

json var_list(const std::vector<VarId>& vars, const Model& model)
{
    json out = json::array();
    for (VarId v : vars) {
        out.push_back(model.variable(v).name);
    }
    return out;
}

std::vector<VarId> var_list_from(const json& j, const Model& model, const std::string& where)
{
    if (!j.is_array()) {
        malformed(where + ": expected a list of variable names", where);
    }
    std::vector<VarId> out;
    for (const auto& e : j) {
        out.push_back(var_from_json(e, model, where));
    }
    return out;
}

Sense sense_from(const json& j, const std::string& where)
{
    auto s = j.is_string() ? parse_sense(j.get<std::string>()) : std::nullopt;
    if (!s) {
        malformed(where + ": sense must be LE, EQ or GE", where);
    }
    return *s;
}

json bound_to_json(const BoundSpec& bound, const Model& model)
{
    if (const auto* r = std::get_if<Rational>(&bound)) {
        return {{"constant", to_json(*r)}};
    }
    return {{"expr", to_json(std::get<LinearExpr>(bound), model)}};
}

BoundSpec bound_from_json(const json& j, const Model& model, const std::string& where)
{
    if (j.is_object() && j.contains("constant")) {
        return rational_from_json(j["constant"]);
    }
    if (j.is_object() && j.contains("expr")) {
        return expr_from_json(j["expr"], model);
    }
    malformed(where + ": bound must be {\"constant\": ...} or {\"expr\": ...}", where);
}

template <SetKind K>
json set_to_json(const SetConstraint<K>& s, const Model& model, json out)
{
    out["members"] = var_list(s.members, model);
    if (s.weights) {
        json w = json::array();
        for (const auto& r : *s.weights) {
            w.push_back(to_json(r));
        }
        out["weights"] = w;
    } else {
        out["weights"] = nullptr;
    }
    out["rhs"] = s.rhs;
    return out;
}

template <SetKind K>
SetConstraint<K> set_from_json(const json& j, const Model& model, const std::string& where)
{
    SetConstraint<K> s;
    s.members = var_list_from(field(j, "members", where), model, where);
    if (auto it = j.find("weights"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            malformed(where + ": weights must be a list or null", where);
        }
        std::vector<Rational> w;
        for (const auto& e : *it) {
            w.push_back(rational_from_json(e));
        }
        s.weights = std::move(w);
    }
    if (auto it = j.find("rhs"); it != j.end()) {
        if (!it->is_number_integer()) {
            malformed(where + ": rhs must be an integer", where);
        }
        s.rhs = it->get<std::int64_t>();
    }
    return s;
}

} // namespace

json to_json(const Rational& value)
{
    return {{"num", value.num()}, {"den", value.den()}};
}

Rational rational_from_json(const json& j)
{
    if (j.is_number_integer()) {
        return Rational(j.get<std::int64_t>());
    }
    if (!j.is_object() || !j.contains("num") || !j.contains("den") || !j["num"].is_number_integer() ||
        !j["den"].is_number_integer()) {
        malformed("expected a rational {\"num\": p, \"den\": q}, got " + j.dump());
    }
    auto den = j["den"].get<std::int64_t>();
    if (den == 0) {
        malformed("rational with zero denominator");
    }
    return Rational(j["num"].get<std::int64_t>(), den);
}

json to_json(const LinearExpr& expr, const Model& model)
{
    json terms = json::array();
    for (const auto& [var, coef] : expr.terms()) {
        terms.push_back({{"var", model.variable(var).name}, {"coef", to_json(coef)}});
    }
    return {{"terms", terms}, {"constant", to_json(expr.constant())}};
}

LinearExpr expr_from_json(const json& j, const Model& model)
{
    const json& terms = field(j, "terms", "expression");
    if (!terms.is_array()) {
        malformed("expression: terms must be a list");
    }
    LinearExpr e;
    for (const auto& t : terms) {
        e.add_term(var_from_json(field(t, "var", "term"), model, "term"), rational_from_json(field(t, "coef", "term")));
    }
    if (auto it = j.find("constant"); it != j.end()) {
        e.set_constant(rational_from_json(*it));
    }
    return e;
}

json to_json(const TypedConstraint& c, const Model& model)
{
    json out = {{"family", std::string(to_string(c.family()))}, {"label", c.label},
        {"omt_node", c.omt_node ? json(*c.omt_node) : json(nullptr)}};
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, Bound>) {
                out["expr"] = to_json(body.expr, model);
                out["sense"] = to_string(body.sense);
                out["bound"] = bound_to_json(body.bound, model);
            } else if constexpr (std::is_same_v<T, ConditionalBound>) {
                out["expr"] = to_json(body.expr, model);
                out["sense"] = to_string(body.sense);
                out["bound"] = bound_to_json(body.bound, model);
                out["indicator"] = model.variable(body.indicator).name;
                out["off_behavior"] = to_string(body.off_behavior);
            } else if constexpr (std::is_same_v<T, Balance>) {
                out["lhs"] = to_json(body.lhs, model);
                out["rhs"] = to_json(body.rhs, model);
                out["flavor"] = to_string(body.flavor);
            } else if constexpr (std::is_same_v<T, SetPacking> || std::is_same_v<T, SetPartitioning> ||
                                 std::is_same_v<T, SetCovering>) {
                out = set_to_json(body, model, std::move(out));
            } else if constexpr (std::is_same_v<T, VariableFix>) {
                out["var"] = model.variable(body.var).name;
                out["value"] = to_json(body.value);
            } else if constexpr (std::is_same_v<T, IfThen>) {
                out["antecedents"] = var_list(body.antecedents, model);
                out["consequents"] = var_list(body.consequents, model);
            } else if constexpr (std::is_same_v<T, EitherOr>) {
                json alts = json::array();
                for (const auto& a : body.alternatives) {
                    alts.push_back({{"expr", to_json(a.expr, model)}, {"sense", to_string(a.sense)}, {"rhs", to_json(a.rhs)}});
                }
                out["alternatives"] = alts;
            } else {
                out["expr"] = to_json(body.expr, model);
                out["sense"] = to_string(body.sense);
                out["rhs"] = to_json(body.rhs);
            }
        },
        c.body);
    return out;
}

TypedConstraint constraint_from_json(const json& j, const Model& model)
{
    const std::string family_name = string_field(j, "family", "constraint");
    auto family = parse_family(family_name);
    if (!family) {
        malformed("unknown constraint family '" + family_name + "'", family_name);
    }
    TypedConstraint c;
    if (auto it = j.find("label"); it != j.end()) {
        if (!it->is_string()) {
            malformed("constraint: label must be a string");
        }
        c.label = it->get<std::string>();
    }
    const std::string where = c.label.empty() ? family_name : c.label;
    if (auto it = j.find("omt_node"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) {
            malformed(where + ": omt_node must be an integer or null", where);
        }
        c.omt_node = it->get<int>();
    }
    switch (*family) {
    case Family::Bound:
        c.body = Bound{expr_from_json(field(j, "expr", where), model), sense_from(field(j, "sense", where), where),
            bound_from_json(field(j, "bound", where), model, where)};
        break;
    case Family::ConditionalBound: {
        auto off = parse_off_behavior(string_field(j, "off_behavior", where));
        if (!off) {
            malformed(where + ": off_behavior must be ForceZero or Free", where);
        }
        c.body = ConditionalBound{expr_from_json(field(j, "expr", where), model),
            sense_from(field(j, "sense", where), where), bound_from_json(field(j, "bound", where), model, where),
            var_from_json(field(j, "indicator", where), model, where), *off};
        break;
    }
    case Family::Balance: {
        auto flavor = parse_balance_flavor(string_field(j, "flavor", where));
        if (!flavor) {
            malformed(where + ": unknown balance flavor", where);
        }
        c.body = Balance{expr_from_json(field(j, "lhs", where), model), expr_from_json(field(j, "rhs", where), model), *flavor};
        break;
    }
    case Family::SetPacking: c.body = set_from_json<SetKind::Packing>(j, model, where); break;
    case Family::SetPartitioning: c.body = set_from_json<SetKind::Partitioning>(j, model, where); break;
    case Family::SetCovering: c.body = set_from_json<SetKind::Covering>(j, model, where); break;
    case Family::VariableFix:
        c.body = VariableFix{var_from_json(field(j, "var", where), model, where), rational_from_json(field(j, "value", where))};
        break;
    case Family::IfThen:
        c.body = IfThen{var_list_from(field(j, "antecedents", where), model, where),
            var_list_from(field(j, "consequents", where), model, where)};
        break;
    case Family::EitherOr: {
        const json& alts = field(j, "alternatives", where);
        if (!alts.is_array()) {
            malformed(where + ": alternatives must be a list", where);
        }
        EitherOr e;
        for (const auto& a : alts) {
            e.alternatives.push_back(Alternative{expr_from_json(field(a, "expr", where), model),
                sense_from(field(a, "sense", where), where), rational_from_json(field(a, "rhs", where))});
        }
        c.body = std::move(e);
        break;
    }
    case Family::RawRow:
        c.body = RawRow{expr_from_json(field(j, "expr", where), model), sense_from(field(j, "sense", where), where),
            rational_from_json(field(j, "rhs", where))};
        break;
    }
    return c;
}

json model_to_json(const Model& model)
{
    json vars = json::array();
    for (const auto& v : model.variables()) {
        vars.push_back({{"name", v.name}, {"kind", to_string(v.kind)}, {"lower", optional_rational(v.lower)},
            {"upper", optional_rational(v.upper)}});
    }
    json cons = json::array();
    for (const auto& c : model.constraints()) {
        cons.push_back(to_json(c, model));
    }
    json objective = nullptr;
    if (const auto& o = model.objective()) {
        objective = {{"direction", o->direction == Direction::Maximize ? "max" : "min"}, {"expr", to_json(o->expr, model)}};
    }
    return {{"schema_version", kModelSchemaVersion}, {"name", model.name()}, {"variables", vars}, {"constraints", cons},
        {"objective", objective}};
}

Model model_from_json(const json& j)
{
    if (!j.is_object()) {
        malformed("model document must be a JSON object");
    }
    auto version = j.find("schema_version");
    if (version == j.end() || !version->is_string()) {
        malformed("model document has no schema_version");
    }
    if (version->get<std::string>() != kModelSchemaVersion) {
        throw Error(ErrorCode::SchemaMismatch,
            "unsupported schema_version '" + version->get<std::string>() + "', expected '" +
                std::string(kModelSchemaVersion) + "'",
            version->get<std::string>());
    }
    Model model(j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : std::string());
    const json& vars = field(j, "variables", "model");
    if (!vars.is_array()) {
        malformed("model: variables must be a list");
    }
    for (const auto& v : vars) {
        auto kind = parse_var_kind(string_field(v, "kind", "variable"));
        if (!kind) {
            malformed("variable: kind must be binary, integer or continuous");
        }
        Variable var;
        var.name = string_field(v, "name", "variable");
        var.kind = *kind;
        var.lower = optional_rational_from(field(v, "lower", var.name));
        var.upper = optional_rational_from(field(v, "upper", var.name));
        model.append_variable_unchecked(std::move(var));
    }
    // Name clashes would otherwise surface as unknown references below.
    raise_first_error(validate(model));
    const json& cons = field(j, "constraints", "model");
    if (!cons.is_array()) {
        malformed("model: constraints must be a list");
    }
    for (const auto& c : cons) {
        model.append_unchecked(constraint_from_json(c, model));
    }
    if (auto it = j.find("objective"); it != j.end() && !it->is_null()) {
        const std::string dir = string_field(*it, "direction", "objective");
        if (dir != "min" && dir != "max") {
            malformed("objective: direction must be min or max");
        }
        model.set_objective(
            Objective{dir == "max" ? Direction::Maximize : Direction::Minimize, expr_from_json(field(*it, "expr", "objective"), model)});
    }
    raise_first_error(validate(model));
    return model;
}

std::string write_model(const Model& model)
{
    return model_to_json(model).dump(2) + "\n";
}

Model parse_model(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedDocument, std::string("invalid JSON: ") + e.what());
    }
    return model_from_json(j);
}

} // namespace omtk
