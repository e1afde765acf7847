#pragma once

#include "omtk/model.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace omtk {

inline constexpr std::string_view kModelSchemaVersion = "1";

nlohmann::json to_json(const Rational& value);
/// Accepts {"num": p, "den": q} with q != 0, or a bare integer. Throws MalformedDocument.
Rational rational_from_json(const nlohmann::json& j);

/// Variables are referenced by name.
nlohmann::json to_json(const LinearExpr& expr, const Model& model);
LinearExpr expr_from_json(const nlohmann::json& j, const Model& model);

nlohmann::json to_json(const TypedConstraint& constraint, const Model& model);
TypedConstraint constraint_from_json(const nlohmann::json& j, const Model& model);

nlohmann::json model_to_json(const Model& model);
/// Throws SchemaMismatch, MalformedDocument, UnknownVariable, or the error
/// matching the first validation diagnostic.
Model model_from_json(const nlohmann::json& j);

/// ModelDocument text: two-space indented JSON with a trailing newline.
std::string write_model(const Model& model);
Model parse_model(std::string_view text);

} // namespace omtk
