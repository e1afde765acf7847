#pragma once

#include "omtk/lowering.hpp"

#include <string>
#include <string_view>

namespace omtk {

/// CPLEX-style LP text. Sections: objective, Subject To (rows c0, c1, ...),
/// Bounds (every variable, canonical order), Generals, Binaries, End.
/// Provenance rides along in `\` comment lines. Throws NonDecimalCoefficient.
std::string emit_lp(const CanonicalForm& form);

/// Free-format MPS with integer markers and explicit bounds for every column.
/// Throws NonDecimalCoefficient.
std::string emit_mps(const CanonicalForm& form);

/// Reads text written by emit_lp or emit_mps (format detected from the first
/// significant line). Throws UnsupportedDialect or ParseError ("line L, column C: ...").
CanonicalForm parse_canonical(std::string_view text);

CanonicalForm parse_lp(std::string_view text);
CanonicalForm parse_mps(std::string_view text);

} // namespace omtk
