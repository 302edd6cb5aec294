#pragma once

#include <string>

#include "json.hpp"

#include "conical/curve.hpp"

namespace conical {

/* On-disk forms for curves and fields.  Arbitrary-precision numbers
 * travel as decimal strings, object keys come out sorted, and actions
 * that can be recomputed from the field labels are left out, so the
 * same curve always serializes to the same bytes. */

nlohmann::json field_to_json(const FieldSpec& K);
FieldSpec field_from_json(const nlohmann::json& j);

nlohmann::json curve_to_json(const ConicalCurve& C);
ConicalCurve curve_from_json(const nlohmann::json& j);

// two-space indented rendering with a trailing newline
std::string json_text(const nlohmann::json& j);

/* Graphviz rendering of the incidence graph: one box per component,
 * one ellipse per singular point, one edge per branch. */
std::string curve_to_dot(const ConicalCurve& C);

}  // namespace conical
