#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "mla/spectral_core.hpp"

namespace mla {

// Container layout (format "mla-scalar-field", version 1):
//
//   {
//     "format": "mla-scalar-field",
//     "version": 1,
//     "n_modes": <int>,
//     "dealias_fraction": <double>,
//     "coefficients": [[k1, k2, re, im], ...]
//   }
//
// Only the independent half-spectrum is written (k2 > 0, or k2 == 0 and k1 > 0)
// and only nonzero entries appear, ordered by (k2, k1). Doubles are printed
// with shortest round-trip precision, so decode(encode(f)) is bit-exact.

nlohmann::json field_to_json(const ScalarField& f);
ScalarField field_from_json(const nlohmann::json& j);

std::string serialize_field(const ScalarField& f);
ScalarField deserialize_field(const std::string& text);

}  // namespace mla
