#include "mla/field_io.hpp"

#include "mla/errors.hpp"

namespace mla {

nlohmann::json field_to_json(const ScalarField& f) {
  const auto& g = f.grid();
  nlohmann::json coeffs = nlohmann::json::array();
  const int km = g.kmax();
  for (int k2 = 0; k2 <= km; ++k2) {
    for (int k1 = -km; k1 <= km; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      const Complex c = f.coeff(k1, k2);
      if (c == Complex{}) continue;
      coeffs.push_back({k1, k2, c.real(), c.imag()});
    }
  }
  return {{"format", "mla-scalar-field"},
          {"version", 1},
          {"n_modes", g.n_modes()},
          {"dealias_fraction", g.dealias_fraction()},
          {"coefficients", std::move(coeffs)}};
}

ScalarField field_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "mla-scalar-field" || j.value("version", 0) != 1) {
    throw ValidationError("not an mla-scalar-field v1 container");
  }
  SpectralGrid grid(j.at("n_modes").get<int>(), j.at("dealias_fraction").get<double>());
  ScalarField f(grid);
  for (const auto& e : j.at("coefficients")) {
    if (!e.is_array() || e.size() != 4) throw ValidationError("coefficient entries must be [k1, k2, re, im]");
    const int k1 = e[0].get<int>();
    const int k2 = e[1].get<int>();
    if (k2 < 0 || (k2 == 0 && k1 <= 0)) throw ValidationError("coefficient outside the independent half-spectrum");
    f.set_coeff(k1, k2, {e[2].get<double>(), e[3].get<double>()});
  }
  return f;
}

std::string serialize_field(const ScalarField& f) { return field_to_json(f).dump(); }

ScalarField deserialize_field(const std::string& text) {
  try {
    return field_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed field container: ") + e.what());
  }
}

}  // namespace mla
