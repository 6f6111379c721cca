#include <doctest.h>

#include "mla/errors.hpp"
#include "mla/field_io.hpp"

using namespace mla;

TEST_CASE("serialized fields round-trip bit-exactly") {
  for (double frac : {2.0 / 3.0, 0.5, 1.0}) {
    const SpectralGrid g(32, frac);
    const auto f = ScalarField::random(g, 99, 12, 1.7, 1.0);
    const auto back = deserialize_field(serialize_field(f));
    CHECK(back.grid() == g);
    const auto a = f.coeffs(), b = back.coeffs();
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == b[i];
    CHECK(same);
  }
}

TEST_CASE("container layout") {
  const SpectralGrid g(16);
  auto f = ScalarField::cos_mode(g, 0, 2, 2.0) + ScalarField::sin_mode(g, 1, 0, 4.0);
  const auto j = field_to_json(f);
  CHECK(j["format"] == "mla-scalar-field");
  CHECK(j["version"] == 1);
  CHECK(j["n_modes"] == 16);
  const auto& c = j["coefficients"];
  REQUIRE(c.size() == 2);
  // Ordered by (k2, k1): (1, 0) first, then (0, 2).
  CHECK(c[0] == nlohmann::json::array({1, 0, 0.0, -2.0}));
  CHECK(c[1] == nlohmann::json::array({0, 2, 1.0, 0.0}));
}

TEST_CASE("malformed containers are rejected") {
  CHECK_THROWS_AS(deserialize_field("not json"), ValidationError);
  CHECK_THROWS_AS(deserialize_field(R"({"format":"other","version":1})"), ValidationError);
  CHECK_THROWS_AS(
      deserialize_field(R"({"format":"mla-scalar-field","version":1,"n_modes":16,"dealias_fraction":0.5,"coefficients":[[0,0,1,0]]})"),
      ValidationError);
  CHECK_THROWS_AS(
      deserialize_field(R"({"format":"mla-scalar-field","version":1,"n_modes":16,"dealias_fraction":0.5,"coefficients":[[0,-1,1,0]]})"),
      ValidationError);
  CHECK_THROWS_AS(
      deserialize_field(R"({"format":"mla-scalar-field","version":1,"n_modes":16,"dealias_fraction":0.5,"coefficients":[[40,1,1,0]]})"),
      ValidationError);
}
