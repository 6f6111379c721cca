#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mla/dim_bounds.hpp"
#include "mla/errors.hpp"
#include "mla/stability2d.hpp"
#include "support/hp_bounds.hpp"

using namespace mla;
using mla::testing::hp;
using mla::testing::rel_err;

namespace {

BoundInputs inputs(double g, double alpha, double eps = 0.0) {
  BoundInputs in;
  in.g = g;
  in.alpha = alpha;
  in.eps_g = eps;
  return in;
}

const hp kPi = boost::multiprecision::default_ops::get_constant_pi<hp::backend_type>();

}  // namespace

TEST_CASE("first upper bound at G = e^10") {
  const double g = std::exp(10.0);
  const hp want = mla::testing::hp_upper1(exp(hp(10)), 0, 1, hp(kPi), 0);
  CHECK(rel_err(upper_bound_1(inputs(g, 0.0)), want) < 1e-13);
  // closed form e^{20/3} ((64 / 3 pi)(10 - log(pi/2)/2))^{1/3}
  const double closed = std::exp(20.0 / 3.0) *
                        std::cbrt(64.0 / (3.0 * std::numbers::pi) * (10.0 - 0.5 * std::log(std::numbers::pi / 2.0)));
  CHECK(upper_bound_1(inputs(g, 0.0)) == doctest::Approx(closed).epsilon(1e-13));
}

TEST_CASE("second upper bound at G = 1") {
  const hp want = mla::testing::hp_upper2(1, 0, 1, hp(kPi));
  const double got = upper_bound_2(inputs(1.0, 0.0));
  CHECK(rel_err(got, want) < 1e-13);
  CHECK(got == doctest::Approx(3.98).epsilon(5e-3));
}

TEST_CASE("high-precision agreement over a grid") {
  for (double g : {1e2, 1e3, 1e4, 1e6, 1e8}) {
    for (double alpha : {0.0, 1e-3, 1e-2, 0.05, 0.1}) {
      for (double eps : {0.0, 0.25}) {
        CAPTURE(g);
        CAPTURE(alpha);
        const auto in = inputs(g, alpha, eps);
        const hp hg(g), ha(alpha), he(eps);
        CHECK(rel_err(upper_bound_1(in), mla::testing::hp_upper1(hg, ha, 1, hp(in.l_const), he)) < 1e-12);
        CHECK(rel_err(upper_bound_2(in), mla::testing::hp_upper2(hg, ha, 1, hp(in.l_const))) < 1e-12);
      }
    }
  }
}

TEST_CASE("monotone in eps_G and G, continuous as eps_G -> 0") {
  CHECK(upper_bound_1(inputs(1e4, 0.0, 0.1)) > upper_bound_1(inputs(1e4, 0.0, 0.0)));
  double prev1 = 0.0, prev2 = 0.0;
  for (double g = 10.0; g < 1e9; g *= 3.0) {
    const double u1 = upper_bound_1(inputs(g, 0.01));
    const double u2 = upper_bound_2(inputs(g, 0.01));
    CHECK(u1 > prev1);
    CHECK(u2 > prev2);
    prev1 = u1;
    prev2 = u2;
  }
  const double at0 = upper_bound_1(inputs(1e5, 0.02));
  CHECK(std::abs(upper_bound_1(inputs(1e5, 0.02, 1e-14)) - at0) / at0 < 1e-12);
}

TEST_CASE("doubling G scales by 2^{2/3} times the log ratio") {
  const double g = 1e5;
  const double l = std::numbers::pi;
  const double b1 = std::log(g) - 0.5 * std::log(l / 2.0);
  const double b2 = std::log(2.0 * g) - 0.5 * std::log(l / 2.0);
  CHECK(upper_bound_1(inputs(2.0 * g, 0.0)) / upper_bound_1(inputs(g, 0.0)) ==
        doctest::Approx(std::cbrt(4.0) * std::cbrt(b2 / b1)).epsilon(1e-13));
}

TEST_CASE("alpha -> 0 recovers the Navier-Stokes value and alpha decreases the bounds") {
  for (double g : {1e3, 1e6}) {
    const double ns1 = upper_bound_1(inputs(g, 0.0));
    const double ns2 = upper_bound_2(inputs(g, 0.0));
    CHECK(std::abs(upper_bound_1(inputs(g, 1e-8)) - ns1) / ns1 < 1e-14);
    CHECK(std::abs(upper_bound_2(inputs(g, 1e-8)) - ns2) / ns2 < 1e-14);
    double prev = ns2;
    for (double a : {0.01, 0.1, 0.5, 1.0}) {
      const double u = upper_bound_2(inputs(g, a));
      CHECK(u < prev);
      prev = u;
    }
  }
}

TEST_CASE("domain and validation errors") {
  // log G - log(pi/2)/2 <= 0 for G <= sqrt(pi/2)
  CHECK_THROWS_AS(upper_bound_1(inputs(1.1, 0.0)), DomainError);
  CHECK_NOTHROW(upper_bound_1(inputs(1.3, 0.0)));
  BoundInputs huge_l = inputs(1.0, 0.0);
  huge_l.l_const = 1e6;
  CHECK_THROWS_AS(upper_bound_2(huge_l), DomainError);
  CHECK_THROWS_AS(upper_bound_1(inputs(-1.0, 0.0)), ValidationError);
  CHECK_THROWS_AS(upper_bound_2(inputs(10.0, -0.1)), ValidationError);
  BoundInputs bad = inputs(10.0, 0.0);
  bad.gamma = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("two-sided report") {
  const auto r = two_sided_report(inputs(1e6, 0.0));
  CHECK(r.lower == doctest::Approx(60.0).epsilon(1e-12));
  REQUIRE(r.upper.has_value());
  CHECK(*r.upper == doctest::Approx(std::min(*r.upper1, *r.upper2)));
  CHECK(r.consistent);
  CHECK(r.notes.find("asymptotic") != std::string::npos);

  for (double g : {1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8}) {
    for (double a : {0.0, 1e-3, 1e-2, 0.05, 0.1}) {
      const auto rep = two_sided_report(inputs(g, a));
      REQUIRE(rep.upper.has_value());
      CHECK(rep.lower <= *rep.upper);
      CHECK(rep.consistent);
    }
  }

  // each upper/lower ratio grows like (log G)^{1/3} at alpha = 0
  const double g1 = 1e4, g2 = 1e8;
  const auto a = two_sided_report(inputs(g1, 0.0));
  const auto b = two_sided_report(inputs(g2, 0.0));
  const double c2 = 0.5 + std::log(3.0 * std::sqrt(2.0) / std::sqrt(std::numbers::pi));
  const double c1 = -0.5 * std::log(std::numbers::pi / 2.0);
  CHECK((*b.upper2 / b.lower) / (*a.upper2 / a.lower) ==
        doctest::Approx(std::cbrt((std::log(g2) + c2) / (std::log(g1) + c2))).epsilon(1e-12));
  CHECK((*b.upper1 / b.lower) / (*a.upper1 / a.lower) ==
        doctest::Approx(std::cbrt((std::log(g2) + c1) / (std::log(g1) + c1))).epsilon(1e-12));
}

TEST_CASE("small G leaves only the second bound") {
  const auto r = two_sided_report(inputs(1.1, 0.0));
  CHECK_FALSE(r.upper1.has_value());
  REQUIRE(r.upper2.has_value());
  CHECK(r.upper == r.upper2);
  CHECK(r.notes.find("upper bound 1 undefined") != std::string::npos);
}
