#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace mla::testing {

using hp = boost::multiprecision::cpp_dec_float_50;

inline hp hp_upper1(hp g, hp alpha, hp lambda1, hp l, hp eps) {
  const hp filt = 1 + alpha * alpha * lambda1;
  const hp bracket = log(g) - log(l / 2) / 2;
  const hp e = 4 + eps;
  return pow(g, hp(2) / 3) * pow(e * e * e / (3 * l * filt) * bracket, hp(1) / 3);
}

inline hp hp_upper2(hp g, hp alpha, hp lambda1, hp l) {
  const hp root = sqrt(l * (1 + alpha * alpha * lambda1));
  const hp bracket = log(g) + hp(1) / 2 + log(3 * sqrt(hp(2)) / root);
  return pow(12 / root, hp(2) / 3) * pow(g, hp(2) / 3) * pow(bracket, hp(1) / 3);
}

inline double rel_err(double got, const hp& want) {
  return static_cast<double>(abs((hp(got) - want) / want));
}

}  // namespace mla::testing
