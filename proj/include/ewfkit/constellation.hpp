#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/errors.hpp"

namespace ewfkit {

/// A unit-average-energy symbol alphabet. The symbol index IS the bit
/// label: per-axis Gray coding makes axis-adjacent points differ in
/// exactly one bit, so bit errors are popcount(true ^ decided).
struct Constellation {
  std::string name;
  std::vector<cdouble> points;
  unsigned bits_per_symbol = 0;

  static Constellation bpsk();
  static Constellation qpsk();
  static Constellation qam16();
  static Constellation from_name(std::string_view name);
};

namespace detail {

inline Constellation validated(Constellation c) {
  if (c.points.size() != (std::size_t{1} << c.bits_per_symbol))
    throw ConfigError("constellation: point count does not match bits per symbol");
  double energy = 0.0;
  for (const cdouble& p : c.points) energy += std::norm(p);
  energy /= static_cast<double>(c.points.size());
  if (std::abs(energy - 1.0) > 1e-12)
    throw ConfigError("constellation: average energy is not 1");
  for (std::size_t i = 0; i < c.points.size(); ++i)
    for (std::size_t j = i + 1; j < c.points.size(); ++j)
      if (c.points[i] == c.points[j]) throw ConfigError("constellation: duplicate points");
  return c;
}

// 2-bit Gray code 00,01,11,10 onto ascending amplitude levels
inline double gray2_level(unsigned g) {
  switch (g) {
    case 0: return -3.0;
    case 1: return -1.0;
    case 3: return 1.0;
    default: return 3.0;
  }
}

}  // namespace detail

inline Constellation Constellation::bpsk() {
  return detail::validated({"bpsk", {cdouble{1.0}, cdouble{-1.0}}, 1});
}

inline Constellation Constellation::qpsk() {
  const double a = 1.0 / std::sqrt(2.0);
  std::vector<cdouble> pts(4);
  for (unsigned i = 0; i < 4; ++i)
    pts[i] = {(i & 1u) ? -a : a, (i & 2u) ? -a : a};
  return detail::validated({"qpsk", std::move(pts), 2});
}

inline Constellation Constellation::qam16() {
  const double scale = 1.0 / std::sqrt(10.0);
  std::vector<cdouble> pts(16);
  for (unsigned i = 0; i < 16; ++i)
    pts[i] = {scale * detail::gray2_level(i & 3u), scale * detail::gray2_level((i >> 2) & 3u)};
  return detail::validated({"qam16", std::move(pts), 4});
}

inline Constellation Constellation::from_name(std::string_view name) {
  if (name == "bpsk") return bpsk();
  if (name == "qpsk") return qpsk();
  if (name == "qam16") return qam16();
  throw ConfigError("unknown constellation: " + std::string(name));
}

}  // namespace ewfkit
