#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace ewfkit {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output function (Steele, Lea & Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Stateless counter-based generator. Output i of a stream is a pure
/// function of (key, i), so samples can be produced in any order or in
/// parallel and still match a sequential run.
///
/// The seed→stream mapping is part of the file-format/reproducibility
/// contract and must not change:
///   key(seed)            = mix64(seed + kGolden)
///   derive(key, s)       = mix64(key ^ mix64(s + kGolden))
///   bits(key, i)         = mix64(key + (i + 1) * kGolden)
///   uniform(key, i)      = bits >> 11, scaled to [0, 1) with 53-bit precision
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(detail::mix64(seed + detail::kGolden)) {}

  /// Independent child stream for substream index `s`.
  CounterRng derive(std::uint64_t s) const {
    CounterRng child(*this);
    child.key_ = detail::mix64(key_ ^ detail::mix64(s + detail::kGolden));
    return child;
  }

  /// The stream key, usable as a seed for another CounterRng.
  std::uint64_t key() const { return key_; }

  std::uint64_t bits(std::uint64_t i) const {
    return detail::mix64(key_ + (i + 1) * detail::kGolden);
  }

  /// Uniform double in [0, 1).
  double uniform(std::uint64_t i) const {
    return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
  }

  /// Circularly-symmetric standard complex Gaussian: E[z conj(z)] = 1, the
  /// real and imaginary parts each N(0, 1/2). Consumes counters 2i, 2i+1.
  std::complex<double> gaussian(std::uint64_t i) const {
    const double u1 = uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    // |z|^2 ~ Exp(1); 1-u1 lies in (0,1] so the log is finite.
    const double r = std::sqrt(-std::log1p(-u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

 private:
  std::uint64_t key_;
};

/// Seed for an independent stream derived from (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return CounterRng(seed).derive(stream).key();
}

}  // namespace ewfkit
