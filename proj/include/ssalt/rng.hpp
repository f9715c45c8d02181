#pragma once

// Counter-based random streams.
//
// A stream is identified by (root_seed, stream_id). The i-th 64-bit output
// is a pure function of (root_seed, stream_id, i), so work items that own
// distinct stream ids produce identical numbers regardless of which thread
// runs them or in what order.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ssalt {

namespace detail {

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

// Order-sensitive hash of a sequence of indices, used to derive stream ids
// such as hash(grid_point, replicate).
constexpr std::uint64_t stream_hash(std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto id : ids) {
    h = detail::mix64(h ^ detail::mix64(id + detail::kGolden));
  }
  return h;
}

struct RngSeed {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;

  // Child stream; the root stays fixed so a whole run is reproducible from
  // one number.
  RngSeed child(std::initializer_list<std::uint64_t> ids) const {
    std::uint64_t h = stream_id;
    for (auto id : ids) h = stream_hash({h, id});
    return {root_seed, h};
  }

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(RngSeed seed)
      : key_(detail::mix64(detail::mix64(seed.root_seed) ^
                           (seed.stream_id * detail::kGolden + 1))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  std::uint64_t counter() const { return counter_; }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    // Box-Muller, one variate per call so the counter advances by exactly 2.
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Gamma(shape, rate = 1) by Marsaglia-Tsang; shape < 1 via the
  // U^{1/shape} boost.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return d * v;
      }
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ssalt
