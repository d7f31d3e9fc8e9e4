#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "inlm/vec.hpp"

namespace inlm {

// Seeded generator with hand-rolled normal sampling. std::normal_distribution
// is implementation-defined, which would break the byte-identical-trace
// contract across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // (0,1)
    // 53-bit mantissa draw, never exactly 0 or 1.
    const std::uint64_t r = engine_() >> 11;
    return (static_cast<double>(r) + 0.5) * 0x1p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  Vector normal_vector(std::size_t dim) {
    Vector v(dim);
    for (auto& x : v) x = normal();
    return v;
  }

  Vector uniform_vector(std::size_t dim, double lo, double hi) {
    Vector v(dim);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace inlm
