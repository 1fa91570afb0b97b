#pragma once

#include "pmri/core/types.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace pmri {

/// Seeded generator with platform-independent conversions. std::mt19937_64 output is fixed by the
/// standard; the distribution adaptors are not, so uniform and normal draws are derived here.
class Rng
{
public:
  explicit Rng(uint64_t seed)
    : engine_{seed}
  {
  }

  /// Uniform in [0, 1).
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return uint64_t(uniform() * double(n)); }

  double normal()
  {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0) { u1 = uniform(); }
    double const u2 = uniform();
    double const r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Circular complex Gaussian with E|z|^2 = 1.
  Complex complex_normal() { return Complex{normal(), normal()} / std::numbers::sqrt2; }

  CVector complex_normal(Index n)
  {
    CVector v(n);
    for (Index k = 0; k < n; ++k) { v[k] = complex_normal(); }
    return v;
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0;
};

} // namespace pmri
