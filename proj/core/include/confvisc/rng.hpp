#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "confvisc/types.hpp"

namespace confvisc {

// std::mt19937_64 is bit-specified by the standard, the std distributions are
// not. All conversions to reals happen here so seeded runs reproduce across
// platforms and standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 5489u) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : engine_() % bound; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  Vec uniform_box(int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Vec unit_vector(int n) {
    Vec v(n);
    double norm = 0.0;
    do {
      for (int i = 0; i < n; ++i) v[i] = normal();
      norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
  }

  /// Uniform point in the ball of radius r around center.
  Vec in_ball(const Vec& center, double r) {
    const int n = static_cast<int>(center.size());
    const double rho = r * std::pow(uniform(), 1.0 / n);
    return center + rho * unit_vector(n);
  }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace confvisc
