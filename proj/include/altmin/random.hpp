#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "altmin/core.hpp"

namespace altmin {

/// Deterministic random stream owned by a single run.
///
/// All draws are built from the raw 64-bit output of a seeded mt19937_64 so
/// that every experiment is bit-reproducible across platforms; none of the
/// implementation-defined standard distributions are used.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform01() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the paired value is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = two_pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  Vector gaussian_vector(int d) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Uniform sample from the d-dimensional ball of radius r centered at the
/// origin: Gaussian direction normalized, scaled by r * u^{1/d} with u
/// uniform on (0, 1].
inline Vector sample_uniform_ball(RngStream& rng, int d, double r) {
  if (d < 1) throw UsageError("sample_uniform_ball: d must be >= 1");
  if (r < 0.0) throw UsageError("sample_uniform_ball: radius must be nonnegative");
  if (r == 0.0) return Vector::Zero(d);
  Vector dir = rng.gaussian_vector(d);
  double n = dir.norm();
  while (n == 0.0) {  // astronomically unlikely; redraw keeps the law exact
    dir = rng.gaussian_vector(d);
    n = dir.norm();
  }
  const double scale = r * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  return dir * (scale / n);
}

}  // namespace altmin
