#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "blowup/params.hpp"
#include "blowup/phase_systems.hpp"

namespace blowup::testing {

/// 5x5x5 grid of admissible parameters with m+p>2.
inline std::vector<Parameters> supercritical_grid() {
  std::vector<Parameters> out;
  for (double m : {2.0, 2.5, 3.0, 4.0, 6.0})
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (double ds : {0.1, 0.5, 1.0, 2.0, 5.0}) out.push_back({m, p, 2 * (1 - p) / (m - 1) + ds});
  return out;
}

/// 5x5x5 grid of admissible parameters with m+p<2.
inline std::vector<Parameters> subcritical_grid() {
  std::vector<Parameters> out;
  for (double m : {1.1, 1.2, 1.3, 1.4, 1.45})
    for (double p : {0.1, 0.2, 0.3, 0.4, 0.5})
      for (double ds : {0.1, 0.5, 1.0, 2.0, 5.0}) out.push_back({m, p, 2 * (1 - p) / (m - 1) + ds});
  return out;
}

/// Random admissible supercritical parameters.
inline Parameters random_supercritical(std::mt19937& rng) {
  std::uniform_real_distribution<double> um(1.5, 6.0), up(0.05, 0.95), us(0.05, 6.0);
  for (;;) {
    const double m = um(rng), p = up(rng);
    if (m + p <= 2.05) continue;
    return {m, p, 2 * (1 - p) / (m - 1) + us(rng)};
  }
}

/// Central differences of the field in long double.
inline Eigen::Matrix3d fd_jacobian(SystemId id, const Eigen::Vector3d& u, const Coefficients& c) {
  using L = long double;
  Eigen::Matrix3d J;
  for (int j = 0; j < 3; ++j) {
    const L h = 1e-7L * std::max<L>(1.0L, std::abs(L(u[j])));
    Vec3<L> a = u.cast<L>(), b = u.cast<L>();
    a[j] += h;
    b[j] -= h;
    J.col(j) = ((field<L>(id, a, c) - field<L>(id, b, c)) / (2 * h)).cast<double>();
  }
  return J;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace blowup::testing
