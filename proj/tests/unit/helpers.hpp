#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "platecont/elasticity.hpp"

namespace testutil {

// Strongly convex tensor with Voigt eigenvalues in [gamma, 1] in a random orthonormal frame.
inline platecont::Coeffs6<double> random_tensor(std::mt19937_64& rng, double gamma) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::Matrix3d Z;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Z(i, j) = N(rng);
  const Eigen::Matrix3d Q = Eigen::HouseholderQR<Eigen::Matrix3d>(Z).householderQ();
  const Eigen::Vector3d ev(gamma + (1.0 - gamma) * U(rng), gamma + (1.0 - gamma) * U(rng),
                           gamma + (1.0 - gamma) * U(rng));
  const Eigen::Matrix3d V = Q * ev.asDiagonal() * Q.transpose();
  const double s2 = std::sqrt(2.0);
  return {V(0, 0), V(0, 1), V(0, 2) / s2, V(1, 2) / s2, V(2, 2) / 2.0, V(1, 1)};
}

inline Eigen::Matrix2d random_spd(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double a = 2.0 * M_PI * U(rng);
  Eigen::Matrix2d R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const Eigen::Vector2d ev(lo + (hi - lo) * U(rng), lo + (hi - lo) * U(rng));
  return R * ev.asDiagonal() * R.transpose();
}

}  // namespace testutil
