#pragma once

#include <Eigen/Dense>

namespace platecont {

/// Bivariate polynomial of total degree <= 4: sum c(i,j) x1^i x2^j.
struct Poly2 {
  static constexpr int kMaxDegree = 4;
  Eigen::Matrix<double, kMaxDegree + 1, kMaxDegree + 1> c =
      Eigen::Matrix<double, kMaxDegree + 1, kMaxDegree + 1>::Zero();

  static Poly2 constant(double v);

  template <typename Scalar>
  Scalar operator()(const Scalar& x1, const Scalar& x2) const {
    // Horner in x2 for each x1 power, then Horner in x1.
    Scalar acc = Scalar(0);
    for (int i = kMaxDegree; i >= 0; --i) {
      Scalar row = Scalar(0);
      for (int j = kMaxDegree - i; j >= 0; --j) row = row * x2 + Scalar(c(i, j));
      acc = acc * x1 + row;
    }
    return acc;
  }

  double operator()(const Eigen::Vector2d& x) const { return (*this)(x.x(), x.y()); }

  Eigen::Vector2d gradient(const Eigen::Vector2d& x) const;
  Eigen::Matrix2d hessian(const Eigen::Vector2d& x) const;
  bool is_constant() const;
};

}  // namespace platecont
