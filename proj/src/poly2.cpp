#include "platecont/poly2.hpp"

#include <cmath>

namespace platecont {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

}  // namespace

Poly2 Poly2::constant(double v) {
  Poly2 p;
  p.c(0, 0) = v;
  return p;
}

Eigen::Vector2d Poly2::gradient(const Eigen::Vector2d& x) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int i = 0; i <= kMaxDegree; ++i)
    for (int j = 0; i + j <= kMaxDegree; ++j) {
      if (c(i, j) == 0.0) continue;
      if (i > 0) g.x() += c(i, j) * i * ipow(x.x(), i - 1) * ipow(x.y(), j);
      if (j > 0) g.y() += c(i, j) * j * ipow(x.x(), i) * ipow(x.y(), j - 1);
    }
  return g;
}

Eigen::Matrix2d Poly2::hessian(const Eigen::Vector2d& x) const {
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (int i = 0; i <= kMaxDegree; ++i)
    for (int j = 0; i + j <= kMaxDegree; ++j) {
      const double cij = c(i, j);
      if (cij == 0.0) continue;
      if (i > 1) h(0, 0) += cij * i * (i - 1) * ipow(x.x(), i - 2) * ipow(x.y(), j);
      if (j > 1) h(1, 1) += cij * j * (j - 1) * ipow(x.x(), i) * ipow(x.y(), j - 2);
      if (i > 0 && j > 0) h(0, 1) += cij * i * j * ipow(x.x(), i - 1) * ipow(x.y(), j - 1);
    }
  h(1, 0) = h(0, 1);
  return h;
}

bool Poly2::is_constant() const {
  for (int i = 0; i <= kMaxDegree; ++i)
    for (int j = 0; i + j <= kMaxDegree; ++j)
      if ((i + j) > 0 && c(i, j) != 0.0) return false;
  return true;
}

}  // namespace platecont
