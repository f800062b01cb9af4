#pragma once

#include <array>
#include <cmath>

namespace platecont {

/// Bivariate Taylor polynomial truncated at total degree 4: sum c[i][j] d1^i d2^j around a base point.
struct Jet4 {
  std::array<std::array<double, 5>, 5> c{};

  static Jet4 constant(double v) {
    Jet4 j;
    j.c[0][0] = v;
    return j;
  }
  /// Coordinate variable x_k = v + d_k.
  static Jet4 variable(double v, int k) {
    Jet4 j = constant(v);
    (k == 0 ? j.c[1][0] : j.c[0][1]) = 1.0;
    return j;
  }

  double value() const { return c[0][0]; }
  /// d^{a+b} / dx1^a dx2^b at the base point.
  double derivative(int a, int b) const {
    static constexpr double fact[5] = {1, 1, 2, 6, 24};
    return fact[a] * fact[b] * c[a][b];
  }

  Jet4& operator+=(const Jet4& o) {
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; i + j <= 4; ++j) c[i][j] += o.c[i][j];
    return *this;
  }
  Jet4& operator-=(const Jet4& o) {
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; i + j <= 4; ++j) c[i][j] -= o.c[i][j];
    return *this;
  }
  Jet4& operator*=(double s) {
    for (auto& r : c)
      for (double& v : r) v *= s;
    return *this;
  }
  friend Jet4 operator+(Jet4 a, const Jet4& b) { return a += b; }
  friend Jet4 operator-(Jet4 a, const Jet4& b) { return a -= b; }
  friend Jet4 operator*(Jet4 a, double s) { return a *= s; }
  friend Jet4 operator*(double s, Jet4 a) { return a *= s; }
  friend Jet4 operator+(Jet4 a, double s) {
    a.c[0][0] += s;
    return a;
  }
  friend Jet4 operator*(const Jet4& a, const Jet4& b) {
    Jet4 r;
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; i + j <= 4; ++j) {
        if (a.c[i][j] == 0.0) continue;
        for (int k = 0; i + j + k <= 4; ++k)
          for (int l = 0; i + j + k + l <= 4; ++l) r.c[i + k][j + l] += a.c[i][j] * b.c[k][l];
      }
    return r;
  }
};

/// x^alpha for a jet with positive value.
inline Jet4 pow(const Jet4& x, double alpha) {
  const double a = x.value();
  Jet4 p = x;
  p.c[0][0] = 0.0;
  // sum_k binom(alpha, k) a^{alpha - k} p^k, p nilpotent of order 5
  Jet4 r = Jet4::constant(std::pow(a, alpha));
  Jet4 pk = Jet4::constant(1.0);
  double binom = 1.0;
  for (int k = 1; k <= 4; ++k) {
    pk = pk * p;
    binom *= (alpha - (k - 1)) / k;
    r += pk * (binom * std::pow(a, alpha - k));
  }
  return r;
}

}  // namespace platecont
