#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "platecont/poly2.hpp"

namespace platecont {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct EllipticityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The six independent entries of a 2D tensor with the standard symmetries:
/// A0=C1111, B0=C1122, C0=C1112, D0=C2212, E0=C1212, F0=C2222.
template <typename Scalar>
struct Coeffs6 {
  Scalar A0{}, B0{}, C0{}, D0{}, E0{}, F0{};

  Coeffs6 operator*(const Scalar& s) const { return {A0 * s, B0 * s, C0 * s, D0 * s, E0 * s, F0 * s}; }
};

/// Coefficients of p(xi) = sum_h a_{4-h} xi1^h xi2^{4-h}.
template <typename Scalar>
struct QuarticCoefficients {
  Scalar a0{}, a1{}, a2{}, a3{}, a4{};

  Eigen::Matrix<Scalar, 5, 1> vec() const { return (Eigen::Matrix<Scalar, 5, 1>() << a0, a1, a2, a3, a4).finished(); }
  static QuarticCoefficients from_vec(const Eigen::Matrix<Scalar, 5, 1>& v) { return {v(0), v(1), v(2), v(3), v(4)}; }

  /// p(xi) for a direction xi.
  Scalar symbol(const Scalar& xi1, const Scalar& xi2) const {
    const Scalar x2 = xi1 * xi1, y2 = xi2 * xi2;
    return a4 * y2 * y2 + a3 * xi1 * xi2 * y2 + a2 * x2 * y2 + a1 * x2 * xi1 * xi2 + a0 * x2 * x2;
  }
};

/// Upper half-plane representatives alpha_k + i beta_k of the two conjugate root pairs
/// of t -> p(t, 1).
template <typename Scalar>
struct RootPair {
  Scalar alpha1{}, beta1{}, alpha2{}, beta2{};
  Scalar condition_number{};
  bool clustered = false;  // the two pairs were merged into a double root
};

struct OrthotropicConstants {
  double E1 = 1.0, E2 = 1.0, G12 = 0.5, nu12 = 0.0;
};

enum class TensorKind { constant, orthotropic_engineering, coefficient_field };

struct Box {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  bool contains(const Eigen::Vector2d& x, double slack = 1e-12) const {
    return x.x() >= xmin - slack && x.x() <= xmax + slack && x.y() >= ymin - slack && x.y() <= ymax + slack;
  }
};

struct ElasticityTensorSpec {
  TensorKind kind = TensorKind::constant;
  Coeffs6<double> constant{1.0, 0.0, 0.0, 0.0, 0.5, 1.0};
  OrthotropicConstants ortho{};
  std::array<Poly2, 6> field{};  // A0..F0
  double gamma = 1.0;
  double M = 1.0;
  double rho0 = 1.0;
  Box domain{};

  static ElasticityTensorSpec isotropic(double lambda, double mu);
  static ElasticityTensorSpec from_constant(const Coeffs6<double>& c);
  static ElasticityTensorSpec from_orthotropic(const OrthotropicConstants& o);
  static ElasticityTensorSpec from_field(const std::array<Poly2, 6>& f);
};

/// Lame-type isotropic tensor: C_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk).
Coeffs6<double> isotropic_tensor(double lambda, double mu);

/// Plane-stress orthotropic tensor with axes along x1, x2.
Coeffs6<double> orthotropic_tensor(const OrthotropicConstants& o);

/// Six coefficients at x. Throws DomainError outside spec.domain.
Coeffs6<double> evaluate_tensor(const ElasticityTensorSpec& spec, const Eigen::Vector2d& x);

template <typename Scalar>
QuarticCoefficients<Scalar> quartic_coefficients(const Coeffs6<Scalar>& c) {
  return {c.A0, Scalar(4) * c.C0, Scalar(2) * c.B0 + Scalar(4) * c.E0, Scalar(4) * c.D0, c.F0};
}

/// Sylvester-type matrix of p and p' in the row layout used for the discriminant.
template <typename Scalar>
Eigen::Matrix<Scalar, 7, 7> discriminant_matrix(const QuarticCoefficients<Scalar>& q) {
  Eigen::Matrix<Scalar, 7, 7> S = Eigen::Matrix<Scalar, 7, 7>::Zero();
  const Scalar p[5] = {q.a0, q.a1, q.a2, q.a3, q.a4};
  const Scalar dp[4] = {Scalar(4) * q.a0, Scalar(3) * q.a1, Scalar(2) * q.a2, q.a3};
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 5; ++k) S(r, r + k) = p[k];
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) S(3 + r, r + k) = dp[k];
  return S;
}

/// |det S| / a0. Throws EllipticityError when a0 <= 0.
template <typename Scalar>
Scalar discriminant_det(const QuarticCoefficients<Scalar>& q) {
  using std::abs;
  if (!(q.a0 > Scalar(0))) throw EllipticityError("discriminant_det: a0 <= 0, ellipticity violated");
  const Eigen::Matrix<Scalar, 7, 7> S = discriminant_matrix(q);
  return abs(S.fullPivLu().determinant()) / q.a0;
}

/// 16 a0^6 b1^2 b2^2 [(a1-a2)^2 + (b1+b2)^2]^2 [(a1-a2)^2 + (b1-b2)^2]^2.
template <typename Scalar>
Scalar discriminant_roots(const RootPair<Scalar>& r, const Scalar& a0) {
  const Scalar da = r.alpha1 - r.alpha2;
  const Scalar sp = da * da + (r.beta1 + r.beta2) * (r.beta1 + r.beta2);
  const Scalar sm = da * da + (r.beta1 - r.beta2) * (r.beta1 - r.beta2);
  const Scalar a03 = a0 * a0 * a0;
  return Scalar(16) * a03 * a03 * r.beta1 * r.beta1 * r.beta2 * r.beta2 * sp * sp * sm * sm;
}

/// 16 a0 a4 (a2^2 - 4 a0 a4)^2, valid when a1 = a3 = 0.
template <typename Scalar>
Scalar discriminant_orthotropic(const QuarticCoefficients<Scalar>& q) {
  const Scalar f = q.a2 * q.a2 - Scalar(4) * q.a0 * q.a4;
  return Scalar(16) * q.a0 * q.a4 * f * f;
}

/// Quadratic form of the tensor on symmetric matrices in the orthonormal basis
/// (A11, A22, sqrt2 A12).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> voigt_matrix(const Coeffs6<Scalar>& c) {
  using std::sqrt;
  const Scalar s2 = sqrt(Scalar(2));
  Eigen::Matrix<Scalar, 3, 3> V;
  V << c.A0, c.B0, s2 * c.C0, c.B0, c.F0, s2 * c.D0, s2 * c.C0, s2 * c.D0, Scalar(2) * c.E0;
  return V;
}

struct ConvexityResult {
  Eigen::Vector3d eigenvalues;  // ascending
  double min_eigenvalue = 0.0;
  bool passes = false;
};

ConvexityResult check_convexity(const Coeffs6<double>& c, double gamma);

enum class Dichotomy { Positive, Zero, Violated };
std::string to_string(Dichotomy d);

struct DichotomySample {
  Eigen::Vector2d x;
  double D = 0.0;
};

/// Sampling region: a box, optionally intersected with a disk.
struct Region {
  Box box{};
  std::optional<Eigen::Vector2d> disk_center;
  double disk_radius = 0.0;
  bool contains(const Eigen::Vector2d& x) const;
};

struct DichotomyReport {
  Dichotomy verdict = Dichotomy::Zero;
  double delta1 = 0.0;  // min sampled D
  double max_D = 0.0;
  double tolerance = 0.0;
  double scale = 0.0;  // max |a_i| over samples
  int samples = 0;
  int positive_count = 0;
  std::vector<DichotomySample> violation_points;  // samples with D <= tol, when Violated
};

/// Zero band 1e-9 * (max D + scale^6); both terms scale like c^6 under C -> cC.
double default_dichotomy_tolerance(double max_D, double coefficient_scale);

/// tol <= 0 selects default_dichotomy_tolerance.
DichotomyReport classify_dichotomy(const ElasticityTensorSpec& spec, const Region& region, double sample_step,
                                   double tol = 0.0);

struct OrthotropicReport {
  double k = 0.0;
  double m = 0.0;
  double D = 0.0;               // 1 - nu12^2 / k
  double factor_engineering = 0.0;  // 4E1^2((nu12/k + D/(m+nu12))^2 - 1/k)
  double factor_tensor = 0.0;       // a2^2 - 4 a0 a4 of the assembled tensor
  double discriminant = 0.0;
  Dichotomy verdict = Dichotomy::Zero;
  Coeffs6<double> tensor{};
};

/// Throws EllipticityError naming the failing Voigt eigenvalue when the tensor is not convex.
OrthotropicReport orthotropic_discriminant(const OrthotropicConstants& o);

}  // namespace platecont
