#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

#include "platecont/fields.hpp"
#include "platecont/poly2.hpp"

namespace platecont {

/// Psi = R2 H R1 maps g1^{-1}(0) to the identity and g2^{-1}(0) to diag(mu).
struct FrameNormalization {
  Eigen::Matrix2d R1, H, R2, Psi;
  Eigen::Vector2d nu;  // eigenvalues of g1^{-1}(0), in the order used by H
  Eigen::Vector2d mu;  // eigenvalues of the transformed g2^{-1}(0), ascending
};

FrameNormalization normalize_pair(const Eigen::Matrix2d& g1_inv0, const Eigen::Matrix2d& g2_inv0);

/// Upper-index coefficient field A(x) = g^{-1}(x) with polynomial entries.
struct MetricField {
  Poly2 a11, a12, a22;

  static MetricField constant(const Eigen::Matrix2d& A);

  template <typename Scalar>
  Eigen::Matrix<Scalar, 2, 2> operator()(const Scalar& x1, const Scalar& x2) const {
    Eigen::Matrix<Scalar, 2, 2> A;
    const Scalar o = a12(x1, x2);
    A << a11(x1, x2), o, o, a22(x1, x2);
    return A;
  }
  Eigen::Matrix2d at(const Eigen::Vector2d& x) const { return (*this)(x.x(), x.y()); }
  /// Column divergence: (div A)_j = sum_i d_i A^{ij}.
  Eigen::Vector2d divergence(const Eigen::Vector2d& x) const;
};

/// Radial profile phi with Phi(s) = phi / (s phi'): either s^p e^{c s} or exp(-s^{-beta}).
struct Profile {
  enum class Kind { power_exp, exp_neg_power } kind = Kind::exp_neg_power;
  double p = 1.0, c = 0.0, beta = 1.0;

  static Profile identity() { return {Kind::power_exp, 1.0, 0.0, 1.0}; }
  static Profile power_exp(double p, double c) { return {Kind::power_exp, p, c, 1.0}; }
  static Profile carleman(double beta) { return {Kind::exp_neg_power, 1.0, 0.0, beta}; }

  template <typename Scalar>
  Scalar phi(const Scalar& s) const {
    using std::exp;
    using std::pow;
    if (kind == Kind::power_exp) return pow(s, p) * exp(c * s);
    return exp(-pow(s, -beta));
  }
  /// phi'(s) / phi(s)
  template <typename Scalar>
  Scalar log_derivative(const Scalar& s) const {
    using std::pow;
    if (kind == Kind::power_exp) return p / s + c;
    return beta * pow(s, -beta - 1.0);
  }
  double Phi(double s) const { return 1.0 / (s * log_derivative(s)); }
  double dPhi(double s) const;
};

/// Gamma, sigma(x) = (Gamma x . x)^{1/2}, w = exp(-sigma^{-beta}).
struct QuadraticWeight {
  Eigen::Matrix2d Gamma = Eigen::Matrix2d::Identity();
  double beta = 0.5;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();

  double sigma(const Eigen::Vector2d& x) const {
    const Eigen::Vector2d y = x - center;
    return std::sqrt(y.dot(Gamma * y));
  }
  double w(const Eigen::Vector2d& x) const { return std::exp(-std::pow(sigma(x), -beta)); }
  /// log w^{-2 tau} = 2 tau sigma^{-beta}
  double log_weight(const Eigen::Vector2d& x, double tau) const { return 2.0 * tau * std::pow(sigma(x), -beta); }
  double m_star() const;
  double m_star_upper() const;
  Profile profile() const { return Profile::carleman(beta); }
};

/// Gamma0 = diag(1/sqrt(mu_i)) in the normalized frame, pulled back: Gamma = Psi^t Gamma0 Psi.
QuadraticWeight frame_weight(const FrameNormalization& fr, double beta);

struct Omega0Report {
  double closed_form = 0.0;
  double brute_force = 0.0;
  Eigen::Vector2d y = Eigen::Vector2d::Zero();    // maximizer
  Eigen::Vector2d eta = Eigen::Vector2d::Zero();  // orthogonal partner
  Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
  double rho_min = 0.0, rho_max = 0.0;
};

/// g0 is the lower-index metric g(0) (inverse of the coefficient matrix).
Omega0Report omega0_closed(const Eigen::Matrix2d& Gamma, const Eigen::Matrix2d& g0);
/// Angle sweep with step angular_step over [0, pi), then golden-section refinement to 1e-10.
Omega0Report omega0_bruteforce(const Eigen::Matrix2d& Gamma, const Eigen::Matrix2d& g0, double angular_step);
/// Both parts filled.
Omega0Report omega0(const Eigen::Matrix2d& Gamma, const Eigen::Matrix2d& g0, double angular_step = M_PI / 4096.0);

/// Direct evaluation of sup{-(S xi, xi)} for sigma with frozen metric g(0), sampled over directions.
double omega0_from_definition(const Eigen::Matrix2d& Gamma, const Eigen::Matrix2d& g0, int samples = 4096);

/// 1/4 (sqrt(a^*/a_*) + sqrt(a_*/a^*))^2 |X|^4 - (AX, X)(A^{-1}X, X).
double kantorovich_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& X);

/// Level-set quantities of v = phi(sigma) at x for the operator div(A grad).
struct WeightQuantities {
  double v = 0.0;
  Eigen::Vector2d grad_v = Eigen::Vector2d::Zero();
  double grad_g_norm = 0.0;  // |grad_g v| = (grad v . A grad v)^{1/2}
  double lap_g = 0.0;        // div(A grad v)
  double F = 0.0;            // (v lap_g v - |grad_g v|^2) / |grad_g v|^2
  Eigen::Vector2d Y = Eigen::Vector2d::Zero();
  Eigen::Vector2d B = Eigen::Vector2d::Zero();
  Eigen::Matrix2d dB = Eigen::Matrix2d::Zero();  // dB(j, k) = d_k B^j
  double div_B = 0.0;
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();   // S g
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
};

WeightQuantities level_quantities(const Eigen::Matrix2d& Gamma, const Eigen::Vector2d& center, const Profile& prof,
                                  const MetricField& g, const Eigen::Vector2d& x);

struct WeightReport {
  double sigma = 0.0, w = 0.0;
  WeightQuantities of_sigma, of_w;
  double F_w_composed = 0.0;  // Phi(sigma) F_sigma - Phi'(sigma) sigma
  double annihilation = 0.0;  // |S_w grad w| / (|S_w| |grad w|)
};

/// Throws std::domain_error at the center.
WeightReport weight_quantities(const QuadraticWeight& wt, const MetricField& g, const Eigen::Vector2d& x);

/// Riemannian M_v xi . eta = (S g xi)^t g eta.
double riemann_M(const WeightQuantities& q, const Eigen::Vector2d& xi, const Eigen::Vector2d& eta);

struct ConjugateSplit {
  ScalarField direct;      // w^{-tau} div(A grad(w^tau f))
  ScalarField symmetric;   // lap_g f + tau^2 |grad_g w|^2 / w^2 f
  ScalarField antisymmetric;
  double mismatch = 0.0;   // L2 grid norm of direct - (symmetric + antisymmetric), interior nodes
  double scale = 0.0;      // L2 grid norm of direct, same nodes
  double identity_residual = 0.0;  // integral of LHS - RHS of the pointwise identity without div q
  double identity_scale = 0.0;     // integral of |LHS|
};

/// f must vanish near the weight center and near the grid edge. Throws for tau == 0.
ConjugateSplit conjugate_split(const MetricField& g, const QuadraticWeight& wt, const ScalarField& f, double tau);

}  // namespace platecont
