#pragma once

#include <algorithm>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "platecont/elasticity.hpp"
#include "platecont/fields.hpp"

namespace platecont {

struct RealRootError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IllConditionedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FactorizationError : std::runtime_error {
  FactorizationError(const std::string& what, int index) : std::runtime_error(what), coefficient_index(index) {}
  int coefficient_index;
};
struct RootBoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two upper-index coefficient matrices g_k^{ij}; p_k(xi) = g_k xi . xi and p = p2 p1.
template <typename Scalar>
struct MetricPair {
  Eigen::Matrix<Scalar, 2, 2> g1, g2;
  Scalar a0{};
};

namespace detail {

template <typename Scalar>
std::complex<Scalar> horner(const QuarticCoefficients<Scalar>& q, const std::complex<Scalar>& t) {
  return (((q.a0 * t + q.a1) * t + q.a2) * t + q.a3) * t + q.a4;
}

template <typename Scalar>
std::complex<Scalar> horner_d(const QuarticCoefficients<Scalar>& q, const std::complex<Scalar>& t) {
  return ((Scalar(4) * q.a0 * t + Scalar(3) * q.a1) * t + Scalar(2) * q.a2) * t + q.a3;
}

}  // namespace detail

/// Roots of t -> a0 t^4 + a1 t^3 + a2 t^2 + a3 t + a4 from companion-matrix eigenvalues with one
/// Newton polish per root. Pairs that coincide to 1e-6 (relative) are merged into their mean.
template <typename Scalar>
RootPair<Scalar> solve_quartic(const QuarticCoefficients<Scalar>& q, Scalar residual_tol = Scalar(1e-9)) {
  using std::abs;
  using std::sqrt;
  using C = std::complex<Scalar>;
  if (!(q.a0 > Scalar(0))) throw EllipticityError("solve_quartic: a0 <= 0, ellipticity violated");

  Eigen::Matrix<Scalar, 4, 4> comp = Eigen::Matrix<Scalar, 4, 4>::Zero();
  comp(0, 0) = -q.a1 / q.a0;
  comp(0, 1) = -q.a2 / q.a0;
  comp(0, 2) = -q.a3 / q.a0;
  comp(0, 3) = -q.a4 / q.a0;
  comp(1, 0) = comp(2, 1) = comp(3, 2) = Scalar(1);
  Eigen::EigenSolver<Eigen::Matrix<Scalar, 4, 4>> es(comp, false);
  if (es.info() != Eigen::Success) throw IllConditionedError("solve_quartic: eigenvalue iteration failed");

  std::vector<C> roots;
  for (int k = 0; k < 4; ++k) {
    C z = es.eigenvalues()(k);
    const C d = detail::horner_d(q, z);
    if (abs(d) > Scalar(0)) {
      const C zn = z - detail::horner(q, z) / d;
      if (abs(detail::horner(q, zn)) < abs(detail::horner(q, z))) z = zn;
    }
    if (abs(z.imag()) < Scalar(1e-10) * (Scalar(1) + abs(z.real())))
      throw RealRootError("solve_quartic: real root, ellipticity violated");
    roots.push_back(z);
  }

  std::vector<C> upper;
  for (const C& z : roots)
    if (z.imag() > Scalar(0)) upper.push_back(z);
  if (upper.size() != 2) throw IllConditionedError("solve_quartic: roots do not form two conjugate pairs");
  std::sort(upper.begin(), upper.end(), [](const C& a, const C& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });

  RootPair<Scalar> r;
  const Scalar scale = Scalar(1) + abs(upper[0]) + abs(upper[1]);
  if (abs(upper[0] - upper[1]) < Scalar(1e-6) * scale) {
    // Companion eigenvalues of a double root carry sqrt(eps) error; use the coefficient identities instead.
    const Scalar alpha = -q.a1 / (Scalar(4) * q.a0);
    const Scalar b2 = q.a2 / (Scalar(2) * q.a0) - Scalar(3) * alpha * alpha;
    const C m = b2 > Scalar(0) ? C(alpha, sqrt(b2)) : (upper[0] + upper[1]) / Scalar(2);
    upper[0] = upper[1] = m;
    r.clustered = true;
  }
  r.alpha1 = upper[0].real();
  r.beta1 = upper[0].imag();
  r.alpha2 = upper[1].real();
  r.beta2 = upper[1].imag();

  // Reconstruction check: a0 |t - z1|^2 |t - z2|^2 coefficients.
  const Scalar s1 = Scalar(2) * r.alpha1, p1 = r.alpha1 * r.alpha1 + r.beta1 * r.beta1;
  const Scalar s2 = Scalar(2) * r.alpha2, p2 = r.alpha2 * r.alpha2 + r.beta2 * r.beta2;
  Eigen::Matrix<Scalar, 5, 1> rec;
  rec << Scalar(1), -(s1 + s2), p1 + p2 + s1 * s2, -(s1 * p2 + s2 * p1), p1 * p2;
  rec *= q.a0;
  const Scalar denom = q.vec().cwiseAbs().maxCoeff();
  const Scalar res = (rec - q.vec()).cwiseAbs().maxCoeff() / denom;
  if (!(res <= residual_tol)) throw IllConditionedError("solve_quartic: reconstructed quartic residual too large");

  // Root condition number: sum |a_j| |z|^j / (|z| |p'(z)|), worst over the representatives.
  Scalar kappa = Scalar(0);
  const Eigen::Matrix<Scalar, 5, 1> av = q.vec().cwiseAbs();
  for (const C& z : upper) {
    const Scalar az = abs(z);
    const Scalar num = (((av(0) * az + av(1)) * az + av(2)) * az + av(3)) * az + av(4);
    const Scalar den = az * abs(detail::horner_d(q, z));
    kappa = std::max(kappa, den > Scalar(0) ? num / den : Scalar(INFINITY));
  }
  r.condition_number = kappa;
  return r;
}

/// Double-root closed form used on Zero-dichotomy regions.
template <typename Scalar>
RootPair<Scalar> double_root_closed_form(const QuarticCoefficients<Scalar>& q) {
  using std::sqrt;
  const Scalar alpha = -q.a1 / (Scalar(4) * q.a0);
  const Scalar b2 = q.a2 / (Scalar(2) * q.a0) - Scalar(3) * q.a1 * q.a1 / (Scalar(16) * q.a0 * q.a0);
  if (!(b2 > Scalar(0))) throw RealRootError("double_root_closed_form: beta^2 <= 0");
  RootPair<Scalar> r;
  r.alpha1 = r.alpha2 = alpha;
  r.beta1 = r.beta2 = sqrt(b2);
  r.clustered = true;
  r.condition_number = Scalar(1);
  return r;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> metric_from_root(const Scalar& alpha, const Scalar& beta, const Scalar& a0) {
  using std::sqrt;
  const Scalar s = sqrt(a0);
  Eigen::Matrix<Scalar, 2, 2> g;
  g << s, -alpha * s, -alpha * s, s * (alpha * alpha + beta * beta);
  return g;
}

template <typename Scalar>
MetricPair<Scalar> metrics_from_roots(const RootPair<Scalar>& r, const Scalar& a0) {
  if (!(a0 > Scalar(0)) || !(r.beta1 > Scalar(0)) || !(r.beta2 > Scalar(0)))
    throw std::invalid_argument("metrics_from_roots: need a0 > 0 and beta_k > 0");
  return {metric_from_root(r.alpha1, r.beta1, a0), metric_from_root(r.alpha2, r.beta2, a0), a0};
}

/// Quartic coefficients of (g2 xi . xi)(g1 xi . xi).
template <typename Scalar>
QuarticCoefficients<Scalar> product_symbol(const MetricPair<Scalar>& m) {
  // p_k = A_k xi1^2 + 2 B_k xi1 xi2 + C_k xi2^2
  const Scalar A1 = m.g1(0, 0), B1 = m.g1(0, 1), C1 = m.g1(1, 1);
  const Scalar A2 = m.g2(0, 0), B2 = m.g2(0, 1), C2 = m.g2(1, 1);
  QuarticCoefficients<Scalar> q;
  q.a0 = A1 * A2;
  q.a1 = Scalar(2) * (A1 * B2 + A2 * B1);
  q.a2 = A1 * C2 + A2 * C1 + Scalar(4) * B1 * B2;
  q.a3 = Scalar(2) * (B1 * C2 + B2 * C1);
  q.a4 = C1 * C2;
  return q;
}

/// Max coefficient deviation relative to max |a_i|; worst index in *worst when given.
template <typename Scalar>
Scalar factorization_deviation(const MetricPair<Scalar>& m, const QuarticCoefficients<Scalar>& q,
                               int* worst = nullptr) {
  const Eigen::Matrix<Scalar, 5, 1> d = (product_symbol(m).vec() - q.vec()).cwiseAbs();
  Eigen::Index idx = 0;
  const Scalar dmax = d.maxCoeff(&idx);
  if (worst) *worst = static_cast<int>(idx);
  return dmax / q.vec().cwiseAbs().maxCoeff();
}

/// Throws FactorizationError carrying the worst coefficient index when deviation > rtol.
template <typename Scalar>
Scalar verify_factorization(const MetricPair<Scalar>& m, const QuarticCoefficients<Scalar>& q, Scalar rtol) {
  int worst = 0;
  const Scalar dev = factorization_deviation(m, q, &worst);
  if (!(dev <= rtol))
    throw FactorizationError("verify_factorization: coefficient a" + std::to_string(worst) + " deviates", worst);
  return dev;
}

/// Psi map (alpha1, alpha2, w1, w2) -> (Psi1..Psi4) with a1 = -2a0 Psi1, a2 = a0 Psi2,
/// a3 = -2a0 Psi3, a4 = a0 Psi4 and w_k = beta_k^2.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> psi_map(const Eigen::Matrix<Scalar, 4, 1>& v) {
  const Scalar a1 = v(0), a2 = v(1), w1 = v(2), w2 = v(3);
  Eigen::Matrix<Scalar, 4, 1> p;
  p << a1 + a2, a1 * a1 + a2 * a2 + Scalar(4) * a1 * a2 + w1 + w2, a1 * (a2 * a2 + w2) + a2 * (a1 * a1 + w1),
      (a1 * a1 + w1) * (a2 * a2 + w2);
  return p;
}

template <typename Scalar>
QuarticCoefficients<Scalar> coefficients_from_psi(const Eigen::Matrix<Scalar, 4, 1>& psi, const Scalar& a0) {
  return {a0, Scalar(-2) * a0 * psi(0), a0 * psi(1), Scalar(-2) * a0 * psi(2), a0 * psi(3)};
}

/// Closed-form Jacobian determinant of psi_map.
template <typename Scalar>
Scalar psi_jacobian(const RootPair<Scalar>& r) {
  const Scalar d = r.alpha1 - r.alpha2, w1 = r.beta1 * r.beta1, w2 = r.beta2 * r.beta2;
  return -(d * d * d * d + Scalar(2) * (w1 + w2) * d * d + (w1 - w2) * (w1 - w2));
}

struct PaperConstants {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double beta_worstcase = 0.0;
  double beta_bound = 0.0;  // sqrt(mu^* nu^* / (mu_* nu_*)) - 1
  double beta_practical = 0.0;
  double epsilon0 = 0.0;
  double root_bound = 0.0;  // 1 / (gamma1 epsilon0)
  Eigen::Vector2d nu = Eigen::Vector2d::Zero();  // eigenvalues of g1^{-1}(0), ascending
  Eigen::Vector2d mu = Eigen::Vector2d::Zero();  // eigenvalues of g2^{-1}(0), ascending
  double margin = 0.1;
  double floor = 0.1;
};

/// g1_inv0, g2_inv0 are the upper-index coefficient matrices at the origin.
PaperConstants paper_constants(double gamma, double M, const Eigen::Matrix2d& g1_inv0, const Eigen::Matrix2d& g2_inv0,
                               double margin = 0.1, double floor = 0.1);

struct FactorField {
  Grid grid;
  Dichotomy mode = Dichotomy::Positive;
  int seed_index = 0;
  std::vector<QuarticCoefficients<double>> coeffs;
  std::vector<RootPair<double>> roots;  // after branch assignment
  std::vector<MetricPair<double>> metrics;
  std::vector<char> swapped;            // pairing reversed relative to the pointwise order
  std::vector<int> ambiguous_nodes;     // both pairings within 1e-12
  double lipschitz[2] = {0.0, 0.0};     // max |nabla g_k^{ij}| over entries
  double hessian_bound[2] = {0.0, 0.0}; // max |nabla^2 g_k^{ij}| over entries
  double min_beta = 0.0;
  double max_root_abs = 0.0;
  double epsilon0 = 0.0;
  double root_bound = 0.0;
  double closed_vs_companion = 0.0;     // Zero mode: max deviation between the two root paths
  double min_D = 0.0;
  double max_condition = 0.0;

  Eigen::Index index(int i, int j) const { return Eigen::Index(i) + Eigen::Index(grid.nx) * j; }
  /// (alpha, beta) of branch k at node n.
  Eigen::Vector2d branch(Eigen::Index n, int k) const;
};

struct FactorOptions {
  std::optional<int> seed;          // node index; default the grid center
  double dichotomy_tol = 0.0;       // <= 0: default band
  double max_condition = 1e8;       // refuse Positive fields with worse conditioning
  bool check_root_bounds = true;
};

FactorField factor_field(const ElasticityTensorSpec& spec, const Grid& grid, const FactorOptions& opt = {});

}  // namespace platecont
