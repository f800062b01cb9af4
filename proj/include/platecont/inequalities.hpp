#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "platecont/carleman_frame.hpp"
#include "platecont/fields.hpp"
#include "platecont/jet.hpp"

namespace platecont {

struct CarlemanReport {
  std::string order;  // "second" or "fourth"
  std::vector<double> tau, lhs, rhs, ratio;
  std::vector<double> log_shift;  // integrands carry exp(2 tau sigma^{-beta} - log_shift)
  bool degenerate = false;        // u vanishes: ratios undefined (NaN)
  double beta = 0.0;
  double threshold = 0.0;  // omega0 or the eigenvalue-ratio bound that beta must exceed
  Eigen::Matrix2d Gamma = Eigen::Matrix2d::Identity();
  double h = 0.0;
  double sigma_min_support = 0.0;
};

struct CarlemanOptions {
  double sigma_min = 0.05;  // punctured core excluded from every integrand
};

/// LHS = tau int sigma^beta w^{-2tau} |grad_g u|^2 + tau^3 int sigma^{-beta-2} w^{-2tau} u^2,
/// RHS = int sigma^{2beta+2} w^{-2tau} (lap_g u)^2. Throws PreconditionError when beta <= omega0
/// and std::invalid_argument when the support of u reaches sigma < sigma_min.
CarlemanReport carleman_second_order(const MetricField& g, const QuadraticWeight& wt, const ScalarField& u,
                                     const std::vector<double>& taus, const CarlemanOptions& opt = {});

/// LHS = sum_{k<=3} tau^{6-2k} int sigma^{-beta-2+k(2beta+2)} w^{-2tau} |grad^k u|^2,
/// RHS = int sigma^{5beta+6} w^{-2tau} |L2 L1 u|^2 with L_k = g_k^{ij} d_ij.
CarlemanReport carleman_fourth_order(const MetricField& g1, const MetricField& g2, const QuadraticWeight& wt,
                                     const ScalarField& u, const std::vector<double>& taus,
                                     const CarlemanOptions& opt = {});

/// Closed-form annulus test function bump((sigma - r_in) / (r_out - r_in)) cos(m theta), theta the polar
/// angle of x - c; the same function test_function samples on a grid.
struct AnnulusTest {
  SigmaAnnulus annulus;
  int mode = 0;
  /// Taylor jet to order 4 at x; zero outside the open annulus.
  Jet4 jet(const Eigen::Vector2d& x) const;
};

/// Polar quadrature in sigma-coordinates: trapezoid in angle, Gauss-Legendre panels in sigma graded
/// geometrically towards r_in on the decay length of the weight.
struct QuadratureOptions {
  int angular = 512;
  int radial_panels = 64;
  int gauss = 8;
  int grading = 30;
};
/// Resolution level matching an n x n grid: n angles, n / 8 uniform panels.
QuadratureOptions quadrature_level(int n);

/// Same integrals as carleman_second_order with exact derivatives; the annulus must use the weight's Gamma and center.
CarlemanReport carleman_second_order_quadrature(const MetricField& g, const QuadraticWeight& wt, const AnnulusTest& u,
                                                const std::vector<double>& taus, const QuadratureOptions& q = {},
                                                const CarlemanOptions& opt = {});
CarlemanReport carleman_fourth_order_quadrature(const MetricField& g1, const MetricField& g2,
                                                const QuadraticWeight& wt, const AnnulusTest& u,
                                                const std::vector<double>& taus, const QuadratureOptions& q = {},
                                                const CarlemanOptions& opt = {});

/// sqrt(mu^* nu^* / (mu_* nu_*)) - 1 for the upper-index matrices g1(0), g2(0).
double fourth_order_beta_bound(const Eigen::Matrix2d& g1_0, const Eigen::Matrix2d& g2_0);

enum class SphereVersion { v1, v2, v3, complete };
std::string to_string(SphereVersion v);

struct SphereConstants {
  double gamma2 = 1.0;  // practical surrogate of the ellipticity constant of the metrics
  double beta = 1.0;
  double s_pract = 0.5;
};

struct Radii {
  double r = 0.0, rho = 0.0, rho1 = 0.0, R = 0.0;
};

double theta1(const Radii& rad, const SphereConstants& k);
/// ((gamma2^{-1} rho)^{-beta} - (gamma2 rho1/2)^{-beta}) R^beta
double exponent_argument(const Radii& rad, const SphereConstants& k);

struct ThreeSphereCertificate {
  SphereVersion version = SphereVersion::v1;
  Radii radii;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  SphereConstants constants;
  double theta1 = 0.0, theta = 0.0;
  double A = 0.0, B = 0.0, LHS = 0.0;
  double C_emp = 0.0;
  double exp_argument = 0.0;
  double epsilon = 0.0;  // complete version only
  bool degenerate = false;
  bool admissible = true;
  std::vector<std::string> flags;
  /// complete version: v3 applied to u - u0
  double C_emp_difference = 0.0;
};

/// Fourth-order derivative stack used by all certificates.
DerivativeStack certificate_stack(const ScalarField& u);

ThreeSphereCertificate three_sphere(SphereVersion v, const ScalarField& u, const DerivativeStack& d,
                                    const Eigen::Vector2d& center, const Radii& rad, const SphereConstants& k);
ThreeSphereCertificate three_sphere(SphereVersion v, const ScalarField& u, const Eigen::Vector2d& center,
                                    const Radii& rad, const SphereConstants& k);

/// C = LHS / ((sqrt A + eps)^{2 theta} (sqrt B + eps)^{2(1-theta)}) with v3 norms, plus v3 on u - u0.
ThreeSphereCertificate three_sphere_complete(const ScalarField& u, const ScalarField& u0, double epsilon,
                                             const Eigen::Vector2d& center, const Radii& rad,
                                             const SphereConstants& k);

/// sum_{k<=m} t^{2k} int_{B_t(c)} |grad^k u|^2
double ball_jet(const DerivativeStack& d, const ScalarField& u, const Eigen::Vector2d& c, double t, int m);
/// int_{B_t(c)} of the given node array
double ball_integral(const Grid& g, const Eigen::ArrayXXd& values, const Eigen::Vector2d& c, double t);

struct RatioReport {
  double numerator = 0.0, denominator = 0.0, ratio = 0.0;
  bool degenerate = false;
};

/// [int |u~|^2 + R^2 int |grad u~|^2] / [R^4 (R/r)^2 int |grad^2 u|^2] on B_R(c).
RatioReport poincare_check(const ScalarField& u, const Eigen::Vector2d& c, double r, double R);
/// int_{B_{t/2}} |grad^3 u|^2 / sum_{k<=2} t^{2k-6} int_{B_t} |grad^k u|^2. Throws for u = 0 on B_t.
RatioReport caccioppoli_check(const ScalarField& u, const Eigen::Vector2d& c, double t);
/// ||u||_{H^3} / (||u||_{L^2}^{1/4} ||u||_{H^4}^{3/4}) on B_r(c), normalized norms. Throws for u = 0.
RatioReport interpolation_check(const ScalarField& u, const Eigen::Vector2d& c, double r);

/// r^{-1} (sum_{i<=m} r^{2i} int_{B_r} |grad^i u|^2)^{1/2}
double normalized_norm(const DerivativeStack& d, const ScalarField& u, const Eigen::Vector2d& c, double r, int m);

struct IdentityResidual {
  double lhs = 0.0, rhs = 0.0, residual = 0.0, scale = 0.0;
};

/// |int v lap_g w - int w lap_g v| with lhs = int v lap_g w, rhs = -int grad_g v . grad_g w.
IdentityResidual integration_by_parts(const MetricField& g, const ScalarField& v, const ScalarField& w);

/// Integrated Rellich identity for compactly supported v and a smooth field B with Jacobian dB(j, k) = d_k B^j.
IdentityResidual rellich(const MetricField& g, const ScalarField& v,
                         const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& B,
                         const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& dB);

}  // namespace platecont
