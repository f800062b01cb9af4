#include "platecont/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "platecont/parallel.hpp"
#include "platecont/symbol_factor.hpp"

namespace platecont {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Nodes where u or any listed derivative is nonzero.
std::vector<char> support_mask(const ScalarField& u, const DerivativeStack& d) {
  const Grid& g = u.grid;
  std::vector<char> m(static_cast<std::size_t>(g.size()), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      bool nz = u.v(i, j) != 0.0;
      for (int k = 1; k <= d.order() && !nz; ++k)
        for (int a = 0; a <= k; ++a)
          if (d(a, k - a)(i, j) != 0.0) {
            nz = true;
            break;
          }
      m[i + std::size_t(g.nx) * j] = nz ? 1 : 0;
    }
  return m;
}

double min_sigma_on(const Grid& g, const std::vector<char>& mask, const QuadraticWeight& wt) {
  double s = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (mask[i + std::size_t(g.nx) * j]) s = std::min(s, wt.sigma(g.node(i, j)));
  return s;
}

// Weighted sums over the support: terms(i, j, sigma) returns (lhs, rhs) integrands before weighting.
template <typename Terms>
void weighted_sums(const Grid& g, const std::vector<char>& mask, const QuadraticWeight& wt, double tau,
                   double& lhs, double& rhs, double& shift, Terms&& terms) {
  const double smin = min_sigma_on(g, mask, wt);
  shift = 2.0 * tau * std::pow(smin, -wt.beta);
  std::vector<double> L(static_cast<std::size_t>(g.ny), 0.0), R(static_cast<std::size_t>(g.ny), 0.0);
  parallel_for(g.ny, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < g.nx; ++i) {
      if (!mask[i + std::size_t(g.nx) * j]) continue;
      const double s = wt.sigma(g.node(i, j));
      const double e = std::exp(2.0 * tau * std::pow(s, -wt.beta) - shift);
      double l = 0.0, r = 0.0;
      terms(i, j, s, l, r);
      L[jj] += e * l;
      R[jj] += e * r;
    }
  });
  lhs = rhs = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    lhs += L[j];
    rhs += R[j];
  }
  lhs *= g.h * g.h;
  rhs *= g.h * g.h;
}

void finish_ratio(CarlemanReport& rep, double l, double r, double shift, double tau) {
  rep.tau.push_back(tau);
  rep.lhs.push_back(l);
  rep.rhs.push_back(r);
  rep.log_shift.push_back(shift);
  rep.ratio.push_back(r > 0.0 ? l / r : kNaN);
}

}  // namespace

CarlemanReport carleman_second_order(const MetricField& g, const QuadraticWeight& wt, const ScalarField& u,
                                     const std::vector<double>& taus, const CarlemanOptions& opt) {
  CarlemanReport rep;
  rep.order = "second";
  rep.beta = wt.beta;
  rep.Gamma = wt.Gamma;
  rep.h = u.grid.h;
  rep.threshold = omega0_closed(wt.Gamma, g.at(wt.center).inverse()).closed_form;
  if (!(wt.beta > rep.threshold)) {
    std::ostringstream os;
    os << "carleman_second_order: beta " << wt.beta << " must exceed omega0 " << rep.threshold;
    throw PreconditionError(os.str());
  }
  const DerivativeStack d = derivatives(u, 2);
  const std::vector<char> mask = support_mask(u, d);
  const Grid& G = u.grid;
  rep.sigma_min_support = min_sigma_on(G, mask, wt);
  if (!std::isfinite(rep.sigma_min_support)) {
    rep.degenerate = true;
    for (double t : taus) finish_ratio(rep, 0.0, 0.0, 0.0, t);
    return rep;
  }
  if (rep.sigma_min_support < opt.sigma_min)
    throw std::invalid_argument("carleman_second_order: support of u reaches the punctured core");
  const double b = wt.beta;
  for (double tau : taus) {
    double l = 0, r = 0, shift = 0;
    weighted_sums(G, mask, wt, tau, l, r, shift, [&](int i, int j, double s, double& li, double& ri) {
      const Eigen::Vector2d x = G.node(i, j);
      const Eigen::Matrix2d A = g.at(x);
      const Eigen::Vector2d gu(d(1, 0)(i, j), d(0, 1)(i, j));
      const double lap = A(0, 0) * d(2, 0)(i, j) + 2.0 * A(0, 1) * d(1, 1)(i, j) + A(1, 1) * d(0, 2)(i, j) +
                         g.divergence(x).dot(gu);
      const double uv = u.v(i, j);
      li = tau * std::pow(s, b) * gu.dot(A * gu) + tau * tau * tau * std::pow(s, -b - 2.0) * uv * uv;
      ri = std::pow(s, 2.0 * b + 2.0) * lap * lap;
    });
    finish_ratio(rep, l, r, shift, tau);
  }
  return rep;
}

double fourth_order_beta_bound(const Eigen::Matrix2d& g1_0, const Eigen::Matrix2d& g2_0) {
  const Eigen::Vector2d nu = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g1_0, Eigen::EigenvaluesOnly).eigenvalues();
  const Eigen::Vector2d mu = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g2_0, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(nu(0) > 0.0 && mu(0) > 0.0)) throw std::invalid_argument("fourth_order_beta_bound: metrics must be SPD");
  return std::sqrt(mu(1) * nu(1) / (mu(0) * nu(0))) - 1.0;
}

CarlemanReport carleman_fourth_order(const MetricField& g1, const MetricField& g2, const QuadraticWeight& wt,
                                     const ScalarField& u, const std::vector<double>& taus,
                                     const CarlemanOptions& opt) {
  CarlemanReport rep;
  rep.order = "fourth";
  rep.beta = wt.beta;
  rep.Gamma = wt.Gamma;
  rep.h = u.grid.h;
  rep.threshold = fourth_order_beta_bound(g1.at(wt.center), g2.at(wt.center));
  if (!(wt.beta > rep.threshold)) {
    std::ostringstream os;
    os << "carleman_fourth_order: beta " << wt.beta << " must exceed the eigenvalue-ratio bound " << rep.threshold;
    throw PreconditionError(os.str());
  }
  const Grid& G = u.grid;
  const DerivativeStack d = derivatives(u, 4);
  ScalarField L1u = ScalarField::zeros(G);
  for (int j = 0; j < G.ny; ++j)
    for (int i = 0; i < G.nx; ++i) {
      const Eigen::Matrix2d A = g1.at(G.node(i, j));
      L1u.v(i, j) = A(0, 0) * d(2, 0)(i, j) + 2.0 * A(0, 1) * d(1, 1)(i, j) + A(1, 1) * d(0, 2)(i, j);
    }
  const DerivativeStack dl = derivatives(L1u, 2);
  const std::vector<char> mask = support_mask(u, d);
  rep.sigma_min_support = min_sigma_on(G, mask, wt);
  if (!std::isfinite(rep.sigma_min_support)) {
    rep.degenerate = true;
    for (double t : taus) finish_ratio(rep, 0.0, 0.0, 0.0, t);
    return rep;
  }
  if (rep.sigma_min_support < opt.sigma_min)
    throw std::invalid_argument("carleman_fourth_order: support of u reaches the punctured core");
  std::array<Eigen::ArrayXXd, 4> n2;
  n2[0] = u.v.square();
  for (int k = 1; k <= 3; ++k) n2[k] = d.tensor_norm2(k);
  const double b = wt.beta;
  for (double tau : taus) {
    double l = 0, r = 0, shift = 0;
    weighted_sums(G, mask, wt, tau, l, r, shift, [&](int i, int j, double s, double& li, double& ri) {
      li = 0.0;
      for (int k = 0; k <= 3; ++k)
        li += std::pow(tau, 6 - 2 * k) * std::pow(s, -b - 2.0 + k * (2.0 * b + 2.0)) * n2[k](i, j);
      const Eigen::Matrix2d A = g2.at(G.node(i, j));
      const double L2L1 = A(0, 0) * dl(2, 0)(i, j) + 2.0 * A(0, 1) * dl(1, 1)(i, j) + A(1, 1) * dl(0, 2)(i, j);
      ri = std::pow(s, 5.0 * b + 6.0) * L2L1 * L2L1;
    });
    finish_ratio(rep, l, r, shift, tau);
  }
  return rep;
}

Jet4 AnnulusTest::jet(const Eigen::Vector2d& x) const {
  const SigmaAnnulus& an = annulus;
  const Eigen::Vector2d y = x - an.center;
  const Jet4 Y1 = Jet4::variable(y.x(), 0), Y2 = Jet4::variable(y.y(), 1);
  const Jet4 S2 = an.Gamma(0, 0) * (Y1 * Y1) + (2.0 * an.Gamma(0, 1)) * (Y1 * Y2) + an.Gamma(1, 1) * (Y2 * Y2);
  if (!(S2.value() > 0.0)) return {};
  const Jet4 t = (pow(S2, 0.5) + (-an.r_in)) * (1.0 / (an.r_out - an.r_in));
  if (!(t.value() > 0.0 && t.value() < 1.0)) return {};
  const Jet4 b = 4.0 * (t * (Jet4::constant(1.0) - t));
  const Jet4 b2 = b * b;
  Jet4 u = b2 * b2 * b;
  if (mode != 0) {
    // cos(m theta) = Re((y1 + i y2)^m) / |y|^m
    Jet4 P = Jet4::constant(1.0), Q;
    for (int k = 0; k < std::abs(mode); ++k) {
      const Jet4 Pn = P * Y1 - Q * Y2;
      Q = P * Y2 + Q * Y1;
      P = Pn;
    }
    u = u * P * pow(Y1 * Y1 + Y2 * Y2, -0.5 * std::abs(mode));
  }
  return u;
}

QuadratureOptions quadrature_level(int n) {
  if (n < 16) throw std::invalid_argument("quadrature_level: need n >= 16");
  QuadratureOptions q;
  q.angular = n;
  q.radial_panels = std::max(2, n / 8);
  return q;
}

namespace {

struct QuadPoint {
  Eigen::Vector2d x;
  double s = 0.0, w = 0.0;
};

std::vector<QuadPoint> annulus_points(const QuadraticWeight& wt, const AnnulusTest& u, double kappa_min,
                                      const QuadratureOptions& q) {
  const SigmaAnnulus& an = u.annulus;
  if (!((an.Gamma - wt.Gamma).norm() <= 1e-12 * wt.Gamma.norm() && (an.center - wt.center).norm() <= 1e-12))
    throw std::invalid_argument("carleman quadrature: annulus must share the weight's Gamma and center");
  if (!(an.r_in > 0.0 && an.r_out > an.r_in)) throw std::invalid_argument("carleman quadrature: need 0 < r_in < r_out");
  if (q.angular < 4 || q.radial_panels < 1 || q.gauss < 2 || q.grading < 0)
    throw std::invalid_argument("carleman quadrature: invalid resolution");
  const double W = an.r_out - an.r_in;
  const double d0 = std::min(W, 64.0 / kappa_min);
  std::vector<double> br{0.0};
  for (int k = q.grading; k >= 0; --k) br.push_back(d0 * std::ldexp(1.0, -k));
  if (d0 < W)
    for (int k = 1; k <= q.radial_panels; ++k) br.push_back(d0 + (W - d0) * k / q.radial_panels);
  const GaussRule gr = gauss_legendre(q.gauss);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(wt.Gamma);
  const Eigen::Matrix2d Gi = es.operatorInverseSqrt();
  const double jac = Gi.determinant();
  std::vector<QuadPoint> pts;
  pts.reserve((br.size() - 1) * gr.x.size() * static_cast<std::size_t>(q.angular));
  const double dphi = 2.0 * M_PI / q.angular;
  for (std::size_t p = 0; p + 1 < br.size(); ++p) {
    const double a = br[p], len = br[p + 1] - br[p];
    for (std::size_t k = 0; k < gr.x.size(); ++k) {
      const double s = an.r_in + a + len * gr.x[k];
      for (int m = 0; m < q.angular; ++m) {
        const double phi = (m + 0.5) * dphi;
        QuadPoint qp;
        qp.s = s;
        qp.x = wt.center + Gi * Eigen::Vector2d(s * std::cos(phi), s * std::sin(phi));
        qp.w = len * gr.w[k] * dphi * s * jac;
        pts.push_back(qp);
      }
    }
  }
  return pts;
}

// Per point, terms[k] for k < nl are LHS pieces multiplied by tau^{pw[k]} sigma^{ex[k]}; terms[nl] is the RHS integrand.
template <int NL>
void quadrature_sums(CarlemanReport& rep, const std::vector<QuadPoint>& pts,
                     const std::vector<std::array<double, NL + 1>>& terms, const std::array<int, NL>& pw,
                     const std::array<double, NL>& ex, double rhs_ex, const std::vector<double>& taus,
                     double r_in) {
  const double b = rep.beta;
  for (double tau : taus) {
    const double shift = 2.0 * tau * std::pow(r_in, -b);
    std::vector<double> L(pts.size()), R(pts.size());
    parallel_for(static_cast<std::ptrdiff_t>(pts.size()), [&](std::ptrdiff_t n) {
      const QuadPoint& p = pts[n];
      const double e = std::exp(2.0 * tau * std::pow(p.s, -b) - shift) * p.w;
      double l = 0.0;
      for (int k = 0; k < NL; ++k) l += std::pow(tau, pw[k]) * std::pow(p.s, ex[k]) * terms[n][k];
      L[n] = e * l;
      R[n] = e * std::pow(p.s, rhs_ex) * terms[n][NL];
    });
    double l = 0.0, r = 0.0;
    for (std::size_t n = 0; n < pts.size(); ++n) {
      l += L[n];
      r += R[n];
    }
    finish_ratio(rep, l, r, shift, tau);
  }
}

double tensor_norm2(const Jet4& j, int k) {
  double s = 0.0, binom = 1.0;
  for (int a = 0; a <= k; ++a) {
    const double v = j.derivative(a, k - a);
    s += binom * v * v;
    binom = binom * (k - a) / (a + 1);
  }
  return s;
}

// u derivative with n1 indices equal to 1 and n2 equal to 2
double du(const Jet4& j, int n1, int n2) { return j.derivative(n1, n2); }

}  // namespace

CarlemanReport carleman_second_order_quadrature(const MetricField& g, const QuadraticWeight& wt, const AnnulusTest& u,
                                                const std::vector<double>& taus, const QuadratureOptions& q,
                                                const CarlemanOptions& opt) {
  CarlemanReport rep;
  rep.order = "second";
  rep.beta = wt.beta;
  rep.Gamma = wt.Gamma;
  rep.threshold = omega0_closed(wt.Gamma, g.at(wt.center).inverse()).closed_form;
  if (!(wt.beta > rep.threshold)) {
    std::ostringstream os;
    os << "carleman_second_order: beta " << wt.beta << " must exceed omega0 " << rep.threshold;
    throw PreconditionError(os.str());
  }
  if (u.annulus.r_in < opt.sigma_min)
    throw std::invalid_argument("carleman_second_order: support of u reaches the punctured core");
  rep.sigma_min_support = u.annulus.r_in;
  const double tmin = taus.empty() ? 1.0 : *std::min_element(taus.begin(), taus.end());
  const double kappa = 2.0 * tmin * wt.beta * std::pow(u.annulus.r_in, -wt.beta - 1.0);
  const std::vector<QuadPoint> pts = annulus_points(wt, u, kappa, q);
  rep.h = (u.annulus.r_out - u.annulus.r_in) / q.radial_panels;
  std::vector<std::array<double, 3>> terms(pts.size());
  parallel_for(static_cast<std::ptrdiff_t>(pts.size()), [&](std::ptrdiff_t n) {
    const Eigen::Vector2d& x = pts[n].x;
    const Jet4 J = u.jet(x);
    const Eigen::Matrix2d A = g.at(x);
    const Eigen::Vector2d gu(J.derivative(1, 0), J.derivative(0, 1));
    const double lap = A(0, 0) * J.derivative(2, 0) + 2.0 * A(0, 1) * J.derivative(1, 1) +
                       A(1, 1) * J.derivative(0, 2) + g.divergence(x).dot(gu);
    terms[n] = {gu.dot(A * gu), J.value() * J.value(), lap * lap};
  });
  const double b = wt.beta;
  quadrature_sums<2>(rep, pts, terms, {1, 3}, {b, -b - 2.0}, 2.0 * b + 2.0, taus, u.annulus.r_in);
  return rep;
}

CarlemanReport carleman_fourth_order_quadrature(const MetricField& g1, const MetricField& g2,
                                                const QuadraticWeight& wt, const AnnulusTest& u,
                                                const std::vector<double>& taus, const QuadratureOptions& q,
                                                const CarlemanOptions& opt) {
  CarlemanReport rep;
  rep.order = "fourth";
  rep.beta = wt.beta;
  rep.Gamma = wt.Gamma;
  rep.threshold = fourth_order_beta_bound(g1.at(wt.center), g2.at(wt.center));
  if (!(wt.beta > rep.threshold)) {
    std::ostringstream os;
    os << "carleman_fourth_order: beta " << wt.beta << " must exceed the eigenvalue-ratio bound " << rep.threshold;
    throw PreconditionError(os.str());
  }
  if (u.annulus.r_in < opt.sigma_min)
    throw std::invalid_argument("carleman_fourth_order: support of u reaches the punctured core");
  rep.sigma_min_support = u.annulus.r_in;
  const double tmin = taus.empty() ? 1.0 : *std::min_element(taus.begin(), taus.end());
  const double kappa = 2.0 * tmin * wt.beta * std::pow(u.annulus.r_in, -wt.beta - 1.0);
  const std::vector<QuadPoint> pts = annulus_points(wt, u, kappa, q);
  rep.h = (u.annulus.r_out - u.annulus.r_in) / q.radial_panels;
  const Poly2* e1[3] = {&g1.a11, &g1.a12, &g1.a22};
  std::vector<std::array<double, 5>> terms(pts.size());
  parallel_for(static_cast<std::ptrdiff_t>(pts.size()), [&](std::ptrdiff_t n) {
    const Eigen::Vector2d& x = pts[n].x;
    const Jet4 J = u.jet(x);
    // L1 u = sum over (k, l) in {11, 12, 21, 22} of A^{kl} u_kl; entry e = 0, 1, 2 with multiplicity 1, 2, 1.
    const int kn1[3] = {2, 1, 0};
    const double mult[3] = {1.0, 2.0, 1.0};
    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();  // second derivatives of L1 u
    for (int e = 0; e < 3; ++e) {
      const double a = (*e1[e])(x);
      const Eigen::Vector2d da = e1[e]->gradient(x);
      const Eigen::Matrix2d dda = e1[e]->hessian(x);
      const int p1 = kn1[e], p2 = 2 - kn1[e];
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const int i1 = i == 0, i2 = i == 1, j1 = j == 0, j2 = j == 1;
          H(i, j) += mult[e] * (dda(i, j) * du(J, p1, p2) + da(i) * du(J, p1 + j1, p2 + j2) +
                                da(j) * du(J, p1 + i1, p2 + i2) + a * du(J, p1 + i1 + j1, p2 + i2 + j2));
        }
    }
    const Eigen::Matrix2d B = g2.at(x);
    const double L2L1 = B(0, 0) * H(0, 0) + 2.0 * B(0, 1) * H(0, 1) + B(1, 1) * H(1, 1);
    terms[n] = {J.value() * J.value(), tensor_norm2(J, 1), tensor_norm2(J, 2), tensor_norm2(J, 3), L2L1 * L2L1};
  });
  const double b = wt.beta;
  std::array<double, 4> ex;
  for (int k = 0; k <= 3; ++k) ex[k] = -b - 2.0 + k * (2.0 * b + 2.0);
  quadrature_sums<4>(rep, pts, terms, {6, 4, 2, 0}, ex, 5.0 * b + 6.0, taus, u.annulus.r_in);
  return rep;
}

std::string to_string(SphereVersion v) {
  switch (v) {
    case SphereVersion::v1: return "v1";
    case SphereVersion::v2: return "v2";
    case SphereVersion::v3: return "v3";
    case SphereVersion::complete: return "complete";
  }
  return "unknown";
}

double theta1(const Radii& rad, const SphereConstants& k) {
  const double g = k.gamma2, b = k.beta;
  const double top = std::pow(rad.rho / g, -b) - std::pow(g * rad.rho1 / 2.0, -b);
  const double bot = std::pow(g * rad.r / 2.0, -b) - std::pow(g * rad.rho1 / 2.0, -b);
  return top / bot;
}

double exponent_argument(const Radii& rad, const SphereConstants& k) {
  return (std::pow(rad.rho / k.gamma2, -k.beta) - std::pow(k.gamma2 * rad.rho1 / 2.0, -k.beta)) *
         std::pow(rad.R, k.beta);
}

DerivativeStack certificate_stack(const ScalarField& u) { return derivatives(u, 4); }

double ball_integral(const Grid& g, const Eigen::ArrayXXd& values, const Eigen::Vector2d& c, double t) {
  return integrate_ball(ScalarField{g, values}, Disk{c, t});
}

double ball_jet(const DerivativeStack& d, const ScalarField& u, const Eigen::Vector2d& c, double t, int m) {
  double s = ball_integral(u.grid, u.v.square(), c, t);
  for (int k = 1; k <= m; ++k) s += std::pow(t, 2 * k) * ball_integral(u.grid, d.tensor_norm2(k), c, t);
  return s;
}

namespace {

void check_radii(ThreeSphereCertificate& c) {
  const Radii& r = c.radii;
  const SphereConstants& k = c.constants;
  const auto flag = [&](const std::string& s) {
    c.flags.push_back(s);
    c.admissible = false;
  };
  if (!(r.r > 0.0 && r.r < r.rho)) flag("need 0 < r < rho");
  if (!(r.rho < r.rho1 * k.gamma2 * k.gamma2 / 2.0)) flag("need rho < rho1 gamma2^2 / 2");
  if (!(r.rho1 < k.s_pract * r.R)) flag("need rho1 < s_pract R");
  if (c.version == SphereVersion::v2 && !(2.0 * r.rho1 <= r.R)) flag("need 2 rho1 <= R");
  if (!(c.theta1 > 0.0 && c.theta1 < 1.0)) flag("theta1 outside (0, 1)");
  c.flags.push_back("s_pract is a configured surrogate for a non-constructive constant");
}

double certificate_ratio(double lhs, double A, double B, double theta, bool& degenerate) {
  degenerate = !(A > 0.0 && B > 0.0);
  if (degenerate) return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::exp(std::log(lhs) - theta * std::log(A) - (1.0 - theta) * std::log(B));
}

}  // namespace

ThreeSphereCertificate three_sphere(SphereVersion v, const ScalarField& u, const DerivativeStack& d,
                                    const Eigen::Vector2d& center, const Radii& rad, const SphereConstants& k) {
  if (v == SphereVersion::complete)
    throw std::invalid_argument("three_sphere: the complete version needs u0; use three_sphere_complete");
  ThreeSphereCertificate c;
  c.version = v;
  c.radii = rad;
  c.center = center;
  c.constants = k;
  c.theta1 = theta1(rad, k);
  c.theta = v == SphereVersion::v3 ? c.theta1 / 4.0 : c.theta1;
  c.exp_argument = exponent_argument(rad, k);
  check_radii(c);
  const Grid& g = u.grid;
  double ref = 0.0;  // scale below which the large-ball quantity counts as zero
  switch (v) {
    case SphereVersion::v1:
      c.LHS = ball_jet(d, u, center, rad.rho, 3);
      c.A = ball_jet(d, u, center, rad.r, 3);
      c.B = ball_jet(d, u, center, rad.rho1, 3);
      ref = c.B;
      break;
    case SphereVersion::v2: {
      const Eigen::ArrayXXd H = d.tensor_norm2(2);
      c.LHS = std::pow(rad.rho, 4) * ball_integral(g, H, center, rad.rho);
      c.A = std::pow(rad.r, 4) * ball_integral(g, H, center, 2.0 * rad.r);
      c.B = std::pow(rad.rho1, 6) / (rad.r * rad.r) * ball_integral(g, H, center, 2.0 * rad.rho1);
      ref = std::pow(rad.rho1, 4) / (rad.r * rad.r) * ball_jet(d, u, center, 2.0 * rad.rho1, 1);
      break;
    }
    case SphereVersion::v3:
      c.LHS = ball_integral(g, u.v.square(), center, rad.rho);
      c.A = ball_integral(g, u.v.square(), center, rad.r);
      c.B = ball_jet(d, u, center, rad.rho1, 4);
      ref = c.B;
      break;
    case SphereVersion::complete: break;
  }
  // Polynomial fields annihilated by the certificate leave only round-off.
  const double tiny = 1e-20 * ref;
  if (c.A <= tiny) c.A = 0.0;
  if (c.B <= tiny) c.B = 0.0;
  if (c.LHS <= tiny) c.LHS = 0.0;
  c.C_emp = certificate_ratio(c.LHS, c.A, c.B, c.theta, c.degenerate);
  return c;
}

ThreeSphereCertificate three_sphere(SphereVersion v, const ScalarField& u, const Eigen::Vector2d& center,
                                    const Radii& rad, const SphereConstants& k) {
  return three_sphere(v, u, certificate_stack(u), center, rad, k);
}

ThreeSphereCertificate three_sphere_complete(const ScalarField& u, const ScalarField& u0, double epsilon,
                                             const Eigen::Vector2d& center, const Radii& rad,
                                             const SphereConstants& k) {
  if (!u.grid.same_layout(u0.grid)) throw std::invalid_argument("three_sphere_complete: u0 missing or on another grid");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("three_sphere_complete: epsilon must be nonnegative");
  ThreeSphereCertificate c = three_sphere(SphereVersion::v3, u, center, rad, k);
  c.version = SphereVersion::complete;
  c.epsilon = epsilon;
  if (epsilon > 0.0 || !c.degenerate) {
    const double den = 2.0 * c.theta * std::log(std::sqrt(c.A) + epsilon) +
                       2.0 * (1.0 - c.theta) * std::log(std::sqrt(c.B) + epsilon);
    c.degenerate = !std::isfinite(den);
    c.C_emp = c.degenerate ? (c.LHS > 0.0 ? std::numeric_limits<double>::infinity() : 0.0)
                           : (c.LHS > 0.0 ? std::exp(std::log(c.LHS) - den) : 0.0);
  }
  ScalarField diff{u.grid, u.v - u0.v};
  c.C_emp_difference = three_sphere(SphereVersion::v3, diff, center, rad, k).C_emp;
  return c;
}

double normalized_norm(const DerivativeStack& d, const ScalarField& u, const Eigen::Vector2d& c, double r, int m) {
  return std::sqrt(std::max(0.0, ball_jet(d, u, c, r, m))) / r;
}

RatioReport poincare_check(const ScalarField& u, const Eigen::Vector2d& c, double r, double R) {
  if (!(r > 0.0 && r <= R)) throw std::invalid_argument("poincare_check: need 0 < r <= R");
  const Grid& g = u.grid;
  const DerivativeStack d = derivatives(u, 2);
  const double area = M_PI * r * r;
  const double mean = ball_integral(g, u.v, c, r) / area;
  const double gx = ball_integral(g, d(1, 0), c, r) / area, gy = ball_integral(g, d(0, 1), c, r) / area;
  Eigen::ArrayXXd ut(g.nx, g.ny), gut(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Eigen::Vector2d y = g.node(i, j) - c;
      ut(i, j) = u.v(i, j) - mean - gx * y.x() - gy * y.y();
      gut(i, j) = std::pow(d(1, 0)(i, j) - gx, 2) + std::pow(d(0, 1)(i, j) - gy, 2);
    }
  RatioReport rep;
  rep.numerator = ball_integral(g, ut.square(), c, R) + R * R * ball_integral(g, gut, c, R);
  rep.denominator = std::pow(R, 4) * std::pow(R / r, 2) * ball_integral(g, d.tensor_norm2(2), c, R);
  const double ref = ball_integral(g, u.v.square(), c, R) + R * R * ball_integral(g, d.tensor_norm2(1), c, R);
  rep.degenerate = !(rep.denominator > 1e-20 * ref);
  rep.ratio = rep.degenerate ? kNaN : rep.numerator / rep.denominator;
  return rep;
}

RatioReport caccioppoli_check(const ScalarField& u, const Eigen::Vector2d& c, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("caccioppoli_check: t must be positive");
  const Grid& g = u.grid;
  const DerivativeStack d = derivatives(u, 3);
  RatioReport rep;
  rep.numerator = ball_integral(g, d.tensor_norm2(3), c, t / 2.0);
  rep.denominator = std::pow(t, -6) * ball_integral(g, u.v.square(), c, t);
  for (int k = 1; k <= 2; ++k) rep.denominator += std::pow(t, 2 * k - 6) * ball_integral(g, d.tensor_norm2(k), c, t);
  if (!(rep.denominator > 0.0)) throw std::invalid_argument("caccioppoli_check: u vanishes on the ball");
  rep.ratio = rep.numerator / rep.denominator;
  return rep;
}

RatioReport interpolation_check(const ScalarField& u, const Eigen::Vector2d& c, double r) {
  const DerivativeStack d = derivatives(u, 4);
  RatioReport rep;
  const double l2 = normalized_norm(d, u, c, r, 0);
  if (!(l2 > 0.0)) throw std::invalid_argument("interpolation_check: zero field");
  rep.numerator = normalized_norm(d, u, c, r, 3);
  rep.denominator = std::pow(l2, 0.25) * std::pow(normalized_norm(d, u, c, r, 4), 0.75);
  rep.ratio = rep.numerator / rep.denominator;
  return rep;
}

IdentityResidual integration_by_parts(const MetricField& g, const ScalarField& v, const ScalarField& w) {
  if (!v.grid.same_layout(w.grid)) throw std::invalid_argument("integration_by_parts: grids differ");
  const Grid& G = v.grid;
  const DerivativeStack dv = derivatives(v, 2), dw = derivatives(w, 2);
  ScalarField a = ScalarField::zeros(G), b = ScalarField::zeros(G), c = ScalarField::zeros(G),
              s = ScalarField::zeros(G);
  for (int j = 0; j < G.ny; ++j)
    for (int i = 0; i < G.nx; ++i) {
      const Eigen::Vector2d x = G.node(i, j);
      const Eigen::Matrix2d A = g.at(x);
      const Eigen::Vector2d dA = g.divergence(x);
      const Eigen::Vector2d gv(dv(1, 0)(i, j), dv(0, 1)(i, j)), gw(dw(1, 0)(i, j), dw(0, 1)(i, j));
      const double lv = A(0, 0) * dv(2, 0)(i, j) + 2 * A(0, 1) * dv(1, 1)(i, j) + A(1, 1) * dv(0, 2)(i, j) + dA.dot(gv);
      const double lw = A(0, 0) * dw(2, 0)(i, j) + 2 * A(0, 1) * dw(1, 1)(i, j) + A(1, 1) * dw(0, 2)(i, j) + dA.dot(gw);
      a.v(i, j) = v.v(i, j) * lw;
      b.v(i, j) = w.v(i, j) * lv;
      c.v(i, j) = gv.dot(A * gw);
      s.v(i, j) = std::abs(c.v(i, j));
    }
  IdentityResidual r;
  r.lhs = integrate_grid(a);
  r.rhs = -integrate_grid(c);
  r.residual = std::max(std::abs(r.lhs - integrate_grid(b)), std::abs(r.lhs - r.rhs));
  r.scale = integrate_grid(s);
  return r;
}

IdentityResidual rellich(const MetricField& g, const ScalarField& v,
                         const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& B,
                         const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& dB) {
  const Grid& G = v.grid;
  const DerivativeStack d = derivatives(v, 2);
  ScalarField l = ScalarField::zeros(G), rr = ScalarField::zeros(G), s = ScalarField::zeros(G);
  for (int j = 0; j < G.ny; ++j)
    for (int i = 0; i < G.nx; ++i) {
      const Eigen::Vector2d x = G.node(i, j);
      const Eigen::Matrix2d A = g.at(x);
      const Eigen::Vector2d gv(d(1, 0)(i, j), d(0, 1)(i, j));
      if (gv.squaredNorm() == 0.0) continue;
      const double lap =
          A(0, 0) * d(2, 0)(i, j) + 2 * A(0, 1) * d(1, 1)(i, j) + A(1, 1) * d(0, 2)(i, j) + g.divergence(x).dot(gv);
      const Eigen::Vector2d b = B(x);
      const Eigen::Matrix2d J = dB(x);
      const Eigen::Vector2d g11 = g.a11.gradient(x), g12 = g.a12.gradient(x), g22 = g.a22.gradient(x);
      Eigen::Matrix2d BdA;
      BdA << b.dot(g11), b.dot(g12), b.dot(g12), b.dot(g22);
      l.v(i, j) = 2.0 * b.dot(gv) * lap;
      rr.v(i, j) = J.trace() * gv.dot(A * gv) - 2.0 * gv.dot(J * A * gv) + gv.dot(BdA * gv);
      s.v(i, j) = std::abs(l.v(i, j));
    }
  IdentityResidual r;
  r.lhs = integrate_grid(l);
  r.rhs = integrate_grid(rr);
  r.residual = std::abs(r.lhs - r.rhs);
  r.scale = integrate_grid(s);
  return r;
}

}  // namespace platecont
