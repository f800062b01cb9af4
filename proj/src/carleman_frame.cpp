#include "platecont/carleman_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "platecont/parallel.hpp"

namespace platecont {

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::Vector2d>;
using Vec2AD = Eigen::Matrix<AD, 2, 1>;
using Mat2AD = Eigen::Matrix<AD, 2, 2>;

void require_spd(const Eigen::Matrix2d& A, const char* who) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A, Eigen::EigenvaluesOnly);
  if (!((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + A.cwiseAbs().maxCoeff())) ||
      !(es.eigenvalues()(0) > 0.0))
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric positive definite");
}

// Rotation with rows equal to the eigenvectors of a symmetric matrix.
Eigen::Matrix2d rotation_rows(const Eigen::Matrix2d& V) {
  Eigen::Matrix2d R = V.transpose();
  if (R.determinant() < 0.0) R.row(1) *= -1.0;
  return R;
}

}  // namespace

FrameNormalization normalize_pair(const Eigen::Matrix2d& g1_inv0, const Eigen::Matrix2d& g2_inv0) {
  require_spd(g1_inv0, "normalize_pair");
  require_spd(g2_inv0, "normalize_pair");
  FrameNormalization fr;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> e1(g1_inv0);
  fr.R1 = rotation_rows(e1.eigenvectors());
  fr.nu = e1.eigenvalues();
  fr.H = fr.nu.cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::Matrix2d C = fr.H * fr.R1 * g2_inv0 * fr.R1.transpose() * fr.H;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> e2(0.5 * (C + C.transpose()));
  fr.R2 = rotation_rows(e2.eigenvectors());
  fr.mu = e2.eigenvalues();
  fr.Psi = fr.R2 * fr.H * fr.R1;
  return fr;
}

MetricField MetricField::constant(const Eigen::Matrix2d& A) {
  return {Poly2::constant(A(0, 0)), Poly2::constant(0.5 * (A(0, 1) + A(1, 0))), Poly2::constant(A(1, 1))};
}

Eigen::Vector2d MetricField::divergence(const Eigen::Vector2d& x) const {
  const Eigen::Vector2d g11 = a11.gradient(x), g12 = a12.gradient(x), g22 = a22.gradient(x);
  return {g11.x() + g12.y(), g12.x() + g22.y()};
}

double Profile::dPhi(double s) const {
  if (kind == Kind::power_exp) {
    const double d = p + c * s;
    return -c / (d * d);
  }
  return std::pow(s, beta - 1.0);
}

double QuadraticWeight::m_star() const {
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(Gamma, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double QuadraticWeight::m_star_upper() const {
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(Gamma, Eigen::EigenvaluesOnly).eigenvalues()(1);
}

QuadraticWeight frame_weight(const FrameNormalization& fr, double beta) {
  QuadraticWeight wt;
  const Eigen::Matrix2d G0 = fr.mu.cwiseSqrt().cwiseInverse().asDiagonal();
  wt.Gamma = fr.Psi.transpose() * G0 * fr.Psi;
  wt.beta = beta;
  return wt;
}

Omega0Report omega0_closed(const Eigen::Matrix2d& Gamma, const Eigen::Matrix2d& g0) {
  require_spd(Gamma, "omega0_closed");
  require_spd(g0, "omega0_closed");
  Omega0Report r;
  const Eigen::Matrix2d sg = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g0).operatorSqrt();
  r.Q = sg * Gamma.inverse() * sg;
  r.Q = 0.5 * (r.Q + r.Q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r.Q);
  r.rho_min = es.eigenvalues()(0);
  r.rho_max = es.eigenvalues()(1);
  r.closed_form = r.rho_max / r.rho_min - 1.0;
  r.y = es.eigenvectors().col(1);
  r.eta = es.eigenvectors().col(0);
  return r;
}

Omega0Report omega0_bruteforce(const Eigen::Matrix2d& Gamma, const Eigen::Matrix2d& g0, double angular_step) {
  if (!(angular_step > 0.0)) throw std::invalid_argument("omega0_bruteforce: step must be positive");
  Omega0Report r = omega0_closed(Gamma, g0);
  const Eigen::Matrix2d Q = r.Q, Qi = Q.inverse();
  const auto H = [&](double t) {
    const Eigen::Vector2d y(std::cos(t), std::sin(t)), eta(-std::sin(t), std::cos(t));
    return y.dot(Q * y) * (y.dot(Qi * y) + eta.dot(Qi * eta)) - 2.0;
  };
  const int n = std::max(8, static_cast<int>(std::ceil(M_PI / angular_step)));
  const double step = M_PI / n;
  int best = 0;
  double hb = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double v = H(k * step);
    if (v > hb) {
      hb = v;
      best = k;
    }
  }
  // golden-section on the bracketing interval
  double a = (best - 1) * step, b = (best + 1) * step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = H(c), fd = H(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = H(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = H(d);
    }
  }
  const double t = 0.5 * (a + b);
  r.brute_force = std::max(hb, H(t));
  r.y = Eigen::Vector2d(std::cos(t), std::sin(t));
  r.eta = Eigen::Vector2d(-std::sin(t), std::cos(t));
  return r;
}

Omega0Report omega0(const Eigen::Matrix2d& Gamma, const Eigen::Matrix2d& g0, double angular_step) {
  Omega0Report r = omega0_bruteforce(Gamma, g0, angular_step);
  return r;
}

double omega0_from_definition(const Eigen::Matrix2d& Gamma, const Eigen::Matrix2d& g0, int samples) {
  const Eigen::Matrix2d A0 = g0.inverse();
  const MetricField g = MetricField::constant(A0);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double s = M_PI * k / samples;  // S is even in x
    const Eigen::Vector2d x(std::cos(s), std::sin(s));
    const WeightQuantities q = level_quantities(Gamma, Eigen::Vector2d::Zero(), Profile::identity(), g, x);
    const Eigen::Vector2d n = A0 * q.grad_v;
    Eigen::Vector2d xi(-n.y(), n.x());
    xi /= std::sqrt(xi.dot(A0 * xi));
    best = std::max(best, -xi.dot(q.S * xi));
  }
  return best;
}

double kantorovich_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& X) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw std::invalid_argument("kantorovich_check: matrix is singular or indefinite");
  const double x2 = X.squaredNorm();
  if (!(x2 > 0.0)) throw std::invalid_argument("kantorovich_check: X must be nonzero");
  const double k = std::sqrt(hi / lo) + std::sqrt(lo / hi);
  const Eigen::VectorXd AiX = es.eigenvectors() * (es.eigenvalues().cwiseInverse().asDiagonal() *
                                                   (es.eigenvectors().transpose() * X));
  return 0.25 * k * k * x2 * x2 - X.dot(A * X) * X.dot(AiX);
}

WeightQuantities level_quantities(const Eigen::Matrix2d& Gamma, const Eigen::Vector2d& center, const Profile& prof,
                                  const MetricField& g, const Eigen::Vector2d& x) {
  const Eigen::Vector2d y = x - center;
  const double s = std::sqrt(y.dot(Gamma * y));
  if (!(s > 0.0)) throw std::domain_error("level_quantities: evaluation at the weight center");

  // Log-gradient t = grad v / v = (phi'/phi)(sigma) grad sigma; everything below is scale free in v.
  const AD x1(x.x(), 2, 0), x2(x.y(), 2, 1);
  Vec2AD yy(x1 - center.x(), x2 - center.y());
  const Vec2AD Gy = Gamma.cast<AD>() * yy;
  const AD sig = sqrt(yy.dot(Gy));
  const AD L = prof.log_derivative(sig);
  const Vec2AD t = Gy * (L / sig);
  const Mat2AD A = g(x1, x2);
  const Vec2AD At = A * t;
  const AD K = t.dot(At);
  const Vec2AD B = At / K;

  WeightQuantities q;
  q.A = g.at(x);
  Eigen::Vector2d tv(t(0).value(), t(1).value());
  const double Kv = K.value();
  const double divAt = At(0).derivatives()(0) + At(1).derivatives()(1);
  q.v = prof.phi(s);
  q.grad_v = q.v * tv;
  q.grad_g_norm = q.v * std::sqrt(Kv);
  q.lap_g = q.v * (divAt + Kv);
  q.F = divAt / Kv;
  q.Y = (q.A * tv) / std::sqrt(Kv);
  q.B = Eigen::Vector2d(B(0).value(), B(1).value());
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) q.dB(j, k) = B(j).derivatives()(k);
  q.div_B = q.dB.trace();
  Eigen::Matrix2d BdA = Eigen::Matrix2d::Zero();
  for (int k = 0; k < 2; ++k) {
    Eigen::Matrix2d dA;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) dA(i, j) = A(i, j).derivatives()(k);
    BdA += q.B(k) * dA;
  }
  q.S = 0.5 * ((q.div_B - q.F) * q.A - q.A * q.dB.transpose() - q.dB * q.A + BdA);
  q.M = q.S * q.A.inverse();
  return q;
}

WeightReport weight_quantities(const QuadraticWeight& wt, const MetricField& g, const Eigen::Vector2d& x) {
  WeightReport r;
  r.sigma = wt.sigma(x);
  if (!(r.sigma > 0.0)) throw std::domain_error("weight_quantities: evaluation at the origin");
  r.w = wt.w(x);
  r.of_sigma = level_quantities(wt.Gamma, wt.center, Profile::identity(), g, x);
  r.of_w = level_quantities(wt.Gamma, wt.center, wt.profile(), g, x);
  const Profile pr = wt.profile();
  r.F_w_composed = pr.Phi(r.sigma) * r.of_sigma.F - pr.dPhi(r.sigma) * r.sigma;
  const Eigen::Vector2d dir = r.of_w.grad_v.normalized();
  const double sn = r.of_w.S.norm();
  r.annihilation = sn > 0.0 ? (r.of_w.S * dir).norm() / sn : 0.0;
  return r;
}

double riemann_M(const WeightQuantities& q, const Eigen::Vector2d& xi, const Eigen::Vector2d& eta) {
  const Eigen::Matrix2d G = q.A.inverse();
  return (q.M * xi).dot(G * eta);
}

ConjugateSplit conjugate_split(const MetricField& g, const QuadraticWeight& wt, const ScalarField& f, double tau) {
  if (tau == 0.0) throw std::invalid_argument("conjugate_split: tau must be nonzero");
  const Grid& G = f.grid;
  const DerivativeStack df = derivatives(f, 2);

  // Shift log w so the largest value of w^tau on the support of f is 1.
  double ref = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < G.ny; ++j)
    for (int i = 0; i < G.nx; ++i)
      if (f.v(i, j) != 0.0) ref = std::max(ref, -std::pow(wt.sigma(G.node(i, j)), -wt.beta));
  if (!std::isfinite(ref)) ref = 0.0;

  ScalarField wtau = ScalarField::zeros(G), u = ScalarField::zeros(G);
  for (int j = 0; j < G.ny; ++j)
    for (int i = 0; i < G.nx; ++i) {
      const double s = wt.sigma(G.node(i, j));
      const double e = s > 0.0 ? std::exp(tau * (-std::pow(s, -wt.beta) - ref)) : 0.0;
      wtau.v(i, j) = e;
      u.v(i, j) = e * f.v(i, j);
    }
  const DerivativeStack du = derivatives(u, 2);

  ConjugateSplit out{ScalarField::zeros(G), ScalarField::zeros(G), ScalarField::zeros(G)};
  std::vector<double> mis(static_cast<std::size_t>(G.ny), 0.0), sc(static_cast<std::size_t>(G.ny), 0.0);
  std::vector<double> idr(static_cast<std::size_t>(G.ny), 0.0), ids(static_cast<std::size_t>(G.ny), 0.0);
  const double h2 = G.h * G.h;
  parallel_for(G.ny, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < G.nx; ++i) {
      const Eigen::Vector2d x = G.node(i, j);
      if (!(wt.sigma(x) > 0.0)) continue;
      const Eigen::Vector2d grad(df(1, 0)(i, j), df(0, 1)(i, j));
      Eigen::Matrix2d hess;
      hess << df(2, 0)(i, j), df(1, 1)(i, j), df(1, 1)(i, j), df(0, 2)(i, j);
      if (f.v(i, j) == 0.0 && grad.squaredNorm() == 0.0 && hess.squaredNorm() == 0.0) continue;
      const Eigen::Matrix2d A = g.at(x);
      const Eigen::Vector2d divA = g.divergence(x);
      const double lapf = (A.cwiseProduct(hess)).sum() + divA.dot(grad);

      const WeightQuantities q = level_quantities(wt.Gamma, wt.center, wt.profile(), g, x);
      const Eigen::Vector2d t = q.grad_v / q.v;  // grad w / w
      const double K = t.dot(A * t);
      const double sym = lapf + tau * tau * K * f.v(i, j);
      const double anti = 2.0 * tau * (grad.dot(A * t) + 0.5 * K * q.F * f.v(i, j));
      out.symmetric.v(i, j) = sym;
      out.antisymmetric.v(i, j) = anti;

      const double wt_ij = wtau.v(i, j);
      if (wt_ij > 1e-250) {
        Eigen::Matrix2d hu;
        hu << du(2, 0)(i, j), du(1, 1)(i, j), du(1, 1)(i, j), du(0, 2)(i, j);
        const Eigen::Vector2d gu(du(1, 0)(i, j), du(0, 1)(i, j));
        const double direct = ((A.cwiseProduct(hu)).sum() + divA.dot(gu)) / wt_ij;
        out.direct.v(i, j) = direct;
        mis[j] += (direct - sym - anti) * (direct - sym - anti) * h2;
        sc[j] += direct * direct * h2;
      } else {
        out.direct.v(i, j) = std::numeric_limits<double>::quiet_NaN();
      }

      // Pointwise identity with the divergence term dropped.
      const double P = sym + anti;
      const double dY = grad.dot(A * t) / std::sqrt(K);
      const Eigen::Vector2d zeta = grad - dY * t / std::sqrt(K);
      const double T2 = zeta.dot(A * zeta);
      const double Mterm = zeta.dot(q.S * zeta);
      const double F = q.F;
      const double fv = f.v(i, j);
      const double lhs = P * P / K;
      const double rhs = sym * sym / K + 4.0 * tau * tau * dY * dY * (1.0 + F / (2.0 * tau)) +
                         4.0 * tau * (Mterm + 0.5 * F * T2) -
                         2.0 * tau * tau * tau * K * F * (1.0 + F / (2.0 * tau)) * fv * fv + 2.0 * tau * F * fv * P;
      idr[j] += (lhs - rhs) * h2;
      ids[j] += std::abs(lhs) * h2;
    }
  });
  double m = 0, s = 0;
  for (int j = 0; j < G.ny; ++j) {
    m += mis[j];
    s += sc[j];
    out.identity_residual += idr[j];
    out.identity_scale += ids[j];
  }
  out.mismatch = std::sqrt(m);
  out.scale = std::sqrt(s);
  return out;
}

}  // namespace platecont
