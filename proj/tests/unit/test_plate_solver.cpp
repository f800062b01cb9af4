#include <doctest.h>

#include <cmath>
#include <functional>

#include "platecont/plate_solver.hpp"

using namespace platecont;
using Vec = Eigen::Vector2d;

namespace {

const Box kSquare{-1.0, 1.0, -1.0, 1.0};

double l2_error(const ScalarField& v, const std::function<double(const Vec&)>& u, double* norm) {
  double e2 = 0.0, u2 = 0.0;
  for (int j = 0; j < v.grid.ny; ++j)
    for (int i = 0; i < v.grid.nx; ++i) {
      if (!kSquare.contains(v.grid.node(i, j))) continue;
      const double ex = u(v.grid.node(i, j)), e = v.v(i, j) - ex;
      e2 += e * e;
      u2 += ex * ex;
    }
  *norm = std::sqrt(u2) * v.grid.h;
  return std::sqrt(e2) * v.grid.h;
}

// Errors on 65, 129, 257 nodes; converged means order >= 1.5 or errors at the roundoff floor of a
// fourth-order system (10 eps h^-4 ||u||) that grow under refinement.
bool converges(const PlateProblem& p, const std::function<double(const Vec&)>& u) {
  double err[3], floor = 0.0;
  int k = 0;
  for (int n : {65, 129, 257}) {
    const SolveReport r = solve(p, problem_grid(p, n));
    double norm = 0.0;
    err[k++] = l2_error(r.field, u, &norm);
    floor = 10.0 * 2.2e-16 * std::pow(r.h, -4.0) * norm;
  }
  const double order = std::log2(std::sqrt(err[0] * err[1]) / std::sqrt(err[1] * err[2]));
  MESSAGE("errors " << err[0] << " " << err[1] << " " << err[2] << " order " << order);
  return order >= 1.5 || (err[2] <= floor && order < 0.0);
}

}  // namespace

TEST_SUITE("plate_solver") {
  TEST_CASE("interior stencil of the isotropic plate is the 13-point biharmonic stencil") {
    PlateProblem p;
    p.tensor = ElasticityTensorSpec::isotropic(0.0, 0.5);
    p.domain = Rect{kSquare};
    const Grid g = problem_grid(p, 17);
    const Eigen::SparseMatrix<double> K = full_stiffness(p, g);
    const int c = 8;
    const auto at = [&](int di, int dj) {
      return K.coeff(c + g.nx * c, (c + di) + g.nx * (c + dj));
    };
    // h^4 Delta_h^2 weights: 20 center, -8 edge neighbours, 2 diagonals, 1 at distance two; K carries h^-2
    const double s = g.h * g.h;
    CHECK(at(0, 0) * s == doctest::Approx(20.0));
    CHECK(at(1, 0) * s == doctest::Approx(-8.0));
    CHECK(at(0, -1) * s == doctest::Approx(-8.0));
    CHECK(at(1, 1) * s == doctest::Approx(2.0));
    CHECK(at(-1, 1) * s == doctest::Approx(2.0));
    CHECK(at(2, 0) * s == doctest::Approx(1.0));
    CHECK(at(0, -2) * s == doctest::Approx(1.0));
    CHECK(std::abs(at(2, 1)) < 1e-12 / s);
    CHECK(std::abs(at(3, 0)) < 1e-12 / s);
  }

  TEST_CASE("stiffness is symmetric and annihilates quadratics in the interior") {
    PlateProblem p;
    p.tensor = ElasticityTensorSpec::from_orthotropic({3.0, 1.0, 0.4, 0.25});
    p.domain = Rect{kSquare};
    const Grid g = problem_grid(p, 21);
    const Eigen::SparseMatrix<double> K = full_stiffness(p, g);
    const Eigen::SparseMatrix<double> Kt = K.transpose();
    CHECK((K - Kt).norm() == 0.0);

    const auto q = ScalarField::sample(g, [](const Vec& x) { return 1.0 + x.x() - 0.5 * x.x() * x.x() + 2.0 * x.x() * x.y(); });
    const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(q.v.data(), g.size());
    const Eigen::VectorXd Ku = K * u;
    double worst = 0.0;
    for (int j = 3; j < g.ny - 3; ++j)
      for (int i = 3; i < g.nx - 3; ++i) worst = std::max(worst, std::abs(Ku(i + g.nx * j)));
    CHECK(worst < 1e-9 * K.coeff(0, 0));
  }

  TEST_CASE("harmonic quadratic with its Dirichlet pair") {
    PlateProblem p;
    p.tensor = ElasticityTensorSpec::isotropic(0.3, 0.5);
    p.domain = Rect{kSquare};
    p.bc = BoundaryKind::dirichlet_pair;
    const auto u = [](const Vec& x) { return x.x() * x.x() - x.y() * x.y(); };
    p.g1 = u;
    // outward normal derivative on the nearest face
    p.g2 = [](const Vec& x) {
      return std::abs(x.x()) >= std::abs(x.y()) ? 2.0 * std::abs(x.x()) : -2.0 * std::abs(x.y());
    };
    CHECK(converges(p, u));
  }

  TEST_CASE("non-polynomial biharmonic solution with its Dirichlet pair converges at second order") {
    PlateProblem p;
    p.tensor = ElasticityTensorSpec::isotropic(0.3, 0.5);
    p.domain = Rect{kSquare};
    p.bc = BoundaryKind::dirichlet_pair;
    // x1 e^x2 cos x1 is biharmonic
    const auto u = [](const Vec& x) { return x.x() * std::exp(x.y()) * std::cos(x.x()); };
    const auto grad = [](const Vec& x) {
      const double e = std::exp(x.y());
      return Vec(e * (std::cos(x.x()) - x.x() * std::sin(x.x())), x.x() * e * std::cos(x.x()));
    };
    p.g1 = u;
    p.g2 = [grad](const Vec& x) {
      const Vec g = grad(x);
      if (std::abs(x.x()) >= std::abs(x.y())) return x.x() > 0 ? g.x() : -g.x();
      return x.y() > 0 ? g.y() : -g.y();
    };
    CHECK(converges(p, u));
  }

  TEST_CASE("golden-ratio tensor with a manufactured quartic") {
    // a = (1, 0, 3, 0, 1)
    const Coeffs6<double> c{1.0, 0.5, 0.0, 0.0, 0.5, 1.0};
    REQUIRE(quartic_coefficients(c).vec().isApprox((Eigen::Matrix<double, 5, 1>() << 1, 0, 3, 0, 1).finished()));
    Poly2 poly;
    poly.c(4, 0) = 0.5;
    poly.c(2, 2) = -1.0;
    poly.c(0, 4) = 0.3;
    poly.c(3, 1) = 0.2;
    const Manufactured m = manufactured_polynomial(poly, c);
    PlateProblem p;
    p.tensor = ElasticityTensorSpec::from_constant(c);
    p.domain = Rect{kSquare};
    p.bc = BoundaryKind::manufactured;
    p.g1 = m.u;
    p.f = m.f;
    CHECK(converges(p, m.u));
  }

  TEST_CASE("zero data gives the zero solution") {
    PlateProblem p;
    p.tensor = ElasticityTensorSpec::from_orthotropic({4.0, 1.0, 0.3, 0.2});
    p.domain = Disk{Vec::Zero(), 1.0};
    const SolveReport r = solve(p, problem_grid(p, 65));
    CHECK(r.field.v.abs().maxCoeff() == 0.0);
  }

  TEST_CASE("clamped problem with a right-hand side") {
    PlateProblem p;
    p.tensor = ElasticityTensorSpec::isotropic(0.0, 0.5);
    p.epsilon = 1.0;
    const Disk d{Vec::Zero(), 1.0};
    SUBCASE("zero rhs") {
      const ClampedReport r = solve_clamped_inhomogeneous(p, d, 65);
      CHECK(r.h2_norm == 0.0);
      CHECK(r.ratio == 0.0);
    }
    SUBCASE("bump rhs: mesh-stable ratio and linearity") {
      p.f = [](const Vec& x) {
        const double s = x.squaredNorm() / 0.25;
        return s < 1.0 ? std::pow(1.0 - s, 5) : 0.0;
      };
      const ClampedReport a = solve_clamped_inhomogeneous(p, d, 65);
      const ClampedReport b = solve_clamped_inhomogeneous(p, d, 129);
      CHECK(std::isfinite(a.ratio));
      CHECK(a.ratio > 0.0);
      CHECK(b.ratio / a.ratio == doctest::Approx(1.0).epsilon(1.0));
      CHECK(std::max(a.ratio / b.ratio, b.ratio / a.ratio) < 2.0);

      PlateProblem q = p;
      q.f = [f = p.f](const Vec& x) { return 3.0 * f(x); };
      const ClampedReport c = solve_clamped_inhomogeneous(q, d, 65);
      CHECK((c.solve.field.v - 3.0 * a.solve.field.v).abs().maxCoeff() <= 1e-10 * a.solve.field.v.abs().maxCoeff());
    }
  }
}
