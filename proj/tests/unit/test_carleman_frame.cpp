#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "platecont/carleman_frame.hpp"

using namespace platecont;
using Mat = Eigen::Matrix2d;
using Vec = Eigen::Vector2d;

namespace {
Mat diag(double a, double b) { return Vec(a, b).asDiagonal().toDenseMatrix(); }
}  // namespace

TEST_SUITE("carleman_frame") {
  TEST_CASE("pair normalization") {
    const auto id = normalize_pair(Mat::Identity(), Mat::Identity());
    CHECK((id.Psi * id.Psi.transpose()).isApprox(Mat::Identity()));
    CHECK(id.mu.isApprox(Vec(1.0, 1.0)));

    const auto d = normalize_pair(Mat::Identity(), diag(1.0, 4.0));
    CHECK(d.mu.isApprox(Vec(1.0, 4.0)));
    CHECK(d.H.isApprox(Mat::Identity()));

    std::mt19937_64 rng(5);
    for (int n = 0; n < 100; ++n) {
      const Mat g1 = testutil::random_spd(rng, 0.2, 3.0), g2 = testutil::random_spd(rng, 0.2, 3.0);
      const auto fr = normalize_pair(g1, g2);
      CHECK((fr.Psi * g1 * fr.Psi.transpose()).isApprox(Mat::Identity(), 1e-12));
      CHECK((fr.Psi * g2 * fr.Psi.transpose()).isApprox(diag(fr.mu(0), fr.mu(1)), 1e-12));
      const Vec nu = Eigen::SelfAdjointEigenSolver<Mat>(g1).eigenvalues();
      const Vec mu = Eigen::SelfAdjointEigenSolver<Mat>(g2).eigenvalues();
      CHECK(fr.mu(0) >= mu(0) / nu(1) * (1.0 - 1e-12));
      CHECK(fr.mu(1) <= mu(1) / nu(0) * (1.0 + 1e-12));
    }
  }

  TEST_CASE("omega0") {
    CHECK(omega0(Mat::Identity(), Mat::Identity()).closed_form == doctest::Approx(0.0));

    const double m1 = 0.7, m2 = 2.9;
    const auto r = omega0(diag(1.0 / std::sqrt(m1), 1.0 / std::sqrt(m2)), diag(1.0 / m1, 1.0 / m2));
    CHECK(r.closed_form == doctest::Approx(std::sqrt(m2 / m1) - 1.0));

    const auto q = omega0(Mat::Identity(), diag(1.0, 4.0));
    CHECK(q.closed_form == doctest::Approx(3.0));
    CHECK(q.brute_force == doctest::Approx(3.0).epsilon(1e-9));
    // maximizer along the top eigenvector of Q, partner along the bottom one
    CHECK(std::abs(q.y.y()) == doctest::Approx(1.0));
    CHECK(std::abs(q.eta.x()) == doctest::Approx(1.0));
  }

  TEST_CASE("omega0 brute force against closed form") {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 100; ++n) {
      const auto r = omega0(testutil::random_spd(rng, 0.3, 3.0), testutil::random_spd(rng, 0.3, 3.0));
      CHECK(r.brute_force <= r.closed_form + 1e-9);
      CHECK(r.brute_force >= r.closed_form - 1e-6);
    }
  }

  TEST_CASE("Kantorovich inequality") {
    Eigen::VectorXd X = Eigen::VectorXd::Random(3);
    CHECK(std::abs(kantorovich_check(Eigen::MatrixXd::Identity(3, 3), X)) < 1e-14);

    Eigen::MatrixXd A = diag(1.0, 4.0);
    Eigen::VectorXd Y = Vec(1.0, 1.0) / std::sqrt(2.0);
    CHECK(std::abs(kantorovich_check(A, Y)) < 1e-14);

    std::mt19937_64 rng(13);
    std::normal_distribution<double> N(0.0, 1.0);
    double worst = INFINITY;
    for (int n = 0; n < 10000; ++n) {
      const int d = 2 + n % 4;
      Eigen::MatrixXd Z(d, d);
      Eigen::VectorXd V(d);
      for (int i = 0; i < d; ++i) {
        V(i) = N(rng);
        for (int j = 0; j < d; ++j) Z(i, j) = N(rng);
      }
      const Eigen::MatrixXd S = Z * Z.transpose() + 0.05 * Eigen::MatrixXd::Identity(d, d);
      worst = std::min(worst, kantorovich_check(S, V) / std::pow(V.squaredNorm(), 2));
    }
    CHECK(worst >= -1e-12);
  }

  TEST_CASE("level-set quantities of sigma for the flat metric") {
    const MetricField flat = MetricField::constant(Mat::Identity());
    for (const Vec& x : {Vec(0.3, 0.1), Vec(-0.5, 0.7), Vec(0.02, -0.01)}) {
      const auto q = level_quantities(Mat::Identity(), Vec::Zero(), Profile::identity(), flat, x);
      CHECK(q.v == doctest::Approx(x.norm()));
      CHECK(q.grad_g_norm == doctest::Approx(1.0));
      CHECK(std::abs(q.F) < 1e-12);
    }
  }

  TEST_CASE("weight identities with a variable metric") {
    MetricField g = MetricField::constant(diag(1.2, 0.8));
    g.a11.c(1, 0) = 0.1;
    g.a12.c(0, 1) = 0.05;
    g.a22.c(1, 1) = -0.04;
    QuadraticWeight wt;
    wt.Gamma << 1.3, 0.2, 0.2, 0.7;
    wt.beta = 0.8;
    for (const Vec& x : {Vec(0.3, 0.1), Vec(-0.4, 0.2), Vec(0.1, -0.6)}) {
      const auto r = weight_quantities(wt, g, x);
      CHECK(r.annihilation < 1e-10);
      CHECK(r.of_w.F == doctest::Approx(r.F_w_composed).epsilon(1e-9));
      // M_w applied to the normal direction vanishes
      const Vec n = r.of_w.grad_v;
      CHECK(std::abs(riemann_M(r.of_w, g.at(x) * n, Vec(0.3, -1.0))) < 1e-9 * (1.0 + r.of_w.M.norm() * n.squaredNorm()));
    }
    CHECK_THROWS_AS(weight_quantities(wt, g, Vec::Zero()), std::domain_error);
  }

  TEST_CASE("conjugation split") {
    const MetricField flat = MetricField::constant(Mat::Identity());
    QuadraticWeight wt;
    wt.beta = 0.5;
    SUBCASE("zero field") {
      const Grid gr = Grid::centered(Vec::Zero(), 1.0, 65);
      const auto s = conjugate_split(flat, wt, ScalarField::zeros(gr), 3.0);
      CHECK(s.mismatch == 0.0);
      CHECK(s.scale == 0.0);
      CHECK(s.identity_residual == 0.0);
      CHECK_THROWS(conjugate_split(flat, wt, ScalarField::zeros(gr), 0.0));
    }
    SUBCASE("mismatch decreases under refinement") {
      const SigmaAnnulus an{Mat::Identity(), Vec::Zero(), 0.3, 0.7};
      double prev = 0.0;
      for (int n : {65, 129, 257}) {
        const Grid gr = Grid::centered(Vec::Zero(), 1.0, n);
        const auto s = conjugate_split(flat, wt, test_function(gr, an, 2), 3.0);
        const double rel = s.mismatch / s.scale;
        if (prev > 0.0) CHECK(prev / rel > 3.0);
        prev = rel;
      }
    }
  }
}
