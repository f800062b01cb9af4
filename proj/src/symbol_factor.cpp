#include "platecont/symbol_factor.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "platecont/parallel.hpp"

namespace platecont {

PaperConstants paper_constants(double gamma, double M, const Eigen::Matrix2d& g1_inv0, const Eigen::Matrix2d& g2_inv0,
                               double margin, double floor) {
  if (!(gamma > 0.0 && M > 0.0)) throw std::invalid_argument("paper_constants: need gamma > 0 and M > 0");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> e1(g1_inv0, Eigen::EigenvaluesOnly), e2(g2_inv0, Eigen::EigenvaluesOnly);
  if (!(e1.eigenvalues()(0) > 0.0 && e2.eigenvalues()(0) > 0.0))
    throw std::invalid_argument("paper_constants: metrics must be SPD");
  PaperConstants pc;
  pc.margin = margin;
  pc.floor = floor;
  pc.gamma1 = std::min({gamma, 1.0 / (16.0 * M), 1.0});
  pc.gamma2 = std::pow(5.0, -6.0) * std::pow(pc.gamma1, 15.0);
  pc.beta_worstcase = 1.0 / (pc.gamma2 * pc.gamma2) - 1.0;
  pc.epsilon0 = std::pow(pc.gamma1, 3.0) / std::sqrt(50.0);
  pc.root_bound = 1.0 / (pc.gamma1 * pc.epsilon0);
  pc.nu = e1.eigenvalues();
  pc.mu = e2.eigenvalues();
  pc.beta_bound = std::sqrt(pc.mu(1) * pc.nu(1) / (pc.mu(0) * pc.nu(0))) - 1.0;
  // a relative margin of a zero bound is zero, hence the floor
  pc.beta_practical = std::max((1.0 + margin) * pc.beta_bound, floor);
  return pc;
}

Eigen::Vector2d FactorField::branch(Eigen::Index n, int k) const {
  const auto& r = roots[static_cast<std::size_t>(n)];
  return k == 0 ? Eigen::Vector2d(r.alpha1, r.beta1) : Eigen::Vector2d(r.alpha2, r.beta2);
}

namespace {

double root_distance(double a1, double b1, double a2, double b2) { return std::hypot(a1 - a2, b1 - b2); }

// Max over entries of max-norm gradient and Hessian of a scalar node function, by differences.
void difference_bounds(const Grid& g, const std::function<double(Eigen::Index)>& val, double& grad, double& hess) {
  const auto at = [&](int i, int j) { return val(Eigen::Index(i) + Eigen::Index(g.nx) * j); };
  const double h = g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double gx = 0.0, gy = 0.0;
      if (g.nx > 1) {
        if (i == 0) gx = (at(1, j) - at(0, j)) / h;
        else if (i == g.nx - 1) gx = (at(i, j) - at(i - 1, j)) / h;
        else gx = (at(i + 1, j) - at(i - 1, j)) / (2 * h);
      }
      if (g.ny > 1) {
        if (j == 0) gy = (at(i, 1) - at(i, 0)) / h;
        else if (j == g.ny - 1) gy = (at(i, j) - at(i, j - 1)) / h;
        else gy = (at(i, j + 1) - at(i, j - 1)) / (2 * h);
      }
      grad = std::max(grad, std::hypot(gx, gy));
      if (i > 0 && i < g.nx - 1 && j > 0 && j < g.ny - 1) {
        const double c = at(i, j);
        const double hxx = (at(i + 1, j) - 2 * c + at(i - 1, j)) / (h * h);
        const double hyy = (at(i, j + 1) - 2 * c + at(i, j - 1)) / (h * h);
        const double hxy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4 * h * h);
        Eigen::Matrix2d H;
        H << hxx, hxy, hxy, hyy;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H, Eigen::EigenvaluesOnly);
        hess = std::max(hess, es.eigenvalues().cwiseAbs().maxCoeff());
      }
    }
}

}  // namespace

FactorField factor_field(const ElasticityTensorSpec& spec, const Grid& grid, const FactorOptions& opt) {
  FactorField ff;
  ff.grid = grid;
  const Eigen::Index n = grid.size();
  if (n <= 0) throw std::invalid_argument("factor_field: empty grid");
  ff.coeffs.resize(static_cast<std::size_t>(n));
  std::vector<double> D(static_cast<std::size_t>(n)), scale(static_cast<std::size_t>(n));
  parallel_for(n, [&](std::ptrdiff_t k) {
    const int i = static_cast<int>(k % grid.nx), j = static_cast<int>(k / grid.nx);
    ff.coeffs[k] = quartic_coefficients(evaluate_tensor(spec, grid.node(i, j)));
    D[k] = discriminant_det(ff.coeffs[k]);
    scale[k] = ff.coeffs[k].vec().cwiseAbs().maxCoeff();
  });
  const double maxD = *std::max_element(D.begin(), D.end());
  const double maxS = *std::max_element(scale.begin(), scale.end());
  const double tol = opt.dichotomy_tol > 0.0 ? opt.dichotomy_tol : default_dichotomy_tolerance(maxD, maxS);
  int pos = 0;
  for (double d : D) pos += d > tol ? 1 : 0;
  if (pos == n) ff.mode = Dichotomy::Positive;
  else if (pos == 0) ff.mode = Dichotomy::Zero;
  else throw PreconditionError("factor_field: dichotomy violated on the grid; factorization not defined");
  ff.min_D = *std::min_element(D.begin(), D.end());

  // Pointwise root pass.
  ff.roots.resize(static_cast<std::size_t>(n));
  std::vector<double> dual(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, [&](std::ptrdiff_t k) {
    if (ff.mode == Dichotomy::Zero) {
      ff.roots[k] = double_root_closed_form(ff.coeffs[k]);
      const RootPair<double> cm = solve_quartic(ff.coeffs[k]);
      dual[k] = std::max({std::abs(cm.alpha1 - ff.roots[k].alpha1), std::abs(cm.beta1 - ff.roots[k].beta1),
                          std::abs(cm.alpha2 - ff.roots[k].alpha2), std::abs(cm.beta2 - ff.roots[k].beta2)});
    } else {
      ff.roots[k] = solve_quartic(ff.coeffs[k]);
    }
  });
  ff.closed_vs_companion = *std::max_element(dual.begin(), dual.end());
  for (const auto& r : ff.roots) ff.max_condition = std::max(ff.max_condition, static_cast<double>(r.condition_number));
  if (ff.mode == Dichotomy::Positive && ff.max_condition > opt.max_condition) {
    std::ostringstream os;
    os << "factor_field: root condition number " << ff.max_condition
       << " exceeds the limit on a Positive region (near-zero discriminant)";
    throw IllConditionedError(os.str());
  }

  // Branch continuation: breadth-first from the seed, nearest pairing to the parent.
  ff.seed_index = opt.seed ? *opt.seed : static_cast<int>(ff.index(grid.nx / 2, grid.ny / 2));
  if (ff.seed_index < 0 || ff.seed_index >= n) throw std::invalid_argument("factor_field: seed outside the grid");
  ff.swapped.assign(static_cast<std::size_t>(n), 0);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<Eigen::Index> queue{ff.seed_index};
  seen[ff.seed_index] = 1;
  while (!queue.empty()) {
    const Eigen::Index c = queue.front();
    queue.pop_front();
    const int ci = static_cast<int>(c % grid.nx), cj = static_cast<int>(c / grid.nx);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int ni = ci + di[d], nj = cj + dj[d];
      if (ni < 0 || nj < 0 || ni >= grid.nx || nj >= grid.ny) continue;
      const Eigen::Index nb = ff.index(ni, nj);
      if (seen[nb]) continue;
      seen[nb] = 1;
      const auto& p = ff.roots[c];
      auto& r = ff.roots[nb];
      const double keep = root_distance(p.alpha1, p.beta1, r.alpha1, r.beta1) +
                          root_distance(p.alpha2, p.beta2, r.alpha2, r.beta2);
      const double swap = root_distance(p.alpha1, p.beta1, r.alpha2, r.beta2) +
                          root_distance(p.alpha2, p.beta2, r.alpha1, r.beta1);
      if (!r.clustered && std::abs(keep - swap) <= 1e-12) ff.ambiguous_nodes.push_back(static_cast<int>(nb));
      if (swap < keep) {
        std::swap(r.alpha1, r.alpha2);
        std::swap(r.beta1, r.beta2);
        ff.swapped[nb] = 1;
      }
      queue.push_back(nb);
    }
  }

  ff.metrics.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) ff.metrics[k] = metrics_from_roots(ff.roots[k], ff.coeffs[k].a0);

  for (int g = 0; g < 2; ++g)
    for (int e = 0; e < 3; ++e) {
      const int ri = e == 2 ? 1 : 0, ci = e == 0 ? 0 : 1;
      difference_bounds(
          grid,
          [&](Eigen::Index k) { return g == 0 ? ff.metrics[k].g1(ri, ci) : ff.metrics[k].g2(ri, ci); },
          ff.lipschitz[g], ff.hessian_bound[g]);
    }

  const double gamma1 = std::min({spec.gamma, 1.0 / (16.0 * spec.M), 1.0});
  ff.epsilon0 = std::pow(gamma1, 3.0) / std::sqrt(50.0);
  ff.root_bound = 1.0 / (gamma1 * ff.epsilon0);
  ff.min_beta = std::numeric_limits<double>::infinity();
  for (const auto& r : ff.roots) {
    ff.min_beta = std::min({ff.min_beta, r.beta1, r.beta2});
    ff.max_root_abs = std::max({ff.max_root_abs, std::abs(r.alpha1), std::abs(r.alpha2), r.beta1, r.beta2});
  }
  if (opt.check_root_bounds && (ff.min_beta <= ff.epsilon0 || ff.max_root_abs > ff.root_bound)) {
    std::ostringstream os;
    os << "factor_field: root bound violated (min beta " << ff.min_beta << " vs epsilon0 " << ff.epsilon0
       << ", max |root| " << ff.max_root_abs << " vs " << ff.root_bound << ")";
    throw RootBoundError(os.str());
  }
  return ff;
}

}  // namespace platecont
