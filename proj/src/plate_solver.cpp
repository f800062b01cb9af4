#include "platecont/plate_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "platecont/symbol_factor.hpp"

namespace platecont {

std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::clamped_zero: return "clamped_zero";
    case BoundaryKind::manufactured: return "manufactured";
    case BoundaryKind::dirichlet_pair: return "dirichlet_pair";
  }
  return "unknown";
}

Grid problem_grid(const PlateProblem& p, int n) {
  if (n < 9) throw std::invalid_argument("problem_grid: need at least 9 nodes across");
  if (const auto* r = std::get_if<Rect>(&p.domain)) {
    Grid g = Grid::covering(r->box, n);
    if (p.bc == BoundaryKind::dirichlet_pair) {
      g.nx += 2;
      g.ny += 2;
      g.x0 -= g.h;
      g.y0 -= g.h;
    }
    return g;
  }
  const Disk& d = std::get<Disk>(p.domain);
  const double h = 2.0 * d.radius / (n - 1);
  const int extra = 3;
  Grid g;
  g.nx = g.ny = n + 2 * extra;
  g.h = h;
  g.x0 = d.center.x() - d.radius - extra * h;
  g.y0 = d.center.y() - d.radius - extra * h;
  return g;
}

namespace {

struct Sample {
  Eigen::Index node;
  std::array<Eigen::Index, 9> idx;  // nodes touched by the sample
  std::array<Eigen::Vector3d, 9> coef;  // Voigt Hessian coefficients per touched node
};

// Hessian sample at node (i, j) paired with the adjacent cell (ci, cj): lower-left corner.
Sample make_sample(const Grid& g, int i, int j, int ci, int cj) {
  const double ih2 = 1.0 / (g.h * g.h);
  const double s2 = std::sqrt(2.0);
  Sample s;
  s.node = i + Eigen::Index(g.nx) * j;
  int k = 0;
  const auto put = [&](int a, int b, const Eigen::Vector3d& c) {
    s.idx[k] = a + Eigen::Index(g.nx) * b;
    s.coef[k] = c;
    ++k;
  };
  // Five-point part.
  put(i, j, Eigen::Vector3d(-2 * ih2, -2 * ih2, 0));
  put(i - 1, j, Eigen::Vector3d(ih2, 0, 0));
  put(i + 1, j, Eigen::Vector3d(ih2, 0, 0));
  put(i, j - 1, Eigen::Vector3d(0, ih2, 0));
  put(i, j + 1, Eigen::Vector3d(0, ih2, 0));
  // Mixed part on the cell corners; the corner equal to (i, j) merges with the first entry.
  const int cx[4] = {ci, ci + 1, ci, ci + 1}, cy[4] = {cj, cj, cj + 1, cj + 1};
  const double sg[4] = {1, -1, -1, 1};
  for (int q = 0; q < 4; ++q) {
    const Eigen::Index id = cx[q] + Eigen::Index(g.nx) * cy[q];
    bool merged = false;
    for (int t = 0; t < k; ++t)
      if (s.idx[t] == id) {
        s.coef[t](2) += s2 * sg[q] * ih2;
        merged = true;
      }
    if (!merged) put(cx[q], cy[q], Eigen::Vector3d(0, 0, s2 * sg[q] * ih2));
  }
  for (; k < 9; ++k) {
    s.idx[k] = -1;
    s.coef[k].setZero();
  }
  return s;
}

// ghost_layer: skip cells in the outer ring, so boundary nodes carry trapezoid weights.
template <typename Fn>
void for_each_sample(const Grid& g, const std::vector<char>& include, bool ghost_layer, Fn&& fn) {
  const auto cell_ok = [&](int ci, int cj) {
    return !ghost_layer || (ci >= 1 && cj >= 1 && ci <= g.nx - 3 && cj <= g.ny - 3);
  };
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      if (!include[i + std::size_t(g.nx) * j]) continue;
      for (int cj = j - 1; cj <= j; ++cj)
        for (int ci = i - 1; ci <= i; ++ci)
          if (cell_ok(ci, cj)) fn(make_sample(g, i, j, ci, cj));
    }
}

Eigen::Matrix3d weight_at(const PlateProblem& p, const Eigen::Vector2d& x) {
  return p.multiplier * voigt_matrix(evaluate_tensor(p.tensor, x));
}

struct Roles {
  std::vector<NodeRole> role;
  std::vector<char> active;
  std::vector<Eigen::Index> mirror;
  bool ghost_layer = false;
};

Roles classify_nodes(const PlateProblem& p, const Grid& g) {
  Roles r;
  const std::size_t n = static_cast<std::size_t>(g.size());
  r.role.assign(n, NodeRole::outside);
  r.active.assign(n, 0);
  r.mirror.assign(n, -1);
  if (std::holds_alternative<Rect>(p.domain) && p.bc == BoundaryKind::dirichlet_pair) {
    // ring 0 ghosts, ring 1 on the boundary, the rest unknown
    r.ghost_layer = true;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t k = i + std::size_t(g.nx) * j;
        const int ring = std::min({i, j, g.nx - 1 - i, g.ny - 1 - j});
        if (ring >= 1) {
          r.active[k] = 1;
          r.role[k] = ring == 1 ? NodeRole::fixed : NodeRole::unknown;
          continue;
        }
        const bool corner = (i == 0 || i == g.nx - 1) && (j == 0 || j == g.ny - 1);
        if (corner) {
          r.role[k] = NodeRole::fixed;  // keeps the boundary corner sample; its stencil never reaches here
          continue;
        }
        r.role[k] = NodeRole::linked;
        const int mi = i == 0 ? 2 : i == g.nx - 1 ? g.nx - 3 : i;
        const int mj = j == 0 ? 2 : j == g.ny - 1 ? g.ny - 3 : j;
        r.mirror[k] = mi + Eigen::Index(g.nx) * mj;
      }
    return r;
  }
  if (std::holds_alternative<Rect>(p.domain)) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t k = i + std::size_t(g.nx) * j;
        r.active[k] = 1;
        const int ring = std::min({i, j, g.nx - 1 - i, g.ny - 1 - j});
        r.role[k] = ring < 2 ? NodeRole::fixed : NodeRole::unknown;
      }
    return r;
  }
  const Disk& d = std::get<Disk>(p.domain);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = i + std::size_t(g.nx) * j;
      if ((g.node(i, j) - d.center).norm() < d.radius) {
        r.active[k] = 1;
        r.role[k] = NodeRole::unknown;
      }
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = i + std::size_t(g.nx) * j;
      if (r.active[k]) continue;
      bool near = false;
      for (int b = std::max(0, j - 2); b <= std::min(g.ny - 1, j + 2) && !near; ++b)
        for (int a = std::max(0, i - 2); a <= std::min(g.nx - 1, i + 2); ++a)
          if (r.active[a + std::size_t(g.nx) * b]) {
            near = true;
            break;
          }
      if (near) r.role[k] = NodeRole::fixed;
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = i + std::size_t(g.nx) * j;
      if (r.role[k] == NodeRole::unknown && (i < 2 || j < 2 || i > g.nx - 3 || j > g.ny - 3))
        throw std::invalid_argument("assemble: disk too close to the grid edge");
    }
  return r;
}

// Boundary projection and signed distance (positive outside the domain).
void project(const PlateDomain& dom, const Eigen::Vector2d& x, Eigen::Vector2d& p, double& s) {
  if (const auto* d = std::get_if<Disk>(&dom)) {
    Eigen::Vector2d y = x - d->center;
    const double r = y.norm();
    if (r == 0.0) y = Eigen::Vector2d(1, 0);
    else y /= r;
    p = d->center + d->radius * y;
    s = r - d->radius;
    return;
  }
  const Box& b = std::get<Rect>(dom).box;
  const double dist[4] = {x.x() - b.xmin, b.xmax - x.x(), x.y() - b.ymin, b.ymax - x.y()};
  const int f = static_cast<int>(std::min_element(dist, dist + 4) - dist);
  p = x;
  if (f == 0) p.x() = b.xmin;
  if (f == 1) p.x() = b.xmax;
  if (f == 2) p.y() = b.ymin;
  if (f == 3) p.y() = b.ymax;
  p.x() = std::clamp(p.x(), b.xmin, b.xmax);
  p.y() = std::clamp(p.y(), b.ymin, b.ymax);
  s = -dist[f];
}

double boundary_value(const PlateProblem& p, const Eigen::Vector2d& x) {
  switch (p.bc) {
    case BoundaryKind::clamped_zero: return 0.0;
    case BoundaryKind::manufactured:
      if (!p.g1) throw std::invalid_argument("assemble: manufactured boundary needs g1");
      return p.g1(x);
    case BoundaryKind::dirichlet_pair: {
      if (!p.g1 || !p.g2) throw std::invalid_argument("assemble: Dirichlet pair needs g1 and g2");
      Eigen::Vector2d q;
      double s = 0.0;
      project(p.domain, x, q, s);
      return p.g1(q) + s * p.g2(q);
    }
  }
  return 0.0;
}

// 2h g2 at the face point between a ghost node and its mirror. At the ends of a face g2 is read a
// relative 1e-9 along the face so a nearest-face lookup picks this face.
double ghost_offset(const PlateProblem& p, const Grid& g, int i, int j) {
  if (!p.g2) throw std::invalid_argument("assemble: Dirichlet pair needs g2");
  const Box& b = std::get<Rect>(p.domain).box;
  const double t = 1e-9 * std::max(b.xmax - b.xmin, b.ymax - b.ymin);
  Eigen::Vector2d q = g.node(i, j);
  if (i == 0 || i == g.nx - 1) {
    q.x() = i == 0 ? b.xmin : b.xmax;
    q.y() = std::clamp(q.y(), b.ymin + t, b.ymax - t);
  } else {
    q.y() = j == 0 ? b.ymin : b.ymax;
    q.x() = std::clamp(q.x(), b.xmin + t, b.xmax - t);
  }
  return 2.0 * g.h * p.g2(q);
}

void require_convex(const PlateProblem& p, const Grid& g, const std::vector<char>& active) {
  double worst = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; j += std::max(1, g.ny / 16))
    for (int i = 0; i < g.nx; i += std::max(1, g.nx / 16))
      if (active[i + std::size_t(g.nx) * j])
        worst = std::min(worst, check_convexity(evaluate_tensor(p.tensor, g.node(i, j)), 0.0).min_eigenvalue);
  if (!(worst > 0.0)) {
    std::ostringstream os;
    os << "assemble: tensor not strongly convex (min Voigt eigenvalue " << worst << ")";
    throw EllipticityError(os.str());
  }
}

// Samples used by the system: every node whose 3x3 neighbourhood carries no outside node.
std::vector<char> system_samples(const Grid& g, const std::vector<NodeRole>& role) {
  std::vector<char> inc(static_cast<std::size_t>(g.size()), 0);
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      bool ok = true;
      for (int b = j - 1; b <= j + 1 && ok; ++b)
        for (int a = i - 1; a <= i + 1; ++a)
          if (role[a + std::size_t(g.nx) * b] == NodeRole::outside) {
            ok = false;
            break;
          }
      inc[i + std::size_t(g.nx) * j] = ok ? 1 : 0;
    }
  return inc;
}

}  // namespace

Assembly assemble(const PlateProblem& p, const Grid& grid) {
  if (!(p.multiplier > 0.0)) throw std::invalid_argument("assemble: multiplier must be positive");
  Assembly as;
  as.grid = grid;
  Roles roles = classify_nodes(p, grid);
  as.role = roles.role;
  as.active = roles.active;
  as.mirror = roles.mirror;
  require_convex(p, grid, as.active);

  const std::size_t n = static_cast<std::size_t>(grid.size());
  as.unknown_index.assign(n, -1);
  as.fixed_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    if (as.role[k] == NodeRole::unknown) {
      as.unknown_index[k] = static_cast<int>(as.unknowns.size());
      as.unknowns.push_back(static_cast<Eigen::Index>(k));
    } else if (as.role[k] == NodeRole::fixed) {
      const int i = static_cast<int>(k % grid.nx), j = static_cast<int>(k / grid.nx);
      as.fixed_values(static_cast<Eigen::Index>(k)) = boundary_value(p, grid.node(i, j));
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    if (as.role[k] == NodeRole::linked) {
      const int i = static_cast<int>(k % grid.nx), j = static_cast<int>(k / grid.nx);
      as.fixed_values(static_cast<Eigen::Index>(k)) = ghost_offset(p, grid, i, j);
    }
  // Node value = (unknown id or -1) plus a constant.
  const auto resolve = [&](Eigen::Index node, int& id, double& c) {
    Eigen::Index m = node;
    c = 0.0;
    if (as.role[static_cast<std::size_t>(node)] == NodeRole::linked) {
      c = as.fixed_values(node);
      m = as.mirror[static_cast<std::size_t>(node)];
    }
    id = as.unknown_index[static_cast<std::size_t>(m)];
    if (id < 0) c += as.fixed_values(m);
  };
  const Eigen::Index nu = static_cast<Eigen::Index>(as.unknowns.size());
  if (nu == 0) throw SolveError("assemble: no unknowns; grid too coarse for the domain");
  as.rhs = Eigen::VectorXd::Zero(nu);

  const double h = grid.h, w = h * h / 4.0;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nu) * 25 * 4);
  const std::vector<char> inc = system_samples(grid, as.role);
  const bool has_FF = static_cast<bool>(p.FF);
  for_each_sample(grid, inc, roles.ghost_layer, [&](const Sample& s) {
    const int i = static_cast<int>(s.node % grid.nx), j = static_cast<int>(s.node / grid.nx);
    const Eigen::Vector2d x = grid.node(i, j);
    const Eigen::Matrix3d W = w * weight_at(p, x);
    int id[9];
    double cst[9];
    for (int a = 0; a < 9; ++a)
      if (s.idx[a] >= 0) resolve(s.idx[a], id[a], cst[a]);
    Eigen::Vector3d ffv = Eigen::Vector3d::Zero();
    if (has_FF) {
      const Eigen::Matrix2d F2 = p.FF(x);
      ffv = w * Eigen::Vector3d(F2(0, 0), F2(1, 1), (F2(0, 1) + F2(1, 0)) / std::sqrt(2.0));
    }
    for (int a = 0; a < 9; ++a) {
      if (s.idx[a] < 0 || id[a] < 0) continue;
      const int ua = id[a];
      const Eigen::Vector3d Wa = W * s.coef[a];
      if (has_FF) as.rhs(ua) += ffv.dot(s.coef[a]);
      for (int b = 0; b < 9; ++b) {
        if (s.idx[b] < 0) continue;
        const double v = Wa.dot(s.coef[b]);
        if (v == 0.0) continue;
        if (id[b] >= 0) trip.emplace_back(ua, id[b], v);
        as.rhs(ua) -= v * cst[b];
      }
    }
  });

  for (Eigen::Index u = 0; u < nu; ++u) {
    const Eigen::Index k = as.unknowns[static_cast<std::size_t>(u)];
    const int i = static_cast<int>(k % grid.nx), j = static_cast<int>(k / grid.nx);
    const Eigen::Vector2d x = grid.node(i, j);
    if (p.f) as.rhs(u) += h * h * p.f(x);
    if (p.winkler) {
      const double kw = p.winkler(x);
      if (kw < 0.0) throw std::invalid_argument("assemble: Winkler coefficient must be nonnegative");
      trip.emplace_back(u, u, h * h * kw);
    }
    if (p.F) {
      // -sum_m h^2 F(m) . grad_h phi(m) with central differences
      const Eigen::Vector2d Fxp = p.F(grid.node(i + 1, j)), Fxm = p.F(grid.node(i - 1, j));
      const Eigen::Vector2d Fyp = p.F(grid.node(i, j + 1)), Fym = p.F(grid.node(i, j - 1));
      as.rhs(u) += 0.5 * h * (Fxp.x() - Fxm.x() + Fyp.y() - Fym.y());
    }
  }
  as.K.resize(nu, nu);
  as.K.setFromTriplets(trip.begin(), trip.end());
  // the (a, b) and (b, a) products round differently
  const Eigen::SparseMatrix<double> Kt = as.K.transpose();
  as.K = 0.5 * (as.K + Kt);
  return as;
}

Eigen::SparseMatrix<double> full_stiffness(const PlateProblem& p, const Grid& grid) {
  const std::size_t n = static_cast<std::size_t>(grid.size());
  std::vector<char> inc(n, 1);
  const double w = grid.h * grid.h / 4.0;
  std::vector<Eigen::Triplet<double>> trip;
  for_each_sample(grid, inc, false, [&](const Sample& s) {
    const int i = static_cast<int>(s.node % grid.nx), j = static_cast<int>(s.node / grid.nx);
    const Eigen::Matrix3d W = w * weight_at(p, grid.node(i, j));
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b)
        if (s.idx[a] >= 0 && s.idx[b] >= 0) trip.emplace_back(s.idx[a], s.idx[b], (W * s.coef[a]).dot(s.coef[b]));
  });
  Eigen::SparseMatrix<double> K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  K.setFromTriplets(trip.begin(), trip.end());
  const Eigen::SparseMatrix<double> Kt = K.transpose();
  return 0.5 * (K + Kt);
}

EnergySplit discrete_energy(const PlateProblem& p, const Grid& grid, const ScalarField& u) {
  const Roles roles = classify_nodes(p, grid);
  const double w = grid.h * grid.h / 4.0;
  EnergySplit e;
  for_each_sample(grid, roles.active, roles.ghost_layer, [&](const Sample& s) {
    Eigen::Vector3d H = Eigen::Vector3d::Zero();
    for (int a = 0; a < 9; ++a)
      if (s.idx[a] >= 0) H += s.coef[a] * u.v(s.idx[a] % grid.nx, s.idx[a] / grid.nx);
    const int i = static_cast<int>(s.node % grid.nx), j = static_cast<int>(s.node / grid.nx);
    e.energy += w * H.dot(weight_at(p, grid.node(i, j)) * H);
    e.hessian2 += w * H.squaredNorm();
  });
  return e;
}

SolveReport solve(const PlateProblem& p, const Grid& grid, const SolveOptions& opt) {
  const Assembly as = assemble(p, grid);
  SolveReport rep;
  rep.h = grid.h;
  rep.unknowns = static_cast<int>(as.unknowns.size());
  Eigen::VectorXd x;
  if (opt.solver == LinearSolver::direct) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(as.K);
    if (ldlt.info() != Eigen::Success) throw SolveError("solve: factorization failed (singular system)");
    x = ldlt.solve(as.rhs);
    rep.iterations = 1;
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(as.K);
    cg.setTolerance(opt.tol);
    cg.setMaxIterations(opt.max_iterations);
    x = cg.solve(as.rhs);
    rep.iterations = static_cast<int>(cg.iterations());
    if (cg.info() != Eigen::Success) {
      std::ostringstream os;
      os << "solve: conjugate gradient did not converge after " << cg.iterations() << " iterations (error "
         << cg.error() << ")";
      throw SolveError(os.str());
    }
  }
  const double bn = as.rhs.norm();
  rep.residual = (as.K * x - as.rhs).norm() / (bn > 0.0 ? bn : 1.0);
  if (!(rep.residual < std::max(opt.tol, 1e-8) * 10.0)) {
    std::ostringstream os;
    os << "solve: residual " << rep.residual << " above tolerance";
    throw SolveError(os.str());
  }

  rep.field = ScalarField::zeros(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t k = i + std::size_t(grid.nx) * j;
      const int u = as.unknown_index[k];
      if (u >= 0) rep.field.v(i, j) = x(u);
      else if (as.role[k] == NodeRole::fixed) rep.field.v(i, j) = as.fixed_values(static_cast<Eigen::Index>(k));
      else if (as.role[k] == NodeRole::linked) {
        const Eigen::Index m = as.mirror[k];
        const int um = as.unknown_index[static_cast<std::size_t>(m)];
        rep.field.v(i, j) = as.fixed_values(static_cast<Eigen::Index>(k)) + (um >= 0 ? x(um) : as.fixed_values(m));
      }
      else rep.field.v(i, j) = p.bc == BoundaryKind::clamped_zero ? 0.0 : boundary_value(p, grid.node(i, j));
    }
  const EnergySplit e = discrete_energy(p, grid, rep.field);
  rep.energy = e.energy;
  rep.hessian2 = e.hessian2;
  rep.coercivity = e.hessian2 > 0.0 ? e.energy / e.hessian2 : 0.0;
  return rep;
}

ClampedReport solve_clamped_inhomogeneous(const PlateProblem& p, const Disk& disk, int n, const SolveOptions& opt) {
  PlateProblem q = p;
  q.domain = disk;
  q.bc = BoundaryKind::clamped_zero;
  q.g1 = nullptr;
  q.g2 = nullptr;
  const Grid g = problem_grid(q, n);
  ClampedReport r;
  r.solve = solve(q, g, opt);

  // Normalized norm R^{-1}(int u^2 + R^2 int |grad u|^2 + R^4 int |grad^2 u|^2)^{1/2} over the disk.
  const double R = disk.radius;
  const DerivativeStack d = derivatives(r.solve.field, 2);
  ScalarField integrand = ScalarField::zeros(g);
  integrand.v = r.solve.field.v.square() + R * R * d.tensor_norm2(1) + std::pow(R, 4) * d.tensor_norm2(2);
  const double I = integrate(integrand, disk);
  r.h2_norm = std::sqrt(std::max(0.0, I)) / R;

  const double rho0 = p.tensor.rho0;
  ScalarField ff = ScalarField::zeros(g), FF1 = ScalarField::zeros(g), FF2 = ScalarField::zeros(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Eigen::Vector2d x = g.node(i, j);
      if (p.f) ff.v(i, j) = std::pow(p.f(x), 2);
      if (p.F) FF1.v(i, j) = p.F(x).squaredNorm();
      if (p.FF) FF2.v(i, j) = p.FF(x).squaredNorm();
    }
  r.rhs_bound = std::pow(rho0, 4) * (std::sqrt(integrate_grid(ff)) + std::sqrt(integrate_grid(FF1)) / rho0 +
                                     std::sqrt(integrate_grid(FF2)) / (rho0 * rho0));
  if (r.h2_norm > 0.0) {
    if (!(p.epsilon > 0.0)) throw std::invalid_argument("solve_clamped_inhomogeneous: epsilon must be positive");
    r.ratio = r.h2_norm / p.epsilon;
  }
  return r;
}

Manufactured manufactured_polynomial(const Poly2& u, const Coeffs6<double>& c, double multiplier) {
  const QuarticCoefficients<double> q = quartic_coefficients(c);
  const auto& k = u.c;
  const double load = multiplier * (q.a0 * 24.0 * k(4, 0) + q.a1 * 6.0 * k(3, 1) + q.a2 * 4.0 * k(2, 2) +
                                    q.a3 * 6.0 * k(1, 3) + q.a4 * 24.0 * k(0, 4));
  Manufactured m;
  m.name = "polynomial";
  m.u = [u](const Eigen::Vector2d& x) { return u(x); };
  m.f = [load](const Eigen::Vector2d&) { return load; };
  return m;
}

Manufactured manufactured_exponential(const Coeffs6<double>& c, double lambda, int branch) {
  const RootPair<double> r = solve_quartic(quartic_coefficients(c));
  const double a = branch == 0 ? r.alpha1 : r.alpha2, b = branch == 0 ? r.beta1 : r.beta2;
  Manufactured m;
  m.name = "exponential";
  m.u = [=](const Eigen::Vector2d& x) { return std::exp(lambda * (a * x.x() + x.y())) * std::cos(lambda * b * x.x()); };
  m.f = [](const Eigen::Vector2d&) { return 0.0; };
  return m;
}

}  // namespace platecont
