#include "platecont/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

namespace platecont {

namespace {

double dist_to_boundary(const Box& b, const Eigen::Vector2d& x) {
  return std::min({x.x() - b.xmin, b.xmax - x.x(), x.y() - b.ymin, b.ymax - x.y()});
}

}  // namespace

ChainPlan plan_chain(const Box& omega, const Box& G, const Eigen::Vector2d& x0, double r0, double r,
                     const ChainOptions& opt) {
  if (!(r > 0.0 && r0 > 0.0)) throw std::invalid_argument("plan_chain: radii must be positive");
  if (r > r0 / 2.0 * (1.0 + 1e-12)) throw std::invalid_argument("plan_chain: need r <= r0 / 2");
  if (!(opt.rho_factor > 1.0)) throw std::invalid_argument("plan_chain: rho must exceed r");
  const double tol = 1e-12 * (1.0 + std::abs(omega.xmax - omega.xmin));
  const double dG = std::min({G.xmin - omega.xmin, omega.xmax - G.xmax, G.ymin - omega.ymin, omega.ymax - G.ymax});
  if (dG < r - tol) throw std::invalid_argument("plan_chain: dist(G, boundary) < r");
  if (!(G.contains(x0, tol) && dist_to_boundary(G, x0) >= r0 / 2.0 - tol))
    throw std::invalid_argument("plan_chain: start disk B_{r0/2}(x0) is not inside G");

  ChainPlan p;
  p.omega = omega;
  p.G = G;
  p.x0 = x0;
  p.r0 = r0;
  p.radii.r = r;
  p.radii.rho = opt.rho_factor * r;
  p.radii.rho1 = opt.rho1_factor * r;
  p.constants = opt.constants;
  p.step = p.radii.rho - r;

  // Lattice anchored at x0, restricted to G.
  const double s = p.step;
  const int i0 = -static_cast<int>(std::floor((x0.x() - G.xmin) / s + 1e-9));
  const int i1 = static_cast<int>(std::floor((G.xmax - x0.x()) / s + 1e-9));
  const int j0 = -static_cast<int>(std::floor((x0.y() - G.ymin) / s + 1e-9));
  const int j1 = static_cast<int>(std::floor((G.ymax - x0.y()) / s + 1e-9));
  std::map<std::pair<int, int>, int> id;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      id[{i, j}] = static_cast<int>(p.centers.size());
      p.centers.emplace_back(x0 + s * Eigen::Vector2d(i, j));
    }
  const int n = static_cast<int>(p.centers.size());
  p.parent.assign(n, -2);
  p.depth.assign(n, -1);
  const int root = id.at({0, 0});
  p.parent[root] = -1;
  p.depth[root] = 0;
  std::deque<int> q{root};
  std::vector<std::pair<int, int>> key(n);
  for (const auto& [k, v] : id) key[v] = k;
  while (!q.empty()) {
    const int c = q.front();
    q.pop_front();
    p.order.push_back(c);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const auto it = id.find({key[c].first + di[d], key[c].second + dj[d]});
      if (it == id.end() || p.depth[it->second] >= 0) continue;
      p.depth[it->second] = p.depth[c] + 1;
      p.parent[it->second] = c;
      q.push_back(it->second);
    }
  }
  if (static_cast<int>(p.order.size()) != n) throw std::invalid_argument("plan_chain: G is disconnected at this r");
  p.steps = *std::max_element(p.depth.begin(), p.depth.end()) + 1;
  p.dist_boundary.resize(n);
  p.radii.R = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    p.dist_boundary[k] = dist_to_boundary(omega, p.centers[k]);
    p.radii.R = std::min(p.radii.R, p.dist_boundary[k]);
  }
  return p;
}

PropagationReport propagate(const ScalarField& u, const ChainPlan& plan, double eta_declared, double E0_declared) {
  PropagationReport rep;
  rep.eta_declared = eta_declared;
  rep.E0_declared = E0_declared;
  const DerivativeStack d = certificate_stack(u);
  const Grid& g = u.grid;
  rep.eta = std::sqrt(ball_integral(g, u.v.square(), plan.x0, plan.radii.r));
  rep.E0_omega = std::sqrt(integrate_grid(ScalarField{g, u.v.square()}));
  rep.norm_G = std::sqrt(std::max(0.0, integrate(ScalarField{g, u.v.square()}, Rect{plan.G})));

  const int n = static_cast<int>(plan.centers.size());
  std::vector<ThreeSphereCertificate> certs(static_cast<std::size_t>(n));
  for (int idx = 0; idx < n; ++idx) {
    const int k = plan.order[idx];
    Radii rad = plan.radii;
    rad.R = plan.dist_boundary[k];
    try {
      certs[k] = three_sphere(SphereVersion::v3, u, d, plan.centers[k], rad, plan.constants);
    } catch (const std::exception& e) {
      rep.complete = false;
      rep.failure_index = idx;
      rep.failure = e.what();
      return rep;
    }
    if (!certs[k].admissible) {
      rep.complete = false;
      rep.failure_index = idx;
      std::ostringstream os;
      os << "inadmissible radii at step " << idx;
      for (const auto& f : certs[k].flags) os << "; " << f;
      rep.failure = os.str();
      return rep;
    }
  }

  double E2 = 0.0;
  for (const auto& c : certs) E2 = std::max(E2, c.B);
  rep.E0 = std::sqrt(E2);
  std::vector<double> a(static_cast<std::size_t>(n), 0.0), b(static_cast<std::size_t>(n), 0.0);
  std::vector<double> delta(static_cast<std::size_t>(n), 1.0);
  double sum_b = 0.0;
  bool all_degenerate = true;
  for (int idx = 0; idx < n; ++idx) {
    const int k = plan.order[idx];
    const ThreeSphereCertificate& c = certs[k];
    const int par = plan.parent[k];
    a[k] = par < 0 ? rep.eta * rep.eta : b[par];
    delta[k] = (par < 0 ? 1.0 : delta[par]) * c.theta;
    if (c.degenerate) {
      // A = 0 or B = 0 forces LHS = 0 for a genuine solution; the measured LHS is kept as the bound.
      b[k] = c.LHS;
    } else {
      all_degenerate = false;
      b[k] = c.C_emp * std::pow(a[k], c.theta) * std::pow(E2, 1.0 - c.theta);
      rep.C_max = std::max(rep.C_max, c.C_emp);
    }
    sum_b += b[k];
    rep.steps.push_back({k, c, a[k], b[k]});
  }
  rep.degenerate = all_degenerate;
  rep.delta_emp = *std::min_element(delta.begin(), delta.end());
  rep.chain_bound = std::sqrt(sum_b);
  rep.holds = rep.norm_G <= rep.chain_bound * (1.0 + 1e-9) + 1e-300;
  if (rep.eta > 0.0 && rep.E0 > 0.0)
    rep.C_emp = rep.norm_G / (std::pow(rep.eta, rep.delta_emp) * std::pow(rep.E0, 1.0 - rep.delta_emp));
  return rep;
}

SeedDisk boundary_seed_disk(const std::function<double(double)>& psi, double rho0, double M0, int samples) {
  if (!(rho0 > 0.0 && M0 > 0.0)) throw std::invalid_argument("boundary_seed_disk: need rho0 > 0 and M0 > 0");
  SeedDisk s;
  s.r0 = rho0 / (2.0 * (std::sqrt(1.0 + M0 * M0) + 1.0));
  s.x0 = Eigen::Vector2d(0.0, s.r0 - rho0 / 2.0);
  const double half = rho0 / (2.0 * M0);
  s.min_gap = std::numeric_limits<double>::infinity();
  const int rings = std::max(4, samples / 64);
  for (int q = 1; q <= rings; ++q) {
    const double rad = s.r0 * q / rings;
    for (int k = 0; k < samples; ++k) {
      const double t = 2.0 * M_PI * k / samples;
      const Eigen::Vector2d x = s.x0 + rad * Eigen::Vector2d(std::cos(t), std::sin(t));
      s.min_gap = std::min({s.min_gap, psi(x.x()) - x.y(), half - std::abs(x.x()), x.y() + rho0 / 2.0});
    }
  }
  s.contained = s.min_gap >= -1e-12 * rho0;
  if (!s.contained) {
    std::ostringstream os;
    os << "boundary_seed_disk: disk leaves the region below the graph (gap " << s.min_gap << ")";
    throw std::domain_error(os.str());
  }
  return s;
}

}  // namespace platecont
