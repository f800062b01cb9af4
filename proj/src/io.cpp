#include "platecont/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace platecont::io {

std::string version_string() { return "platecont 0.1.0"; }

std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

Poly2 poly_from_json(const json& j) {
  if (j.is_number()) return Poly2::constant(j.get<double>());
  Poly2 p;
  for (const auto& t : j.at("terms")) {
    const int a = t.at(0).get<int>(), b = t.at(1).get<int>();
    if (a < 0 || b < 0 || a + b > Poly2::kMaxDegree) throw std::invalid_argument("polynomial degree above 4");
    p.c(a, b) += t.at(2).get<double>();
  }
  return p;
}

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("box must be [xmin, xmax, ymin, ymax]");
  Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!(b.xmin < b.xmax && b.ymin < b.ymax)) throw std::invalid_argument("box has empty extent");
  return b;
}

json to_json(const Box& b) { return json::array({b.xmin, b.xmax, b.ymin, b.ymax}); }
Eigen::Vector2d vec2_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
json to_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }
json to_json(const Eigen::Matrix2d& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

ElasticityTensorSpec tensor_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const json pl = j.value("payload", json::object());
  ElasticityTensorSpec s;
  if (kind == "constant") {
    s = ElasticityTensorSpec::from_constant({pl.at("A0").get<double>(), pl.at("B0").get<double>(),
                                             pl.at("C0").get<double>(), pl.at("D0").get<double>(),
                                             pl.at("E0").get<double>(), pl.at("F0").get<double>()});
  } else if (kind == "isotropic") {
    s = ElasticityTensorSpec::isotropic(pl.at("lambda").get<double>(), pl.at("mu").get<double>());
  } else if (kind == "orthotropic_engineering") {
    OrthotropicConstants o;
    o.E1 = pl.at("E1").get<double>();
    o.E2 = pl.at("E2").get<double>();
    o.G12 = pl.at("G12").get<double>();
    o.nu12 = pl.at("nu12").get<double>();
    s = ElasticityTensorSpec::from_orthotropic(o);
  } else if (kind == "coefficient_field") {
    const char* names[6] = {"A0", "B0", "C0", "D0", "E0", "F0"};
    std::array<Poly2, 6> f;
    for (int k = 0; k < 6; ++k) f[k] = poly_from_json(pl.at(names[k]));
    s = ElasticityTensorSpec::from_field(f);
  } else {
    throw std::invalid_argument("unknown tensor kind '" + kind + "'");
  }
  s.gamma = j.value("gamma", 1.0);
  s.M = j.value("M", 1.0);
  s.rho0 = j.value("rho0", 1.0);
  if (j.contains("domain")) s.domain = box_from_json(j.at("domain"));
  if (!(s.gamma > 0.0 && s.M > 0.0 && s.rho0 > 0.0)) throw std::invalid_argument("gamma, M, rho0 must be positive");
  return s;
}

namespace {

struct ExactSolution {
  ScalarFn u;
  VectorFn grad;
  ScalarFn f;
};

ExactSolution solution_from_json(const json& j, const ElasticityTensorSpec& t, double multiplier) {
  const std::string type = j.at("type").get<std::string>();
  ExactSolution s;
  if (type == "polynomial" || type == "harmonic_quadratic") {
    Poly2 p;
    if (type == "harmonic_quadratic") {
      p.c(2, 0) = 1.0;
      p.c(0, 2) = -1.0;
    } else {
      p = poly_from_json(j);
    }
    if (t.kind == TensorKind::coefficient_field)
      throw std::invalid_argument("manufactured polynomial loads need a constant tensor");
    const Manufactured m = manufactured_polynomial(p, evaluate_tensor(t, Eigen::Vector2d::Zero()), multiplier);
    s.u = m.u;
    s.f = m.f;
    s.grad = [p](const Eigen::Vector2d& x) { return p.gradient(x); };
  } else if (type == "exponential") {
    const double lambda = j.at("lambda").get<double>();
    const int branch = j.value("branch", 0);
    const RootPair<double> r = solve_quartic(quartic_coefficients(evaluate_tensor(t, Eigen::Vector2d::Zero())));
    const double a = branch == 0 ? r.alpha1 : r.alpha2, b = branch == 0 ? r.beta1 : r.beta2;
    s.u = manufactured_exponential(evaluate_tensor(t, Eigen::Vector2d::Zero()), lambda, branch).u;
    s.grad = [=](const Eigen::Vector2d& x) {
      const double e = std::exp(lambda * (a * x.x() + x.y()));
      const double c = std::cos(lambda * b * x.x()), sn = std::sin(lambda * b * x.x());
      return Eigen::Vector2d(lambda * e * (a * c - b * sn), lambda * e * c);
    };
    s.f = [](const Eigen::Vector2d&) { return 0.0; };
  } else if (type == "harmonic_exp") {
    const double lambda = j.at("lambda").get<double>();
    s.u = [=](const Eigen::Vector2d& x) { return std::exp(lambda * x.x()) * std::cos(lambda * x.y()); };
    s.grad = [=](const Eigen::Vector2d& x) {
      const double e = std::exp(lambda * x.x());
      return Eigen::Vector2d(lambda * e * std::cos(lambda * x.y()), -lambda * e * std::sin(lambda * x.y()));
    };
    s.f = [](const Eigen::Vector2d&) { return 0.0; };
  } else {
    throw std::invalid_argument("unknown solution type '" + type + "'");
  }
  return s;
}

Eigen::Vector2d outward_normal(const PlateDomain& d, const Eigen::Vector2d& p) {
  if (const auto* disk = std::get_if<Disk>(&d)) {
    const Eigen::Vector2d y = p - disk->center;
    return y.norm() > 0.0 ? Eigen::Vector2d(y.normalized()) : Eigen::Vector2d(1, 0);
  }
  const Box& b = std::get<Rect>(d).box;
  const double dist[4] = {std::abs(p.x() - b.xmin), std::abs(b.xmax - p.x()), std::abs(p.y() - b.ymin),
                          std::abs(b.ymax - p.y())};
  const int f = static_cast<int>(std::min_element(dist, dist + 4) - dist);
  const Eigen::Vector2d n[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  return n[f];
}

}  // namespace

PlateProblem problem_from_json(const json& j, const ElasticityTensorSpec& tensor) {
  PlateProblem p;
  p.tensor = tensor;
  p.multiplier = j.value("multiplier", 1.0);
  const json& dom = j.at("domain");
  if (dom.contains("disk")) {
    p.domain = Disk{vec2_from_json(dom["disk"].value("center", json::array({0.0, 0.0}))),
                    dom["disk"].at("radius").get<double>()};
  } else if (dom.contains("rect")) {
    p.domain = Rect{box_from_json(dom.at("rect"))};
  } else {
    throw std::invalid_argument("solve.domain needs 'disk' or 'rect'");
  }
  const json bc = j.value("bc", json{{"kind", "clamped_zero"}});
  const std::string kind = bc.at("kind").get<std::string>();
  ScalarFn exact_f;
  if (kind == "clamped_zero") {
    p.bc = BoundaryKind::clamped_zero;
  } else if (kind == "manufactured" || kind == "dirichlet_pair") {
    const ExactSolution s = solution_from_json(bc.at("solution"), tensor, p.multiplier);
    p.bc = kind == "manufactured" ? BoundaryKind::manufactured : BoundaryKind::dirichlet_pair;
    p.g1 = s.u;
    const PlateDomain dcopy = p.domain;
    const VectorFn grad = s.grad;
    p.g2 = [dcopy, grad](const Eigen::Vector2d& x) { return grad(x).dot(outward_normal(dcopy, x)); };
    exact_f = s.f;
  } else {
    throw std::invalid_argument("unknown bc kind '" + kind + "'");
  }
  std::vector<ScalarFn> loads;
  if (exact_f) loads.push_back(exact_f);
  if (j.contains("rhs")) {
    const json& r = j["rhs"];
    if (r.contains("f")) {
      const Poly2 f = poly_from_json(r["f"]);
      loads.push_back([f](const Eigen::Vector2d& x) { return f(x); });
    }
    if (r.contains("bump")) {
      const Eigen::Vector2d c = vec2_from_json(r["bump"].value("center", json::array({0.0, 0.0})));
      const double rad = r["bump"].at("radius").get<double>(), amp = r["bump"].value("amplitude", 1.0);
      loads.push_back([=](const Eigen::Vector2d& x) {
        const double s = (x - c).norm() / rad;
        return s < 1.0 ? amp * std::pow(1.0 - s * s, 5) : 0.0;
      });
    }
  }
  if (!loads.empty())
    p.f = [loads](const Eigen::Vector2d& x) {
      double s = 0.0;
      for (const auto& l : loads) s += l(x);
      return s;
    };
  if (j.contains("winkler")) {
    const double k = j["winkler"].get<double>();
    if (k < 0.0) throw std::invalid_argument("winkler coefficient must be nonnegative");
    p.winkler = [k](const Eigen::Vector2d&) { return k; };
  }
  p.epsilon = j.value("epsilon", 0.0);
  return p;
}

SolveOptions solve_options_from_json(const json& j) {
  SolveOptions o;
  const std::string s = j.value("solver", std::string("direct"));
  if (s == "direct") o.solver = LinearSolver::direct;
  else if (s == "cg") o.solver = LinearSolver::cg;
  else throw std::invalid_argument("unknown solver '" + s + "'");
  o.tol = j.value("tol", o.tol);
  if (!(o.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  o.max_iterations = j.value("max_iterations", o.max_iterations);
  return o;
}

json to_json(const DichotomyReport& r) {
  json pts = json::array();
  for (const auto& s : r.violation_points) pts.push_back({{"x", to_json(s.x)}, {"D", s.D}});
  return {{"verdict", to_string(r.verdict)}, {"delta1", r.delta1},   {"max_D", r.max_D},
          {"tolerance", r.tolerance},        {"scale", r.scale},     {"samples", r.samples},
          {"positive_count", r.positive_count}, {"violation_points", pts}};
}

json to_json(const OrthotropicReport& r) {
  return {{"k", r.k},
          {"m", r.m},
          {"D", r.D},
          {"factor_engineering", r.factor_engineering},
          {"factor_tensor", r.factor_tensor},
          {"discriminant", r.discriminant},
          {"verdict", to_string(r.verdict)}};
}

json to_json(const PaperConstants& c) {
  return {{"gamma1", c.gamma1},
          {"gamma2", c.gamma2},
          {"beta_worstcase", c.beta_worstcase},
          {"beta_bound", c.beta_bound},
          {"beta_practical", c.beta_practical},
          {"epsilon0", c.epsilon0},
          {"root_bound", c.root_bound},
          {"nu", to_json(c.nu)},
          {"mu", to_json(c.mu)},
          {"margin", c.margin},
          {"floor", c.floor}};
}

json to_json(const RootPair<double>& r) {
  return {{"alpha1", r.alpha1}, {"beta1", r.beta1}, {"alpha2", r.alpha2}, {"beta2", r.beta2},
          {"condition_number", r.condition_number}, {"clustered", r.clustered}};
}

json factor_summary(const FactorField& f) {
  json sw = json::array();
  for (std::size_t k = 0; k < f.swapped.size(); ++k)
    if (f.swapped[k]) sw.push_back(k);
  return {{"mode", to_string(f.mode)},
          {"grid", {{"nx", f.grid.nx}, {"ny", f.grid.ny}, {"x0", f.grid.x0}, {"y0", f.grid.y0}, {"h", f.grid.h}}},
          {"seed_index", f.seed_index},
          {"swapped_nodes", sw},
          {"ambiguous_nodes", f.ambiguous_nodes},
          {"lipschitz", {f.lipschitz[0], f.lipschitz[1]}},
          {"hessian_bound", {f.hessian_bound[0], f.hessian_bound[1]}},
          {"min_beta", f.min_beta},
          {"max_root_abs", f.max_root_abs},
          {"epsilon0", f.epsilon0},
          {"root_bound", f.root_bound},
          {"closed_vs_companion", f.closed_vs_companion},
          {"min_D", f.min_D},
          {"max_condition", f.max_condition}};
}

json to_json(const CarlemanReport& r) {
  return {{"order", r.order},       {"tau", r.tau},     {"lhs", r.lhs},
          {"rhs", r.rhs},           {"ratio", r.ratio}, {"log_shift", r.log_shift},
          {"degenerate", r.degenerate}, {"beta", r.beta}, {"threshold", r.threshold},
          {"Gamma", to_json(r.Gamma)}, {"h", r.h},      {"sigma_min_support", r.sigma_min_support}};
}

json to_json(const SolveReport& r) {
  return {{"residual", r.residual}, {"iterations", r.iterations}, {"energy", r.energy},
          {"hessian2", r.hessian2}, {"coercivity", r.coercivity}, {"h", r.h},
          {"unknowns", r.unknowns}};
}

json to_json(const ThreeSphereCertificate& c) {
  return {{"version", to_string(c.version)},
          {"radii", {{"r", c.radii.r}, {"rho", c.radii.rho}, {"rho1", c.radii.rho1}, {"R", c.radii.R}}},
          {"center", to_json(c.center)},
          {"constants", {{"gamma2", c.constants.gamma2}, {"beta", c.constants.beta}, {"s_pract", c.constants.s_pract}}},
          {"theta1", c.theta1},
          {"theta", c.theta},
          {"A", c.A},
          {"B", c.B},
          {"LHS", c.LHS},
          {"C_emp", c.C_emp},
          {"exp_argument", c.exp_argument},
          {"epsilon", c.epsilon},
          {"C_emp_difference", c.C_emp_difference},
          {"degenerate", c.degenerate},
          {"admissible", c.admissible},
          {"flags", c.flags}};
}

json to_json(const ChainPlan& p) {
  json centers = json::array();
  for (const auto& c : p.centers) centers.push_back(to_json(c));
  return {{"omega", to_json(p.omega)},
          {"G", to_json(p.G)},
          {"x0", to_json(p.x0)},
          {"r0", p.r0},
          {"radii", {{"r", p.radii.r}, {"rho", p.radii.rho}, {"rho1", p.radii.rho1}, {"R", p.radii.R}}},
          {"step", p.step},
          {"centers", centers},
          {"parent", p.parent},
          {"depth", p.depth},
          {"steps", p.steps}};
}

json to_json(const PropagationReport& r) {
  json steps = json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"node", s.node}, {"theta", s.certificate.theta}, {"C_emp", s.certificate.C_emp},
                     {"LHS", s.certificate.LHS}, {"a", s.a}, {"b", s.b}});
  return {{"steps", steps},
          {"complete", r.complete},
          {"failure_index", r.failure_index},
          {"failure", r.failure},
          {"delta_emp", r.delta_emp},
          {"eta", r.eta},
          {"E0", r.E0},
          {"E0_omega", r.E0_omega},
          {"eta_declared", r.eta_declared},
          {"E0_declared", r.E0_declared},
          {"norm_G", r.norm_G},
          {"chain_bound", r.chain_bound},
          {"C_emp", r.C_emp},
          {"C_max", r.C_max},
          {"holds", r.holds},
          {"degenerate", r.degenerate}};
}

json to_json(const Omega0Report& r) {
  return {{"closed_form", r.closed_form}, {"brute_force", r.brute_force}, {"y", to_json(r.y)},
          {"eta", to_json(r.eta)},         {"Q", to_json(r.Q)},           {"rho_min", r.rho_min},
          {"rho_max", r.rho_max}};
}

json to_json(const FrameNormalization& f) {
  return {{"R1", to_json(f.R1)}, {"H", to_json(f.H)}, {"R2", to_json(f.R2)},
          {"Psi", to_json(f.Psi)}, {"nu", to_json(f.nu)}, {"mu", to_json(f.mu)}};
}

}  // namespace platecont::io
