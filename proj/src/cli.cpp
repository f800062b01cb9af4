#include "platecont/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <utility>
#include <sstream>

#include <CLI11.hpp>

#include "platecont/io.hpp"
#include "platecont/parallel.hpp"

namespace platecont {

namespace {

using io::json;
namespace fs = std::filesystem;

/// Analysis-level rejection; maps to exit code 2 after the report is written.
struct Rejection {
  std::string reason;
};

struct Context {
  json config;
  std::string config_hash;
  std::string command;
  fs::path out_dir;
  int grid = 65;
  std::optional<int> seed;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config '" + path + "' is not valid JSON: " + e.what());
  }
}

json header(const Context& c) {
  json h;
  h["command"] = c.command;
  h["config_hash"] = c.config_hash;
  h["version"] = io::version_string();
  h["timestamp"] = io::timestamp_utc();
  h["grid"] = c.grid;
  h["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  return h;
}

void write_report(const Context& c, json body) {
  json r = header(c);
  for (auto& [k, v] : body.items()) r[k] = v;
  fs::create_directories(c.out_dir);
  std::ofstream o(c.out_dir / (c.command + ".json"));
  if (!o) throw std::runtime_error("cannot write report into '" + c.out_dir.string() + "'");
  o << r.dump(2) << '\n';
}

ElasticityTensorSpec tensor_of(const Context& c) {
  if (!c.config.contains("tensor")) throw std::invalid_argument("config needs a 'tensor' section");
  return io::tensor_from_json(c.config.at("tensor"));
}

Region region_of(const Context& c, const ElasticityTensorSpec& t) {
  Region r;
  r.box = t.domain;
  if (c.config.contains("region")) {
    const json& j = c.config["region"];
    if (j.contains("box")) r.box = io::box_from_json(j["box"]);
    if (j.contains("disk")) {
      r.disk_center = io::vec2_from_json(j["disk"].value("center", json::array({0.0, 0.0})));
      r.disk_radius = j["disk"].at("radius").get<double>();
    }
  }
  return r;
}

/// Tensor evaluation point: the origin when it lies in the domain, else the domain center.
Eigen::Vector2d anchor(const ElasticityTensorSpec& t) {
  if (t.domain.contains(Eigen::Vector2d::Zero(), 0.0)) return Eigen::Vector2d::Zero();
  return {0.5 * (t.domain.xmin + t.domain.xmax), 0.5 * (t.domain.ymin + t.domain.ymax)};
}

MetricPair<double> metrics_at(const ElasticityTensorSpec& t, const Eigen::Vector2d& x) {
  const Coeffs6<double> c = evaluate_tensor(t, x);
  const QuarticCoefficients<double> q = quartic_coefficients(c);
  return metrics_from_roots(solve_quartic(q), q.a0);
}

int cmd_classify(const Context& c) {
  const ElasticityTensorSpec t = tensor_of(c);
  const Region reg = region_of(c, t);
  const double step = c.config.value("sample_step", (reg.box.xmax - reg.box.xmin) / (c.grid - 1));
  const double tol = c.config.value("tol", 0.0);
  if (!(step > 0.0)) throw std::invalid_argument("sample_step must be positive");
  if (tol < 0.0) throw std::invalid_argument("tol must be nonnegative");
  const DichotomyReport r = classify_dichotomy(t, reg, step, tol);
  json body;
  body["report"] = io::to_json(r);
  if (t.kind == TensorKind::orthotropic_engineering) body["orthotropic"] = io::to_json(orthotropic_discriminant(t.ortho));
  write_report(c, body);
  if (r.verdict == Dichotomy::Violated) throw Rejection{"dichotomy violated: discriminant changes sign"};
  return 0;
}

int cmd_factor(const Context& c) {
  const ElasticityTensorSpec t = tensor_of(c);
  const Region reg = region_of(c, t);
  FactorOptions opt;
  opt.seed = c.seed;
  opt.dichotomy_tol = c.config.value("tol", 0.0);
  const Grid g = Grid::covering(reg.box, c.grid);
  try {
    const FactorField f = factor_field(t, g, opt);
    write_report(c, {{"factor", io::factor_summary(f)}});
  } catch (const PreconditionError& e) {
    write_report(c, {{"error", e.what()}});
    throw Rejection{e.what()};
  }
  return 0;
}

int cmd_constants(const Context& c) {
  const ElasticityTensorSpec t = tensor_of(c);
  const Eigen::Vector2d x = anchor(t);
  const MetricPair<double> m = metrics_at(t, x);
  const PaperConstants k = paper_constants(t.gamma, t.M, m.g1, m.g2);
  const FrameNormalization fr = normalize_pair(m.g1, m.g2);
  const QuadraticWeight wt = frame_weight(fr, k.beta_practical);
  json body;
  body["anchor"] = io::to_json(x);
  body["constants"] = io::to_json(k);
  body["g1"] = io::to_json(m.g1);
  body["g2"] = io::to_json(m.g2);
  body["frame"] = io::to_json(fr);
  body["Gamma"] = io::to_json(wt.Gamma);
  body["omega0_g1"] = io::to_json(omega0(wt.Gamma, m.g1.inverse()));
  body["omega0_g2"] = io::to_json(omega0(wt.Gamma, m.g2.inverse()));
  write_report(c, body);
  return 0;
}

int cmd_carleman(const Context& c) {
  const json cj = c.config.value("carleman", json::object());
  const int order = cj.value("order", 2);
  const std::vector<double> taus = cj.value("taus", std::vector<double>{5, 10, 20, 40, 80});
  if (taus.empty()) throw std::invalid_argument("carleman.taus is empty");
  const std::vector<int> modes = cj.value("modes", std::vector<int>{0, 1, 2, 3, 4});
  const json an = cj.value("annulus", json::array({0.2, 0.5}));
  const double r_in = an.at(0).get<double>(), r_out = an.at(1).get<double>();
  const double half = cj.value("half_width", 0.6);
  CarlemanOptions opt;
  opt.sigma_min = cj.value("sigma_min", std::min(0.05, 0.5 * r_in));

  MetricField g1, g2;
  QuadraticWeight wt;
  double beta = 0.0;
  if (order == 2) {
    const Eigen::Matrix2d A =
        cj.contains("metric")
            ? (Eigen::Matrix2d() << cj["metric"][0][0].get<double>(), cj["metric"][0][1].get<double>(),
               cj["metric"][1][0].get<double>(), cj["metric"][1][1].get<double>())
                  .finished()
            : Eigen::Matrix2d::Identity();
    g1 = MetricField::constant(A);
    beta = cj.value("beta", 0.5);
    wt.Gamma = Eigen::Matrix2d::Identity();
    wt.beta = beta;
  } else if (order == 4) {
    const ElasticityTensorSpec t = tensor_of(c);
    const MetricPair<double> m = metrics_at(t, anchor(t));
    g1 = MetricField::constant(m.g1);
    g2 = MetricField::constant(m.g2);
    const double bound = fourth_order_beta_bound(m.g1, m.g2);
    beta = cj.value("beta", std::max(1.1 * bound, 0.1));
    wt = frame_weight(normalize_pair(m.g1, m.g2), beta);
  } else {
    throw std::invalid_argument("carleman.order must be 2 or 4");
  }

  const std::string method = cj.value("method", std::string("quadrature"));
  if (method != "quadrature" && method != "grid") throw std::invalid_argument("carleman.method must be quadrature or grid");
  const Grid g = Grid::centered(Eigen::Vector2d::Zero(), half, c.grid);
  const QuadratureOptions qo = quadrature_level(c.grid);
  json per_mode = json::array();
  std::vector<double> best_ratio(taus.size(), -1.0), best_lhs(taus.size()), best_rhs(taus.size());
  try {
    for (int mode : modes) {
      const SigmaAnnulus an{wt.Gamma, wt.center, r_in, r_out};
      CarlemanReport r;
      if (method == "quadrature") {
        const AnnulusTest t{an, mode};
        r = order == 2 ? carleman_second_order_quadrature(g1, wt, t, taus, qo, opt)
                       : carleman_fourth_order_quadrature(g1, g2, wt, t, taus, qo, opt);
      } else {
        const ScalarField u = test_function(g, an, mode);
        r = order == 2 ? carleman_second_order(g1, wt, u, taus, opt) : carleman_fourth_order(g1, g2, wt, u, taus, opt);
      }
      json jr = io::to_json(r);
      jr["mode"] = mode;
      per_mode.push_back(jr);
      for (std::size_t k = 0; k < taus.size(); ++k)
        if (r.ratio[k] > best_ratio[k]) {
          best_ratio[k] = r.ratio[k];
          best_lhs[k] = r.lhs[k];
          best_rhs[k] = r.rhs[k];
        }
    }
  } catch (const PreconditionError& e) {
    write_report(c, {{"error", e.what()}, {"beta", beta}});
    throw Rejection{e.what()};
  }
  fs::create_directories(c.out_dir);
  std::ofstream csv(c.out_dir / "carleman.csv");
  csv << "tau,lhs,rhs,ratio\n" << std::setprecision(17);
  for (std::size_t k = 0; k < taus.size(); ++k)
    csv << taus[k] << ',' << best_lhs[k] << ',' << best_rhs[k] << ',' << best_ratio[k] << '\n';
  write_report(c, {{"order", order}, {"method", method}, {"beta", beta}, {"max_ratio", best_ratio}, {"modes", per_mode}});
  return 0;
}

struct Solved {
  PlateProblem problem;
  SolveReport report;
};

Solved run_solve(const Context& c) {
  if (!c.config.contains("solve")) throw std::invalid_argument("config needs a 'solve' section");
  const ElasticityTensorSpec t = tensor_of(c);
  Solved s;
  s.problem = io::problem_from_json(c.config["solve"], t);
  const Grid g = problem_grid(s.problem, c.grid);
  s.report = solve(s.problem, g, io::solve_options_from_json(c.config["solve"]));
  return s;
}

bool in_domain(const PlateDomain& d, const Eigen::Vector2d& x) {
  if (const auto* disk = std::get_if<Disk>(&d)) return (x - disk->center).norm() < disk->radius;
  return std::get<Rect>(d).box.contains(x, 0.0);
}

int cmd_solve(const Context& c) {
  const Solved s = run_solve(c);
  json body;
  body["solve"] = io::to_json(s.report);
  body["bc"] = to_string(s.problem.bc);
  if (s.problem.bc != BoundaryKind::clamped_zero && s.problem.g1) {
    const Grid& g = s.report.field.grid;
    double e2 = 0.0, u2 = 0.0, emax = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Eigen::Vector2d x = g.node(i, j);
        if (!in_domain(s.problem.domain, x)) continue;
        const double ex = s.problem.g1(x), e = s.report.field.v(i, j) - ex;
        e2 += e * e * g.h * g.h;
        u2 += ex * ex * g.h * g.h;
        emax = std::max(emax, std::abs(e));
      }
    body["error_l2"] = std::sqrt(e2);
    body["exact_l2"] = std::sqrt(u2);
    body["error_max"] = emax;
  }
  fs::create_directories(c.out_dir);
  write_csv(s.report.field, (c.out_dir / "solve_field.csv").string());
  write_report(c, body);
  return 0;
}

ScalarField field_of(const Context& c, const json& section) {
  if (section.contains("field")) {
    const std::string path = section["field"].get<std::string>();
    if (!fs::exists(path)) throw std::runtime_error("field file '" + path + "' is missing");
    return path.size() > 4 && path.substr(path.size() - 4) == ".csv" ? read_csv(path) : read_binary(path);
  }
  return run_solve(c).report.field;
}

SphereConstants constants_of(const json& j) {
  SphereConstants k;
  k.gamma2 = j.value("gamma2", k.gamma2);
  k.beta = j.value("beta", k.beta);
  k.s_pract = j.value("s_pract", k.s_pract);
  if (!(k.gamma2 > 0.0 && k.beta > 0.0 && k.s_pract > 0.0))
    throw std::invalid_argument("gamma2, beta and s_pract must be positive");
  return k;
}

SphereVersion version_of(const std::string& v) {
  if (v == "v1") return SphereVersion::v1;
  if (v == "v2") return SphereVersion::v2;
  if (v == "v3") return SphereVersion::v3;
  if (v == "complete") return SphereVersion::complete;
  throw std::invalid_argument("unknown three-sphere version '" + v + "'");
}

int cmd_threesphere(const Context& c) {
  if (!c.config.contains("threesphere")) throw std::invalid_argument("config needs a 'threesphere' section");
  const json& j = c.config["threesphere"];
  const ScalarField u = field_of(c, j);
  const SphereVersion v = version_of(j.value("version", std::string("v3")));
  const Eigen::Vector2d center = io::vec2_from_json(j.value("center", json::array({0.0, 0.0})));
  Radii rad{j.at("r").get<double>(), j.at("rho").get<double>(), j.at("rho1").get<double>(), j.at("R").get<double>()};
  const SphereConstants k = constants_of(j);
  ThreeSphereCertificate cert;
  if (v == SphereVersion::complete) {
    const ScalarField u0 = j.contains("reference") ? field_of(c, json{{"field", j["reference"]}}) : ScalarField::zeros(u.grid);
    cert = three_sphere_complete(u, u0, j.value("epsilon", 0.0), center, rad, k);
  } else {
    cert = three_sphere(v, u, center, rad, k);
  }
  write_report(c, {{"certificate", io::to_json(cert)}});
  if (!cert.admissible) throw Rejection{"inadmissible radii"};
  return 0;
}

int cmd_propagate(const Context& c) {
  if (!c.config.contains("propagate")) throw std::invalid_argument("config needs a 'propagate' section");
  const json& j = c.config["propagate"];
  const ScalarField u = field_of(c, j);
  ChainOptions opt;
  opt.rho_factor = j.value("rho_factor", opt.rho_factor);
  opt.rho1_factor = j.value("rho1_factor", opt.rho1_factor);
  opt.constants = constants_of(j.value("constants", json::object()));
  const ChainPlan plan = plan_chain(io::box_from_json(j.at("omega")), io::box_from_json(j.at("G")),
                                    io::vec2_from_json(j.at("x0")), j.at("r0").get<double>(), j.at("r").get<double>(),
                                    opt);
  const PropagationReport rep = propagate(u, plan, j.value("eta", 0.0), j.value("E0", 0.0));
  fs::create_directories(c.out_dir);
  std::ofstream csv(c.out_dir / "propagate_chain.csv");
  csv << "node,parent,depth,x1,x2\n" << std::setprecision(17);
  for (int k : plan.order)
    csv << k << ',' << plan.parent[k] << ',' << plan.depth[k] << ',' << plan.centers[k].x() << ','
        << plan.centers[k].y() << '\n';
  write_report(c, {{"plan", io::to_json(plan)}, {"propagation", io::to_json(rep)}});
  if (!rep.complete) throw Rejection{rep.failure};
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"platecont: plate symbol factorization, Carleman and three-sphere certificates"};
  app.set_version_flag("--version", io::version_string());
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  int grid = 0;
  std::optional<int> seed;
  const std::pair<const char*, const char*> commands[] = {
      {"classify", "sign of the symbol discriminant over the domain"},
      {"factor", "factorize the symbol into a coefficient field"},
      {"constants", "structural constants of the tensor"},
      {"carleman", "Carleman estimate ratios over a tau sweep"},
      {"solve", "solve the plate equation on a rectangle or disk"},
      {"threesphere", "three-sphere certificate for a field"},
      {"propagate", "chain of three-sphere steps across a domain"}};
  for (const auto& [n, help] : commands) {
    CLI::App* sub = app.add_subcommand(n, help);
    sub->add_option("--config", config_path, "config JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--grid", grid, "grid nodes per side")->check(CLI::Range(9, 1 << 14));
    sub->add_option("--seed", seed, "seed node index");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  Context c;
  c.command = app.get_subcommands().front()->get_name();
  c.out_dir = out_dir;
  try {
    c.config = read_json(config_path);
    c.config_hash = io::hex64(io::fnv1a(c.config.dump()));
    c.grid = grid > 0 ? grid : c.config.value("grid", 65);
    if (c.config.contains("seed") && !seed) seed = c.config["seed"].get<int>();
    c.seed = seed;
    if (const char* env = std::getenv("PLATECONT_THREADS")) set_thread_budget(std::max(1, std::atoi(env)));
    if (c.config.contains("threads")) set_thread_budget(std::max(1, c.config["threads"].get<int>()));

    int code = 0;
    if (c.command == "classify") code = cmd_classify(c);
    else if (c.command == "factor") code = cmd_factor(c);
    else if (c.command == "constants") code = cmd_constants(c);
    else if (c.command == "carleman") code = cmd_carleman(c);
    else if (c.command == "solve") code = cmd_solve(c);
    else if (c.command == "threesphere") code = cmd_threesphere(c);
    else code = cmd_propagate(c);
    out << c.command << ": ok -> " << (c.out_dir / (c.command + ".json")).string() << '\n';
    return code;
  } catch (const Rejection& r) {
    err << c.command << ": rejected: " << r.reason << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    err << c.command << ": rejected: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << c.command << ": error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace platecont
