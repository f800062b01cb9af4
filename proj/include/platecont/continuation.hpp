#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "platecont/fields.hpp"
#include "platecont/inequalities.hpp"

namespace platecont {

struct ChainOptions {
  double rho_factor = 1.5;   // rho = rho_factor r
  double rho1_factor = 3.2;  // rho1 = rho1_factor r
  SphereConstants constants{};
};

/// Lattice of centers x0 + (rho - r)(i, j) inside G, linked by a breadth-first tree from x0.
struct ChainPlan {
  Box omega{}, G{};
  Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  double r0 = 0.0;
  SphereConstants constants{};
  Radii radii{};  // R is the smallest distance of a center to the boundary of omega
  double step = 0.0;
  std::vector<Eigen::Vector2d> centers;
  std::vector<int> parent;       // -1 at the root
  std::vector<int> depth;        // root depth 0
  std::vector<double> dist_boundary;
  std::vector<int> order;        // breadth-first order
  int steps = 0;                 // max depth + 1 three-sphere applications along the longest branch
};

/// Throws std::invalid_argument when dist(G, boundary) < r, the start disk is not inside G, or r > r0 / 2.
ChainPlan plan_chain(const Box& omega, const Box& G, const Eigen::Vector2d& x0, double r0, double r,
                     const ChainOptions& opt = {});

struct ChainStep {
  int node = 0;
  ThreeSphereCertificate certificate;
  double a = 0.0;  // propagated bound on int_{B_r(x_i)} u^2
  double b = 0.0;  // bound on int_{B_rho(x_i)} u^2
};

struct PropagationReport {
  std::vector<ChainStep> steps;
  bool complete = true;
  int failure_index = -1;
  std::string failure;
  double delta_emp = 1.0;       // product of theta along the longest branch
  double eta = 0.0;             // measured ||u||_{L^2(B_r(x0))}
  double E0 = 0.0;              // sqrt(max large-ball v3 quantity)
  double E0_omega = 0.0;        // measured ||u||_{L^2} over the grid box
  double eta_declared = 0.0, E0_declared = 0.0;
  double norm_G = 0.0;          // measured ||u||_{L^2(G)}
  double chain_bound = 0.0;     // sqrt(sum b_i)
  double C_emp = 0.0;           // norm_G / (eta^delta E0^{1-delta})
  double C_max = 0.0;           // largest per-step certificate constant
  bool holds = false;           // norm_G <= chain_bound
  bool degenerate = false;
};

/// Declared values of zero mean "not declared".
PropagationReport propagate(const ScalarField& u, const ChainPlan& plan, double eta_declared = 0.0,
                            double E0_declared = 0.0);

struct SeedDisk {
  Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  double r0 = 0.0;
  bool contained = false;
  double min_gap = 0.0;  // min over sampled disk points of psi(x1) - x2 and the box margins
};

/// r0 = rho0 / (2 (sqrt(1 + M0^2) + 1)), x0 = (0, r0 - rho0/2); checks the disk lies below the graph
/// inside the box |x1| < rho0/(2M0), |x2| < rho0/2. Throws std::domain_error when containment fails.
SeedDisk boundary_seed_disk(const std::function<double(double)>& psi, double rho0, double M0, int samples = 2048);

}  // namespace platecont
