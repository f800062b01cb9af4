#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "platecont/elasticity.hpp"
#include "platecont/fields.hpp"

namespace platecont {

using ScalarFn = std::function<double(const Eigen::Vector2d&)>;
using VectorFn = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;
using MatrixFn = std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>;

enum class BoundaryKind { clamped_zero, manufactured, dirichlet_pair };
std::string to_string(BoundaryKind k);

using PlateDomain = std::variant<Rect, Disk>;

/// div div(P grad^2 u) + k u = f + div F + div div FF with P = multiplier * C.
struct PlateProblem {
  ElasticityTensorSpec tensor{};
  double multiplier = 1.0;
  PlateDomain domain = Disk{};
  BoundaryKind bc = BoundaryKind::clamped_zero;
  ScalarFn g1;  // manufactured: exact solution; dirichlet_pair: trace
  ScalarFn g2;  // dirichlet_pair: outward normal derivative
  ScalarFn f;
  VectorFn F;
  MatrixFn FF;
  ScalarFn winkler;
  double epsilon = 0.0;  // declared rhs bound
};

/// Grid with n nodes across the domain; disks get three extra node layers on each side, rectangles with a
/// Dirichlet pair one ghost layer.
Grid problem_grid(const PlateProblem& p, int n);

/// linked: ghost node outside a rectangle, equal to its mirror node plus 2h g2.
enum class NodeRole : char { outside = 0, unknown = 1, fixed = 2, linked = 3 };

struct Assembly {
  Grid grid;
  std::vector<NodeRole> role;           // per node, i fastest
  std::vector<int> unknown_index;       // node -> unknown id or -1
  std::vector<Eigen::Index> unknowns;   // unknown id -> node
  std::vector<char> active;             // node inside the domain
  Eigen::SparseMatrix<double> K;        // unknown block
  Eigen::VectorXd rhs;                  // load minus the fixed-node coupling
  Eigen::VectorXd fixed_values;         // per node: boundary value, or the offset of a linked node
  std::vector<Eigen::Index> mirror;     // per node: mirror of a linked node, -1 otherwise
};

/// Galerkin form: node Hessian samples (second differences at the node, mixed difference on each of the
/// four adjacent cells) with weight h^2/4. Throws EllipticityError for a non-convex tensor.
Assembly assemble(const PlateProblem& p, const Grid& grid);

/// Full-grid stiffness matrix without constraints (all nodes), for stencil and symmetry checks.
Eigen::SparseMatrix<double> full_stiffness(const PlateProblem& p, const Grid& grid);

enum class LinearSolver { direct, cg };

struct SolveOptions {
  LinearSolver solver = LinearSolver::direct;
  double tol = 1e-10;
  int max_iterations = 20000;
};

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveReport {
  ScalarField field;
  double residual = 0.0;     // relative algebraic residual
  int iterations = 0;
  double energy = 0.0;       // sum over samples at domain nodes of P H . H
  double hessian2 = 0.0;     // discrete |grad^2 u|^2 integral over the same samples
  double coercivity = 0.0;   // energy / hessian2
  double h = 0.0;
  int unknowns = 0;
};

SolveReport solve(const PlateProblem& p, const Grid& grid, const SolveOptions& opt = {});

struct EnergySplit {
  double energy = 0.0, hessian2 = 0.0;
};

/// Discrete energy of a field over samples at domain nodes.
EnergySplit discrete_energy(const PlateProblem& p, const Grid& grid, const ScalarField& u);

struct ClampedReport {
  SolveReport solve;
  double h2_norm = 0.0;  // normalized H^2 norm on the disk
  double ratio = 0.0;    // h2_norm / epsilon, 0 when the solution vanishes
  double rhs_bound = 0.0;  // measured ||f|| + ||F||/rho0 + ||FF||/rho0^2 times rho0^4
};

/// Clamped problem on a disk with the rhs of p; the bc and g1, g2 of p are ignored.
ClampedReport solve_clamped_inhomogeneous(const PlateProblem& p, const Disk& disk, int n,
                                          const SolveOptions& opt = {});

/// Manufactured exact solution with its load for a constant tensor.
struct Manufactured {
  std::string name;
  ScalarFn u;
  ScalarFn f;
};

/// Polynomial u: the load is the constant symbol contraction of the fourth derivatives.
Manufactured manufactured_polynomial(const Poly2& u, const Coeffs6<double>& c, double multiplier = 1.0);
/// u = Re exp(lambda (z x1 + x2)) with z a root of the symbol; zero load.
Manufactured manufactured_exponential(const Coeffs6<double>& c, double lambda, int branch = 0);

}  // namespace platecont
