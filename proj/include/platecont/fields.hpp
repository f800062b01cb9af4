#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "platecont/elasticity.hpp"

namespace platecont {

/// Uniform Cartesian grid; node (i, j) sits at (x0 + i h, y0 + j h).
struct Grid {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, h = 1.0;

  /// n x n nodes spanning [c - L, c + L]^2.
  static Grid centered(const Eigen::Vector2d& center, double half_width, int n);
  /// Nodes covering the box with spacing close to h (adjusted so the box edges are nodes).
  static Grid covering(const Box& box, int nx);

  Eigen::Vector2d node(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
  Box bounds() const { return {x0, x0 + (nx - 1) * h, y0, y0 + (ny - 1) * h}; }
  Eigen::Index size() const { return Eigen::Index(nx) * ny; }
  bool same_layout(const Grid& o) const;
};

struct ScalarField {
  Grid grid;
  Eigen::ArrayXXd v;  // v(i, j)

  static ScalarField zeros(const Grid& g);
  static ScalarField sample(const Grid& g, const std::function<double(const Eigen::Vector2d&)>& fn);
};

struct Disk {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
};

/// {x : sigma(x - c) < r}, sigma(y) = (Gamma y . y)^{1/2}.
struct SigmaBall {
  Eigen::Matrix2d Gamma = Eigen::Matrix2d::Identity();
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
};

struct SigmaAnnulus {
  Eigen::Matrix2d Gamma = Eigen::Matrix2d::Identity();
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double r_in = 0.5, r_out = 1.0;
};

struct Rect {
  Box box{};
};

using Shape = std::variant<Disk, SigmaBall, SigmaAnnulus, Rect>;

bool contains(const Shape& s, const Eigen::Vector2d& x);

/// Fraction of each node's cell [x - h/2, x + h/2]^2 inside the shape (4x4 subsampling on cut cells).
Eigen::ArrayXXd cell_fractions(const Grid& g, const Shape& s);

/// Partial derivatives d^{a+b} u / dx1^a dx2^b for a + b <= order.
class DerivativeStack {
 public:
  DerivativeStack() = default;
  DerivativeStack(const Grid& g, int order);

  int order() const { return order_; }
  const Grid& grid() const { return grid_; }
  const Eigen::ArrayXXd& operator()(int a, int b) const { return d_[index(a, b)]; }
  Eigen::ArrayXXd& operator()(int a, int b) { return d_[index(a, b)]; }

  /// |nabla^k u|^2 as a full tensor norm: sum_a binom(k, a) (d^{a, k-a} u)^2.
  Eigen::ArrayXXd tensor_norm2(int k) const;

 private:
  static int index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }
  Grid grid_{};
  int order_ = 0;
  std::vector<Eigen::ArrayXXd> d_;
};

/// Fourth-order finite differences: central in the interior, shifted near the grid edge.
/// Throws std::invalid_argument when the grid is thinner than the widest stencil.
DerivativeStack derivatives(const ScalarField& u, int order);

/// One-dimensional finite-difference weights (Fornberg) for the m-th derivative at z from nodes xs.
std::vector<double> fd_weights(double z, const std::vector<double>& xs, int m);

/// Cell-midpoint sum over a shape with boundary-cell area fractions.
double integrate(const ScalarField& f, const Shape& region);

/// Plain grid sum h^2 sum f, exact for compactly supported smooth integrands up to the grid spectral rate.
double integrate_grid(const ScalarField& f);

/// Ball quadrature on a Disk or SigmaBall: local bicubic interpolation of the node values and
/// a polar Gauss-Legendre x trapezoid rule. Needs two node layers of margin around the ball.
double integrate_ball(const ScalarField& f, const Shape& ball);

struct GaussRule {
  std::vector<double> x, w;  // on [0, 1]
};
/// n-point Gauss-Legendre rule on [0, 1].
GaussRule gauss_legendre(int n);

/// Local bicubic (4x4 Lagrange) interpolation of node values.
double interpolate(const ScalarField& f, const Eigen::Vector2d& x);

/// C^4 bump on [0, 1], zero with four derivatives at both ends, max 1.
double bump(double t);

/// u(x) = bump((sigma(x - c) - r_in) / (r_out - r_in)) cos(m theta(x - c)).
ScalarField test_function(const Grid& g, const SigmaAnnulus& annulus, int angular_mode);

/// CSV rows "x1,x2,value".
void write_csv(const ScalarField& f, const std::string& path);
ScalarField read_csv(const std::string& path);

/// Raw little-endian doubles in (i fastest) order plus a JSON sidecar path + ".json".
void write_binary(const ScalarField& f, const std::string& path, const std::string& mask_id = "none");
ScalarField read_binary(const std::string& path);

}  // namespace platecont
