#include "platecont/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "platecont/parallel.hpp"

namespace platecont {

Grid Grid::centered(const Eigen::Vector2d& center, double half_width, int n) {
  if (n < 2 || !(half_width > 0.0)) throw std::invalid_argument("Grid::centered: need n >= 2 and a positive width");
  Grid g;
  g.nx = g.ny = n;
  g.h = 2.0 * half_width / (n - 1);
  g.x0 = center.x() - half_width;
  g.y0 = center.y() - half_width;
  return g;
}

Grid Grid::covering(const Box& box, int nx) {
  if (nx < 2) throw std::invalid_argument("Grid::covering: need nx >= 2");
  Grid g;
  g.nx = nx;
  g.h = (box.xmax - box.xmin) / (nx - 1);
  g.ny = static_cast<int>(std::lround((box.ymax - box.ymin) / g.h)) + 1;
  g.x0 = box.xmin;
  g.y0 = box.ymin;
  return g;
}

bool Grid::same_layout(const Grid& o) const {
  return nx == o.nx && ny == o.ny && std::abs(h - o.h) <= 1e-14 * h && std::abs(x0 - o.x0) <= 1e-12 &&
         std::abs(y0 - o.y0) <= 1e-12;
}

ScalarField ScalarField::zeros(const Grid& g) { return {g, Eigen::ArrayXXd::Zero(g.nx, g.ny)}; }

ScalarField ScalarField::sample(const Grid& g, const std::function<double(const Eigen::Vector2d&)>& fn) {
  ScalarField f = zeros(g);
  parallel_for(g.ny, [&](std::ptrdiff_t j) {
    for (int i = 0; i < g.nx; ++i) f.v(i, j) = fn(g.node(i, static_cast<int>(j)));
  });
  return f;
}

namespace {

double sigma_of(const Eigen::Matrix2d& G, const Eigen::Vector2d& y) { return std::sqrt(std::max(0.0, y.dot(G * y))); }

}  // namespace

bool contains(const Shape& s, const Eigen::Vector2d& x) {
  return std::visit(
      [&](const auto& sh) -> bool {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return (x - sh.center).squaredNorm() < sh.radius * sh.radius;
        } else if constexpr (std::is_same_v<T, SigmaBall>) {
          return sigma_of(sh.Gamma, x - sh.center) < sh.radius;
        } else if constexpr (std::is_same_v<T, SigmaAnnulus>) {
          const double s = sigma_of(sh.Gamma, x - sh.center);
          return s > sh.r_in && s < sh.r_out;
        } else {
          return sh.box.contains(x, 0.0);
        }
      },
      s);
}

Eigen::ArrayXXd cell_fractions(const Grid& g, const Shape& s) {
  Eigen::ArrayXXd frac(g.nx, g.ny);
  const double hh = 0.5 * g.h;
  parallel_for(g.ny, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < g.nx; ++i) {
      const Eigen::Vector2d c = g.node(i, j);
      const bool in[5] = {contains(s, c), contains(s, c + Eigen::Vector2d(-hh, -hh)),
                          contains(s, c + Eigen::Vector2d(hh, -hh)), contains(s, c + Eigen::Vector2d(-hh, hh)),
                          contains(s, c + Eigen::Vector2d(hh, hh))};
      bool all = true, none = true;
      for (bool b : in) {
        all = all && b;
        none = none && !b;
      }
      if (all) {
        frac(i, j) = 1.0;
      } else if (none) {
        frac(i, j) = 0.0;
      } else {
        int cnt = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            if (contains(s, c + Eigen::Vector2d((a + 0.5) / 4.0 * g.h - hh, (b + 0.5) / 4.0 * g.h - hh))) ++cnt;
        frac(i, j) = cnt / 16.0;
      }
    }
  });
  return frac;
}

DerivativeStack::DerivativeStack(const Grid& g, int order) : grid_(g), order_(order) {
  d_.assign(static_cast<std::size_t>((order + 1) * (order + 2) / 2), Eigen::ArrayXXd::Zero(g.nx, g.ny));
}

Eigen::ArrayXXd DerivativeStack::tensor_norm2(int k) const {
  Eigen::ArrayXXd s = Eigen::ArrayXXd::Zero(grid_.nx, grid_.ny);
  double binom = 1.0;
  for (int a = 0; a <= k; ++a) {
    s += binom * (*this)(a, k - a).square();
    binom = binom * (k - a) / (a + 1);
  }
  return s;
}

std::vector<double> fd_weights(double z, const std::vector<double>& xs, int m) {
  // Fornberg's recursion for the weights of derivatives 0..m at z.
  const int n = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n + 1), std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

struct Stencil {
  int start = 0;  // offset of the first node relative to the evaluation node
  std::vector<double> w;
};

// Stencils for derivative m on a line of n nodes, unit spacing.
std::vector<Stencil> line_stencils(int n, int m) {
  const int central = (m <= 2) ? 2 : 3;
  const int width_shift = m + 4;
  if (n < std::max(2 * central + 1, width_shift))
    throw std::invalid_argument("derivatives: grid too thin for the finite-difference stencil");
  std::vector<Stencil> out(static_cast<std::size_t>(n));
  std::map<int, Stencil> cache;  // keyed by start offset
  for (int i = 0; i < n; ++i) {
    int start, width;
    if (i - central >= 0 && i + central <= n - 1) {
      start = -central;
      width = 2 * central + 1;
    } else {
      width = width_shift;
      int s0 = std::clamp(i - width / 2, 0, n - width);
      start = s0 - i;
    }
    const int key = start * 16 + width;
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::vector<double> xs(static_cast<std::size_t>(width));
      for (int k = 0; k < width; ++k) xs[k] = start + k;
      it = cache.emplace(key, Stencil{start, fd_weights(0.0, xs, m)}).first;
    }
    out[i] = it->second;
  }
  return out;
}

Eigen::ArrayXXd apply_x(const Eigen::ArrayXXd& u, int m, double h) {
  if (m == 0) return u;
  const int nx = static_cast<int>(u.rows()), ny = static_cast<int>(u.cols());
  const auto st = line_stencils(nx, m);
  const double scale = std::pow(h, -m);
  Eigen::ArrayXXd out(nx, ny);
  parallel_for(ny, [&](std::ptrdiff_t j) {
    for (int i = 0; i < nx; ++i) {
      const Stencil& s = st[i];
      double acc = 0.0;
      for (std::size_t k = 0; k < s.w.size(); ++k) acc += s.w[k] * u(i + s.start + static_cast<int>(k), j);
      out(i, j) = acc * scale;
    }
  });
  return out;
}

Eigen::ArrayXXd apply_y(const Eigen::ArrayXXd& u, int m, double h) {
  if (m == 0) return u;
  const int nx = static_cast<int>(u.rows()), ny = static_cast<int>(u.cols());
  const auto st = line_stencils(ny, m);
  const double scale = std::pow(h, -m);
  Eigen::ArrayXXd out(nx, ny);
  parallel_for(ny, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    const Stencil& s = st[j];
    out.col(j).setZero();
    for (std::size_t k = 0; k < s.w.size(); ++k) out.col(j) += s.w[k] * u.col(j + s.start + static_cast<int>(k));
    out.col(j) *= scale;
  });
  return out;
}

}  // namespace

DerivativeStack derivatives(const ScalarField& u, int order) {
  if (order < 0 || order > 4) throw std::invalid_argument("derivatives: order must be in [0, 4]");
  DerivativeStack ds(u.grid, order);
  for (int b = 0; b <= order; ++b) {
    const Eigen::ArrayXXd ub = apply_y(u.v, b, u.grid.h);
    for (int a = 0; a + b <= order; ++a) ds(a, b) = apply_x(ub, a, u.grid.h);
  }
  return ds;
}

double integrate(const ScalarField& f, const Shape& region) {
  const Eigen::ArrayXXd frac = cell_fractions(f.grid, region);
  if ((frac > 0.0).count() == 0) throw std::invalid_argument("integrate: empty region");
  const double h2 = f.grid.h * f.grid.h;
  return parallel_sum(f.grid.ny, [&](std::ptrdiff_t j) { return (f.v.col(j) * frac.col(j)).sum() * h2; });
}

double integrate_grid(const ScalarField& f) {
  const double h2 = f.grid.h * f.grid.h;
  return parallel_sum(f.grid.ny, [&](std::ptrdiff_t j) { return f.v.col(j).sum() * h2; });
}

namespace {

void lagrange4(double t, double w[4]) {
  // nodes at -1, 0, 1, 2
  w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
  w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
  w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

}  // namespace

GaussRule gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = 0.5 * (1.0 - z);
    r.w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  cache.emplace(n, r);
  return r;
}

double interpolate(const ScalarField& f, const Eigen::Vector2d& x) {
  const Grid& g = f.grid;
  const double sx = (x.x() - g.x0) / g.h, sy = (x.y() - g.y0) / g.h;
  const int i = std::clamp(static_cast<int>(std::floor(sx)), 1, g.nx - 3);
  const int j = std::clamp(static_cast<int>(std::floor(sy)), 1, g.ny - 3);
  double wx[4], wy[4];
  lagrange4(sx - i, wx);
  lagrange4(sy - j, wy);
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += wx[a] * f.v(i - 1 + a, j - 1 + b);
    acc += wy[b] * row;
  }
  return acc;
}

double integrate_ball(const ScalarField& f, const Shape& ball) {
  Eigen::Matrix2d Ginv_half = Eigen::Matrix2d::Identity();
  Eigen::Vector2d c;
  double r;
  if (const auto* d = std::get_if<Disk>(&ball)) {
    c = d->center;
    r = d->radius;
  } else if (const auto* sb = std::get_if<SigmaBall>(&ball)) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sb->Gamma);
    Ginv_half = es.operatorInverseSqrt();
    c = sb->center;
    r = sb->radius;
  } else {
    throw std::invalid_argument("integrate_ball: shape must be a Disk or SigmaBall");
  }
  if (!(r > 0.0)) throw std::invalid_argument("integrate_ball: empty region");
  const Grid& g = f.grid;
  // Extent check: the ball plus two node layers must lie inside the grid.
  const double ex = r * std::sqrt((Ginv_half * Ginv_half)(0, 0)), ey = r * std::sqrt((Ginv_half * Ginv_half)(1, 1));
  const Box bb = g.bounds();
  if (c.x() - ex < bb.xmin + g.h || c.x() + ex > bb.xmax - g.h || c.y() - ey < bb.ymin + g.h ||
      c.y() + ey > bb.ymax - g.h)
    throw std::invalid_argument("integrate_ball: ball does not fit inside the grid with margin");

  const double span = std::max(ex, ey) / g.h;
  const int nr = std::max(12, static_cast<int>(std::ceil(2.0 * span)) + 8);
  const int nt = std::max(48, static_cast<int>(std::ceil(4.0 * M_PI * span)) + 16);
  const GaussRule gr = gauss_legendre(nr);
  const double jac = Ginv_half.determinant();
  const double dth = 2.0 * M_PI / nt;
  const double total = parallel_sum(nr, [&](std::ptrdiff_t k) {
    const double rho = r * gr.x[k];
    double ring = 0.0;
    for (int t = 0; t < nt; ++t) {
      const double th = (t + 0.5) * dth;
      const Eigen::Vector2d y(rho * std::cos(th), rho * std::sin(th));
      ring += interpolate(f, c + Ginv_half * y);
    }
    return ring * dth * rho * r * gr.w[k];
  });
  return total * jac;
}

double bump(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = 4.0 * t * (1.0 - t);
  return s * s * s * s * s;
}

ScalarField test_function(const Grid& g, const SigmaAnnulus& an, int m) {
  if (!(an.r_in > 0.0 && an.r_out > an.r_in)) throw std::invalid_argument("test_function: need 0 < r_in < r_out");
  // support must fit in the grid
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(an.Gamma);
  const Eigen::Matrix2d Gi = es.operatorInverseSqrt();
  const Eigen::Matrix2d Ginv = Gi * Gi;
  const Box bb = g.bounds();
  const double ex = an.r_out * std::sqrt(Ginv(0, 0)), ey = an.r_out * std::sqrt(Ginv(1, 1));
  if (an.center.x() - ex < bb.xmin || an.center.x() + ex > bb.xmax || an.center.y() - ey < bb.ymin ||
      an.center.y() + ey > bb.ymax)
    throw std::invalid_argument("test_function: annulus outside the grid");
  const double w = an.r_out - an.r_in;
  return ScalarField::sample(g, [&](const Eigen::Vector2d& x) {
    const Eigen::Vector2d y = x - an.center;
    const double s = sigma_of(an.Gamma, y);
    const double b = bump((s - an.r_in) / w);
    if (b == 0.0) return 0.0;
    return m == 0 ? b : b * std::cos(m * std::atan2(y.y(), y.x()));
  });
}

void write_csv(const ScalarField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << "x1,x2,value\n" << std::setprecision(17);
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) {
      const auto x = f.grid.node(i, j);
      os << x.x() << ',' << x.y() << ',' << f.v(i, j) << '\n';
    }
}

ScalarField read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  std::vector<std::array<double, 3>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 'x') continue;
    std::array<double, 3> r{};
    std::istringstream ls(line);
    char comma;
    if (!(ls >> r[0] >> comma >> r[1] >> comma >> r[2])) throw std::runtime_error("read_csv: bad row in " + path);
    rows.push_back(r);
  }
  if (rows.size() < 4) throw std::runtime_error("read_csv: too few rows in " + path);
  double xmin = rows[0][0], ymin = rows[0][1], xmax = xmin, ymax = ymin;
  for (const auto& r : rows) {
    xmin = std::min(xmin, r[0]);
    xmax = std::max(xmax, r[0]);
    ymin = std::min(ymin, r[1]);
    ymax = std::max(ymax, r[1]);
  }
  // rows are written with i fastest, so the first row break gives nx
  int nx = 1;
  while (nx < static_cast<int>(rows.size()) && rows[nx][1] == rows[0][1]) ++nx;
  Grid g;
  g.nx = nx;
  g.ny = static_cast<int>(rows.size()) / nx;
  g.x0 = xmin;
  g.y0 = ymin;
  g.h = (xmax - xmin) / (nx - 1);
  if (static_cast<std::size_t>(g.nx) * g.ny != rows.size()) throw std::runtime_error("read_csv: not a full grid");
  ScalarField f = ScalarField::zeros(g);
  for (std::size_t k = 0; k < rows.size(); ++k) f.v(static_cast<int>(k) % nx, static_cast<int>(k) / nx) = rows[k][2];
  return f;
}

void write_binary(const ScalarField& f, const std::string& path, const std::string& mask_id) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_binary: cannot open " + path);
  os.write(reinterpret_cast<const char*>(f.v.data()), static_cast<std::streamsize>(sizeof(double) * f.v.size()));
  nlohmann::json j = {{"nx", f.grid.nx}, {"ny", f.grid.ny}, {"x0", f.grid.x0}, {"y0", f.grid.y0},
                      {"h", f.grid.h},   {"layout", "float64 little-endian, i fastest"}, {"mask", mask_id}};
  std::ofstream js(path + ".json");
  js << j.dump(2) << '\n';
}

ScalarField read_binary(const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw std::runtime_error("read_binary: missing sidecar " + path + ".json");
  nlohmann::json j;
  js >> j;
  Grid g;
  g.nx = j.at("nx");
  g.ny = j.at("ny");
  g.x0 = j.at("x0");
  g.y0 = j.at("y0");
  g.h = j.at("h");
  ScalarField f = ScalarField::zeros(g);
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_binary: cannot open " + path);
  is.read(reinterpret_cast<char*>(f.v.data()), static_cast<std::streamsize>(sizeof(double) * f.v.size()));
  if (!is) throw std::runtime_error("read_binary: truncated data in " + path);
  return f;
}

}  // namespace platecont
