#include "platecont/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "platecont/parallel.hpp"

namespace platecont {

Coeffs6<double> isotropic_tensor(double lambda, double mu) {
  return {lambda + 2.0 * mu, lambda, 0.0, 0.0, mu, lambda + 2.0 * mu};
}

Coeffs6<double> orthotropic_tensor(const OrthotropicConstants& o) {
  const double nu21 = o.nu12 * o.E2 / o.E1;
  const double d = 1.0 - o.nu12 * nu21;
  if (!(d > 0.0)) throw EllipticityError("orthotropic_tensor: 1 - nu12*nu21 <= 0");
  return {o.E1 / d, o.nu12 * o.E2 / d, 0.0, 0.0, o.G12, o.E2 / d};
}

ElasticityTensorSpec ElasticityTensorSpec::isotropic(double lambda, double mu) {
  return from_constant(isotropic_tensor(lambda, mu));
}

ElasticityTensorSpec ElasticityTensorSpec::from_constant(const Coeffs6<double>& c) {
  ElasticityTensorSpec s;
  s.kind = TensorKind::constant;
  s.constant = c;
  return s;
}

ElasticityTensorSpec ElasticityTensorSpec::from_orthotropic(const OrthotropicConstants& o) {
  ElasticityTensorSpec s;
  s.kind = TensorKind::orthotropic_engineering;
  s.ortho = o;
  return s;
}

ElasticityTensorSpec ElasticityTensorSpec::from_field(const std::array<Poly2, 6>& f) {
  ElasticityTensorSpec s;
  s.kind = TensorKind::coefficient_field;
  s.field = f;
  return s;
}

Coeffs6<double> evaluate_tensor(const ElasticityTensorSpec& spec, const Eigen::Vector2d& x) {
  if (!spec.domain.contains(x)) {
    std::ostringstream os;
    os << "evaluate_tensor: point (" << x.x() << ", " << x.y() << ") outside the configured domain";
    throw DomainError(os.str());
  }
  switch (spec.kind) {
    case TensorKind::constant:
      return spec.constant;
    case TensorKind::orthotropic_engineering:
      return orthotropic_tensor(spec.ortho);
    case TensorKind::coefficient_field:
      return {spec.field[0](x), spec.field[1](x), spec.field[2](x),
              spec.field[3](x), spec.field[4](x), spec.field[5](x)};
  }
  throw std::logic_error("evaluate_tensor: unknown kind");
}

ConvexityResult check_convexity(const Coeffs6<double>& c, double gamma) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(voigt_matrix(c), Eigen::EigenvaluesOnly);
  ConvexityResult r;
  r.eigenvalues = es.eigenvalues();
  r.min_eigenvalue = r.eigenvalues(0);
  r.passes = r.min_eigenvalue >= gamma;
  return r;
}

std::string to_string(Dichotomy d) {
  switch (d) {
    case Dichotomy::Positive: return "Positive";
    case Dichotomy::Zero: return "Zero";
    case Dichotomy::Violated: return "Violated";
  }
  return "?";
}

bool Region::contains(const Eigen::Vector2d& x) const {
  if (!box.contains(x, 0.0)) return false;
  if (disk_center) return (x - *disk_center).norm() <= disk_radius;
  return true;
}

double default_dichotomy_tolerance(double max_D, double coefficient_scale) {
  const double s3 = coefficient_scale * coefficient_scale * coefficient_scale;
  return 1e-9 * (max_D + s3 * s3);
}

DichotomyReport classify_dichotomy(const ElasticityTensorSpec& spec, const Region& region, double sample_step,
                                   double tol) {
  if (!(sample_step > 0.0)) throw std::invalid_argument("classify_dichotomy: sample_step must be positive");
  const auto& b = region.box;
  if (!(b.xmax >= b.xmin && b.ymax >= b.ymin)) throw std::invalid_argument("classify_dichotomy: empty region");
  const int nx = static_cast<int>(std::floor((b.xmax - b.xmin) / sample_step + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor((b.ymax - b.ymin) / sample_step + 1e-9)) + 1;

  std::vector<Eigen::Vector2d> pts;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Eigen::Vector2d x(b.xmin + i * sample_step, b.ymin + j * sample_step);
      if (region.contains(x)) pts.push_back(x);
    }
  if (pts.empty()) throw std::invalid_argument("classify_dichotomy: empty region");

  std::vector<double> D(pts.size()), scale(pts.size());
  parallel_for(static_cast<std::ptrdiff_t>(pts.size()), [&](std::ptrdiff_t k) {
    const auto q = quartic_coefficients(evaluate_tensor(spec, pts[k]));
    D[k] = discriminant_det(q);
    scale[k] = q.vec().cwiseAbs().maxCoeff();
  });

  DichotomyReport rep;
  rep.samples = static_cast<int>(pts.size());
  rep.max_D = *std::max_element(D.begin(), D.end());
  rep.delta1 = *std::min_element(D.begin(), D.end());
  rep.scale = *std::max_element(scale.begin(), scale.end());
  rep.tolerance = tol > 0.0 ? tol : default_dichotomy_tolerance(rep.max_D, rep.scale);

  for (double d : D)
    if (d > rep.tolerance) ++rep.positive_count;
  if (rep.positive_count == rep.samples) {
    rep.verdict = Dichotomy::Positive;
  } else if (rep.positive_count == 0) {
    rep.verdict = Dichotomy::Zero;
  } else {
    rep.verdict = Dichotomy::Violated;
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (D[k] <= rep.tolerance) rep.violation_points.push_back({pts[k], D[k]});
  }
  return rep;
}

OrthotropicReport orthotropic_discriminant(const OrthotropicConstants& o) {
  if (!(o.E1 > 0.0 && o.E2 > 0.0 && o.G12 > 0.0))
    throw std::invalid_argument("orthotropic_discriminant: E1, E2, G12 must be positive");
  OrthotropicReport r;
  r.k = o.E1 / o.E2;
  r.m = o.E1 / (2.0 * o.G12) - o.nu12;
  r.D = 1.0 - o.nu12 * o.nu12 / r.k;
  if (!(r.D > 0.0)) throw EllipticityError("orthotropic_discriminant: 1 - nu12^2/k <= 0, tensor not convex");
  r.tensor = orthotropic_tensor(o);

  const ConvexityResult cv = check_convexity(r.tensor, 0.0);
  for (int i = 0; i < 3; ++i)
    if (!(cv.eigenvalues(i) > 0.0)) {
      std::ostringstream os;
      os << "orthotropic_discriminant: Voigt eigenvalue " << i << " = " << cv.eigenvalues(i)
         << " is not positive, tensor not strongly convex";
      throw EllipticityError(os.str());
    }

  const double t = o.nu12 / r.k + r.D / (r.m + o.nu12);
  r.factor_engineering = 4.0 * o.E1 * o.E1 * (t * t - 1.0 / r.k);
  const auto q = quartic_coefficients(r.tensor);
  r.factor_tensor = q.a2 * q.a2 - 4.0 * q.a0 * q.a4;
  r.discriminant = discriminant_orthotropic(q);
  const double band = 1e-12 * (q.a2 * q.a2 + 4.0 * q.a0 * q.a4);
  r.verdict = std::abs(r.factor_tensor) <= band ? Dichotomy::Zero : Dichotomy::Positive;
  return r;
}

}  // namespace platecont
