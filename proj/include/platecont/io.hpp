#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "platecont/continuation.hpp"
#include "platecont/elasticity.hpp"
#include "platecont/inequalities.hpp"
#include "platecont/plate_solver.hpp"
#include "platecont/symbol_factor.hpp"

namespace platecont::io {

using nlohmann::json;

std::string version_string();
std::string timestamp_utc();
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Number or {"terms": [[i, j, c], ...]}.
Poly2 poly_from_json(const json& j);
Box box_from_json(const json& j);
json to_json(const Box& b);
Eigen::Vector2d vec2_from_json(const json& j);
json to_json(const Eigen::Vector2d& v);
json to_json(const Eigen::Matrix2d& m);

/// {"kind": ..., "payload": {...}, "gamma": g, "M": m, "rho0": r, "domain": [xmin, xmax, ymin, ymax]}.
/// Kinds: constant, isotropic, orthotropic_engineering, coefficient_field.
ElasticityTensorSpec tensor_from_json(const json& j);

/// Solve section: {"domain": {"disk": {...}} | {"rect": [...]}, "bc": {...}, "rhs": {...}, ...}.
PlateProblem problem_from_json(const json& j, const ElasticityTensorSpec& tensor);
SolveOptions solve_options_from_json(const json& j);

json to_json(const DichotomyReport& r);
json to_json(const OrthotropicReport& r);
json to_json(const PaperConstants& c);
json to_json(const RootPair<double>& r);
json factor_summary(const FactorField& f);
json to_json(const CarlemanReport& r);
json to_json(const SolveReport& r);
json to_json(const ThreeSphereCertificate& c);
json to_json(const ChainPlan& p);
json to_json(const PropagationReport& r);
json to_json(const Omega0Report& r);
json to_json(const FrameNormalization& f);

}  // namespace platecont::io
