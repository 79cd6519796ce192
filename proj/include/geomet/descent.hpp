#pragma once

#include "geomet/types.hpp"

#include <functional>
#include <limits>

namespace geomet {

using ScalarFn = std::function<double(const Vec&)>;
using GradFn = std::function<Vec(const Vec&)>;

// Adaptive first-order descent: optional RMSProp diagonal preconditioning,
// Armijo backtracking with step growth on acceptance, and a trust radius
// capping per-step displacement. Non-finite objective values act as +inf
// barriers (the line search simply rejects them).
struct DescentOptions {
  int max_iter = 500;
  double f_tol = 0.0;  // stop when value <= f_tol
  double g_tol = 0.0;  // stop when gradient norm <= g_tol
  double step0 = 1.0;
  double radius = std::numeric_limits<double>::infinity();
  bool precond = true;
  double armijo = 1e-4;
  double grow = 1.8;
  double shrink = 0.5;
  int ls_max = 60;
  double fd_scale = 1e-6;  // finite-difference step = fd_scale * (1 + max|x|)
};

struct DescentResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // a tolerance fired (not a stall or budget exhaustion)
};

// grad, when supplied, replaces the central finite-difference gradient.
DescentResult minimize(const ScalarFn& f, Vec x0, const DescentOptions& opt,
                       const GradFn& grad = nullptr);

}  // namespace geomet
