#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "geomet/families.hpp"

namespace geomet {

enum class FitMode { Adam, LineSearch };
enum class Termination { Converged, MaxIter, Error };

struct FitConfig {
  int max_iter = 2000;
  double step_size = 1e-2;
  double tol = 1e-6;  // gradient-norm stopping threshold
  std::uint64_t seed = 0;
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  double spd_floor = 1e-8;  // eigenvalue floor for projected families
  double fd_step = 0.0;     // 0 selects the scaled default
  FitMode mode = FitMode::Adam;
  int batch_size = 0;  // 0 = full batch; minibatching needs a batch-aware loss
};

struct FitReport {
  Vec params;
  std::vector<double> loss_history;       // length = accepted iterations + 1
  std::vector<double> grad_norm_history;  // one entry per gradient evaluation
  Termination termination = Termination::MaxIter;
  std::string message;
  int iterations = 0;
  double wall_time_sec = 0.0;  // informational; not part of serialized reports
};

// Loss of a candidate field, with an optional subset view for minibatching
// (indices into [0, data_size)).
struct FitObjective {
  std::function<double(const MetricField&)> value;
  std::function<double(const MetricField&, const std::vector<int>&)> batch_value;
  int data_size = 0;
};

// Central finite-difference gradient. fd_step <= 0 selects the scaled step
// 1e-5 (1 + |theta|_inf). A non-finite probe value raises NonFiniteLossError
// naming the offending coordinate.
Vec fd_gradient(const std::function<double(const Vec&)>& loss, const Vec& theta,
                double fd_step = 0.0);

// Fits the family's parameters by finite-difference first-order descent:
// Adam with fixed step (default) or preconditioned Armijo line search. The
// gradient-norm test runs before each step, parameters are re-projected
// after each step, and the full-data loss is recorded per accepted
// iteration. Loss blow-up past 1e6x the initial value terminates with
// Termination::Error.
FitReport fit(const PackableField& family, const FitObjective& objective, const FitConfig& cfg);

}  // namespace geomet
