#include "geomet/fit.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "geomet/rng.hpp"

namespace geomet {

Vec fd_gradient(const std::function<double(const Vec&)>& loss, const Vec& theta, double fd_step) {
  const double h = fd_step > 0.0 ? fd_step : fd_step_for(theta);
  Vec g(theta.size());
  Vec probe = theta;
  for (int i = 0; i < theta.size(); ++i) {
    probe(i) = theta(i) + h;
    const double up = loss(probe);
    probe(i) = theta(i) - h;
    const double down = loss(probe);
    probe(i) = theta(i);
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NonFiniteLossError("finite-difference probe is not finite at coordinate " +
                               std::to_string(i));
    }
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

FitReport fit(const PackableField& family, const FitObjective& objective, const FitConfig& cfg) {
  if (!objective.value) throw ArgumentError("fit: objective.value is required");
  if (cfg.max_iter < 0) throw ArgumentError("fit: max_iter must be nonnegative");
  if (!(cfg.step_size > 0.0)) throw ArgumentError("fit: step_size must be positive");
  const bool batched = cfg.batch_size > 0 && objective.data_size > cfg.batch_size;
  if (batched && !objective.batch_value) {
    throw ArgumentError("fit: batch_size set but the objective has no batch view");
  }
  if (batched && cfg.mode == FitMode::LineSearch) {
    throw ArgumentError("fit: line-search mode requires full batches");
  }

  const auto t_start = std::chrono::steady_clock::now();
  Vec theta = family.pack_params();
  auto full_loss = [&](const Vec& th) { return objective.value(*family.with_params(th)); };

  Rng rng(cfg.seed);
  std::vector<int> perm(static_cast<size_t>(std::max(0, objective.data_size)));
  std::iota(perm.begin(), perm.end(), 0);
  size_t cursor = perm.size();
  std::vector<int> batch;
  auto next_batch = [&]() {
    batch.clear();
    for (int t = 0; t < cfg.batch_size; ++t) {
      if (cursor == perm.size()) {
        for (size_t i = perm.size(); i-- > 1;) {
          std::swap(perm[i], perm[static_cast<size_t>(rng.raw() % (i + 1))]);
        }
        cursor = 0;
      }
      batch.push_back(perm[cursor++]);
    }
  };

  FitReport report;
  const double initial = full_loss(theta);
  if (!std::isfinite(initial)) throw NonFiniteLossError("fit: initial loss is not finite");
  report.loss_history.push_back(initial);
  const double blow_up = 1e6 * std::max(1.0, std::abs(initial));

  Vec m = Vec::Zero(theta.size());
  Vec v = Vec::Zero(theta.size());
  Vec r2 = Vec::Zero(theta.size());
  double ls_step = cfg.step_size;
  double current = initial;
  report.termination = Termination::MaxIter;
  report.message = "iteration budget exhausted";

  for (int it = 1; it <= cfg.max_iter; ++it) {
    std::function<double(const Vec&)> iter_loss = full_loss;
    if (batched) {
      next_batch();
      iter_loss = [&](const Vec& th) { return objective.batch_value(*family.with_params(th), batch); };
    }
    const Vec g = fd_gradient(iter_loss, theta, cfg.fd_step);
    const double gn = g.norm();
    report.grad_norm_history.push_back(gn);
    if (gn <= cfg.tol) {
      report.termination = Termination::Converged;
      report.message = "gradient norm below tolerance";
      break;
    }

    if (cfg.mode == FitMode::Adam) {
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
      const double bc1 = 1.0 - std::pow(cfg.beta1, it);
      const double bc2 = 1.0 - std::pow(cfg.beta2, it);
      const Vec step = (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + cfg.adam_eps).matrix());
      theta -= cfg.step_size * step;
    } else {
      r2 = 0.9 * r2 + 0.1 * g.cwiseProduct(g);
      const double corr = 1.0 - std::pow(0.9, it);
      Vec dir = g.cwiseQuotient(((r2 / corr).cwiseSqrt().array() + 1e-12).matrix());
      double gd = g.dot(dir);
      if (gd <= 0.0) {
        dir = g;
        gd = g.squaredNorm();
      }
      bool accepted = false;
      double s = ls_step;
      for (int t = 0; t < 60; ++t) {
        const Vec cand = theta - s * dir;
        const double cl = full_loss(cand);
        if (std::isfinite(cl) && cl < current - 1e-4 * s * gd) {
          theta = cand;
          ls_step = s * 1.6;
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) {
        report.termination = gn <= cfg.tol ? Termination::Converged : Termination::MaxIter;
        report.message = "line search stalled";
        break;
      }
    }

    theta = family.project_params(theta, cfg.spd_floor);
    current = full_loss(theta);
    report.loss_history.push_back(current);
    if (!std::isfinite(current) || std::abs(current) > blow_up) {
      report.termination = Termination::Error;
      report.message = "loss diverged past 1e6x the initial value";
      break;
    }
  }

  report.params = theta;
  report.iterations = static_cast<int>(report.loss_history.size()) - 1;
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace geomet
