#pragma once

#include <vector>

#include "geomet/geodesics.hpp"
#include "geomet/rng.hpp"

namespace geomet {

// Rejection-samples n points on the axis-aligned box [lo, hi] with density
// proportional to sqrt(det g). The envelope is a grid scan of the density
// over the box, inflated by 10%. Deterministic in the seed. Throws
// EfficiencyError when the acceptance rate collapses below 1e-4.
std::vector<Vec> sample_by_volume(const MetricField& field, const Vec& lo, const Vec& hi,
                                  int n, std::uint64_t seed);

// Karcher/Frechet mean by fixed-point iteration q <- Exp_q(mean_i Log_q(x_i)),
// stopping when the mean log has norm <= cfg.tol. Log solves use cfg.
Vec frechet_mean(const MetricField& field, const std::vector<Vec>& points,
                 const SolverConfig& cfg = {});

}  // namespace geomet
