#include "geomet/stats.hpp"

#include <cmath>
#include <string>

namespace geomet {

std::vector<Vec> sample_by_volume(const MetricField& field, const Vec& lo, const Vec& hi,
                                  int n, std::uint64_t seed) {
  const int d = field.dim();
  if (lo.size() != d || hi.size() != d) {
    throw ShapeMismatchError("sample_by_volume: box dimension does not match the field");
  }
  for (int i = 0; i < d; ++i) {
    if (!(lo(i) < hi(i))) throw ArgumentError("sample_by_volume: box must have positive extent");
  }
  if (n < 0) throw ArgumentError("sample_by_volume: n must be nonnegative");

  // Envelope: densest value seen on a ~4096-point grid scan, inflated 10%.
  const int per_axis =
      std::min(4096, std::max(8, static_cast<int>(std::ceil(std::pow(4096.0, 1.0 / d)))));
  double bound = 0.0;
  Vec x(d);
  std::vector<int> idx(static_cast<size_t>(d), 0);
  while (true) {
    for (int a = 0; a < d; ++a) {
      x(a) = lo(a) + (hi(a) - lo(a)) * idx[static_cast<size_t>(a)] / (per_axis - 1);
    }
    bound = std::max(bound, volume_density(field, x));
    int a = 0;
    for (; a < d; ++a) {
      if (++idx[static_cast<size_t>(a)] < per_axis) break;
      idx[static_cast<size_t>(a)] = 0;
    }
    if (a == d) break;
  }
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw DomainError("sample_by_volume: volume density is degenerate on the box");
  }
  bound *= 1.1;

  Rng rng(seed);
  std::vector<Vec> out;
  out.reserve(static_cast<size_t>(n));
  long long proposals = 0;
  while (static_cast<int>(out.size()) < n) {
    Vec p(d);
    for (int a = 0; a < d; ++a) p(a) = rng.uniform(lo(a), hi(a));
    const double u = rng.uniform() * bound;
    ++proposals;
    if (u < volume_density(field, p)) out.push_back(p);
    if (proposals >= 10000 &&
        static_cast<double>(out.size()) / static_cast<double>(proposals) < 1e-4) {
      throw EfficiencyError("sample_by_volume: acceptance rate below 1e-4 after " +
                            std::to_string(proposals) + " proposals");
    }
  }
  return out;
}

Vec frechet_mean(const MetricField& field, const std::vector<Vec>& points,
                 const SolverConfig& cfg) {
  if (points.empty()) throw ArgumentError("frechet_mean: empty point set");
  for (const Vec& p : points) {
    if (p.size() != field.dim()) {
      throw ShapeMismatchError("frechet_mean: point dimension does not match the field");
    }
  }
  if (points.size() == 1) return points[0];

  constexpr int kOuterIterations = 100;
  Vec q = points[0];
  Vec mean = Vec::Zero(field.dim());
  for (int it = 0; it < kOuterIterations; ++it) {
    mean.setZero();
    for (const Vec& p : points) mean += log_map_shooting(field, q, p, cfg).dir;
    mean /= static_cast<double>(points.size());
    if (mean.norm() <= cfg.tol) return q;
    q = exp_map(field, q, mean, cfg).points.back();
  }
  throw NoConvergenceError("frechet_mean: fixed point iteration did not converge",
                           TangentVector{q, mean}, mean.norm());
}

}  // namespace geomet
