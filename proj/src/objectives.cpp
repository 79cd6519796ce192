#include "geomet/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>

#include "geomet/descent.hpp"
#include "geomet/families.hpp"
#include "geomet/graph.hpp"
#include "geomet/rng.hpp"

namespace geomet {
namespace {

Backend resolve(Backend backend, const MetricField& field) {
  if (backend != Backend::Auto) return backend;
  return field.is_constant() ? Backend::Exact : Backend::Graph;
}

struct VecLess {
  bool operator()(const Vec& a, const Vec& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  }
};

// Evaluates the distances a loss needs under one backend. The graph backend
// indexes the unique endpoints, builds one kNN graph over them, and reuses
// Dijkstra rows across queries from the same source.
class DistanceEngine {
 public:
  DistanceEngine(const MetricField& field, Backend backend, const SolverConfig& cfg,
                 const std::vector<std::pair<Vec, Vec>>& pairs)
      : field_(field), backend_(resolve(backend, field)), cfg_(cfg) {
    for (const auto& [a, b] : pairs) {
      if (a.size() != field.dim() || b.size() != field.dim()) {
        throw ShapeMismatchError("distance backend: point dimension does not match the field");
      }
    }
    if (backend_ != Backend::Graph) return;
    for (const auto& [a, b] : pairs) {
      index_of(a);
      index_of(b);
    }
    if (nodes_.size() >= 2) {
      const int k = std::min(cfg.graph_k, static_cast<int>(nodes_.size()) - 1);
      graph_ = build_knn_graph(nodes_, std::max(1, k), &field_);
      rows_.assign(nodes_.size(), Vec());
    }
  }

  double distance(const Vec& a, const Vec& b) {
    switch (backend_) {
      case Backend::Exact: {
        const Vec u = b - a;
        return std::sqrt(std::max(0.0, u.dot(field_.metric_at(a) * u)));
      }
      case Backend::Shooting:
        return riemannian_distance(field_, a, b, DistanceMethod::Shooting, cfg_);
      case Backend::Graph: {
        const int i = lookup(a);
        const int j = lookup(b);
        if (i == j) return 0.0;
        const int src = std::min(i, j);
        Vec& row = rows_[static_cast<size_t>(src)];
        if (row.size() == 0) row = graph_distances_from(graph_, src);
        const double d = row(std::max(i, j));
        if (!std::isfinite(d)) {
          throw UnreachableError("graph distance backend: pair spans disconnected components (nodes " +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        return d;
      }
      case Backend::Auto:
        break;
    }
    throw ArgumentError("distance backend: unresolved backend");
  }

 private:
  int index_of(const Vec& p) {
    auto [it, inserted] = index_.try_emplace(p, static_cast<int>(nodes_.size()));
    if (inserted) nodes_.push_back(p);
    return it->second;
  }
  int lookup(const Vec& p) const { return index_.at(p); }

  const MetricField& field_;
  Backend backend_;
  SolverConfig cfg_;
  std::map<Vec, int, VecLess> index_;
  std::vector<Vec> nodes_;
  MetricGraph graph_;
  std::vector<Vec> rows_;
};

}  // namespace

double contrastive_loss(const MetricField& field, const PairSets& pairs,
                        ContrastiveVariant variant, Backend backend, const SolverConfig& cfg) {
  std::vector<std::pair<Vec, Vec>> all = pairs.similar;
  if (variant == ContrastiveVariant::SumDiff) {
    all.insert(all.end(), pairs.dissimilar.begin(), pairs.dissimilar.end());
  }
  DistanceEngine engine(field, backend, cfg, all);
  double loss = 0.0;
  for (const auto& [a, b] : pairs.similar) loss += engine.distance(a, b);
  if (variant == ContrastiveVariant::SumDiff) {
    for (const auto& [a, b] : pairs.dissimilar) loss -= engine.distance(a, b);
    return loss;
  }
  // Dissimilar pairs are pulled together under the inverted field, which is
  // equivalent to pushing them apart under the original one but keeps the
  // total loss bounded below.
  const InvertedField inverted(std::shared_ptr<const MetricField>(&field, [](const MetricField*) {}));
  DistanceEngine inv_engine(inverted, backend, cfg, pairs.dissimilar);
  for (const auto& [a, b] : pairs.dissimilar) loss += inv_engine.distance(a, b);
  return loss;
}

double triplet_loss(const MetricField& field, const TripletSet& triplets, double margin,
                    Backend backend, const SolverConfig& cfg) {
  if (margin < 0.0) throw ArgumentError("triplet_loss: margin must be nonnegative");
  std::vector<std::pair<Vec, Vec>> all;
  all.reserve(2 * triplets.triplets.size());
  for (const Triplet& t : triplets.triplets) {
    all.push_back({t.anchor, t.positive});
    all.push_back({t.anchor, t.negative});
  }
  DistanceEngine engine(field, backend, cfg, all);
  double loss = 0.0;
  for (const Triplet& t : triplets.triplets) {
    const double dp = engine.distance(t.anchor, t.positive);
    const double dn = engine.distance(t.anchor, t.negative);
    loss += dp + std::max(0.0, margin + dp - dn);
  }
  return loss;
}

double distance_regression_loss(const MetricField& field, const DistanceObservations& obs,
                                Backend backend, const SolverConfig& cfg) {
  std::vector<std::pair<Vec, Vec>> all;
  all.reserve(obs.items.size());
  for (const DistanceObservation& o : obs.items) {
    if (!(o.d_obs >= 0.0)) throw ArgumentError("distance_regression_loss: d_obs must be >= 0");
    if (!(o.weight > 0.0)) throw ArgumentError("distance_regression_loss: weight must be > 0");
    all.push_back({o.x, o.y});
  }
  DistanceEngine engine(field, backend, cfg, all);
  double loss = 0.0;
  for (const DistanceObservation& o : obs.items) {
    const double r = o.d_obs - engine.distance(o.x, o.y);
    loss += o.weight * r * r;
  }
  return loss;
}

double trajectory_loss(const MetricField& field, const TrajectorySet& trajectories,
                       const SolverConfig& cfg, std::vector<TrajectoryFit>* fits) {
  const int d = field.dim();
  if (fits != nullptr) fits->clear();
  double total = 0.0;
  for (const Trajectory& traj : trajectories.trajectories) {
    if (traj.points.size() < 2 || traj.points.size() != traj.times.size()) {
      throw ArgumentError("trajectory_loss: trajectory needs matching times and >= 2 points");
    }
    for (const Vec& p : traj.points) {
      if (p.size() != d) {
        throw ShapeMismatchError("trajectory_loss: point dimension does not match the field");
      }
    }
    const double t0 = traj.times.front();
    const double span = traj.times.back() - t0;
    if (!(span > 0.0)) throw ArgumentError("trajectory_loss: times must be strictly increasing");
    std::vector<double> s(traj.times.size());
    for (size_t j = 0; j < traj.times.size(); ++j) {
      if (j > 0 && !(traj.times[j] > traj.times[j - 1])) {
        throw ArgumentError("trajectory_loss: times must be strictly increasing");
      }
      s[j] = (traj.times[j] - t0) / span;
    }

    // Single-geodesic fit over the stacked state (start, velocity); the data
    // misfit is evaluated on one rollout per candidate.
    auto misfit = [&](const Vec& theta) {
      const Vec q = theta.head(d);
      const Vec v = theta.tail(d);
      try {
        const GeodesicPath path = exp_map(field, q, v, cfg);
        double e = 0.0;
        for (size_t j = 0; j < s.size(); ++j) {
          e += (traj.points[j] - path_point(path, s[j])).squaredNorm();
        }
        return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };

    DescentOptions opt;
    opt.max_iter = std::min(cfg.max_iter, 300);
    opt.g_tol = 1e-7;
    opt.f_tol = 1e-14;
    opt.step0 = cfg.step_size;

    Vec theta0(2 * d);
    theta0.head(d) = traj.points.front();
    theta0.tail(d) = traj.points.back() - traj.points.front();
    DescentResult best = minimize(misfit, theta0, opt);
    for (int attempt = 1; attempt <= 3 && !best.converged; ++attempt) {
      Rng rng(4321 + static_cast<std::uint64_t>(attempt));
      Vec theta = theta0;
      const double scale = 0.25 * (1.0 + theta0.tail(d).norm());
      for (int a = 0; a < d; ++a) theta(d + a) += scale * rng.normal();
      const DescentResult r = minimize(misfit, theta, opt);
      if (r.value < best.value) best = r;
    }

    total += best.value;
    if (fits != nullptr) {
      fits->push_back(TrajectoryFit{best.x.head(d), best.x.tail(d), best.value, best.converged});
    }
  }
  return total;
}

}  // namespace geomet
