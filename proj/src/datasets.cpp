#include "geomet/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geomet/graph.hpp"
#include "geomet/rng.hpp"

namespace geomet {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_labeled(const LabeledDataset& data) {
  if (data.points.empty() || data.points.size() != data.labels.size()) {
    throw ArgumentError("labeled dataset: points and labels must be nonempty and aligned");
  }
}

int vote(std::vector<std::pair<double, int>>& dist_idx, const std::vector<int>& labels,
         int n_classes, int k) {
  std::sort(dist_idx.begin(), dist_idx.end());
  const int kk = std::min<int>(k, static_cast<int>(dist_idx.size()));
  if (kk < 1) throw ArgumentError("knn vote: no candidates");
  if (!std::isfinite(dist_idx[0].first)) {
    throw UnreachableError("knn vote: query cannot reach any training point");
  }
  std::vector<int> counts(static_cast<size_t>(n_classes), 0);
  for (int t = 0; t < kk; ++t) {
    if (!std::isfinite(dist_idx[static_cast<size_t>(t)].first)) break;
    ++counts[static_cast<size_t>(labels[static_cast<size_t>(dist_idx[static_cast<size_t>(t)].second)])];
  }
  int best = 0;
  for (int c = 1; c < n_classes; ++c) {
    if (counts[static_cast<size_t>(c)] > counts[static_cast<size_t>(best)]) best = c;
  }
  return best;
}

}  // namespace

LabeledDataset gen_spiral(int n_per_class, double turns, double noise, std::uint64_t seed) {
  if (n_per_class < 1) throw ArgumentError("gen_spiral: n_per_class must be positive");
  if (noise < 0.0) throw ArgumentError("gen_spiral: noise must be nonnegative");
  LabeledDataset out;
  out.n_classes = 2;
  out.meta = {{"turns", turns}, {"noise", noise}, {"seed", static_cast<double>(seed)}};
  Rng rng(seed);
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      const double t = turns * 2.0 * kPi * (i + 0.5) / n_per_class;
      const double r = 0.5 * t;
      const double phi = t + c * kPi;
      Vec p(2);
      p << r * std::cos(phi) + noise * rng.normal(), r * std::sin(phi) + noise * rng.normal();
      out.points.push_back(p);
      out.labels.push_back(c);
    }
  }
  return out;
}

LabeledDataset gen_aniso_grid(int n_per_class, double scale_x, double scale_y,
                              std::uint64_t /*seed*/) {
  if (n_per_class < 2) throw ArgumentError("gen_aniso_grid: n_per_class must be at least 2");
  if (!(scale_x > 0.0) || !(scale_y > 0.0)) {
    throw ArgumentError("gen_aniso_grid: scales must be positive");
  }
  LabeledDataset out;
  out.n_classes = 2;
  out.meta = {{"scale_x", scale_x}, {"scale_y", scale_y}};
  for (int i = 0; i < n_per_class; ++i) {
    Vec a(2);
    a << i * scale_x, 0.0;
    out.points.push_back(a);
    out.labels.push_back(0);
  }
  for (int i = 0; i < n_per_class; ++i) {
    Vec b(2);
    b << i * scale_x + 0.5 * scale_x, scale_y;
    out.points.push_back(b);
    out.labels.push_back(1);
  }
  out.separating_metric = Mat{{1.0 / (scale_x * scale_x), 0.0}, {0.0, 1.0 / (scale_y * scale_y)}};
  return out;
}

TrajectorySet gen_trajectories(const MetricField& field, int n_traj, int samples_per,
                               double noise, std::uint64_t seed, const SolverConfig& cfg) {
  if (n_traj < 0) throw ArgumentError("gen_trajectories: n_traj must be nonnegative");
  if (samples_per < 2) throw ArgumentError("gen_trajectories: need at least two samples");
  if (noise < 0.0) throw ArgumentError("gen_trajectories: noise must be nonnegative");
  const int d = field.dim();
  Rng rng(seed);
  TrajectorySet out;
  for (int tr = 0; tr < n_traj; ++tr) {
    Vec q(d), v(d);
    for (int a = 0; a < d; ++a) q(a) = rng.uniform(0.6, 1.4);
    for (int a = 0; a < d; ++a) v(a) = rng.uniform(-0.5, 0.5);
    std::vector<double> times(static_cast<size_t>(samples_per));
    for (double& t : times) t = rng.uniform();
    std::sort(times.begin(), times.end());
    const GeodesicPath path = exp_map(field, q, v, cfg);
    Trajectory traj;
    traj.times = times;
    for (double t : times) {
      Vec p = path_point(path, t);
      for (int a = 0; a < d; ++a) p(a) += noise * rng.normal();
      traj.points.push_back(p);
    }
    out.trajectories.push_back(std::move(traj));
  }
  return out;
}

TripletSet build_nearest_triplets(const LabeledDataset& data) {
  check_labeled(data);
  const int n = data.size();
  TripletSet out;
  for (int i = 0; i < n; ++i) {
    int best_same = -1, best_other = -1;
    double ds = std::numeric_limits<double>::infinity();
    double doth = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 =
          (data.points[static_cast<size_t>(j)] - data.points[static_cast<size_t>(i)]).squaredNorm();
      if (data.labels[static_cast<size_t>(j)] == data.labels[static_cast<size_t>(i)]) {
        if (d2 < ds) {
          ds = d2;
          best_same = j;
        }
      } else if (d2 < doth) {
        doth = d2;
        best_other = j;
      }
    }
    if (best_same < 0 || best_other < 0) {
      throw ArgumentError("build_nearest_triplets: every class needs >= 2 points and a rival");
    }
    out.triplets.push_back(Triplet{data.points[static_cast<size_t>(i)],
                                   data.points[static_cast<size_t>(best_same)],
                                   data.points[static_cast<size_t>(best_other)]});
  }
  return out;
}

std::vector<int> knn_classify(const MetricField& field, const LabeledDataset& train,
                              const std::vector<Vec>& queries, const KnnConfig& cfg) {
  check_labeled(train);
  if (cfg.k < 1) throw ArgumentError("knn_classify: k must be positive");
  const int nt = train.size();
  Backend backend = cfg.backend;
  if (backend == Backend::Auto) backend = field.is_constant() ? Backend::Exact : Backend::Graph;

  std::vector<int> out;
  out.reserve(queries.size());
  std::vector<std::pair<double, int>> dist_idx;

  if (backend == Backend::Graph) {
    std::vector<Vec> nodes = train.points;
    nodes.insert(nodes.end(), queries.begin(), queries.end());
    const int k = std::max(1, std::min(cfg.solver.graph_k, static_cast<int>(nodes.size()) - 1));
    const MetricGraph graph = build_knn_graph(nodes, k, &field);
    for (size_t qi = 0; qi < queries.size(); ++qi) {
      const Vec row = graph_distances_from(graph, nt + static_cast<int>(qi));
      dist_idx.clear();
      for (int j = 0; j < nt; ++j) dist_idx.push_back({row(j), j});
      out.push_back(vote(dist_idx, train.labels, train.n_classes, cfg.k));
    }
    return out;
  }

  for (const Vec& q : queries) {
    dist_idx.clear();
    for (int j = 0; j < nt; ++j) {
      const Vec& y = train.points[static_cast<size_t>(j)];
      double dist;
      if (backend == Backend::Exact) {
        const Vec u = y - q;
        dist = std::sqrt(std::max(0.0, u.dot(field.metric_at(q) * u)));
      } else {
        dist = riemannian_distance(field, q, y, DistanceMethod::Shooting, cfg.solver);
      }
      dist_idx.push_back({dist, j});
    }
    out.push_back(vote(dist_idx, train.labels, train.n_classes, cfg.k));
  }
  return out;
}

double loo_accuracy(const MetricField& field, const LabeledDataset& data, const KnnConfig& cfg) {
  check_labeled(data);
  const int n = data.size();
  if (n < 2) throw ArgumentError("loo_accuracy: need at least two points");
  Backend backend = cfg.backend;
  if (backend == Backend::Auto) backend = field.is_constant() ? Backend::Exact : Backend::Graph;

  int correct = 0;
  std::vector<std::pair<double, int>> dist_idx;
  const MetricGraph graph =
      backend == Backend::Graph
          ? build_knn_graph(data.points,
                            std::max(1, std::min(cfg.solver.graph_k, n - 1)), &field)
          : MetricGraph{};
  for (int i = 0; i < n; ++i) {
    dist_idx.clear();
    if (backend == Backend::Graph) {
      const Vec row = graph_distances_from(graph, i);
      for (int j = 0; j < n; ++j) {
        if (j != i) dist_idx.push_back({row(j), j});
      }
    } else {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const Vec& x = data.points[static_cast<size_t>(i)];
        const Vec& y = data.points[static_cast<size_t>(j)];
        double dist;
        if (backend == Backend::Exact) {
          const Vec u = y - x;
          dist = std::sqrt(std::max(0.0, u.dot(field.metric_at(x) * u)));
        } else {
          dist = riemannian_distance(field, x, y, DistanceMethod::Shooting, cfg.solver);
        }
        dist_idx.push_back({dist, j});
      }
    }
    if (vote(dist_idx, data.labels, data.n_classes, cfg.k) == data.labels[static_cast<size_t>(i)]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / n;
}

}  // namespace geomet
