#include "geomet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace geomet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_node(const MetricGraph& graph, int i, const char* who) {
  if (i < 0 || i >= graph.n_nodes()) {
    throw ArgumentError(std::string(who) + ": node index out of range");
  }
}

// Single-source Dijkstra. Predecessor ties on exact distance equality are
// broken toward the smaller predecessor index so paths are canonical.
void dijkstra(const MetricGraph& graph, int src, std::vector<double>& dist,
              std::vector<int>& pred) {
  const int n = graph.n_nodes();
  dist.assign(static_cast<size_t>(n), kInf);
  pred.assign(static_cast<size_t>(n), -1);
  std::vector<char> done(static_cast<size_t>(n), 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[static_cast<size_t>(src)] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[static_cast<size_t>(u)]) continue;
    done[static_cast<size_t>(u)] = 1;
    for (const auto& [v, w] : graph.adj[static_cast<size_t>(u)]) {
      if (done[static_cast<size_t>(v)]) continue;
      const double nd = d + w;
      if (nd < dist[static_cast<size_t>(v)]) {
        dist[static_cast<size_t>(v)] = nd;
        pred[static_cast<size_t>(v)] = u;
        heap.push({nd, v});
      } else if (nd == dist[static_cast<size_t>(v)] && u < pred[static_cast<size_t>(v)]) {
        pred[static_cast<size_t>(v)] = u;
      }
    }
  }
}

}  // namespace

MetricGraph build_knn_graph(const std::vector<Vec>& points, int k, const MetricField* field,
                            bool mutual) {
  const int n = static_cast<int>(points.size());
  if (n < 2) throw ArgumentError("build_knn_graph: need at least two points");
  if (k < 1 || k >= n) throw ArgumentError("build_knn_graph: k must satisfy 1 <= k < n");
  const int d = static_cast<int>(points[0].size());
  for (const Vec& p : points) {
    if (p.size() != d) throw ShapeMismatchError("build_knn_graph: inconsistent point dimensions");
  }
  if (field != nullptr && field->dim() != d) {
    throw ShapeMismatchError("build_knn_graph: field dimension does not match the points");
  }

  // Brute-force k nearest Euclidean neighbors per node; ties broken toward
  // smaller index so the neighborhood is a deterministic function of the data.
  std::vector<std::vector<int>> nbr(static_cast<size_t>(n));
  std::vector<std::pair<double, int>> row;
  for (int i = 0; i < n; ++i) {
    row.clear();
    row.reserve(static_cast<size_t>(n - 1));
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      row.push_back({(points[static_cast<size_t>(j)] - points[static_cast<size_t>(i)]).squaredNorm(), j});
    }
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
    std::sort(row.begin(), row.begin() + k);
    auto& list = nbr[static_cast<size_t>(i)];
    for (int t = 0; t < k; ++t) list.push_back(row[static_cast<size_t>(t)].second);
    std::sort(list.begin(), list.end());
  }

  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j : nbr[static_cast<size_t>(i)]) {
      const bool back = std::binary_search(nbr[static_cast<size_t>(j)].begin(),
                                           nbr[static_cast<size_t>(j)].end(), i);
      if (mutual && !back) continue;
      edges.insert({std::min(i, j), std::max(i, j)});
    }
  }

  MetricGraph graph;
  graph.nodes = points;
  graph.k = k;
  graph.adj.assign(static_cast<size_t>(n), {});
  for (const auto& [i, j] : edges) {
    const Vec chord = points[static_cast<size_t>(j)] - points[static_cast<size_t>(i)];
    double w;
    if (field != nullptr) {
      const Vec mid = 0.5 * (points[static_cast<size_t>(i)] + points[static_cast<size_t>(j)]);
      w = std::sqrt(std::max(0.0, chord.dot(field->metric_at(mid) * chord)));
    } else {
      w = chord.norm();
    }
    graph.adj[static_cast<size_t>(i)].push_back({j, w});
    graph.adj[static_cast<size_t>(j)].push_back({i, w});
  }
  for (auto& list : graph.adj) std::sort(list.begin(), list.end());
  return graph;
}

double graph_distance(const MetricGraph& graph, int i, int j) {
  check_node(graph, i, "graph_distance");
  check_node(graph, j, "graph_distance");
  if (i == j) return 0.0;
  // Always search from the smaller index: d(i,j) and d(j,i) are then the
  // same computation, so symmetry holds exactly in floating point.
  const int src = std::min(i, j);
  const int dst = std::max(i, j);
  std::vector<double> dist;
  std::vector<int> pred;
  dijkstra(graph, src, dist, pred);
  return dist[static_cast<size_t>(dst)];
}

Vec graph_distances_from(const MetricGraph& graph, int src) {
  check_node(graph, src, "graph_distances_from");
  std::vector<double> dist;
  std::vector<int> pred;
  dijkstra(graph, src, dist, pred);
  return Eigen::Map<const Vec>(dist.data(), graph.n_nodes());
}

Mat graph_all_distances(const MetricGraph& graph) {
  const int n = graph.n_nodes();
  Mat out(n, n);
  std::vector<double> dist;
  std::vector<int> pred;
  for (int i = 0; i < n; ++i) {
    dijkstra(graph, i, dist, pred);
    for (int j = 0; j < n; ++j) out(i, j) = dist[static_cast<size_t>(j)];
  }
  // Canonical closure. Per-source runs agree across sources only up to
  // accumulation order, so symmetrize, then relax until the triangle
  // inequality is a floating-point fixpoint (commutative additions keep the
  // matrix exactly symmetric throughout).
  out = out.cwiseMin(out.transpose().eval());
  out.diagonal().setZero();
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool changed = false;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        const double dik = out(i, k);
        if (dik == kInf) continue;
        for (int j = 0; j < n; ++j) {
          const double c = dik + out(k, j);
          if (c < out(i, j)) {
            out(i, j) = c;
            changed = true;
          }
        }
      }
    }
    if (!changed) break;
  }
  return out;
}

std::vector<int> graph_geodesic_path(const MetricGraph& graph, int i, int j) {
  check_node(graph, i, "graph_geodesic_path");
  check_node(graph, j, "graph_geodesic_path");
  if (i == j) return {i};
  const int src = std::min(i, j);
  const int dst = std::max(i, j);
  std::vector<double> dist;
  std::vector<int> pred;
  dijkstra(graph, src, dist, pred);
  if (dist[static_cast<size_t>(dst)] == kInf) {
    throw UnreachableError("graph_geodesic_path: nodes lie in different components");
  }
  std::vector<int> path;
  for (int v = dst; v != -1; v = pred[static_cast<size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  if (path.front() != i) std::reverse(path.begin(), path.end());
  return path;
}

int n_components(const MetricGraph& graph) {
  const int n = graph.n_nodes();
  std::vector<char> seen(static_cast<size_t>(n), 0);
  int comps = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<size_t>(s)]) continue;
    ++comps;
    stack.push_back(s);
    seen[static_cast<size_t>(s)] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [v, w] : graph.adj[static_cast<size_t>(u)]) {
        (void)w;
        if (!seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
  }
  return comps;
}

}  // namespace geomet
