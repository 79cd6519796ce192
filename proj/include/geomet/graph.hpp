#pragma once

#include <utility>
#include <vector>

#include "geomet/metric_field.hpp"

namespace geomet {

// Undirected weighted proximity graph over a fixed node set. Adjacency lists
// are sorted by neighbor index and store each edge in both directions with
// the identical weight.
struct MetricGraph {
  std::vector<Vec> nodes;
  std::vector<std::vector<std::pair<int, double>>> adj;
  int k = 0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
};

// k-nearest-neighbor graph under Euclidean proximity. Edge weights are the
// metric length of the straight chord, sqrt(d^T g(mid) d) with g evaluated at
// the segment midpoint, or plain Euclidean length when field is null.
// Neighborhoods are union-symmetrized by default; mutual=true intersects
// them instead (which can disconnect the graph).
MetricGraph build_knn_graph(const std::vector<Vec>& points, int k,
                            const MetricField* field = nullptr, bool mutual = false);

// Shortest-path distance between two nodes; +infinity marks unreachable
// pairs. Exactly symmetric: the search always runs from the smaller index.
double graph_distance(const MetricGraph& graph, int i, int j);

// One-to-all shortest-path distances from src (+infinity where unreachable).
Vec graph_distances_from(const MetricGraph& graph, int src);

// All-pairs distance matrix put into canonical form: symmetrized, zero
// diagonal, and closed under relaxation so d(i,j) <= d(i,k) + d(k,j) holds
// exactly in floating point, with path sums matching matrix entries.
Mat graph_all_distances(const MetricGraph& graph);

// Node sequence of a shortest path (ties broken toward the smaller
// predecessor index). Throws UnreachableError when no path exists.
std::vector<int> graph_geodesic_path(const MetricGraph& graph, int i, int j);

int n_components(const MetricGraph& graph);

}  // namespace geomet
