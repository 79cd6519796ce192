#pragma once

#include <memory>
#include <string>
#include <vector>

#include "geomet/datasets.hpp"
#include "geomet/fit.hpp"
#include "geomet/graph.hpp"

namespace geomet {

// Text tables, all space-delimited with doubles printed at 17 significant
// digits so write/read round-trips are exact and reruns are byte-identical.

// Header "d n n_classes", then one row per point: coords then integer label.
void write_points(const std::string& path, const LabeledDataset& data);
LabeledDataset read_points(const std::string& path);

// Header "d n_trajectories", then one row per sample: id, time, coords.
void write_trajectories(const std::string& path, const TrajectorySet& set);
TrajectorySet read_trajectories(const std::string& path);

// Header "d n", then one row per observation: x coords, y coords, d_obs, weight.
void write_observations(const std::string& path, const DistanceObservations& obs);
DistanceObservations read_observations(const std::string& path);

// One row per node: time, coords, velocity coords (no header).
void write_path(const std::string& path, const GeodesicPath& geo);
// Plot-friendly variant: time and coords only.
void write_path_table(const std::string& path, const GeodesicPath& geo);

// One row per undirected edge: i j weight (i < j).
void write_graph_edges(const std::string& path, const MetricGraph& graph);

// One row per iteration: index, loss.
void write_loss_table(const std::string& path, const std::vector<double>& loss);

// Metric fields serialize to versioned JSON keyed by family name. Supported:
// constant, voronoi, kernel, density, hyperbolic, spd-affine, and the
// "identity" convenience spelling on input. Composite fields (pullback,
// inverted) have no file form and raise ArgumentError.
std::string field_to_json(const MetricField& field);
std::unique_ptr<MetricField> field_from_json(const std::string& text);
// Same parse restricted to fittable families (throws ArgumentError otherwise).
std::unique_ptr<PackableField> packable_from_json(const std::string& text);

void save_field(const std::string& path, const MetricField& field);
std::unique_ptr<MetricField> load_field(const std::string& path);
std::unique_ptr<PackableField> load_packable(const std::string& path);

// Fit outcome as versioned JSON. Wall time is deliberately omitted so that
// reruns of the same seed produce byte-identical files. run_config_text, when
// nonempty, must be a JSON object and is embedded under "run_config".
std::string fit_report_to_json(const FitReport& report, const std::string& run_config_text = "");

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace geomet
