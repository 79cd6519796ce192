#pragma once

#include <map>
#include <string>
#include <vector>

#include "geomet/objectives.hpp"

namespace geomet {

struct LabeledDataset {
  std::vector<Vec> points;
  std::vector<int> labels;
  int n_classes = 0;
  Mat separating_metric;  // generator-known separating metric, when one exists
  std::map<std::string, double> meta;

  int size() const { return static_cast<int>(points.size()); }
};

// Two interleaved planar spirals r = 0.5 t, phase-shifted by pi, with
// isotropic Gaussian jitter. Euclidean neighborhoods mix the classes where
// the arms pass close; the in-arm direction separates them.
LabeledDataset gen_spiral(int n_per_class = 150, double turns = 2.0, double noise = 0.05,
                          std::uint64_t seed = 0);

// Two parallel rows of points along x, offset by half a grid step and a
// small y gap. Isotropically nearest neighbors are in the other class; under
// the stored separating metric diag(1/sx^2, 1/sy^2) they are in the same
// class. Noiseless and deterministic.
LabeledDataset gen_aniso_grid(int n_per_class = 40, double scale_x = 2.0, double scale_y = 0.2,
                              std::uint64_t seed = 0);

// Random geodesics of the field sampled at sorted uniform times with
// additive Gaussian observation noise. Starts are drawn in [0.6, 1.4]^d and
// velocities in [-0.5, 0.5]^d; draw order is fixed so output is a pure
// function of the seed.
TrajectorySet gen_trajectories(const MetricField& field, int n_traj, int samples_per,
                               double noise, std::uint64_t seed, const SolverConfig& cfg = {});

// One triplet per anchor point: nearest same-class point as positive,
// nearest other-class point as negative (Euclidean; ties to smaller index).
TripletSet build_nearest_triplets(const LabeledDataset& data);

struct KnnConfig {
  int k = 1;
  Backend backend = Backend::Auto;
  SolverConfig solver;
};

// k-nearest-neighbor vote under the field's distance. Vote ties go to the
// smaller class id, distance ties to the smaller training index.
std::vector<int> knn_classify(const MetricField& field, const LabeledDataset& train,
                              const std::vector<Vec>& queries, const KnnConfig& cfg = {});

// Leave-one-out accuracy: each point is classified against all others (the
// graph backend keeps the held-out point as a graph node and only excludes
// it from the vote).
double loo_accuracy(const MetricField& field, const LabeledDataset& data,
                    const KnnConfig& cfg = {});

}  // namespace geomet
