#pragma once

#include <utility>
#include <vector>

#include "geomet/geodesics.hpp"

namespace geomet {

struct PairSets {
  std::vector<std::pair<Vec, Vec>> similar;
  std::vector<std::pair<Vec, Vec>> dissimilar;
};

struct Triplet {
  Vec anchor, positive, negative;
};

struct TripletSet {
  std::vector<Triplet> triplets;
};

struct DistanceObservation {
  Vec x, y;
  double d_obs = 0.0;
  double weight = 1.0;
};

struct DistanceObservations {
  std::vector<DistanceObservation> items;
};

struct Trajectory {
  std::vector<double> times;  // strictly increasing
  std::vector<Vec> points;
};

struct TrajectorySet {
  std::vector<Trajectory> trajectories;
};

// How pairwise distances inside a loss are evaluated. Auto picks the exact
// straight-line form for constant fields and the graph proxy otherwise
// (cheap and stable inside optimization loops); Shooting solves the actual
// boundary problem and is meant for final evaluation.
enum class Backend { Auto, Exact, Graph, Shooting };

enum class ContrastiveVariant { SumDiff, InverseNegatives };

// sum-diff: sum_sim d - sum_dis d. inverse-negatives: sum_sim d + sum_dis d'
// where d' is the distance under the pointwise-inverted field, so both terms
// are bounded-below pulls.
double contrastive_loss(const MetricField& field, const PairSets& pairs,
                        ContrastiveVariant variant = ContrastiveVariant::SumDiff,
                        Backend backend = Backend::Auto, const SolverConfig& cfg = {});

// Per triplet: d(a,p) + max(0, margin + d(a,p) - d(a,n)).
double triplet_loss(const MetricField& field, const TripletSet& triplets, double margin = 1.0,
                    Backend backend = Backend::Auto, const SolverConfig& cfg = {});

// Weighted least squares sum_i w_i (d_obs_i - d(x_i, y_i))^2.
double distance_regression_loss(const MetricField& field, const DistanceObservations& obs,
                                Backend backend = Backend::Auto, const SolverConfig& cfg = {});

struct TrajectoryFit {
  Vec start;
  Vec velocity;
  double residual = 0.0;
  bool converged = false;
};

// For each trajectory, fits a single geodesic (start point and velocity in
// normalized time) to the observed samples by shooting descent and charges
// the squared data misfit of the best candidate found; non-converged inner
// fits contribute their best value rather than throwing.
double trajectory_loss(const MetricField& field, const TrajectorySet& trajectories,
                       const SolverConfig& cfg = {}, std::vector<TrajectoryFit>* fits = nullptr);

}  // namespace geomet
