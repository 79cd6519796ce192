#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace geomet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A direction vector anchored at a base chart point. Also carries momenta in
// the Hamiltonian formulation (same storage, different covariance).
struct TangentVector {
  Vec base;
  Vec dir;
};

// Discretized curve. times strictly increasing, times.front()==0,
// times.back()==1; points/velocities have the same length as times.
struct GeodesicPath {
  std::vector<double> times;
  std::vector<Vec> points;
  std::vector<Vec> velocities;
  bool converged = true;  // false when an iterative solver returned its best iterate

  int n_nodes() const { return static_cast<int>(times.size()); }
};

// Error taxonomy. ValidationError: the inputs or data are unusable (CLI exit
// code 2). SolverError: a well-posed computation did not finish (exit code 3).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgumentError : ValidationError {
  using ValidationError::ValidationError;
};
struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};
struct ShapeMismatchError : ValidationError {
  using ValidationError::ValidationError;
};
struct SingularMatrixError : ValidationError {
  using ValidationError::ValidationError;
};
struct RankDeficiencyError : ValidationError {
  using ValidationError::ValidationError;
};
struct NonFiniteLossError : ValidationError {
  using ValidationError::ValidationError;
};
struct UnreachableError : ValidationError {
  using ValidationError::ValidationError;
};

struct BlowUpError : SolverError {
  using SolverError::SolverError;
};
struct EfficiencyError : SolverError {
  using SolverError::SolverError;
};

// Iterative solver gave up; carries the best iterate found so the caller can
// inspect or reuse it.
struct NoConvergenceError : SolverError {
  NoConvergenceError(const std::string& what, TangentVector best_iterate, double residual_)
      : SolverError(what), best(std::move(best_iterate)), residual(residual_) {}
  TangentVector best;
  double residual;
};

}  // namespace geomet
