#pragma once

#include "geomet/types.hpp"

#include <vector>

namespace geomet {

// Contract: metric_at returns a symmetric positive-definite dim() x dim()
// matrix for every finite input, already symmetrized. Implementations must be
// immutable after construction (safe for concurrent read-only evaluation).
class MetricField {
 public:
  virtual ~MetricField() = default;

  virtual int dim() const = 0;
  virtual Mat metric_at(const Vec& x) const = 0;

  // When true, derivative_at supplies dg[i](j,k) = d g_jk / d x_i analytically;
  // otherwise metric_derivatives falls back to central finite differences.
  virtual bool has_analytic_derivative() const { return false; }
  virtual std::vector<Mat> derivative_at(const Vec& x) const;

  // Constant fields admit exact Mahalanobis distances and identity transport.
  virtual bool is_constant() const { return false; }
};

// Rank-3 array of connection coefficients, gamma[k](i,j) = Gamma^k_ij.
// Symmetric in (i,j) bit-identically by construction.
struct ChristoffelTensor {
  std::vector<Mat> gamma;
};

// Central-difference step rule used everywhere a derivative of a field (or a
// loss over packed parameters) is taken numerically.
double fd_step_for(const Vec& x);

Mat symmetrized(const Mat& a);

// Eigen-based SPD inverse. Throws SingularMatrixError when the (symmetrized)
// input is not SPD within tolerance: min eigenvalue must exceed 1e-12 * max.
Mat spd_inverse(const Mat& g);

Mat metric_inverse(const MetricField& field, const Vec& x);

// Analytic derivatives when the field has them, else central differences with
// step h (h <= 0 selects the step rule). Output symmetric in (j,k).
std::vector<Mat> metric_derivatives(const MetricField& field, const Vec& x, double h = 0.0);

ChristoffelTensor christoffel(const MetricField& field, const Vec& x);

}  // namespace geomet
