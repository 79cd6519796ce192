#pragma once

#include "geomet/metric_field.hpp"

namespace geomet {

// Chart for the SPD(n) manifold: a symmetric matrix maps to the d = n(n+1)/2
// coefficients on the orthonormal Frobenius basis (diagonal units first, then
// off-diagonal pairs scaled by 1/sqrt(2)), so |to_chart(M)| = |M|_F exactly.
class SpdChart {
 public:
  explicit SpdChart(int n);

  int n() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  Vec to_chart(const Mat& s) const;
  Mat from_chart(const Vec& v) const;
  const Mat& basis(int a) const { return basis_[a]; }

 private:
  int n_;
  std::vector<Mat> basis_;
};

// Affine-invariant metric on the SPD chart: g_M(W,V) = tr(M^{-1} W M^{-1} V),
// expressed in chart coordinates. Diverges as M approaches the cone boundary.
class SpdAffineField final : public MetricField {
 public:
  explicit SpdAffineField(int n) : chart_(n) {}

  int dim() const override { return chart_.dim(); }
  Mat metric_at(const Vec& x) const override;
  bool has_analytic_derivative() const override { return true; }
  std::vector<Mat> derivative_at(const Vec& x) const override;

  const SpdChart& chart() const { return chart_; }

 private:
  SpdChart chart_;
};

// Symmetric-eigendecomposition matrix functions; log/sqrt inputs must be SPD
// (eigenvalues clamped at a 1e-300 floor before log so near-singular inputs
// yield huge finite values instead of NaN; outright non-SPD raises).
Mat spd_sqrt(const Mat& m);
Mat spd_log(const Mat& m);
Mat sym_exp(const Mat& s);

// d(M1,M2) = |log(M1^{-1/2} M2 M1^{-1/2})|_F
double spd_affine_distance(const Mat& m1, const Mat& m2);
// Geodesic point: Sigma^{1/2} exp(t Sigma^{-1/2} V Sigma^{-1/2}) Sigma^{1/2}
Mat spd_affine_exp(const Mat& sigma, const Mat& v, double t = 1.0);
// Inverse of the above at t=1: the initial velocity reaching M2 from Sigma.
Mat spd_affine_log(const Mat& sigma, const Mat& m2);
// Transport of W along the geodesic with velocity V: E W E^T, E = exp(t V Sigma^{-1} / 2).
Mat spd_affine_transport(const Mat& sigma, const Mat& v, const Mat& w, double t = 1.0);

// d(M1,M2) = |log M1 - log M2|_F
double log_euclidean_distance(const Mat& m1, const Mat& m2);

// Poincare upper half-plane, g = y^{-2} I. Domain y > 0.
class HyperbolicHalfPlaneField final : public MetricField {
 public:
  int dim() const override { return 2; }
  Mat metric_at(const Vec& x) const override;
  bool has_analytic_derivative() const override { return true; }
  std::vector<Mat> derivative_at(const Vec& x) const override;
};

// arccosh(1 + ((dx)^2 + (dy)^2) / (2 y1 y2))
double hyperbolic_exact_distance(const Vec& p, const Vec& q);

// Independent brute-force distance: Dijkstra on a 400x400 grid graph with
// 16-direction neighborhoods and midpoint-metric edge lengths, followed by
// rounds of polyline coordinate-descent refinement and arclength resampling.
// Accuracy is limited by the 64-segment polyline discretization (~1e-5 rel).
double hyperbolic_oracle_distance(const Vec& p, const Vec& q);

}  // namespace geomet
