#pragma once

#include "geomet/metric_field.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace geomet {

// Symmetrize, eigendecompose, clamp eigenvalues at eps, reconstruct.
// Idempotent on inputs already satisfying the floor.
Mat project_spd(const Mat& m, double eps);

// A metric family the learner can optimize: parameters round-trip through a
// flat vector (unpack(pack(theta)) == theta exactly). Families are immutable;
// with_params builds a new instance.
class PackableField : public MetricField {
 public:
  virtual std::string family() const = 0;
  virtual Vec pack_params() const = 0;
  virtual std::unique_ptr<PackableField> with_params(const Vec& theta) const = 0;
  // Families that store a raw SPD matrix project it back onto the cone after
  // each optimizer step; log-space/Cholesky parametrizations are unconstrained.
  virtual Vec project_params(const Vec& theta, double /*spd_floor*/) const { return theta; }
};

// G = A^T A + eps I, independent of the evaluation point. Factor packing is
// unconstrained in A; Direct packing stores G itself and relies on the
// learner's SPD projection.
class ConstantMetric final : public PackableField {
 public:
  enum class Packing { Factor, Direct };

  explicit ConstantMetric(const Mat& a, double eps = 0.0, Packing packing = Packing::Factor);
  static ConstantMetric identity(int d);
  // Builds the factor A = (G - eps I)^{1/2} so metric_at reproduces G.
  static ConstantMetric from_matrix(const Mat& g, double eps = 0.0,
                                    Packing packing = Packing::Direct);

  int dim() const override { return static_cast<int>(g_.rows()); }
  Mat metric_at(const Vec& x) const override;
  bool has_analytic_derivative() const override { return true; }
  std::vector<Mat> derivative_at(const Vec& x) const override;
  bool is_constant() const override { return true; }

  std::string family() const override { return "constant"; }
  Vec pack_params() const override;
  std::unique_ptr<PackableField> with_params(const Vec& theta) const override;
  Vec project_params(const Vec& theta, double spd_floor) const override;

  const Mat& matrix() const { return g_; }
  const Mat& factor() const { return a_; }
  double floor_eps() const { return eps_; }
  Packing packing() const { return packing_; }

 private:
  Mat a_;  // empty in Direct packing
  Mat g_;
  double eps_;
  Packing packing_;
};

// Nearest-center lookup; ties go to the lowest center index.
class VoronoiMetric final : public MetricField {
 public:
  VoronoiMetric(std::vector<Vec> centers, std::vector<Mat> locals);

  int dim() const override { return d_; }
  Mat metric_at(const Vec& x) const override;
  // Piecewise constant: zero derivative away from cell boundaries.
  bool has_analytic_derivative() const override { return true; }
  std::vector<Mat> derivative_at(const Vec& x) const override;
  bool is_constant() const override { return centers_.size() == 1; }

  int nearest_center(const Vec& x) const;
  const std::vector<Vec>& centers() const { return centers_; }
  const std::vector<Mat>& locals() const { return locals_; }

 private:
  std::vector<Vec> centers_;
  std::vector<Mat> locals_;
  int d_;
};

// g_x = sum_i g_i exp(-|x-c_i|^2 / sigma^2) + eps I (unnormalized weights;
// partition-of-unity normalization available behind a flag, default off).
class KernelMetric final : public PackableField {
 public:
  KernelMetric(std::vector<Vec> centers, std::vector<Mat> locals, double sigma, double eps,
               bool normalize = false);

  int dim() const override { return d_; }
  Mat metric_at(const Vec& x) const override;
  bool has_analytic_derivative() const override { return !normalize_; }
  std::vector<Mat> derivative_at(const Vec& x) const override;

  std::string family() const override { return "kernel"; }
  // Cholesky factor (lower triangle, column-major) of every local matrix,
  // then log sigma. eps stays a fixed hyperparameter.
  Vec pack_params() const override;
  std::unique_ptr<PackableField> with_params(const Vec& theta) const override;

  double sigma() const { return sigma_; }
  double floor_eps() const { return eps_; }
  bool normalized() const { return normalize_; }
  const std::vector<Vec>& centers() const { return centers_; }
  const std::vector<Mat>& locals() const { return locals_; }

 private:
  std::vector<Vec> centers_;
  std::vector<Mat> locals_;
  double sigma_;
  double eps_;
  bool normalize_;
  int d_;
};

// g_x = (diag(h(x)) + eps I)^{-1} with
// h_j(x) = sum_i (a_i^j - x^j)^2 exp(-|x - a_i|^2 / (2 sigma^2)).
// Far from every anchor the metric approaches eps^{-1} I.
class DensityMetric final : public PackableField {
 public:
  // sigma <= 0 selects the default: median pairwise anchor distance.
  DensityMetric(std::vector<Vec> anchors, double sigma = 0.0, double eps = 1e-2);
  static double default_sigma(const std::vector<Vec>& anchors);

  int dim() const override { return d_; }
  Mat metric_at(const Vec& x) const override;
  bool has_analytic_derivative() const override { return true; }
  std::vector<Mat> derivative_at(const Vec& x) const override;

  std::string family() const override { return "density"; }
  Vec pack_params() const override;  // [log sigma, log eps]
  std::unique_ptr<PackableField> with_params(const Vec& theta) const override;

  Vec displacement_profile(const Vec& x) const;  // h(x)
  double sigma() const { return sigma_; }
  double floor_eps() const { return eps_; }
  const std::vector<Vec>& anchors() const { return anchors_; }

 private:
  std::vector<Vec> anchors_;
  double sigma_;
  double eps_;
  int d_;
};

using ChartMap = std::function<Vec(const Vec&)>;
using JacobianFn = std::function<Mat(const Vec&)>;

// g_x = J^T g_{f(x)} J. Valid while f is locally injective: the Jacobian must
// have full column rank (smallest singular value > 1e-10 * largest).
class PullbackMetric final : public MetricField {
 public:
  PullbackMetric(int dim, ChartMap f, std::shared_ptr<const MetricField> target,
                 JacobianFn jacobian = nullptr);

  int dim() const override { return d_; }
  Mat metric_at(const Vec& x) const override;

  Mat jacobian_at(const Vec& x) const;  // analytic when supplied, else central differences
  Vec map(const Vec& x) const { return f_(x); }

 private:
  int d_;
  ChartMap f_;
  std::shared_ptr<const MetricField> target_;
  JacobianFn jacobian_;
};

// d_f(x, y) = |f(x) - f(y)|: symmetric, zero iff the images coincide;
// underestimates the geodesic distance of the image manifold.
double map_induced_distance(const ChartMap& f, const Vec& x, const Vec& y);

// Pointwise inverse of a base field, used by the inverse-negatives
// contrastive variant. Derivatives fall back to finite differences.
class InvertedField final : public MetricField {
 public:
  explicit InvertedField(std::shared_ptr<const MetricField> base) : base_(std::move(base)) {}

  int dim() const override { return base_->dim(); }
  Mat metric_at(const Vec& x) const override { return spd_inverse(base_->metric_at(x)); }
  bool is_constant() const override { return base_->is_constant(); }

 private:
  std::shared_ptr<const MetricField> base_;
};

}  // namespace geomet
