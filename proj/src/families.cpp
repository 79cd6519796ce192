#include "geomet/families.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace geomet {

Mat project_spd(const Mat& m, double eps) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m));
  Vec w = es.eigenvalues().cwiseMax(eps);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

Mat spd_sqrt_clamped(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m));
  Vec w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

Vec flatten(const Mat& m) {
  Vec out(m.size());
  int k = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(k++) = m(i, j);
  return out;
}

Mat unflatten(const Vec& v, int rows, int cols) {
  if (v.size() != rows * cols) throw ShapeMismatchError("packed vector has wrong length");
  Mat out(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = v(k++);
  return out;
}

std::vector<Mat> zero_derivatives(int d) { return std::vector<Mat>(d, Mat::Zero(d, d)); }

}  // namespace

// ---------------------------------------------------------------------------
// ConstantMetric

ConstantMetric::ConstantMetric(const Mat& a, double eps, Packing packing)
    : a_(a), eps_(eps), packing_(packing) {
  if (a.rows() != a.cols()) throw ShapeMismatchError("factor A must be square");
  if (eps < 0.0) throw ArgumentError("eps must be >= 0");
  g_ = symmetrized(a.transpose() * a) + eps * Mat::Identity(a.rows(), a.cols());
}

ConstantMetric ConstantMetric::identity(int d) { return ConstantMetric(Mat::Identity(d, d)); }

ConstantMetric ConstantMetric::from_matrix(const Mat& g, double eps, Packing packing) {
  if (g.rows() != g.cols()) throw ShapeMismatchError("metric matrix must be square");
  ConstantMetric out(spd_sqrt_clamped(symmetrized(g) - eps * Mat::Identity(g.rows(), g.cols())),
                     eps, packing);
  if (packing == Packing::Direct) out.g_ = symmetrized(g);  // keep the raw entries
  return out;
}

Mat ConstantMetric::metric_at(const Vec& x) const {
  if (x.size() != g_.rows()) throw ShapeMismatchError("point dimension mismatch");
  return g_;
}

std::vector<Mat> ConstantMetric::derivative_at(const Vec&) const { return zero_derivatives(dim()); }

Vec ConstantMetric::pack_params() const {
  return packing_ == Packing::Factor ? flatten(a_) : flatten(g_);
}

std::unique_ptr<PackableField> ConstantMetric::with_params(const Vec& theta) const {
  const int d = dim();
  if (packing_ == Packing::Factor) {
    return std::make_unique<ConstantMetric>(unflatten(theta, d, d), eps_, packing_);
  }
  auto out =
      std::make_unique<ConstantMetric>(from_matrix(unflatten(theta, d, d), eps_, packing_));
  return out;
}

Vec ConstantMetric::project_params(const Vec& theta, double spd_floor) const {
  if (packing_ == Packing::Factor) return theta;
  const int d = dim();
  return flatten(project_spd(unflatten(theta, d, d), std::max(spd_floor, eps_)));
}

// ---------------------------------------------------------------------------
// VoronoiMetric

VoronoiMetric::VoronoiMetric(std::vector<Vec> centers, std::vector<Mat> locals)
    : centers_(std::move(centers)), locals_(std::move(locals)) {
  if (centers_.empty()) throw ArgumentError("voronoi metric needs at least one center");
  if (centers_.size() != locals_.size())
    throw ShapeMismatchError("centers and local matrices must pair up");
  d_ = static_cast<int>(centers_[0].size());
  for (const Mat& g : locals_) {
    if (g.rows() != d_ || g.cols() != d_) throw ShapeMismatchError("local matrix size mismatch");
  }
}

int VoronoiMetric::nearest_center(const Vec& x) const {
  int best = 0;
  double best_d2 = (x - centers_[0]).squaredNorm();
  for (int i = 1; i < static_cast<int>(centers_.size()); ++i) {
    double d2 = (x - centers_[i]).squaredNorm();
    if (d2 < best_d2) {  // strict: ties keep the lowest index
      best = i;
      best_d2 = d2;
    }
  }
  return best;
}

Mat VoronoiMetric::metric_at(const Vec& x) const {
  if (x.size() != d_) throw ShapeMismatchError("point dimension mismatch");
  return symmetrized(locals_[nearest_center(x)]);
}

std::vector<Mat> VoronoiMetric::derivative_at(const Vec&) const { return zero_derivatives(d_); }

// ---------------------------------------------------------------------------
// KernelMetric

KernelMetric::KernelMetric(std::vector<Vec> centers, std::vector<Mat> locals, double sigma,
                           double eps, bool normalize)
    : centers_(std::move(centers)),
      locals_(std::move(locals)),
      sigma_(sigma),
      eps_(eps),
      normalize_(normalize) {
  if (centers_.empty()) throw ArgumentError("kernel metric needs at least one center");
  if (centers_.size() != locals_.size())
    throw ShapeMismatchError("centers and local matrices must pair up");
  if (sigma_ <= 0.0) throw ArgumentError("bandwidth sigma must be positive");
  if (eps_ < 0.0) throw ArgumentError("eps must be >= 0");
  d_ = static_cast<int>(centers_[0].size());
  for (Mat& g : locals_) {
    if (g.rows() != d_ || g.cols() != d_) throw ShapeMismatchError("local matrix size mismatch");
    g = symmetrized(g);
  }
}

Mat KernelMetric::metric_at(const Vec& x) const {
  if (x.size() != d_) throw ShapeMismatchError("point dimension mismatch");
  Mat g = Mat::Zero(d_, d_);
  double wsum = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    double w = std::exp(-(x - centers_[i]).squaredNorm() / (sigma_ * sigma_));
    g += w * locals_[i];
    wsum += w;
  }
  if (normalize_ && wsum > 0.0) g /= wsum;
  g += eps_ * Mat::Identity(d_, d_);
  return symmetrized(g);
}

std::vector<Mat> KernelMetric::derivative_at(const Vec& x) const {
  if (normalize_) throw ArgumentError("normalized kernel metric has no analytic derivative");
  std::vector<Mat> dg(d_, Mat::Zero(d_, d_));
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    double w = std::exp(-(x - centers_[i]).squaredNorm() / (sigma_ * sigma_));
    Vec grad_w = (-2.0 / (sigma_ * sigma_)) * w * (x - centers_[i]);
    for (int a = 0; a < d_; ++a) dg[a] += grad_w(a) * locals_[i];
  }
  return dg;
}

Vec KernelMetric::pack_params() const {
  const int tri = d_ * (d_ + 1) / 2;
  Vec theta(static_cast<int>(locals_.size()) * tri + 1);
  int k = 0;
  for (const Mat& g : locals_) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
      throw ArgumentError("kernel local matrix is not SPD; cannot pack Cholesky factor");
    Mat l = llt.matrixL();
    for (int j = 0; j < d_; ++j)
      for (int i = j; i < d_; ++i) theta(k++) = l(i, j);
  }
  theta(k) = std::log(sigma_);
  return theta;
}

std::unique_ptr<PackableField> KernelMetric::with_params(const Vec& theta) const {
  const int tri = d_ * (d_ + 1) / 2;
  const int expected = static_cast<int>(locals_.size()) * tri + 1;
  if (theta.size() != expected) throw ShapeMismatchError("packed vector has wrong length");
  std::vector<Mat> locals(locals_.size());
  int k = 0;
  for (std::size_t c = 0; c < locals_.size(); ++c) {
    Mat l = Mat::Zero(d_, d_);
    for (int j = 0; j < d_; ++j)
      for (int i = j; i < d_; ++i) l(i, j) = theta(k++);
    locals[c] = l * l.transpose();
  }
  double sigma = std::exp(theta(k));
  return std::make_unique<KernelMetric>(centers_, std::move(locals), sigma, eps_, normalize_);
}

// ---------------------------------------------------------------------------
// DensityMetric

DensityMetric::DensityMetric(std::vector<Vec> anchors, double sigma, double eps)
    : anchors_(std::move(anchors)), sigma_(sigma), eps_(eps) {
  if (anchors_.empty()) throw ArgumentError("density metric needs at least one anchor");
  if (eps_ <= 0.0) throw ArgumentError("eps must be > 0 (invertibility far from data)");
  d_ = static_cast<int>(anchors_[0].size());
  if (sigma_ <= 0.0) sigma_ = default_sigma(anchors_);
  if (sigma_ <= 0.0) throw ArgumentError("bandwidth sigma must be positive");
}

double DensityMetric::default_sigma(const std::vector<Vec>& anchors) {
  std::vector<double> dists;
  dists.reserve(anchors.size() * (anchors.size() - 1) / 2);
  for (std::size_t i = 0; i < anchors.size(); ++i)
    for (std::size_t j = i + 1; j < anchors.size(); ++j)
      dists.push_back((anchors[i] - anchors[j]).norm());
  if (dists.empty()) return 1.0;
  std::sort(dists.begin(), dists.end());
  std::size_t m = dists.size();
  return m % 2 ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
}

Vec DensityMetric::displacement_profile(const Vec& x) const {
  Vec h = Vec::Zero(d_);
  for (const Vec& a : anchors_) {
    Vec u = a - x;
    double w = std::exp(-u.squaredNorm() / (2.0 * sigma_ * sigma_));
    h += u.cwiseProduct(u) * w;
  }
  return h;
}

Mat DensityMetric::metric_at(const Vec& x) const {
  if (x.size() != d_) throw ShapeMismatchError("point dimension mismatch");
  Vec h = displacement_profile(x);
  return (h.array() + eps_).inverse().matrix().asDiagonal();
}

std::vector<Mat> DensityMetric::derivative_at(const Vec& x) const {
  Vec h = displacement_profile(x);
  // dh[a](j) = d h_j / d x_a
  Mat dh = Mat::Zero(d_, d_);
  for (const Vec& a : anchors_) {
    Vec u = a - x;
    double w = std::exp(-u.squaredNorm() / (2.0 * sigma_ * sigma_));
    for (int ax = 0; ax < d_; ++ax) {
      for (int j = 0; j < d_; ++j) {
        double t = u(j) * u(j) * u(ax) / (sigma_ * sigma_);
        if (j == ax) t -= 2.0 * u(j);
        dh(ax, j) += w * t;
      }
    }
  }
  std::vector<Mat> dg(d_, Mat::Zero(d_, d_));
  for (int ax = 0; ax < d_; ++ax) {
    for (int j = 0; j < d_; ++j) {
      double denom = h(j) + eps_;
      dg[ax](j, j) = -dh(ax, j) / (denom * denom);
    }
  }
  return dg;
}

Vec DensityMetric::pack_params() const {
  Vec theta(2);
  theta << std::log(sigma_), std::log(eps_);
  return theta;
}

std::unique_ptr<PackableField> DensityMetric::with_params(const Vec& theta) const {
  if (theta.size() != 2) throw ShapeMismatchError("packed vector has wrong length");
  return std::make_unique<DensityMetric>(anchors_, std::exp(theta(0)), std::exp(theta(1)));
}

// ---------------------------------------------------------------------------
// PullbackMetric

PullbackMetric::PullbackMetric(int dim, ChartMap f, std::shared_ptr<const MetricField> target,
                               JacobianFn jacobian)
    : d_(dim), f_(std::move(f)), target_(std::move(target)), jacobian_(std::move(jacobian)) {
  if (d_ < 1) throw ArgumentError("dimension must be >= 1");
  if (!f_) throw ArgumentError("pullback needs a map");
  if (!target_) throw ArgumentError("pullback needs a target field");
}

Mat PullbackMetric::jacobian_at(const Vec& x) const {
  if (jacobian_) return jacobian_(x);
  double h = fd_step_for(x);
  Mat j(target_->dim(), d_);
  Vec xp = x, xm = x;
  for (int i = 0; i < d_; ++i) {
    xp(i) += h;
    xm(i) -= h;
    j.col(i) = (f_(xp) - f_(xm)) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return j;
}

Mat PullbackMetric::metric_at(const Vec& x) const {
  if (x.size() != d_) throw ShapeMismatchError("point dimension mismatch");
  Mat j = jacobian_at(x);
  Eigen::JacobiSVD<Mat> svd(j);
  const Vec& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0)) {
    throw RankDeficiencyError("pullback jacobian is rank deficient (map not locally injective)");
  }
  return symmetrized(j.transpose() * target_->metric_at(f_(x)) * j);
}

double map_induced_distance(const ChartMap& f, const Vec& x, const Vec& y) {
  return (f(x) - f(y)).norm();
}

}  // namespace geomet
