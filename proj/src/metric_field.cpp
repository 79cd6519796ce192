#include "geomet/metric_field.hpp"

#include <cmath>

namespace geomet {

std::vector<Mat> MetricField::derivative_at(const Vec&) const {
  throw ArgumentError("field does not supply analytic derivatives");
}

double fd_step_for(const Vec& x) {
  double m = x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0;
  return 1e-5 * (1.0 + m);
}

Mat symmetrized(const Mat& a) { return 0.5 * (a + a.transpose()); }

Mat spd_inverse(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(g));
  if (es.info() != Eigen::Success) throw SingularMatrixError("eigen factorization failed");
  const Vec& w = es.eigenvalues();
  double wmax = w.maxCoeff();
  if (!std::isfinite(wmax) || w.minCoeff() <= 1e-12 * wmax) {
    throw SingularMatrixError("matrix is not positive definite within tolerance");
  }
  return es.eigenvectors() * w.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

Mat metric_inverse(const MetricField& field, const Vec& x) {
  return spd_inverse(field.metric_at(x));
}

std::vector<Mat> metric_derivatives(const MetricField& field, const Vec& x, double h) {
  if (field.has_analytic_derivative()) {
    auto dg = field.derivative_at(x);
    for (Mat& m : dg) m = symmetrized(m);
    return dg;
  }
  if (h <= 0.0) h = fd_step_for(x);
  const int d = field.dim();
  std::vector<Mat> dg(d);
  Vec xp = x, xm = x;
  for (int i = 0; i < d; ++i) {
    xp(i) += h;
    xm(i) -= h;
    dg[i] = symmetrized((field.metric_at(xp) - field.metric_at(xm)) / (2.0 * h));
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return dg;
}

ChristoffelTensor christoffel(const MetricField& field, const Vec& x) {
  const int d = field.dim();
  Mat gi = metric_inverse(field, x);
  auto dg = metric_derivatives(field, x);

  // T[l](i,j) = d_i g_jl - d_l g_ij + d_j g_li, filled for i<=j and mirrored,
  // so Gamma^k_ij = Gamma^k_ji holds bit-identically.
  std::vector<Mat> T(d, Mat::Zero(d, d));
  for (int l = 0; l < d; ++l) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        double v = dg[i](j, l) - dg[l](i, j) + dg[j](l, i);
        T[l](i, j) = v;
        T[l](j, i) = v;
      }
    }
  }
  ChristoffelTensor out;
  out.gamma.assign(d, Mat::Zero(d, d));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      out.gamma[k] += 0.5 * gi(l, k) * T[l];
    }
  }
  return out;
}

}  // namespace geomet
