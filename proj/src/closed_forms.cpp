#include "geomet/closed_forms.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace geomet {

namespace {

Eigen::SelfAdjointEigenSolver<Mat> spd_eigs(const Mat& m, const char* what) {
  Mat s = symmetrized(m);
  if ((m - s).norm() > 1e-10 * (1.0 + s.norm()))
    throw DomainError(std::string(what) + ": input is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  if (es.info() != Eigen::Success) throw DomainError(std::string(what) + ": eigensolver failed");
  if (es.eigenvalues()(0) <= 0.0)
    throw DomainError(std::string(what) + ": input is not positive definite");
  return es;
}

Mat apply_spectral(const Eigen::SelfAdjointEigenSolver<Mat>& es, double (*fn)(double)) {
  Vec w = es.eigenvalues();
  for (int i = 0; i < w.size(); ++i) w(i) = fn(std::max(w(i), 1e-300));
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

// ---------------------------------------------------------------------------
// SpdChart

SpdChart::SpdChart(int n) : n_(n) {
  if (n < 1) throw ArgumentError("matrix side must be >= 1");
  for (int i = 0; i < n; ++i) {
    Mat e = Mat::Zero(n, n);
    e(i, i) = 1.0;
    basis_.push_back(e);
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = e(j, i) = r;
      basis_.push_back(e);
    }
  }
}

Vec SpdChart::to_chart(const Mat& s) const {
  if (s.rows() != n_ || s.cols() != n_) throw ShapeMismatchError("matrix side mismatch");
  Vec v(dim());
  for (int a = 0; a < dim(); ++a) v(a) = (s.cwiseProduct(basis_[a])).sum();
  return v;
}

Mat SpdChart::from_chart(const Vec& v) const {
  if (v.size() != dim()) throw ShapeMismatchError("chart dimension mismatch");
  Mat m = Mat::Zero(n_, n_);
  for (int a = 0; a < dim(); ++a) m += v(a) * basis_[a];
  return m;
}

// ---------------------------------------------------------------------------
// SpdAffineField

Mat SpdAffineField::metric_at(const Vec& x) const {
  Mat m = chart_.from_chart(x);
  auto es = spd_eigs(m, "spd affine metric");
  Mat mi = apply_spectral(es, [](double w) { return 1.0 / w; });
  const int d = dim();
  std::vector<Mat> c(d);
  for (int a = 0; a < d; ++a) c[a] = mi * chart_.basis(a);
  Mat g(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) g(a, b) = g(b, a) = (c[a].cwiseProduct(c[b].transpose())).sum();
  return g;
}

std::vector<Mat> SpdAffineField::derivative_at(const Vec& x) const {
  Mat m = chart_.from_chart(x);
  auto es = spd_eigs(m, "spd affine metric");
  Mat mi = apply_spectral(es, [](double w) { return 1.0 / w; });
  const int d = dim();
  std::vector<Mat> c(d);
  for (int a = 0; a < d; ++a) c[a] = mi * chart_.basis(a);
  // d/dx_c tr(M^{-1}E_a M^{-1}E_b) = -tr(C_c C_a C_b) - tr(C_a C_c C_b)
  std::vector<Mat> dg(d, Mat(d, d));
  for (int cc = 0; cc < d; ++cc) {
    for (int a = 0; a < d; ++a) {
      Mat ca = c[cc] * c[a] + c[a] * c[cc];
      for (int b = a; b < d; ++b) {
        double v = -(ca.cwiseProduct(c[b].transpose())).sum();
        dg[cc](a, b) = dg[cc](b, a) = v;
      }
    }
  }
  return dg;
}

// ---------------------------------------------------------------------------
// Closed-form SPD operations

Mat spd_sqrt(const Mat& m) { return apply_spectral(spd_eigs(m, "spd sqrt"), std::sqrt); }
Mat spd_log(const Mat& m) { return apply_spectral(spd_eigs(m, "spd log"), std::log); }

Mat sym_exp(const Mat& s) {
  Mat sym = symmetrized(s);
  if ((s - sym).norm() > 1e-10 * (1.0 + sym.norm()))
    throw DomainError("sym exp: input is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  Vec w = es.eigenvalues().array().exp();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

double spd_affine_distance(const Mat& m1, const Mat& m2) {
  Mat s = apply_spectral(spd_eigs(m1, "spd affine distance"),
                         [](double w) { return 1.0 / std::sqrt(w); });
  return spd_log(symmetrized(s * m2 * s)).norm();
}

Mat spd_affine_exp(const Mat& sigma, const Mat& v, double t) {
  auto es = spd_eigs(sigma, "spd affine exp");
  Mat s = apply_spectral(es, std::sqrt);
  Mat si = apply_spectral(es, [](double w) { return 1.0 / std::sqrt(w); });
  return symmetrized(s * sym_exp(t * symmetrized(si * v * si)) * s);
}

Mat spd_affine_log(const Mat& sigma, const Mat& m2) {
  auto es = spd_eigs(sigma, "spd affine log");
  Mat s = apply_spectral(es, std::sqrt);
  Mat si = apply_spectral(es, [](double w) { return 1.0 / std::sqrt(w); });
  return symmetrized(s * spd_log(symmetrized(si * m2 * si)) * s);
}

Mat spd_affine_transport(const Mat& sigma, const Mat& v, const Mat& w, double t) {
  auto es = spd_eigs(sigma, "spd affine transport");
  Mat si = apply_spectral(es, [](double x) { return 1.0 / x; });
  // E = exp(t/2 V Sigma^{-1}) is NOT symmetric; general matrix exponential.
  Mat e = (0.5 * t * v * si).exp();
  return symmetrized(e * w * e.transpose());
}

double log_euclidean_distance(const Mat& m1, const Mat& m2) {
  return (spd_log(m1) - spd_log(m2)).norm();
}

// ---------------------------------------------------------------------------
// Hyperbolic half-plane

Mat HyperbolicHalfPlaneField::metric_at(const Vec& x) const {
  if (x.size() != 2) throw ShapeMismatchError("half-plane points are 2-d");
  double y = x(1);
  if (y <= 0.0) throw DomainError("half-plane requires y > 0");
  return Mat::Identity(2, 2) / (y * y);
}

std::vector<Mat> HyperbolicHalfPlaneField::derivative_at(const Vec& x) const {
  double y = x(1);
  if (y <= 0.0) throw DomainError("half-plane requires y > 0");
  std::vector<Mat> dg(2, Mat::Zero(2, 2));
  dg[1] = -2.0 / (y * y * y) * Mat::Identity(2, 2);
  return dg;
}

double hyperbolic_exact_distance(const Vec& p, const Vec& q) {
  if (p.size() != 2 || q.size() != 2) throw ShapeMismatchError("half-plane points are 2-d");
  if (p(1) <= 0.0 || q(1) <= 0.0) throw DomainError("half-plane requires y > 0");
  double s = (p - q).squaredNorm();
  return std::acosh(1.0 + s / (2.0 * p(1) * q(1)));
}

// ---------------------------------------------------------------------------
// Grid oracle

namespace {

double half_plane_seg_len(const Vec& a, const Vec& b) {
  double ym = 0.5 * (a(1) + b(1));
  return (b - a).norm() / ym;
}

double polyline_len(const std::vector<Vec>& pts) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += half_plane_seg_len(pts[i], pts[i + 1]);
  return total;
}

std::vector<Vec> resample_polyline(const std::vector<Vec>& pts, int m) {
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  std::vector<Vec> out(m + 1);
  std::size_t j = 0;
  for (int k = 0; k <= m; ++k) {
    double sv = cum.back() * k / m;
    while (j + 2 < pts.size() && cum[j + 1] < sv) ++j;
    double seg = cum[j + 1] - cum[j];
    double t = (sv - cum[j]) / std::max(seg, 1e-300);
    out[k] = pts[j] + t * (pts[j + 1] - pts[j]);
  }
  return out;
}

// Coordinate descent over interior nodes: axis-aligned pattern search with a
// shrinking scale, minimizing the two adjacent midpoint-metric segment lengths.
void refine_polyline(std::vector<Vec>& pts, int sweeps) {
  const Vec dirs[4] = {Vec{{1.0, 0.0}}, Vec{{-1.0, 0.0}}, Vec{{0.0, 1.0}}, Vec{{0.0, -1.0}}};
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const Vec& a = pts[i - 1];
      const Vec& c = pts[i + 1];
      Vec b = pts[i];
      double base = half_plane_seg_len(a, b) + half_plane_seg_len(b, c);
      double scale = 0.25 * std::min((c - a).norm(), 1.0);
      while (scale > 1e-12) {
        bool improved = false;
        for (const Vec& dd : dirs) {
          Vec cand = b + scale * dd;
          if (cand(1) <= 1e-6) continue;
          double val = half_plane_seg_len(a, cand) + half_plane_seg_len(cand, c);
          if (val < base - 1e-16) {
            b = cand;
            base = val;
            improved = true;
          }
        }
        if (!improved) scale *= 0.5;
      }
      pts[i] = b;
    }
  }
}

}  // namespace

double hyperbolic_oracle_distance(const Vec& p, const Vec& q) {
  if (p.size() != 2 || q.size() != 2) throw ShapeMismatchError("half-plane points are 2-d");
  if (p(1) <= 0.0 || q(1) <= 0.0) throw DomainError("half-plane requires y > 0");
  if (p == q) return 0.0;

  // Box generously covering the geodesic arc: it bulges upward, never dipping
  // below the endpoints by more than their own height scale.
  const double w = std::abs(p(0) - q(0)), h = std::abs(p(1) - q(1));
  const double span = std::max(w, h), xpad = 0.3 * span + 0.05;
  const double x0 = std::min(p(0), q(0)) - xpad, x1 = std::max(p(0), q(0)) + xpad;
  const double y0 = std::max(1e-9, 0.25 * std::min(p(1), q(1)));
  const double y1 = std::max(p(1), q(1)) + 0.75 * w + 0.3 * h + 0.05;

  const int nx = 400, ny = 400;
  auto xs = [&](int i) { return x0 + (x1 - x0) * i / (nx - 1); };
  auto ys = [&](int j) { return y0 + (y1 - y0) * j / (ny - 1); };
  auto node_pt = [&](int u) { return Vec{{xs(u / ny), ys(u % ny)}}; };
  auto snap = [&](const Vec& pt) {
    int i = static_cast<int>(std::lround((pt(0) - x0) / (x1 - x0) * (nx - 1)));
    int j = static_cast<int>(std::lround((pt(1) - y0) / (y1 - y0) * (ny - 1)));
    return std::clamp(i, 0, nx - 1) * ny + std::clamp(j, 0, ny - 1);
  };
  const int offs[16][2] = {{1, 0},  {0, 1},  {-1, 0}, {0, -1}, {1, 1},  {1, -1}, {-1, 1}, {-1, -1},
                           {2, 1},  {2, -1}, {-2, 1}, {-2, -1}, {1, 2}, {1, -2}, {-1, 2}, {-1, -2}};

  const int start = snap(p), goal = snap(q);
  std::vector<double> dist(nx * ny, std::numeric_limits<double>::infinity());
  std::vector<int> prev(nx * ny, -1);
  std::vector<char> done(nx * ny, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[start] = 0.0;
  pq.emplace(0.0, start);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == goal) break;
    int ui = u / ny, uj = u % ny;
    Vec a = node_pt(u);
    for (auto& off : offs) {
      int vi = ui + off[0], vj = uj + off[1];
      if (vi < 0 || vi >= nx || vj < 0 || vj >= ny) continue;
      int vn = vi * ny + vj;
      if (done[vn]) continue;
      double nd = d + half_plane_seg_len(a, node_pt(vn));
      if (nd < dist[vn]) {
        dist[vn] = nd;
        prev[vn] = u;
        pq.emplace(nd, vn);
      }
    }
  }

  std::vector<Vec> pts;
  for (int u = goal; u != -1; u = (u == start ? -1 : prev[u])) pts.push_back(node_pt(u));
  std::reverse(pts.begin(), pts.end());
  if (pts.size() < 2) pts = {p, q};  // endpoints snapped to one node
  pts.front() = p;                   // un-snap
  pts.back() = q;

  pts = resample_polyline(pts, 64);
  for (int round = 0; round < 4; ++round) {
    refine_polyline(pts, 25);
    if (round < 3) {
      pts = resample_polyline(pts, 64);
      pts.front() = p;
      pts.back() = q;
    }
  }
  return polyline_len(pts);
}

}  // namespace geomet
