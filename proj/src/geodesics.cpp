#include "geomet/geodesics.hpp"

#include "geomet/descent.hpp"
#include "geomet/rng.hpp"

#include <algorithm>
#include <cmath>

namespace geomet {

namespace {

void check_state(const Vec& x, const Vec& v) {
  if (!x.allFinite() || !v.allFinite() || x.cwiseAbs().maxCoeff() > 1e12 ||
      v.cwiseAbs().maxCoeff() > 1e12)
    throw BlowUpError("geodesic state exceeded 1e12 (incomplete metric or too-large step)");
}

Vec geodesic_acceleration(const MetricField& field, const Vec& x, const Vec& v) {
  ChristoffelTensor gamma = christoffel(field, x);
  const int d = static_cast<int>(x.size());
  Vec acc(d);
  for (int k = 0; k < d; ++k) acc(k) = -v.dot(gamma.gamma[k] * v);
  return acc;
}

GeodesicPath integrate_rk4(const MetricField& field, const Vec& x0, const Vec& v0, int steps) {
  GeodesicPath path;
  path.times.reserve(steps + 1);
  path.points.reserve(steps + 1);
  path.velocities.reserve(steps + 1);
  const double h = 1.0 / steps;
  Vec x = x0, v = v0;
  path.times.push_back(0.0);
  path.points.push_back(x);
  path.velocities.push_back(v);
  for (int s = 0; s < steps; ++s) {
    Vec k1x = v, k1v = geodesic_acceleration(field, x, v);
    Vec k2x = v + 0.5 * h * k1v, k2v = geodesic_acceleration(field, x + 0.5 * h * k1x, k2x);
    Vec k3x = v + 0.5 * h * k2v, k3v = geodesic_acceleration(field, x + 0.5 * h * k2x, k3x);
    Vec k4x = v + h * k3v, k4v = geodesic_acceleration(field, x + h * k3x, k4x);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    check_state(x, v);
    path.times.push_back(s == steps - 1 ? 1.0 : (s + 1) * h);
    path.points.push_back(x);
    path.velocities.push_back(v);
  }
  return path;
}

// dH/dx_i = -v^T (d_i g) v / 2 with v = g^{-1} p.
Vec hamiltonian_position_grad(const MetricField& field, const Vec& x, const Vec& p) {
  Mat gi = metric_inverse(field, x);
  Vec v = gi * p;
  std::vector<Mat> dg = metric_derivatives(field, x);
  const int d = static_cast<int>(x.size());
  Vec out(d);
  for (int i = 0; i < d; ++i) out(i) = -0.5 * v.dot(dg[i] * v);
  return out;
}

// One implicit Stormer-Verlet step of the non-separable geodesic Hamiltonian,
// fixed-point iterations for the implicit half-kick and drift.
void leapfrog_step(const MetricField& field, Vec& x, Vec& p, double h) {
  constexpr double fp_tol = 1e-15;
  constexpr int fp_max = 80;
  Vec ph = p;
  for (int i = 0; i < fp_max; ++i) {
    Vec ph_new = p - 0.5 * h * hamiltonian_position_grad(field, x, ph);
    bool done = (ph_new - ph).cwiseAbs().maxCoeff() < fp_tol;
    ph = ph_new;
    if (done) break;
  }
  Vec vx = metric_inverse(field, x) * ph;
  Vec x1 = x + h * vx;
  for (int i = 0; i < fp_max; ++i) {
    Vec x1_new = x + 0.5 * h * (vx + metric_inverse(field, x1) * ph);
    bool done = (x1_new - x1).cwiseAbs().maxCoeff() < fp_tol;
    x1 = x1_new;
    if (done) break;
  }
  p = ph - 0.5 * h * hamiltonian_position_grad(field, x1, ph);
  x = x1;
}

GeodesicPath integrate_leapfrog(const MetricField& field, const Vec& x0, const Vec& v0,
                                int steps) {
  GeodesicPath path;
  const double h = 1.0 / steps;
  // Triple-jump composition cancels the second-order error of a single step.
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double w0 = -std::cbrt(2.0) * w1;
  Vec x = x0;
  Vec p = field.metric_at(x0) * v0;
  path.times.push_back(0.0);
  path.points.push_back(x);
  path.velocities.push_back(v0);
  for (int s = 0; s < steps; ++s) {
    leapfrog_step(field, x, p, w1 * h);
    leapfrog_step(field, x, p, w0 * h);
    leapfrog_step(field, x, p, w1 * h);
    check_state(x, p);
    path.times.push_back(s == steps - 1 ? 1.0 : (s + 1) * h);
    path.points.push_back(x);
    path.velocities.push_back(metric_inverse(field, x) * p);
  }
  return path;
}

int locate_segment(const GeodesicPath& path, double t) {
  int lo = 0, hi = path.n_nodes() - 2;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (path.times[mid] <= t)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace

Vec path_point(const GeodesicPath& path, double t) {
  if (path.n_nodes() < 2) throw ArgumentError("path needs at least two nodes");
  int i = locate_segment(path, t);
  double h = path.times[i + 1] - path.times[i];
  double s = (t - path.times[i]) / h;
  Vec m0 = path.velocities[i] * h, m1 = path.velocities[i + 1] * h;
  double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * path.points[i] + (s3 - 2 * s2 + s) * m0 +
         (-2 * s3 + 3 * s2) * path.points[i + 1] + (s3 - s2) * m1;
}

Vec path_velocity(const GeodesicPath& path, double t) {
  if (path.n_nodes() < 2) throw ArgumentError("path needs at least two nodes");
  int i = locate_segment(path, t);
  double h = path.times[i + 1] - path.times[i];
  double s = (t - path.times[i]) / h;
  Vec m0 = path.velocities[i] * h, m1 = path.velocities[i + 1] * h;
  double s2 = s * s;
  return ((6 * s2 - 6 * s) * path.points[i] + (3 * s2 - 4 * s + 1) * m0 +
          (-6 * s2 + 6 * s) * path.points[i + 1] + (3 * s2 - 2 * s) * m1) /
         h;
}

double path_length(const MetricField& field, const GeodesicPath& path) {
  const int n = path.n_nodes();
  if (n < 2) throw ArgumentError("path needs at least two nodes");
  double total = 0.0, prev = 0.0;
  for (int i = 0; i < n; ++i) {
    Mat g = field.metric_at(path.points[i]);
    double s = std::sqrt(std::max(0.0, path.velocities[i].dot(g * path.velocities[i])));
    if (i > 0) total += 0.5 * (path.times[i] - path.times[i - 1]) * (prev + s);
    prev = s;
  }
  return total;
}

double path_energy(const MetricField& field, const GeodesicPath& path) {
  const int n = path.n_nodes();
  if (n < 2) throw ArgumentError("path needs at least two nodes");
  double total = 0.0, prev = 0.0;
  for (int i = 0; i < n; ++i) {
    Mat g = field.metric_at(path.points[i]);
    double s = path.velocities[i].dot(g * path.velocities[i]);
    if (i > 0) total += 0.5 * (path.times[i] - path.times[i - 1]) * (prev + s);
    prev = s;
  }
  return total;
}

GeodesicPath exp_map(const MetricField& field, const Vec& x, const Vec& v,
                     const SolverConfig& cfg) {
  if (!x.allFinite() || !v.allFinite()) throw ArgumentError("exp map needs finite inputs");
  if (x.size() != field.dim() || v.size() != field.dim())
    throw ShapeMismatchError("point dimension mismatch");
  if (cfg.steps < 1) throw ArgumentError("steps must be >= 1");
  return cfg.integrator == Integrator::ChristoffelRk4
             ? integrate_rk4(field, x, v, cfg.steps)
             : integrate_leapfrog(field, x, v, cfg.steps);
}

TangentVector log_map_shooting(const MetricField& field, const Vec& x, const Vec& y,
                               const SolverConfig& cfg) {
  auto objective = [&](const Vec& v) {
    try {
      GeodesicPath path = exp_map(field, x, v, cfg);
      const Vec& e = path.points.back();
      return (e - y).squaredNorm();
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  DescentOptions opt;
  opt.max_iter = cfg.max_iter;
  opt.f_tol = cfg.tol * cfg.tol;
  opt.step0 = cfg.step_size;
  opt.radius = 1.0 + (y - x).norm();  // displacement trust cap
  opt.precond = true;
  opt.grow = 1.8;

  Vec v0 = y - x;
  Vec best = v0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 5; ++attempt) {
    Vec init = v0;
    if (attempt > 0) {
      Rng rng(1234 + attempt);  // deterministic multimodality restarts
      for (int i = 0; i < init.size(); ++i)
        init(i) += 0.1 * (1.0 + v0.norm()) * rng.normal();
    }
    DescentResult res = minimize(objective, init, opt);
    if (res.value < best_val) {
      best = res.x;
      best_val = res.value;
    }
    if (best_val <= opt.f_tol) return TangentVector{x, best};
  }
  throw NoConvergenceError("shooting log map did not reach tolerance", TangentVector{x, best},
                           std::sqrt(std::max(best_val, 0.0)));
}

namespace {

// Discrete energy of one segment under the midpoint (or left-endpoint) metric,
// with analytic gradients in both endpoints.
void segment_energy_grad(const MetricField& field, bool left_endpoint, const Vec& a, const Vec& b,
                         double& e, Vec& ga, Vec& gb) {
  Vec delta = b - a;
  Vec at = left_endpoint ? a : (0.5 * (a + b)).eval();
  Mat g = field.metric_at(at);
  std::vector<Mat> dg = metric_derivatives(field, at);
  const int d = static_cast<int>(a.size());
  e = delta.dot(g * delta);
  Vec gd = g * delta;
  Vec quad(d);
  for (int i = 0; i < d; ++i) quad(i) = delta.dot(dg[i] * delta);
  double chain = left_endpoint ? 1.0 : 0.5;  // d(eval point)/d(endpoint)
  ga = -2.0 * gd + chain * quad;
  gb = 2.0 * gd + (left_endpoint ? 0.0 : chain) * quad;
}

struct BvpState {
  std::vector<Vec> nodes;
  double energy = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
};

BvpState solve_bvp(const MetricField& field, const Vec& x, const Vec& y,
                   const SolverConfig& cfg) {
  const int n = cfg.bvp_nodes;
  if (n < 2) throw ArgumentError("bvp needs at least two segments");
  const int d = static_cast<int>(x.size());

  std::vector<Vec> nodes(n + 1);
  for (int k = 0; k <= n; ++k) {
    double t = static_cast<double>(k) / n;
    nodes[k] = (1.0 - t) * x + t * y;
  }

  auto energy_and_grad = [&](const std::vector<Vec>& p, std::vector<Vec>& grad) {
    double total = 0.0;
    for (auto& g : grad) g.setZero();
    double e;
    Vec ga(d), gb(d);
    for (int k = 0; k < n; ++k) {
      segment_energy_grad(field, cfg.bvp_left_endpoint, p[k], p[k + 1], e, ga, gb);
      total += e;
      grad[k] += ga;
      grad[k + 1] += gb;
    }
    grad[0].setZero();
    grad[n].setZero();
    for (auto& g : grad) g *= n;
    return total * n;
  };

  auto dot = [&](const std::vector<Vec>& u, const std::vector<Vec>& v) {
    double s = 0.0;
    for (int k = 0; k <= n; ++k) s += u[k].dot(v[k]);
    return s;
  };

  std::vector<Vec> grad(n + 1, Vec::Zero(d)), grad_new(n + 1, Vec::Zero(d));
  std::vector<Vec> dir(n + 1), cand(n + 1);
  double energy = energy_and_grad(nodes, grad);
  for (int k = 0; k <= n; ++k) dir[k] = -grad[k];
  double gn = std::sqrt(dot(grad, grad));
  double step = 1.0 / std::max(1.0, gn);

  int ls_fails = 0;
  bool converged = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    gn = std::sqrt(dot(grad, grad));
    if (gn <= cfg.tol) {
      converged = true;
      break;
    }
    double gtd = dot(grad, dir);
    if (gtd >= 0.0) {  // not a descent direction: steepest restart
      for (int k = 0; k <= n; ++k) dir[k] = -grad[k];
      gtd = -gn * gn;
    }
    bool accepted = false;
    double s = step;
    for (int ls = 0; ls < 50; ++ls) {
      for (int k = 0; k <= n; ++k) cand[k] = nodes[k] + s * dir[k];
      double en = energy_and_grad(cand, grad_new);
      if (en < energy + 1e-4 * s * gtd) {
        double denom = std::max(dot(grad, grad), 1e-300);
        double num = 0.0;
        for (int k = 0; k <= n; ++k) num += grad_new[k].dot(grad_new[k] - grad[k]);
        double beta = std::max(0.0, num / denom);  // Polak-Ribiere+
        for (int k = 0; k <= n; ++k) dir[k] = -grad_new[k] + beta * dir[k];
        nodes.swap(cand);
        grad.swap(grad_new);
        energy = en;
        step = s * 1.6;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      for (int k = 0; k <= n; ++k) dir[k] = -grad[k];
      step = 1.0 / std::max(1.0, std::sqrt(dot(grad, grad)));
      if (++ls_fails > 3) break;
    }
  }

  BvpState out;
  out.nodes = std::move(nodes);
  out.energy = energy;
  out.grad_norm = std::sqrt(dot(grad, grad));
  out.converged = converged || out.grad_norm <= cfg.tol;
  return out;
}

double midpoint_polyline_length(const MetricField& field, const std::vector<Vec>& nodes) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    Vec delta = nodes[k + 1] - nodes[k];
    Mat g = field.metric_at(0.5 * (nodes[k] + nodes[k + 1]));
    total += std::sqrt(std::max(0.0, delta.dot(g * delta)));
  }
  return total;
}

struct CurveFit {
  Mat eta;  // basis_size x d coefficients
  double energy = 0.0;
  double length = 0.0;
  bool converged = false;
};

CurveFit fit_regression_curve(const MetricField& field, const Vec& x, const Vec& y,
                              int basis_size, const SolverConfig& cfg) {
  if (basis_size < 1) throw ArgumentError("basis size must be >= 1");
  const int d = static_cast<int>(x.size());
  const int quad = std::max(64, 2 * cfg.bvp_nodes);
  const double width = basis_size > 1 ? 1.0 / (basis_size - 1) : 1.0;

  Vec centers(basis_size);
  for (int b = 0; b < basis_size; ++b)
    centers(b) = basis_size > 1 ? static_cast<double>(b) / (basis_size - 1) : 0.5;

  // Gaussian bumps and their time derivatives at midpoint-quadrature times.
  Mat phi(quad, basis_size), dphi(quad, basis_size);
  Vec tq(quad), wq(quad), dwq(quad);
  for (int j = 0; j < quad; ++j) {
    double t = (j + 0.5) / quad;
    tq(j) = t;
    wq(j) = t * (1.0 - t);
    dwq(j) = 1.0 - 2.0 * t;
    for (int b = 0; b < basis_size; ++b) {
      double u = t - centers(b);
      phi(j, b) = std::exp(-u * u / (2.0 * width * width));
      dphi(j, b) = phi(j, b) * (-u / (width * width));
    }
  }

  auto energy_and_grad = [&](const Mat& eta, Mat& grad) {
    Mat bump = phi * eta;    // quad x d
    Mat dbump = dphi * eta;  // quad x d
    double total = 0.0;
    grad.setZero();
    for (int j = 0; j < quad; ++j) {
      Vec gam = (1.0 - tq(j)) * x + tq(j) * y + wq(j) * bump.row(j).transpose();
      Vec vel = (y - x) + dwq(j) * bump.row(j).transpose() + wq(j) * dbump.row(j).transpose();
      Mat g = field.metric_at(gam);
      std::vector<Mat> dg = metric_derivatives(field, gam);
      total += vel.dot(g * vel);
      Vec gv = 2.0 * (g * vel);
      Vec quadv(d);
      for (int i = 0; i < d; ++i) quadv(i) = vel.dot(dg[i] * vel);
      grad += (wq(j) * phi.row(j).transpose()) * quadv.transpose() +
              ((dwq(j) * phi.row(j) + wq(j) * dphi.row(j)).transpose()) * gv.transpose();
    }
    grad /= quad;
    return total / quad;
  };

  Mat eta = Mat::Zero(basis_size, d), grad(basis_size, d), grad_new(basis_size, d);
  Mat cand(basis_size, d);
  double energy = energy_and_grad(eta, grad);
  double step = cfg.step_size;
  bool converged = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    double gn = grad.norm();
    if (gn <= cfg.tol) {
      converged = true;
      break;
    }
    bool accepted = false;
    double s = step;
    for (int ls = 0; ls < 50; ++ls) {
      cand = eta - s * grad;
      double en = energy_and_grad(cand, grad_new);
      if (en < energy - 1e-4 * s * gn * gn) {
        eta = cand;
        grad = grad_new;
        energy = en;
        step = s * 1.6;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
  }

  CurveFit out;
  out.eta = eta;
  out.energy = energy;
  out.converged = converged || grad.norm() <= cfg.tol;
  // Length by the same midpoint quadrature.
  Mat bump = phi * eta, dbump = dphi * eta;
  double len = 0.0;
  for (int j = 0; j < quad; ++j) {
    Vec gam = (1.0 - tq(j)) * x + tq(j) * y + wq(j) * bump.row(j).transpose();
    Vec vel = (y - x) + dwq(j) * bump.row(j).transpose() + wq(j) * dbump.row(j).transpose();
    Mat g = field.metric_at(gam);
    len += std::sqrt(std::max(0.0, vel.dot(g * vel)));
  }
  out.length = len / quad;
  return out;
}

}  // namespace

GeodesicPath geodesic_bvp(const MetricField& field, const Vec& x, const Vec& y,
                          const SolverConfig& cfg) {
  if (!x.allFinite() || !y.allFinite()) throw ArgumentError("bvp needs finite endpoints");
  if (x.size() != field.dim() || y.size() != field.dim())
    throw ShapeMismatchError("point dimension mismatch");
  BvpState state = solve_bvp(field, x, y, cfg);
  const int n = cfg.bvp_nodes;
  GeodesicPath path;
  path.converged = state.converged;
  path.times.resize(n + 1);
  path.points = std::move(state.nodes);
  path.velocities.resize(n + 1);
  for (int k = 0; k <= n; ++k) path.times[k] = static_cast<double>(k) / n;
  // Centered secant velocities; one-sided at the pinned endpoints.
  for (int k = 0; k <= n; ++k) {
    int lo = std::max(0, k - 1), hi = std::min(n, k + 1);
    path.velocities[k] = (path.points[hi] - path.points[lo]) / (path.times[hi] - path.times[lo]);
  }
  return path;
}

GeodesicPath geodesic_regression_curve(const MetricField& field, const Vec& x, const Vec& y,
                                       int basis_size, const SolverConfig& cfg) {
  if (!x.allFinite() || !y.allFinite()) throw ArgumentError("curve fit needs finite endpoints");
  if (x.size() != field.dim() || y.size() != field.dim())
    throw ShapeMismatchError("point dimension mismatch");
  CurveFit fit = fit_regression_curve(field, x, y, basis_size, cfg);
  const double width = basis_size > 1 ? 1.0 / (basis_size - 1) : 1.0;
  const int n = cfg.bvp_nodes;
  GeodesicPath path;
  path.converged = fit.converged;
  for (int k = 0; k <= n; ++k) {
    double t = static_cast<double>(k) / n;
    Vec bump = Vec::Zero(x.size()), dbump = Vec::Zero(x.size());
    for (int b = 0; b < basis_size; ++b) {
      double c = basis_size > 1 ? static_cast<double>(b) / (basis_size - 1) : 0.5;
      double u = t - c;
      double ph = std::exp(-u * u / (2.0 * width * width));
      bump += ph * fit.eta.row(b).transpose();
      dbump += ph * (-u / (width * width)) * fit.eta.row(b).transpose();
    }
    double w = t * (1.0 - t);
    path.times.push_back(t);
    path.points.push_back((1.0 - t) * x + t * y + w * bump);
    path.velocities.push_back((y - x) + (1.0 - 2.0 * t) * bump + w * dbump);
  }
  return path;
}

double riemannian_distance(const MetricField& field, const Vec& x, const Vec& y,
                           DistanceMethod method, const SolverConfig& cfg) {
  switch (method) {
    case DistanceMethod::Shooting: {
      TangentVector v = log_map_shooting(field, x, y, cfg);
      Mat g = field.metric_at(x);
      return std::sqrt(std::max(0.0, v.dir.dot(g * v.dir)));
    }
    case DistanceMethod::Bvp: {
      BvpState state = solve_bvp(field, x, y, cfg);
      return midpoint_polyline_length(field, state.nodes);
    }
    case DistanceMethod::Curve:
      return fit_regression_curve(field, x, y, 8, cfg).length;
  }
  throw ArgumentError("unknown distance method");
}

double volume_density(const MetricField& field, const Vec& x) {
  double det = field.metric_at(x).determinant();
  if (!std::isfinite(det) || det <= 0.0)
    throw DomainError("metric determinant must be positive and finite");
  return std::sqrt(det);
}

}  // namespace geomet
