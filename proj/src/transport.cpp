#include "geomet/transport.hpp"

#include <cmath>
#include <vector>

namespace geomet {
namespace {

constexpr double kBlowUpLimit = 1e12;

void check_vector(const Vec& v, const char* what) {
  if (!v.allFinite() || v.norm() > kBlowUpLimit) {
    throw BlowUpError(std::string(what) + " blew up during transport integration");
  }
}

Vec transport_rate(const MetricField& field, const Vec& x, const Vec& xdot, const Vec& v) {
  const ChristoffelTensor conn = christoffel(field, x);
  const int d = static_cast<int>(x.size());
  Vec out(d);
  for (int k = 0; k < d; ++k) out(k) = -xdot.dot(conn.gamma[static_cast<size_t>(k)] * v);
  return out;
}

Vec geodesic_rate(const MetricField& field, const Vec& x, const Vec& v) {
  return transport_rate(field, x, v, v);
}

// One RK4 step of size h for the geodesic equation; shared by the fanning
// scheme, which needs single-step flows rather than whole paths.
void rk4_flow_step(const MetricField& field, Vec& x, Vec& v, double h) {
  const Vec k1x = v;
  const Vec k1v = geodesic_rate(field, x, v);
  const Vec k2x = v + 0.5 * h * k1v;
  const Vec k2v = geodesic_rate(field, x + 0.5 * h * k1x, k2x);
  const Vec k3x = v + 0.5 * h * k2v;
  const Vec k3v = geodesic_rate(field, x + 0.5 * h * k2x, k3x);
  const Vec k4x = v + h * k3v;
  const Vec k4v = geodesic_rate(field, x + h * k3x, k4x);
  x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

void check_curve(const MetricField& field, const GeodesicPath& curve, const Vec& v0) {
  if (curve.n_nodes() < 2) throw ArgumentError("transport needs a curve with at least two nodes");
  if (curve.points[0].size() != field.dim() || v0.size() != field.dim()) {
    throw ShapeMismatchError("transport: vector/curve dimension does not match the field");
  }
}

struct LadderSolvers {
  const MetricField& field;
  SolverConfig exp_cfg;
  SolverConfig log_cfg;

  explicit LadderSolvers(const MetricField& f) : field(f) {
    exp_cfg.steps = 24;
    log_cfg.steps = 24;
    log_cfg.tol = 1e-11;
    log_cfg.max_iter = 200;
  }

  Vec exponential(const Vec& a, const Vec& v) const {
    return exp_map(field, a, v, exp_cfg).points.back();
  }
  Vec logarithm(const Vec& a, const Vec& b) const {
    return log_map_shooting(field, a, b, log_cfg).dir;
  }
};

}  // namespace

TangentVector parallel_transport_ode(const MetricField& field, const GeodesicPath& curve,
                                     const Vec& v0) {
  check_curve(field, curve, v0);
  Vec w = v0;
  const size_t segs = curve.n_nodes() - 1;
  for (size_t i = 0; i < segs; ++i) {
    const double h = curve.times[i + 1] - curve.times[i];
    const Vec& p0 = curve.points[i];
    const Vec& p1 = curve.points[i + 1];
    const Vec m0 = curve.velocities[i] * h;
    const Vec m1 = curve.velocities[i + 1] * h;
    // Cubic Hermite state of the curve at the segment midpoint.
    const double s = 0.5;
    const Vec xm = (2 * s * s * s - 3 * s * s + 1) * p0 + (s * s * s - 2 * s * s + s) * m0 +
                   (-2 * s * s * s + 3 * s * s) * p1 + (s * s * s - s * s) * m1;
    const Vec vm = ((6 * s * s - 6 * s) * p0 + (3 * s * s - 4 * s + 1) * m0 +
                    (-6 * s * s + 6 * s) * p1 + (3 * s * s - 2 * s) * m1) /
                   h;

    const Vec k1 = transport_rate(field, p0, curve.velocities[i], w);
    const Vec k2 = transport_rate(field, xm, vm, w + 0.5 * h * k1);
    const Vec k3 = transport_rate(field, xm, vm, w + 0.5 * h * k2);
    const Vec k4 = transport_rate(field, p1, curve.velocities[i + 1], w + h * k3);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_vector(w, "transported vector");
  }
  return TangentVector{curve.points.back(), w};
}

TangentVector schild_ladder(const MetricField& field, const GeodesicPath& curve, const Vec& v0,
                            int rungs) {
  check_curve(field, curve, v0);
  if (rungs < 1) throw ArgumentError("schild_ladder: rungs must be positive");
  const LadderSolvers solve(field);
  const size_t n = curve.n_nodes() - 1;
  const double delta = 1.0 / rungs;
  Vec w = v0;
  size_t prev = 0;
  for (int k = 1; k <= rungs; ++k) {
    const size_t idx = static_cast<size_t>(std::lround(static_cast<double>(k) * static_cast<double>(n) / rungs));
    const Vec& a = curve.points[prev];
    const Vec& b = curve.points[idx];
    // Scale the rung so the construction stays in the small-triangle regime.
    const double s = delta / std::max(1.0, w.norm());
    const Vec p = solve.exponential(a, s * w);
    const Vec m = solve.exponential(p, 0.5 * solve.logarithm(p, b));
    const Vec z = solve.exponential(a, 2.0 * solve.logarithm(a, m));
    w = solve.logarithm(b, z) / s;
    check_vector(w, "schild ladder vector");
    prev = idx;
  }
  return TangentVector{curve.points.back(), w};
}

TangentVector pole_ladder(const MetricField& field, const GeodesicPath& curve, const Vec& v0,
                          int rungs) {
  check_curve(field, curve, v0);
  if (rungs < 1) throw ArgumentError("pole_ladder: rungs must be positive");
  const LadderSolvers solve(field);
  const size_t n = curve.n_nodes() - 1;
  const double delta = 1.0 / rungs;
  Vec w = v0;
  size_t prev = 0;
  for (int k = 1; k <= rungs; ++k) {
    const size_t idx = static_cast<size_t>(std::lround(static_cast<double>(k) * static_cast<double>(n) / rungs));
    const Vec& a = curve.points[prev];
    const Vec& b = curve.points[idx];
    const double s = delta / std::max(1.0, w.norm());
    const Vec mid = solve.exponential(a, 0.5 * solve.logarithm(a, b));
    const Vec p = solve.exponential(a, s * w);
    const Vec z = solve.exponential(mid, -solve.logarithm(mid, p));
    w = -solve.logarithm(b, z) / s;
    check_vector(w, "pole ladder vector");
    prev = idx;
  }
  return TangentVector{curve.points.back(), w};
}

TangentVector fanning_scheme(const MetricField& field, const Vec& x, const Vec& v_geo,
                             const Vec& w0, int steps, double eps) {
  if (x.size() != field.dim() || v_geo.size() != field.dim() || w0.size() != field.dim()) {
    throw ShapeMismatchError("fanning_scheme: vector dimension does not match the field");
  }
  if (steps < 1) throw ArgumentError("fanning_scheme: steps must be positive");
  if (!(eps > 0.0)) throw ArgumentError("fanning_scheme: eps must be positive");

  const double norm0 = std::sqrt(std::max(0.0, w0.dot(field.metric_at(x) * w0)));
  Vec xc = x;
  Vec vc = v_geo;
  Vec w = w0;
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    // Perturbed geodesic endpoint over one step; the unperturbed endpoint is
    // the advanced base state itself.
    Vec xa = xc;
    Vec va = vc + eps * w;
    rk4_flow_step(field, xa, va, h);
    rk4_flow_step(field, xc, vc, h);
    w = (xa - xc) / (eps * h);
    check_vector(xc, "fanning base point");
    check_vector(w, "fanning vector");
    // First-order estimate drifts in scale; pin the g-norm to its initial value.
    const double nw = std::sqrt(std::max(0.0, w.dot(field.metric_at(xc) * w)));
    if (nw > 0.0 && norm0 > 0.0) {
      w *= norm0 / nw;
    } else if (norm0 == 0.0) {
      w.setZero();
    }
  }
  return TangentVector{xc, w};
}

Vec exp_parallelize(const MetricField& field, const GeodesicPath& curve, double t0, const Vec& w,
                    double t, const SolverConfig& cfg) {
  check_curve(field, curve, w);
  if (t0 < 0.0 || t0 > 1.0 || t < 0.0 || t > 1.0) {
    throw ArgumentError("exp_parallelize: times must lie in [0, 1]");
  }
  if (t == t0) {
    return exp_map(field, path_point(curve, t0), w, cfg).points.back();
  }

  // Sub-curve between the two times reusing the curve's own nodes, with time
  // renormalized to [0, 1]; velocities pick up the chain-rule factor, which
  // also flips orientation when t < t0.
  const double span = t - t0;
  auto state_at = [&](double tau, Vec& p, Vec& v) {
    for (size_t i = 0; i < curve.times.size(); ++i) {
      if (curve.times[i] == tau) {
        p = curve.points[i];
        v = curve.velocities[i];
        return;
      }
    }
    p = path_point(curve, tau);
    v = path_velocity(curve, tau);
  };

  GeodesicPath sub;
  sub.converged = curve.converged;
  Vec p, v;
  state_at(t0, p, v);
  sub.times.push_back(0.0);
  sub.points.push_back(p);
  sub.velocities.push_back(v * span);
  const double lo = std::min(t0, t);
  const double hi = std::max(t0, t);
  if (span > 0.0) {
    for (size_t i = 0; i < curve.times.size(); ++i) {
      if (curve.times[i] > lo && curve.times[i] < hi) {
        sub.times.push_back((curve.times[i] - t0) / span);
        sub.points.push_back(curve.points[i]);
        sub.velocities.push_back(curve.velocities[i] * span);
      }
    }
  } else {
    for (size_t i = curve.times.size(); i-- > 0;) {
      if (curve.times[i] > lo && curve.times[i] < hi) {
        sub.times.push_back((curve.times[i] - t0) / span);
        sub.points.push_back(curve.points[i]);
        sub.velocities.push_back(curve.velocities[i] * span);
      }
    }
  }
  state_at(t, p, v);
  sub.times.push_back(1.0);
  sub.points.push_back(p);
  sub.velocities.push_back(v * span);

  const Vec transported = parallel_transport_ode(field, sub, w).dir;
  return exp_map(field, sub.points.back(), transported, cfg).points.back();
}

}  // namespace geomet
