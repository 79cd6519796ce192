#pragma once

#include "geomet/geodesics.hpp"

namespace geomet {

// Integrates dV^k/dt = -Gamma^k_ij(x) dx^i/dt V^j along the stored curve,
// one RK4 step per curve segment with cubic-Hermite interpolation of the
// curve state. Conserves g(V,V) to integrator accuracy. Returns the vector
// based at the curve endpoint.
TangentVector parallel_transport_ode(const MetricField& field, const GeodesicPath& curve,
                                     const Vec& v0);

// Ladder approximations built from local exponential/log solves along the
// curve; both converge to the ODE transport as rungs grow (first order).
// The pole variant is exact on symmetric spaces up to solver error.
TangentVector schild_ladder(const MetricField& field, const GeodesicPath& curve, const Vec& v0,
                            int rungs);
TangentVector pole_ladder(const MetricField& field, const GeodesicPath& curve, const Vec& v0,
                          int rungs);

// Transport along the geodesic Exp_x(t v_geo) using only exponential-map
// evaluations: per step h the estimate (Exp(h(v+eps W)) - Exp(h v))/(eps h),
// renormalized to conserve the g-norm of the initial vector.
TangentVector fanning_scheme(const MetricField& field, const Vec& x, const Vec& v_geo,
                             const Vec& w0, int steps, double eps = 1e-4);

// Exp_{gamma(t)}(T_{t0->t}(w)): parallel-transports w along the curve between
// the two times (reusing the curve's own nodes), then shoots one exponential.
// Exactly the composition of the two primitives it names.
Vec exp_parallelize(const MetricField& field, const GeodesicPath& curve, double t0, const Vec& w,
                    double t, const SolverConfig& cfg = {});

}  // namespace geomet
