#pragma once

#include "geomet/metric_field.hpp"

namespace geomet {

enum class Integrator { ChristoffelRk4, HamiltonianLeapfrog };

struct SolverConfig {
  Integrator integrator = Integrator::ChristoffelRk4;
  int steps = 200;      // integration steps per unit time
  int bvp_nodes = 64;   // segments for discrete boundary-value curves
  int max_iter = 2000;  // inner-optimization iteration budget
  double tol = 1e-8;    // inner-optimization tolerance
  double step_size = 1.0;  // inner-optimization initial step
  bool bvp_left_endpoint = false;  // left-endpoint stencil instead of midpoint
  int graph_k = 8;  // neighbors per node for graph-based distance backends
};

// Cubic-Hermite evaluation of a stored path (position, velocity) at t in [0,1].
Vec path_point(const GeodesicPath& path, double t);
Vec path_velocity(const GeodesicPath& path, double t);

// Composite trapezoid of sqrt(g(v,v)) resp. g(v,v) over the stored nodes.
// Length is reparametrization-invariant up to discretization; energy is not,
// and length <= sqrt(energy) with equality exactly on constant-speed curves.
double path_length(const MetricField& field, const GeodesicPath& path);
double path_energy(const MetricField& field, const GeodesicPath& path);

// Integrates the geodesic with initial state (x, v) over t in [0,1].
// christoffel-rk4: second-order ODE via the Christoffel form.
// hamiltonian-leapfrog: implicit Stormer-Verlet on H = p^T g^{-1} p / 2,
// composed per step into a fourth-order triple jump so the Hamiltonian is
// conserved tightly over unit time.
GeodesicPath exp_map(const MetricField& field, const Vec& x, const Vec& v,
                     const SolverConfig& cfg = {});

// Shooting solver for argmin_v |Exp_x(v) - y|^2 via preconditioned descent
// with a displacement trust cap; restarts from 4 perturbed initializations
// before giving up. Throws NoConvergenceError carrying the best iterate.
TangentVector log_map_shooting(const MetricField& field, const Vec& x, const Vec& y,
                               const SolverConfig& cfg = {});

// Discrete-energy minimization over interior nodes (nonlinear conjugate
// gradient with Armijo backtracking); endpoints pinned. Never throws on
// stall: the best path is returned with converged=false.
GeodesicPath geodesic_bvp(const MetricField& field, const Vec& x, const Vec& y,
                          const SolverConfig& cfg = {});

// Curve family (1-t)x + ty + t(1-t)phi(t) with phi a per-coordinate Gaussian
// radial basis expansion; coefficients minimize the quadrature path energy.
// Endpoints interpolate exactly by construction.
GeodesicPath geodesic_regression_curve(const MetricField& field, const Vec& x, const Vec& y,
                                       int basis_size, const SolverConfig& cfg = {});

enum class DistanceMethod { Shooting, Bvp, Curve };

double riemannian_distance(const MetricField& field, const Vec& x, const Vec& y,
                           DistanceMethod method, const SolverConfig& cfg = {});

// sqrt(det g_x), the uniform-measure density on the chart.
double volume_density(const MetricField& field, const Vec& x);

}  // namespace geomet
