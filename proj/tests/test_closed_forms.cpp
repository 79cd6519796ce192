#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geomet/closed_forms.hpp"
#include "geomet/rng.hpp"

using namespace geomet;

namespace {

Mat random_spd(Rng& rng, int n, double spread) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return symmetrized(a * a.transpose()) + spread * Mat::Identity(n, n);
}

Mat random_sym(Rng& rng, int n) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return symmetrized(a);
}

}  // namespace

TEST_CASE("spd chart is an isometric vectorization") {
  for (int n : {2, 3}) {
    const SpdChart chart(n);
    CHECK(chart.dim() == n * (n + 1) / 2);
    Rng rng(17);
    for (int trial = 0; trial < 8; ++trial) {
      const Mat a = random_sym(rng, n);
      const Mat b = random_sym(rng, n);
      // Round trip to machine precision.
      CHECK((chart.from_chart(chart.to_chart(a)) - a).norm() < 1e-14 * (1.0 + a.norm()));
      // Frobenius inner products carry over exactly up to rounding.
      const double direct = (a.array() * b.array()).sum();
      const double chart_ip = chart.to_chart(a).dot(chart.to_chart(b));
      CHECK(chart_ip == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("spd affine metric values") {
  const SpdAffineField field(2);
  const SpdChart& chart = field.chart();
  // g_M(V, V) = tr((M^{-1} V)^2): at M = diag(4,1), V = diag(1,0) this is 1/16.
  const Vec m = chart.to_chart(Mat{{4.0, 0.0}, {0.0, 1.0}});
  const Vec v = chart.to_chart(Mat{{1.0, 0.0}, {0.0, 0.0}});
  CHECK(v.dot(field.metric_at(m) * v) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));

  // Approaching the cone boundary the metric diverges like delta^{-2}.
  for (double delta : {1e-2, 1e-3}) {
    const Vec mb = chart.to_chart(Mat{{delta, 0.0}, {0.0, 1.0}});
    CHECK(v.dot(field.metric_at(mb) * v) == doctest::Approx(1.0 / (delta * delta)).epsilon(1e-9));
  }

  // Derivatives match finite differences.
  Rng rng(23);
  const Mat base = random_spd(rng, 2, 0.5);
  const Vec x = chart.to_chart(base);
  const auto analytic = field.derivative_at(x);
  const double h = 1e-6;
  for (int a = 0; a < field.dim(); ++a) {
    Vec xp = x, xm = x;
    xp(a) += h;
    xm(a) -= h;
    const Mat fd = (field.metric_at(xp) - field.metric_at(xm)) / (2.0 * h);
    CHECK((analytic[static_cast<size_t>(a)] - fd).norm() < 1e-5);
  }
}

TEST_CASE("spd affine distance closed forms") {
  const Mat i2 = Mat::Identity(2, 2);
  CHECK(spd_affine_distance(i2, Mat{{4.0, 0.0}, {0.0, 1.0}}) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // Commuting pair: affine and log-Euclidean agree.
  const Mat d44{{4.0, 0.0}, {0.0, 4.0}};
  const double expected = std::sqrt(2.0) * std::log(4.0);
  CHECK(spd_affine_distance(i2, d44) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(log_euclidean_distance(i2, d44) == doctest::Approx(expected).epsilon(1e-12));

  const Mat de{{std::exp(1.0), 0.0}, {0.0, std::exp(1.0)}};
  CHECK(log_euclidean_distance(i2, de) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // Affine invariance under congruence by any invertible P.
  Rng rng(31);
  for (int n : {2, 3}) {
    const Mat m1 = random_spd(rng, n, 0.3);
    const Mat m2 = random_spd(rng, n, 0.3);
    Mat p(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) p(i, j) = rng.normal();
    }
    p += 3.0 * Mat::Identity(n, n);
    const double d0 = spd_affine_distance(m1, m2);
    const double d1 = spd_affine_distance(p.transpose() * m1 * p, p.transpose() * m2 * p);
    CHECK(d1 == doctest::Approx(d0).epsilon(1e-10));
    CHECK(spd_affine_distance(m1, m1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spd_affine_distance(m1, m2) == doctest::Approx(spd_affine_distance(m2, m1)).epsilon(1e-12));
  }
}

TEST_CASE("spd affine exp, log, and transport") {
  const Mat i2 = Mat::Identity(2, 2);
  const Mat v{{1.0, 0.0}, {0.0, -1.0}};
  const Mat end = spd_affine_exp(i2, v);
  CHECK(end(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(end(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(std::abs(end(0, 1)) < 1e-14);

  Rng rng(37);
  for (int n : {2, 3}) {
    const Mat sigma = random_spd(rng, n, 0.4);
    const Mat target = random_spd(rng, n, 0.4);
    // Log inverts exp and reproduces the distance as its length.
    const Mat logv = spd_affine_log(sigma, target);
    CHECK((spd_affine_exp(sigma, logv) - target).norm() < 1e-9 * (1.0 + target.norm()));

    // Transport is an isometry of the affine metric.
    const Mat w = random_sym(rng, n);
    const Mat moved = spd_affine_transport(sigma, logv, w);
    const Mat si = sigma.inverse();
    const Mat ti = target.inverse();
    const double before = (si * w * si * w).trace();
    const double after = (ti * moved * ti * moved).trace();
    CHECK(after == doctest::Approx(before).epsilon(1e-9));
    // t = 0 is the identity map.
    CHECK((spd_affine_transport(sigma, logv, w, 0.0) - w).norm() < 1e-12);
  }
}

TEST_CASE("spd guards reject invalid input") {
  const Mat indef{{1.0, 2.0}, {2.0, 1.0}};
  const Mat i2 = Mat::Identity(2, 2);
  CHECK_THROWS_AS((void)spd_affine_distance(indef, i2), DomainError);
  CHECK_THROWS_AS((void)spd_affine_distance(i2, indef), DomainError);
  const Mat asym{{1.0, 0.5}, {0.0, 1.0}};
  CHECK_THROWS_AS((void)spd_affine_distance(asym, i2), DomainError);
  CHECK_THROWS_AS((void)spd_affine_log(indef, i2), DomainError);
  CHECK_THROWS_AS((void)log_euclidean_distance(indef, i2), DomainError);
}

TEST_CASE("hyperbolic half plane: metric and exact distance") {
  const HyperbolicHalfPlaneField field;
  const Mat g = field.metric_at(Vec{{0.3, 2.0}});
  CHECK(g(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(g(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(g(0, 1) == 0.0);

  // d((-1,1),(1,1)) = arccosh(3).
  const Vec p{{-1.0, 1.0}};
  const Vec q{{1.0, 1.0}};
  CHECK(hyperbolic_exact_distance(p, q) == doctest::Approx(1.762747174039086).epsilon(1e-14));
  // Vertical segment: d((0,1),(0,e)) = 1.
  CHECK(hyperbolic_exact_distance(Vec{{0.0, 1.0}}, Vec{{0.0, std::exp(1.0)}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // The formula is exactly symmetric.
  CHECK(hyperbolic_exact_distance(p, q) == hyperbolic_exact_distance(q, p));
  CHECK(hyperbolic_exact_distance(p, p) == 0.0);

  CHECK_THROWS_AS((void)field.metric_at(Vec{{0.0, -0.1}}), DomainError);
  CHECK_THROWS_AS((void)hyperbolic_exact_distance(p, Vec{{0.0, 0.0}}), DomainError);
}

TEST_CASE("grid oracle reproduces exact hyperbolic distances") {
  // The grid + pattern-search pipeline plateaus near 1e-3 relative accuracy;
  // bounds below leave headroom over measured errors (8e-4, 8e-5, 1.9e-3).
  struct Case {
    Vec p, q;
    double tol;
  };
  const Case cases[] = {
      {Vec{{-1.0, 1.0}}, Vec{{1.0, 1.0}}, 2e-3},
      {Vec{{0.0, 1.0}}, Vec{{0.0, std::exp(1.0)}}, 1e-3},
      {Vec{{-0.5, 0.8}}, Vec{{0.7, 1.6}}, 5e-3},
  };
  for (const Case& c : cases) {
    const double exact = hyperbolic_exact_distance(c.p, c.q);
    const double oracle = hyperbolic_oracle_distance(c.p, c.q);
    CHECK(std::abs(oracle - exact) / exact < c.tol);
  }
  const Vec p{{0.4, 0.9}};
  CHECK(hyperbolic_oracle_distance(p, p) == 0.0);
}
