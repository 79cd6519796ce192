#include "geomet/descent.hpp"

#include <cmath>

namespace geomet {

DescentResult minimize(const ScalarFn& f, Vec x0, const DescentOptions& opt, const GradFn& grad) {
  DescentResult res;
  res.x = std::move(x0);
  res.value = f(res.x);

  const int n = static_cast<int>(res.x.size());
  Vec r2 = Vec::Zero(n);  // EMA of squared gradient
  double step = opt.step0;

  int it = 0;
  while (it < opt.max_iter && res.value > opt.f_tol) {
    ++it;

    Vec g(n);
    if (grad) {
      g = grad(res.x);
      if (!g.allFinite()) break;
    } else {
      double h = opt.fd_scale * (1.0 + res.x.cwiseAbs().maxCoeff());
      bool bad = false;
      Vec xp = res.x, xm = res.x;
      for (int i = 0; i < n; ++i) {
        xp(i) += h;
        xm(i) -= h;
        double fp = f(xp), fm = f(xm);
        xp(i) = res.x(i);
        xm(i) = res.x(i);
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
          bad = true;
          break;
        }
        g(i) = (fp - fm) / (2.0 * h);
      }
      if (bad || !g.allFinite()) break;
    }

    double gn = g.norm();
    if (gn <= opt.g_tol) {
      res.converged = true;
      break;
    }

    Vec d;
    if (opt.precond) {
      r2 = 0.9 * r2 + 0.1 * g.cwiseProduct(g);
      double corr = 1.0 - std::pow(0.9, it);
      d = g.cwiseQuotient(((r2 / corr).cwiseSqrt().array() + 1e-12).matrix());
    } else {
      d = g;
    }
    double gd = g.dot(d);
    if (gd <= 0.0) {
      d = g;
      gd = gn * gn;
    }

    bool accepted = false;
    for (int ls = 0; ls < opt.ls_max; ++ls) {
      double eff = std::min(step, opt.radius / (d.norm() + 1e-300));
      Vec xn = res.x - eff * d;
      double fn = f(xn);
      if (fn < res.value - opt.armijo * eff * gd) {
        res.x = std::move(xn);
        res.value = fn;
        step = eff * opt.grow;
        accepted = true;
        break;
      }
      step *= opt.shrink;
    }
    if (!accepted) break;
  }

  res.iterations = it;
  if (res.value <= opt.f_tol) res.converged = true;
  return res;
}

}  // namespace geomet
