#include "ddu/prox_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddu/errors.hpp"

namespace ddu {

namespace {

double eval_checked(const Objective &f, const Vec &x, Vec *g) {
  const double v = f(x, g);
  if (!std::isfinite(v)) throw NumericalBreakdown("objective is not finite");
  if (g && !g->allFinite())
    throw NumericalBreakdown("subgradient is not finite");
  return v;
}

ProxSolveReport fista(const Objective &f, double mu, const BoxDomain &box,
                      const Vec &x0, const ProxOptions &opt) {
  ProxSolveReport rep;
  rep.smooth_path = true;
  rep.gap = std::numeric_limits<double>::quiet_NaN();
  Vec x = project(x0, box), gx;
  double fx = eval_checked(f, x, &gx);
  Vec y = x, gy = gx;
  double fy = fx;
  double L = mu;
  double t = 1.0;
  rep.residual = L * (x - project(x - gx / L, box)).norm();
  if (rep.residual <= opt.tol) {
    rep.x = x;
    rep.value = fx;
    rep.converged = true;
    return rep;
  }
  Vec xn, gn;
  // Stop early once the residual has hit its floating-point floor.
  double best_res = rep.residual;
  int last_gain = 0;
  for (int k = 1; k <= opt.max_iter; ++k) {
    rep.iterations = k;
    double fn;
    for (;;) {
      xn = project(y - gy / L, box);
      const Vec d = xn - y;
      fn = eval_checked(f, xn, &gn);
      const double model = fy + gy.dot(d) + 0.5 * L * d.squaredNorm();
      if (fn <= model + 1e-14 * std::abs(fy) || d.squaredNorm() == 0.0) break;
      L *= 2.0;
      if (!std::isfinite(L))
        throw NumericalBreakdown("fista: Lipschitz estimate diverged");
    }
    const double res = L * (xn - project(xn - gn / L, box)).norm();
    if (fn > fx) {
      // A plain step from x itself failed: x is at the roundoff floor.
      if (t == 1.0 && y == x) break;
      // Momentum overshoot: restart from the last accepted point.
      t = 1.0;
      y = x;
      fy = fx;
      gy = gx;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Vec yn = project(xn + ((t - 1.0) / tn) * (xn - x), box);
    x = std::move(xn);
    fx = fn;
    gx = gn;
    t = tn;
    rep.residual = res;
    if (res <= opt.tol) {
      rep.converged = true;
      break;
    }
    if (res < (1.0 - 1e-3) * best_res) {
      best_res = res;
      last_gain = k;
    } else if (k - last_gain >= opt.stall_window) {
      break;
    }
    y = std::move(yn);
    fy = eval_checked(f, y, &gy);
    L = std::max(mu, 0.9 * L);
  }
  rep.x = x;
  rep.value = fx;
  return rep;
}

// Minimum over the box of (A + B^T y)/W + mu/2 |y|^2, separable per coordinate.
double minorant_min(double A, const Vec &B, double W, double mu,
                    const BoxDomain &box) {
  double v = A / W;
  for (Eigen::Index i = 0; i < B.size(); ++i) {
    const double b = B[i] / W;
    const double y = std::clamp(-b / mu, box.lower()[i], box.upper()[i]);
    v += b * y + 0.5 * mu * y * y;
  }
  return v;
}

ProxSolveReport subgradient_path(const Objective &f, double mu,
                                 const BoxDomain &box, const Vec &x0,
                                 const ProxOptions &opt) {
  ProxSolveReport rep;
  rep.smooth_path = false;
  Vec x = project(x0, box), g;
  Vec avg = x;
  double avg_w = 0.0;
  double A = 0.0;
  Vec B = Vec::Zero(x.size());
  double W = 0.0;
  Vec best = x;
  double best_f = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  const int every = std::max(1, opt.check_every);
  for (int k = 0; k < opt.max_iter; ++k) {
    rep.iterations = k + 1;
    const double fk = eval_checked(f, x, &g);
    if (fk < best_f) {
      best_f = fk;
      best = x;
    }
    const double w = k + 1.0;
    A += w * (fk - g.dot(x) + 0.5 * mu * x.squaredNorm());
    B.noalias() += w * (g - mu * x);
    W += w;
    avg_w += w;
    avg += (w / avg_w) * (x - avg);
    if ((k + 1) % every == 0 || k + 1 == opt.max_iter) {
      const double fa = eval_checked(f, avg, nullptr);
      if (fa < best_f) {
        best_f = fa;
        best = avg;
      }
      lower = std::max(lower, minorant_min(A, B, W, mu, box));
      const double gap = std::max(0.0, best_f - lower);
      rep.gap = gap;
      rep.residual = std::sqrt(2.0 * gap / mu);
      if (rep.residual <= opt.tol) {
        rep.converged = true;
        break;
      }
    }
    x = project(x - (2.0 / (mu * (k + 2.0))) * g, box);
  }
  rep.x = best;
  rep.value = best_f;
  return rep;
}

}  // namespace

ProxSolveReport minimize_strongly_convex(const Objective &f, double mu,
                                         const BoxDomain &box, const Vec &x0,
                                         bool smooth,
                                         const ProxOptions &options) {
  if (!(mu > 0.0))
    throw ContractViolation("minimize_strongly_convex: mu must be > 0");
  if (x0.size() != box.dim())
    throw ContractViolation("minimize_strongly_convex: start dimension mismatch");
  if (options.max_iter < 1)
    throw ContractViolation("minimize_strongly_convex: max_iter must be >= 1");
  return smooth ? fista(f, mu, box, x0, options)
                : subgradient_path(f, mu, box, x0, options);
}

ProxSolveReport solve_surrogate(const SurrogateModel &model,
                                const ProxOptions &options) {
  Objective f = [&model](const Vec &x, Vec *g) { return model.evaluate(x, g); };
  return minimize_strongly_convex(f, model.alpha(), model.domain(),
                                  model.center(), model.smooth(), options);
}

MoreauReport prox_point(const Objective &f, double tau, double lambda,
                        const Vec &x, const BoxDomain &box, bool smooth,
                        const ProxOptions &options,
                        const std::vector<Vec> &extra_starts) {
  if (!(lambda > 0.0) || !(tau >= 0.0) || !(lambda * tau < 1.0))
    throw ContractViolation("prox_point: need 0 < lambda < 1/tau");
  const double mu = 1.0 / lambda - tau;
  Objective g = [&](const Vec &y, Vec *grad) {
    const double v = f(y, grad);
    const Vec dy = y - x;
    if (grad) grad->noalias() += dy / lambda;
    return v + 0.5 * dy.squaredNorm() / lambda;
  };
  MoreauReport out;
  out.lambda = lambda;
  out.solve = minimize_strongly_convex(g, mu, box, x, smooth, options);
  for (const Vec &s : extra_starts) {
    ProxSolveReport r = minimize_strongly_convex(g, mu, box, s, smooth, options);
    if (r.value < out.solve.value) out.solve = std::move(r);
  }
  out.prox = out.solve.x;
  out.envelope = out.solve.value;
  out.dist = (x - out.prox).norm();
  out.grad_norm = out.dist / lambda;
  return out;
}

}  // namespace ddu
