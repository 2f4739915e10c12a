#ifndef DDU_PROX_SOLVER_HPP
#define DDU_PROX_SOLVER_HPP

#include <functional>
#include <vector>

#include "ddu/problem.hpp"
#include "ddu/surrogate.hpp"

namespace ddu {

/// Value and (when grad is non-null) a subgradient.
using Objective = std::function<double(const Vec &x, Vec *grad)>;

struct ProxOptions {
  /// Smooth path: gradient-mapping norm. Nonsmooth path: certified bound on
  /// the distance to the minimizer.
  double tol = 1e-8;
  int max_iter = 5000;
  /// How often the nonsmooth path evaluates its averaged iterate and gap.
  int check_every = 10;
  /// Smooth path: give up after this many iterations without a 0.1% gain in
  /// the residual (roundoff floor above tol).
  int stall_window = 200;
};

struct ProxSolveReport {
  Vec x;
  double value = 0.0;
  /// Smooth: mu |x - P(x - g/mu)|. Nonsmooth: sqrt(2 gap / mu).
  double residual = 0.0;
  /// Certified optimality gap (nonsmooth path only; NaN otherwise).
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  bool smooth_path = true;
};

/// Minimizes a mu-strongly convex objective over the box. The smooth path is
/// FISTA with backtracking and function-value restart; the nonsmooth path is
/// projected subgradient with steps 2/(mu (k+2)), weighted averaging and an
/// aggregated quadratic minorant that certifies the gap.
ProxSolveReport minimize_strongly_convex(const Objective &f, double mu,
                                         const BoxDomain &box, const Vec &x0,
                                         bool smooth,
                                         const ProxOptions &options = {});

/// argmin over the box of the surrogate, started at its center.
ProxSolveReport solve_surrogate(const SurrogateModel &model,
                                const ProxOptions &options = {});

struct MoreauReport {
  Vec prox;
  double lambda = 0.0;
  /// |x - prox| / lambda, the Moreau-envelope gradient norm.
  double grad_norm = 0.0;
  double dist = 0.0;
  double envelope = 0.0;
  ProxSolveReport solve;
};

/// prox_{lambda f}(x) over the box for a tau-weakly convex f with
/// lambda < 1/tau. Extra starting points are tried and the best kept.
MoreauReport prox_point(const Objective &f, double tau, double lambda,
                        const Vec &x, const BoxDomain &box, bool smooth,
                        const ProxOptions &options = {},
                        const std::vector<Vec> &extra_starts = {});

}  // namespace ddu

#endif  // DDU_PROX_SOLVER_HPP
