#ifndef DDU_BASELINES_HPP
#define DDU_BASELINES_HPP

#include <cstdint>
#include <optional>

#include "ddu/problem.hpp"
#include "ddu/prox_solver.hpp"
#include "ddu/trace.hpp"

namespace ddu {

enum class EquilibriumMethod { spg, spp };

/// Stochastic methods that optimize under the distribution frozen at the
/// current iterate; alpha_t = alpha0 (t+1).
struct EquilibriumConfig {
  EquilibriumMethod method = EquilibriumMethod::spg;
  double alpha0 = 0.1;
  int batch = 10;
  long T = 2000;
  ProxOptions prox{1e-8, 500, 10};
  /// f_saa on every row with a common residual stream; 0 disables.
  long saa_samples = 0;
};

/// x_{t+1} = P(x_t - g_t / alpha_t) with the frozen-sample batch gradient.
RunTrace spg_run(const DDUProblem &problem, const GroundTruthModel &truth,
                 const EquilibriumConfig &config, std::uint64_t seed,
                 const std::optional<Vec> &x0 = std::nullopt);

/// x_{t+1} = argmin over the box of the frozen batch loss + alpha_t/2 |x - x_t|^2.
RunTrace spp_run(const DDUProblem &problem, const GroundTruthModel &truth,
                 const EquilibriumConfig &config, std::uint64_t seed,
                 const std::optional<Vec> &x0 = std::nullopt);

struct PoOptions {
  int multistart = 10;
  int iterations = 300;
  /// Initial step as a fraction of the box diameter; decays as 1/sqrt(k+1).
  double step = 0.1;
};

struct PoResult {
  Vec x;
  double objective = 0.0;  // the PO sample-average objective at x
  Mat W;                   // ell x predictor dim
  Vec w0;
  bool ridge_fallback = false;
  std::vector<double> start_objectives;
  std::vector<Vec> start_points;  // best point of each start
};

/// Predict-then-optimize with a global affine model fitted by least squares
/// on N static draws (uniform over the predictor box); the objective pools
/// the training residuals as scenarios around the predicted mean.
PoResult po_lr_run(const DDUProblem &problem, const GroundTruthModel &truth,
                   int N, const PoOptions &options, std::uint64_t seed);

}  // namespace ddu

#endif  // DDU_BASELINES_HPP
