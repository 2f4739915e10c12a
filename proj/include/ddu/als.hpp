#ifndef DDU_ALS_HPP
#define DDU_ALS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "ddu/diagnostics.hpp"
#include "ddu/estimation.hpp"
#include "ddu/problem.hpp"
#include "ddu/prox_solver.hpp"
#include "ddu/schedule.hpp"
#include "ddu/simulation.hpp"
#include "ddu/surrogate.hpp"
#include "ddu/trace.hpp"

namespace ddu {

struct AlsDiagnostics {
  /// SAA samples for f_saa on every row; 0 disables.
  long saa_samples = 0;
  /// Reuse one residual stream across iterations (otherwise fresh per row).
  bool crn = true;
  /// Moreau residual every k-th iteration (and on the closing row); 0 disables.
  long moreau_every = 0;
  long moreau_samples = 20000;
  /// Nonpositive selects 1/(2 rho0).
  double moreau_lambda = 0.0;
  StationarityOptions stationarity;
};

struct AlsOptions {
  OracleConfig oracle;
  EstimationOptions estimation;
  ProxOptions prox;
  /// When true the tolerance is multiplied by alpha_t.
  bool scale_tol_by_alpha = true;
  AlsDiagnostics diagnostics;
  /// Rows served by the fixed oracle; loaded from oracle.fixed_dataset_path
  /// when null.
  std::shared_ptr<const Dataset> fixed_data;
  /// Test hook: replaces the learned estimate at the predictor z.
  std::function<LocalEstimate(const Vec &)> estimate_override;
  /// Test hook: replaces the residual batch (arguments: estimate, m_t).
  std::function<ResidualBatch(const LocalEstimate &, int, Rng &)> residual_override;
};

struct StepResult {
  Vec z_next;
  IterationRecord record;
  /// Prox-free surrogate subgradient at z^t.
  Vec center_subgradient;
};

/// One simulation / learning / optimization step from z_t.
StepResult als_step(const Vec &z_t, const DDUProblem &problem,
                    const GroundTruthModel &truth, const AlsOptions &options,
                    const ScheduleValues &params, long t, Rng &rng);

/// Runs steps t = 0..T, then draws the output index from the averaging
/// weights. The closing record (t = T+1) holds z^{T+1}. Diagnostics use an
/// RNG stream separate from the algorithm's.
RunTrace run_als(const DDUProblem &problem, const GroundTruthModel &truth,
                 const AlsOptions &options, const ParameterSchedule &schedule,
                 long T, std::uint64_t seed,
                 const std::optional<Vec> &z0 = std::nullopt);

/// Estimate at z from S, retrying once with a doubled bandwidth.
LocalEstimate estimate_with_retry(const Dataset &data, const Vec &z, double h,
                                  const EstimationOptions &options);

/// Seeds derived from a base seed and a stream label (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace ddu

#endif  // DDU_ALS_HPP
