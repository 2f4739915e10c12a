#ifndef DDU_DIAGNOSTICS_HPP
#define DDU_DIAGNOSTICS_HPP

#include <iosfwd>
#include <vector>

#include "ddu/estimation.hpp"
#include "ddu/problem.hpp"
#include "ddu/prox_solver.hpp"
#include "ddu/simulation.hpp"

namespace ddu {

struct SaaEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample-average objective over a residual stream drawn once and reused at
/// every x (common random numbers). Holds references to problem and truth.
class SaaEvaluator {
 public:
  SaaEvaluator(const DDUProblem &problem, const GroundTruthModel &truth,
               long samples, Rng &rng);

  long size() const { return static_cast<long>(draws_.size()); }
  /// Mean cost; when grad is non-null, the gradient of the sample average
  /// through the true response map (xi depends on x).
  double value(const Vec &x, Vec *grad = nullptr) const;
  SaaEstimate estimate(const Vec &x) const;
  /// Per-sample costs at x, in stream order.
  std::vector<double> costs(const Vec &x) const;

 private:
  const DDUProblem &problem_;
  const GroundTruthModel &truth_;
  std::vector<Residual> draws_;
};

/// Mean and standard error of the cost at x over N fresh responses.
SaaEstimate saa_objective(const DDUProblem &problem,
                          const GroundTruthModel &truth, const Vec &x, long N,
                          Rng &rng);

struct MoreauResidual {
  double dist = 0.0;
  double grad_norm = 0.0;
};

MoreauResidual moreau_residual(const Vec &x, const Vec &zhat, double lambda);

struct StationarityReport {
  Vec at;
  Vec prox;
  double lambda = 0.0;
  double prox_dist = 0.0;
  double grad_norm = 0.0;
  long saa_samples = 0;
};

struct StationarityOptions {
  /// Nonpositive selects 1/(2 rho).
  double lambda = 0.0;
  int restarts = 5;
  /// Perturbation radius of the extra starts, as a fraction of the diameter.
  double restart_radius = 0.05;
  /// The sample average is treated as smooth even when the cost is not.
  bool smooth = true;
  ProxOptions prox{1e-7, 500, 10};
};

StationarityReport stationarity_report(const SaaEvaluator &saa,
                                       const BoxDomain &box, const Vec &x,
                                       double rho, double tau,
                                       const StationarityOptions &options,
                                       Rng &rng);

struct RateRow {
  long n = 0;
  double h = 0.0;
  double mse_mean = 0.0;
  double mse_jac = 0.0;
  int reps = 0;
};

struct RateTable {
  std::vector<RateRow> rows;
  /// Least-squares slopes of log MSE against log n.
  double slope_mean = 0.0;
  double slope_jac = 0.0;
};

/// Monte-Carlo MSE of the LLR mean and Jacobian at z as n grows, with
/// h_n from the oracle's bandwidth rule. `box` is the predictor box.
RateTable estimation_rate_experiment(const GroundTruthModel &truth,
                                     const BoxDomain &box,
                                     const OracleConfig &oracle, const Vec &z,
                                     const std::vector<long> &n_grid, int reps,
                                     Rng &rng);

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

void write_rate_csv(std::ostream &out, const RateTable &table);

}  // namespace ddu

#endif  // DDU_DIAGNOSTICS_HPP
