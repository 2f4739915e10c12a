#ifndef DDU_TRACE_HPP
#define DDU_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ddu/schedule.hpp"
#include "ddu/types.hpp"

namespace ddu {

struct IterationRecord {
  long t = 0;
  Vec z;  // iterate z^t
  double rho = 0.0;
  double alpha = 0.0;
  int m = 0;
  int n = 0;
  double h = 0.0;
  /// Surrogate at its center (the batch-average cost at z^t).
  std::optional<double> surrogate_value_at_center;
  /// |z^{t+1} - z^t|; absent on the closing row that holds z^{T+1}.
  std::optional<double> step_norm;
  int solver_iters = 0;
  bool solver_converged = false;
  double solver_residual = 0.0;
  /// False when the step exceeded 2|g|/alpha_t.
  bool prox_bound_ok = true;
  double negative_channel_fraction = 0.0;
  int projected_samples = 0;
  /// Variance coordinates lifted to the floor in the estimate at z^t.
  int floor_clamped = 0;
  std::optional<double> f_saa;
  std::optional<double> moreau_dist;
  std::optional<double> moreau_grad;
};

struct RunTrace {
  std::string method;
  std::uint64_t seed = 0;
  ParameterSchedule schedule;
  std::vector<IterationRecord> records;
  AveragingWeights weights;
  long output_index = 0;
  Vec output_point;
  Vec final_point;
  /// Set when a step failed; records up to the failure are kept.
  std::optional<std::string> failure;
};

std::vector<std::string> trace_header(int d);
void write_trace_csv(std::ostream &out, const RunTrace &trace);
void write_trace_csv(const std::string &path, const RunTrace &trace);

}  // namespace ddu

#endif  // DDU_TRACE_HPP
