#ifndef DDU_SCHEDULE_HPP
#define DDU_SCHEDULE_HPP

#include <vector>

#include "ddu/types.hpp"

namespace ddu {

/// rho_t = rho0 (t+1)^a, alpha_t = alpha0 (t+1)^b, m_t = ceil(m0 (t+1)^j),
/// n_t = ceil(n0 (t+1)^k), h_t = h0 n_t^(-1/6).
struct ParameterSchedule {
  double rho0 = 2.0;
  double a = 0.0;
  double alpha0 = 3.0;
  double b = 0.7;
  double m0 = 1.0;
  double j = 0.0;
  double n0 = 10.0;
  double k = 0.0;
  double tau = 1.0;
  double h0 = 1.0;
  double h_exponent = -1.0 / 6.0;

  void validate() const;
};

struct ScheduleValues {
  double rho = 0.0;
  double alpha = 0.0;
  int m = 1;
  int n = 1;
  double h = 0.0;
};

ScheduleValues schedule_eval(const ParameterSchedule &s, long t);

/// P_t = rho_{t+1} (rho_t - tau) / alpha_t - (rho_{t+1} - rho_t).
double compute_Pt(double rho_t, double rho_next, double alpha_t, double tau);

struct AveragingWeights {
  std::vector<double> P;
  long tbar = 0;
  std::vector<double> p;
  /// True when every P_t was nonpositive and uniform weights were substituted.
  bool fallback_uniform = false;
};

/// Throws DegenerateWeights when no tail of positive P_t exists.
AveragingWeights polyak_weights(const ParameterSchedule &s, long T);
/// polyak_weights, or uniform weights with fallback_uniform set.
AveragingWeights polyak_weights_or_uniform(const ParameterSchedule &s, long T);

long draw_index(const AveragingWeights &w, Rng &rng);

}  // namespace ddu

#endif  // DDU_SCHEDULE_HPP
