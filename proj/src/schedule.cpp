#include "ddu/schedule.hpp"

#include <cmath>
#include <random>

#include "ddu/errors.hpp"

namespace ddu {

void ParameterSchedule::validate() const {
  if (!(tau >= 0.0)) throw ContractViolation("schedule: tau must be >= 0");
  if (!(rho0 > tau)) throw ContractViolation("schedule: need rho0 > tau");
  if (!(alpha0 >= rho0 + tau))
    throw ContractViolation("schedule: need alpha0 >= rho0 + tau");
  if (!(a >= 0.0) || !(a <= b))
    throw ContractViolation("schedule: need 0 <= a <= b");
  if (!(b >= 0.0 && b <= 1.0))
    throw ContractViolation("schedule: need b in [0, 1]");
  if (!(m0 > 0.0) || !(n0 > 0.0))
    throw ContractViolation("schedule: m0 and n0 must be positive");
  if (!std::isfinite(j) || !std::isfinite(k))
    throw ContractViolation("schedule: sample-size exponents must be finite");
  if (!(h0 > 0.0)) throw ContractViolation("schedule: h0 must be > 0");
}

namespace {

int ceil_count(double v) {
  const double c = std::ceil(v);
  if (!(c < 2e9)) throw ContractViolation("schedule: sample size overflow");
  return std::max(1, static_cast<int>(c));
}

}  // namespace

ScheduleValues schedule_eval(const ParameterSchedule &s, long t) {
  if (t < 0) throw ContractViolation("schedule_eval: t must be >= 0");
  const double t1 = static_cast<double>(t) + 1.0;
  ScheduleValues v;
  v.rho = s.a == 0.0 ? s.rho0 : s.rho0 * std::pow(t1, s.a);
  v.alpha = s.b == 0.0 ? s.alpha0 : s.alpha0 * std::pow(t1, s.b);
  v.m = ceil_count(s.j == 0.0 ? s.m0 : s.m0 * std::pow(t1, s.j));
  v.n = ceil_count(s.k == 0.0 ? s.n0 : s.n0 * std::pow(t1, s.k));
  v.h = s.h0 * std::pow(static_cast<double>(v.n), s.h_exponent);
  return v;
}

double compute_Pt(double rho_t, double rho_next, double alpha_t, double tau) {
  if (!(alpha_t > 0.0)) throw ContractViolation("compute_Pt: alpha_t <= 0");
  return rho_next * (rho_t - tau) / alpha_t - (rho_next - rho_t);
}

AveragingWeights polyak_weights(const ParameterSchedule &s, long T) {
  if (T < 0) throw ContractViolation("polyak_weights: T must be >= 0");
  AveragingWeights w;
  w.P.resize(T + 1);
  for (long t = 0; t <= T; ++t) {
    const ScheduleValues cur = schedule_eval(s, t);
    const ScheduleValues next = schedule_eval(s, t + 1);
    w.P[t] = compute_Pt(cur.rho, next.rho, cur.alpha, s.tau);
  }
  long tbar = T + 1;
  while (tbar > 0 && w.P[tbar - 1] > 0.0) --tbar;
  if (tbar == T + 1)
    throw DegenerateWeights("no positive tail of descent coefficients P_t");
  w.tbar = tbar;
  w.p.assign(T + 1, 0.0);
  bool constant = true;
  double total = 0.0;
  for (long t = tbar; t <= T; ++t) {
    total += w.P[t];
    constant = constant && w.P[t] == w.P[tbar];
  }
  const double count = static_cast<double>(T + 1 - tbar);
  for (long t = tbar; t <= T; ++t)
    w.p[t] = constant ? 1.0 / count : w.P[t] / total;
  return w;
}

AveragingWeights polyak_weights_or_uniform(const ParameterSchedule &s,
                                           long T) {
  try {
    return polyak_weights(s, T);
  } catch (const DegenerateWeights &) {
    AveragingWeights w;
    w.P.resize(T + 1);
    for (long t = 0; t <= T; ++t)
      w.P[t] = compute_Pt(schedule_eval(s, t).rho, schedule_eval(s, t + 1).rho,
                          schedule_eval(s, t).alpha, s.tau);
    w.tbar = 0;
    w.p.assign(T + 1, 1.0 / static_cast<double>(T + 1));
    w.fallback_uniform = true;
    return w;
  }
}

long draw_index(const AveragingWeights &w, Rng &rng) {
  if (w.p.empty()) throw ContractViolation("draw_index: empty weights");
  std::discrete_distribution<long> dist(w.p.begin(), w.p.end());
  return dist(rng);
}

}  // namespace ddu
