#include "ddu/benchmarks/synthetic.hpp"

#include <cmath>
#include <random>

namespace ddu {

GroundTruthModel synthetic_truth(const SyntheticSpec &spec) {
  GroundTruthModel m;
  m.input_dim = 2;
  m.response_dim = 2;
  m.mean = [](const Vec &x) {
    Vec c(2);
    c << std::sin(2.0 * x[0]) + 0.5 * x[1] * x[1], std::cos(x[0] + x[1]) + x[0] * x[1];
    return c;
  };
  m.mean_jacobian = [](const Vec &x) {
    Mat J(2, 2);
    const double s = std::sin(x[0] + x[1]);
    J << 2.0 * std::cos(2.0 * x[0]), x[1], -s + x[1], -s + x[0];
    return J;
  };
  const double k = spec.noise;
  if (spec.heteroscedastic) {
    m.sd_diag = [k](const Vec &x) {
      Vec q(2);
      q << k * (0.3 + 0.1 * x[0] * x[0]), k * (0.4 + 0.1 * std::sin(x[1]));
      return q;
    };
    m.sd_jacobian = [k](const Vec &x) {
      Mat J(2, 2);
      J << k * 0.2 * x[0], 0.0, 0.0, k * 0.1 * std::cos(x[1]);
      return J;
    };
  } else {
    m.sd_diag = [k](const Vec &) { return Vec::Constant(2, k); };
  }
  m.residual_sampler = [](Rng &rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Residual r;
    r.eps.resize(2);
    r.eps << n01(rng), n01(rng);
    return r;
  };
  return m;
}

DDUProblem synthetic_problem(const SyntheticSpec &spec) {
  DDUProblem pr;
  pr.name = "synthetic";
  pr.domain = BoxDomain(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  pr.response_dim = 2;
  pr.channels.homoscedastic = !spec.heteroscedastic;
  pr.cost_smooth = true;
  Vec target(2);
  target << 1.0, 0.5;
  pr.cost = [target](const Vec &x, const Vec &s, double, const Aux &, CostEval *g) {
    const Vec r = s - target;
    const double v = 0.5 * r.squaredNorm() + 0.05 * x.squaredNorm();
    if (g) {
      g->value = v;
      g->grad_x = 0.1 * x;
      g->grad_s = r;
      g->grad_w = 0.0;
    }
    return v;
  };
  return pr;
}

}  // namespace ddu
