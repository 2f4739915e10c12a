#include "ddu/benchmarks/production_pricing.hpp"

#include <cmath>
#include <random>

#include "ddu/errors.hpp"

namespace ddu {

void ProductionPricingSpec::validate() const {
  for (const Vec *v : {&c1, &c2, &c3, &u, &v, &w, &eps_bar, &p_max, &q_max})
    if (v->size() != 2 || !(v->array() > 0.0).all())
      throw ContractViolation("production-pricing parameters must be positive 2-vectors");
}

Vec pp_demand_mean(const Vec &p, const ProductionPricingSpec &s) {
  const double e1 = std::exp(s.v[0] - s.w[0] * p[0]);
  const double e2 = std::exp(s.v[1] - s.w[1] * p[1]);
  const double S = 1.0 + e1 + e2;
  Vec phi(2);
  phi << s.u[0] * e1 / S + s.eps_bar[0], s.u[1] * e2 / S + s.eps_bar[1];
  return phi;
}

Mat pp_demand_jacobian(const Vec &p, const ProductionPricingSpec &s) {
  Vec e(2);
  e << std::exp(s.v[0] - s.w[0] * p[0]), std::exp(s.v[1] - s.w[1] * p[1]);
  const double S = 1.0 + e[0] + e[1];
  Mat J(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      J(i, k) = s.u[i] * (-(i == k ? s.w[i] * e[i] / S : 0.0) +
                          e[i] * s.w[k] * e[k] / (S * S));
  return J;
}

double pp_cost(const Vec &p, const Vec &q, const Vec &D,
               const ProductionPricingSpec &s) {
  return s.c1.dot(q) - p.dot(D) + s.c2.dot((D - q).cwiseMax(0.0)) +
         s.c3.dot((q - D).cwiseMax(0.0));
}

GroundTruthModel pp_truth(const ProductionPricingSpec &spec) {
  spec.validate();
  GroundTruthModel m;
  m.input_dim = 2;
  m.response_dim = 2;
  m.mean = [spec](const Vec &p) { return pp_demand_mean(p, spec); };
  m.mean_jacobian = [spec](const Vec &p) { return pp_demand_jacobian(p, spec); };
  // Uniform on [-eps_bar, eps_bar] written as sd * eps with eps of unit
  // variance: sd = eps_bar / sqrt(3), eps uniform on [-sqrt(3), sqrt(3)].
  const Vec sd = spec.eps_bar / std::sqrt(3.0);
  m.sd_diag = [sd](const Vec &) { return sd; };
  m.residual_sampler = [](Rng &rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Residual r;
    r.eps.resize(2);
    for (int i = 0; i < 2; ++i) r.eps[i] = std::sqrt(3.0) * unif(rng);
    return r;
  };
  return m;
}

DDUProblem pp_problem(const ProductionPricingSpec &spec) {
  spec.validate();
  DDUProblem pr;
  pr.name = "production_pricing";
  Vec hi(4);
  hi << spec.p_max, spec.q_max;
  pr.domain = BoxDomain(Vec::Zero(4), hi);
  pr.response_dim = 2;
  pr.predictor_index = {0, 1};
  pr.channels.linearize_whole = BilinearTerm{{0, 1}};
  pr.channels.homoscedastic = true;
  pr.cost_smooth = false;
  const Vec c1 = spec.c1, c2 = spec.c2, c3 = spec.c3;
  // The revenue p'D enters through w; the rest is piecewise linear in (q, s).
  pr.cost = [c1, c2, c3](const Vec &x, const Vec &s, double w, const Aux &,
                         CostEval *g) {
    const Vec q = x.tail(2);
    const Vec over = s - q;
    double v = c1.dot(q) - w;
    for (int i = 0; i < 2; ++i)
      v += over[i] > 0.0 ? c2[i] * over[i] : -c3[i] * over[i];
    if (g) {
      g->value = v;
      g->grad_x = Vec::Zero(4);
      g->grad_s.resize(2);
      for (int i = 0; i < 2; ++i) {
        const double ds = over[i] > 0.0 ? c2[i] : (over[i] < 0.0 ? -c3[i] : 0.0);
        g->grad_s[i] = ds;
        g->grad_x[2 + i] = c1[i] - ds;
      }
      g->grad_w = -1.0;
    }
    return v;
  };
  return pr;
}

}  // namespace ddu
