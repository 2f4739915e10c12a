#ifndef DDU_BENCHMARKS_PRODUCTION_PRICING_HPP
#define DDU_BENCHMARKS_PRODUCTION_PRICING_HPP

#include "ddu/problem.hpp"

namespace ddu {

/// Two-product joint production and pricing. Decision (p1, p2, q1, q2).
struct ProductionPricingSpec {
  Vec c1 = Vec2(3.0, 2.0);
  Vec c2 = Vec2(7.5, 9.0);
  Vec c3 = Vec2(3.0, 3.0);
  Vec u = Vec2(6.0, 10.0);
  Vec v = Vec2(7.0, 8.0);
  Vec w = Vec2(1.0, 0.8);
  Vec eps_bar = Vec2(1.0, 1.0);
  Vec p_max = Vec2(10.0, 10.0);
  Vec q_max = Vec2(15.0, 15.0);

  void validate() const;

 private:
  static Vec Vec2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
  }
};

/// phi_i(p) = u_i exp(v_i - w_i p_i) / (1 + sum_k exp(v_k - w_k p_k)) + eps_bar_i.
Vec pp_demand_mean(const Vec &p, const ProductionPricingSpec &spec);
Mat pp_demand_jacobian(const Vec &p, const ProductionPricingSpec &spec);

/// c1'q - p'D + c2' max(D - q, 0) + c3' max(q - D, 0).
double pp_cost(const Vec &p, const Vec &q, const Vec &D,
               const ProductionPricingSpec &spec);

/// D(p) = phi(p) + eps with eps uniform on the box [-eps_bar, eps_bar].
GroundTruthModel pp_truth(const ProductionPricingSpec &spec = {});

/// Homoscedastic, predictor p, with -p'D linearized as a whole.
DDUProblem pp_problem(const ProductionPricingSpec &spec = {});

}  // namespace ddu

#endif  // DDU_BENCHMARKS_PRODUCTION_PRICING_HPP
