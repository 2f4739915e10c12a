#include <doctest.h>

#include <cmath>

#include "ddu/diagnostics.hpp"
#include "ddu/errors.hpp"
#include "ddu/prox_solver.hpp"
#include "ddu/surrogate.hpp"

using namespace ddu;

namespace {

// phi(x, s) = s^2 on [-2, 2], the response read at x itself.
DDUProblem square_problem() {
  DDUProblem pr;
  pr.name = "square";
  pr.domain = BoxDomain(Vec{{-2.0}}, Vec{{2.0}});
  pr.response_dim = 1;
  pr.predictor_index = {0};
  pr.cost_smooth = true;
  pr.cost = [](const Vec &, const Vec &s, double, const Aux &, CostEval *g) {
    const double v = s[0] * s[0];
    if (g) {
      g->value = v;
      g->grad_x = Vec::Zero(1);
      g->grad_s = Vec{{2.0 * s[0]}};
      g->grad_w = 0.0;
    }
    return v;
  };
  return pr;
}

SurrogateModel scalar_surrogate(int m) {
  const LocalEstimate est =
      make_local_estimate(Vec{{0.0}}, Vec{{1.0}}, Mat::Constant(1, 1, 2.0), Vec{{1.0}},
                          Mat::Zero(1, 1));
  ResidualBatch r;
  for (int i = 0; i < m; ++i) {
    r.residuals.push_back(Vec::Zero(1));
    r.aux.push_back({});
  }
  return build_surrogate(Vec{{0.0}}, est, r, 2.0, square_problem());
}

}  // namespace

TEST_SUITE("surrogate") {
  TEST_CASE("scalar example") {
    const SurrogateModel F = scalar_surrogate(1);
    CHECK(F.value(Vec{{0.5}}) == doctest::Approx(4.25).epsilon(1e-14));
    CHECK(F.subgradient(Vec{{0.0}})[0] == doctest::Approx(4.0).epsilon(1e-14));
    for (double x : {-1.5, -0.2, 0.0, 0.7, 1.9})
      CHECK(F.value(Vec{{x}}) == doctest::Approx((1 + 2 * x) * (1 + 2 * x) + x * x));
  }

  TEST_CASE("identical channels average to one") {
    const SurrogateModel one = scalar_surrogate(1), two = scalar_surrogate(2);
    for (double x : {-1.0, 0.3, 1.2}) CHECK(two.value(Vec{{x}}) == one.value(Vec{{x}}));
  }

  TEST_CASE("homoscedastic adaptive channel reduces to eta + slope (x - z)") {
    const Vec z{{0.2}};
    const LocalEstimate est = make_local_estimate(z, Vec{{1.0}}, Mat::Constant(1, 1, -3.0),
                                                  Vec{{1.0}}, Mat::Zero(1, 1));
    const Dataset w{{z, Vec{{1.7}}, {}}};
    const SurrogateModel F = build_surrogate(z, est, residuals_adaptive(w, est), 1.0, square_problem());
    CHECK(F.channel_value(0, Vec{{0.5}})[0] == doctest::Approx(1.7 - 3.0 * 0.3).epsilon(1e-14));
  }

  TEST_CASE("dimension mismatch") {
    const LocalEstimate est =
        make_local_estimate(Vec{{0.0}}, Vec{{1.0}}, Mat::Zero(1, 1), Vec{{1.0}}, Mat::Zero(1, 1));
    ResidualBatch r;
    r.residuals.push_back(Vec::Zero(2));
    r.aux.push_back({});
    CHECK_THROWS_AS(build_surrogate(Vec{{0.0}}, est, r, 1.0, square_problem()), ContractViolation);
  }
}

TEST_SUITE("prox_solver") {
  TEST_CASE("isotropic quadratic projects its minimizer") {
    const Vec target{{3.0, -5.0}};
    const Objective f = [&](const Vec &x, Vec *g) {
      if (g) *g = x - target;
      return 0.5 * (x - target).squaredNorm();
    };
    const BoxDomain box(Vec::Zero(2), Vec::Ones(2));
    const ProxSolveReport r = minimize_strongly_convex(f, 1.0, box, Vec::Constant(2, 0.5), true);
    CHECK(r.converged);
    CHECK((r.x - Vec{{1.0, 0.0}}).norm() <= 1e-8);
  }

  TEST_CASE("nonsmooth one-dimensional optimality") {
    const Objective f = [](const Vec &x, Vec *g) {
      const double s = x[0] > 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0);
      if (g) *g = Vec{{s + 2.0 * (x[0] - 1.0)}};
      return std::abs(x[0]) + (x[0] - 1.0) * (x[0] - 1.0);
    };
    const BoxDomain box(Vec{{-2.0}}, Vec{{2.0}});
    ProxOptions o;
    o.tol = 1e-6;
    o.max_iter = 200000;
    const ProxSolveReport r = minimize_strongly_convex(f, 2.0, box, Vec{{-1.5}}, false, o);
    CHECK(std::abs(r.x[0] - 0.5) <= 1e-5);
    CHECK(r.residual <= 1e-5);
  }

  TEST_CASE("non-finite objective") {
    const Objective f = [](const Vec &, Vec *g) {
      if (g) *g = Vec::Zero(1);
      return std::nan("");
    };
    CHECK_THROWS_AS(minimize_strongly_convex(f, 1.0, BoxDomain(Vec{{0.0}}, Vec{{1.0}}),
                                             Vec{{0.5}}, true),
                    NumericalBreakdown);
  }

  TEST_CASE("prox of a quadratic") {
    const Objective f = [](const Vec &y, Vec *g) {
      if (g) *g = y;
      return 0.5 * y.squaredNorm();
    };
    const BoxDomain big(Vec::Constant(2, -100.0), Vec::Constant(2, 100.0));
    const MoreauReport r = prox_point(f, 0.0, 1.0, Vec{{2.0, 0.0}}, big, true);
    CHECK((r.prox - Vec{{1.0, 0.0}}).norm() <= 1e-8);
    CHECK(r.dist == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.grad_norm == doctest::Approx(1.0).epsilon(1e-7));

    const MoreauReport tiny = prox_point(f, 0.0, 1e-8, Vec{{2.0, 0.0}}, big, true);
    CHECK((tiny.prox - Vec{{2.0, 0.0}}).norm() <= 1e-6);
  }

  TEST_CASE("soft threshold") {
    const Objective f = [](const Vec &y, Vec *g) {
      if (g) *g = Vec{{y[0] > 0 ? 1.0 : (y[0] < 0 ? -1.0 : 0.0)}};
      return std::abs(y[0]);
    };
    ProxOptions o;
    o.tol = 1e-7;
    o.max_iter = 200000;
    const MoreauReport r =
        prox_point(f, 0.0, 1.0, Vec{{0.4}}, BoxDomain(Vec{{-5.0}}, Vec{{5.0}}), false, o);
    CHECK(std::abs(r.prox[0]) <= 1e-5);
  }

  TEST_CASE("moreau residual") {
    const MoreauResidual same = moreau_residual(Vec{{1.0, 2.0}}, Vec{{1.0, 2.0}}, 0.3);
    CHECK(same.dist == 0.0);
    CHECK(same.grad_norm == 0.0);
    const MoreauResidual q = moreau_residual(Vec{{2.0, 0.0}}, Vec{{1.0, 0.0}}, 1.0);
    CHECK(q.dist == 1.0);
    CHECK(q.grad_norm == 1.0);
    CHECK(moreau_residual(Vec{{1.0}}, Vec{{0.0}}, 0.5).grad_norm == 2.0);
  }
}
