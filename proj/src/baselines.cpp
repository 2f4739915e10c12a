#include "ddu/baselines.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <memory>

#include "ddu/als.hpp"
#include "ddu/diagnostics.hpp"
#include "ddu/errors.hpp"
#include "ddu/simulation.hpp"

namespace ddu {

namespace {

RunTrace equilibrium_run(const DDUProblem &problem, const GroundTruthModel &truth,
                         const EquilibriumConfig &cfg, std::uint64_t seed,
                         const std::optional<Vec> &x0) {
  problem.validate();
  const char *name = cfg.method == EquilibriumMethod::spg ? "spg" : "spp";
  if (!problem.decision_enters_cost)
    throw MethodNotApplicable(std::string(name) +
                              ": the cost is fully determined by the response");
  if (!(cfg.alpha0 > 0.0) || cfg.batch < 1 || cfg.T < 0)
    throw ContractViolation(std::string(name) + ": bad configuration");
  Rng rng(seed);
  Rng diag_rng(derive_seed(seed, 1));
  std::unique_ptr<SaaEvaluator> saa;
  if (cfg.saa_samples > 0)
    saa = std::make_unique<SaaEvaluator>(problem, truth, cfg.saa_samples, diag_rng);

  RunTrace trace;
  trace.method = name;
  trace.seed = seed;
  Vec x = x0 ? *x0 : problem.domain.sample_uniform(rng);
  if (!problem.domain.contains(x, 1e-12))
    throw ContractViolation(std::string(name) + ": initial point is infeasible");

  auto record = [&](long t, const Vec &z, double alpha) {
    IterationRecord rec;
    rec.t = t;
    rec.z = z;
    rec.alpha = alpha;
    rec.m = cfg.batch;
    if (saa) rec.f_saa = saa->value(z);
    return rec;
  };

  for (long t = 0; t <= cfg.T; ++t) {
    const double alpha = cfg.alpha0 * static_cast<double>(t + 1);
    const Vec xp = problem.predictor_of(x);
    std::vector<Response> batch;
    batch.reserve(cfg.batch);
    for (int k = 0; k < cfg.batch; ++k) batch.push_back(sample_response(truth, xp, rng));
    IterationRecord rec = record(t, x, alpha);
    Vec next;
    try {
      if (cfg.method == EquilibriumMethod::spg) {
        Vec g = Vec::Zero(x.size());
        for (const auto &b : batch) g += problem.frozen_gradient(x, b.xi, b.aux);
        g /= static_cast<double>(cfg.batch);
        next = project(x - g / alpha, problem.domain);
      } else {
        Objective f = [&](const Vec &y, Vec *g) {
          double v = 0.0;
          if (g) g->setZero(y.size());
          for (const auto &b : batch) {
            v += problem.evaluate(y, b.xi, b.aux);
            if (g) *g += problem.frozen_gradient(y, b.xi, b.aux);
          }
          const double inv = 1.0 / static_cast<double>(batch.size());
          const Vec dy = y - x;
          if (g) *g = *g * inv + alpha * dy;
          return v * inv + 0.5 * alpha * dy.squaredNorm();
        };
        ProxOptions popt = cfg.prox;
        popt.tol *= alpha;
        const ProxSolveReport rep = minimize_strongly_convex(
            f, alpha, problem.domain, x, problem.cost_smooth, popt);
        next = rep.x;
        rec.solver_iters = rep.iterations;
        rec.solver_converged = rep.converged;
        rec.solver_residual = rep.residual;
      }
    } catch (const std::exception &e) {
      trace.failure = StepFailure(static_cast<int>(t), e.what()).what();
      trace.records.push_back(std::move(rec));
      break;
    }
    rec.step_norm = (next - x).norm();
    trace.records.push_back(std::move(rec));
    x = std::move(next);
  }
  trace.records.push_back(record(static_cast<long>(trace.records.size()), x,
                                 cfg.alpha0 * static_cast<double>(trace.records.size() + 1)));
  trace.final_point = x;
  trace.output_point = x;
  trace.output_index = trace.records.back().t;
  return trace;
}

}  // namespace

RunTrace spg_run(const DDUProblem &problem, const GroundTruthModel &truth,
                 const EquilibriumConfig &config, std::uint64_t seed,
                 const std::optional<Vec> &x0) {
  EquilibriumConfig c = config;
  c.method = EquilibriumMethod::spg;
  return equilibrium_run(problem, truth, c, seed, x0);
}

RunTrace spp_run(const DDUProblem &problem, const GroundTruthModel &truth,
                 const EquilibriumConfig &config, std::uint64_t seed,
                 const std::optional<Vec> &x0) {
  EquilibriumConfig c = config;
  c.method = EquilibriumMethod::spp;
  return equilibrium_run(problem, truth, c, seed, x0);
}

PoResult po_lr_run(const DDUProblem &problem, const GroundTruthModel &truth,
                   int N, const PoOptions &options, std::uint64_t seed) {
  problem.validate();
  const BoxDomain pbox = problem.predictor_domain();
  const int dp = pbox.dim();
  const int ell = problem.response_dim;
  const int d = problem.dim();
  if (N <= dp + 1) throw ContractViolation("po_lr: need N > predictor dim + 1");
  if (options.multistart < 1 || options.iterations < 1)
    throw ContractViolation("po_lr: multistart and iterations must be >= 1");
  Rng rng(seed);
  const Dataset train = draw_static(truth, pbox, StaticMarginal{}, N, rng);

  Mat X(N, dp + 1), Y(N, ell);
  for (int k = 0; k < N; ++k) {
    X(k, 0) = 1.0;
    X.row(k).tail(dp) = train[k].predictor.transpose();
    Y.row(k) = train[k].response.transpose();
  }
  PoResult out;
  Eigen::ColPivHouseholderQR<Mat> qr(X);
  Mat B;
  if (qr.rank() < dp + 1) {
    out.ridge_fallback = true;
    std::cerr << "warning: po_lr design is rank deficient; using ridge\n";
    Mat G = X.transpose() * X;
    G.diagonal().array() += 1e-8 * G.trace() / (dp + 1);
    B = G.ldlt().solve(X.transpose() * Y);
  } else {
    B = qr.solve(Y);
  }
  out.w0 = B.row(0).transpose();
  out.W = B.bottomRows(dp).transpose();
  const Mat Wfull = lift_columns(out.W, problem.predictor_index, d);
  std::vector<Vec> scen;
  scen.reserve(N);
  for (int k = 0; k < N; ++k)
    scen.push_back(train[k].response - out.w0 - out.W * train[k].predictor);

  const auto &bil = problem.channels.linearize_whole;
  Objective f = [&](const Vec &x, Vec *g) {
    const Vec mean = out.w0 + Wfull * x;
    double v = 0.0;
    if (g) g->setZero(d);
    CostEval ce;
    for (int k = 0; k < N; ++k) {
      const Vec xi = mean + scen[k];
      const double w = problem.bilinear(x, xi);
      v += problem.cost(x, xi, w, train[k].aux, g ? &ce : nullptr);
      if (g) {
        Vec gs = ce.grad_s;
        *g += ce.grad_x;
        if (bil) {
          for (int j = 0; j < ell; ++j) {
            (*g)[bil->decision_index[j]] += ce.grad_w * xi[j];
            gs[j] += ce.grad_w * x[bil->decision_index[j]];
          }
        }
        g->noalias() += Wfull.transpose() * gs;
      }
    }
    if (g) *g /= static_cast<double>(N);
    return v / static_cast<double>(N);
  };

  out.objective = std::numeric_limits<double>::infinity();
  const double diam = problem.domain.diameter();
  for (int s = 0; s < options.multistart; ++s) {
    Vec x = problem.domain.sample_uniform(rng);
    Vec best = x;
    double best_v = std::numeric_limits<double>::infinity();
    Vec g;
    for (int k = 0; k < options.iterations; ++k) {
      const double v = f(x, &g);
      if (v < best_v) {
        best_v = v;
        best = x;
      }
      const double gn = g.norm();
      if (gn == 0.0) break;
      x = project(x - (options.step * diam / std::sqrt(k + 1.0)) * g / gn,
                  problem.domain);
    }
    const double v = f(x, nullptr);
    if (v < best_v) {
      best_v = v;
      best = x;
    }
    out.start_objectives.push_back(best_v);
    out.start_points.push_back(best);
    if (best_v < out.objective) {
      out.objective = best_v;
      out.x = best;
    }
  }
  return out;
}

}  // namespace ddu
