#include "ddu/als.hpp"

#include <cmath>

#include "ddu/errors.hpp"

namespace ddu {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

LocalEstimate estimate_with_retry(const Dataset &data, const Vec &z, double h,
                                  const EstimationOptions &options) {
  try {
    return estimate_local(data, z, h, options);
  } catch (const InsufficientLocalData &) {
    return estimate_local(data, z, 2.0 * h, options);
  }
}

namespace {

Dataset sample_rows(const Dataset &data, int m, Rng &rng) {
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  Dataset out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) out.push_back(data[pick(rng)]);
  return out;
}

}  // namespace

StepResult als_step(const Vec &z_t, const DDUProblem &problem,
                    const GroundTruthModel &truth, const AlsOptions &options,
                    const ScheduleValues &params, long t, Rng &rng) {
  if (!problem.domain.contains(z_t, 1e-12))
    throw ContractViolation("als_step: iterate is infeasible");
  const Vec zp = problem.predictor_of(z_t);
  const BoxDomain pbox = problem.predictor_domain();
  EstimationOptions eopt = options.estimation;
  eopt.homoscedastic = eopt.homoscedastic || problem.channels.homoscedastic;
  const OracleKind kind = options.oracle.kind;
  const double h = params.h;

  std::shared_ptr<const Dataset> fixed = options.fixed_data;
  if (kind == OracleKind::fixed && !fixed)
    fixed = std::make_shared<const Dataset>(
        load_fixed(options.oracle.fixed_dataset_path, pbox.dim(), problem.response_dim));

  IterationRecord rec;
  rec.t = t;
  rec.z = z_t;
  rec.rho = params.rho;
  rec.alpha = params.alpha;
  rec.m = params.m;
  rec.n = params.n;
  rec.h = h;

  // Simulation of S_t and learning at z.
  Dataset S;
  LocalEstimate est;
  if (options.estimate_override) {
    est = options.estimate_override(zp);
  } else if (kind == OracleKind::adaptive) {
    S = draw_adaptive(truth, pbox, zp, params.n, h, options.oracle.shape, rng,
                      &rec.projected_samples);
    try {
      est = estimate_local(S, zp, h, eopt);
    } catch (const InsufficientLocalData &) {
      rec.h = 2.0 * h;
      S = draw_adaptive(truth, pbox, zp, params.n, rec.h, options.oracle.shape,
                        rng, &rec.projected_samples);
      est = estimate_local(S, zp, rec.h, eopt);
    }
  } else {
    if (kind == OracleKind::static_joint)
      S = draw_static(truth, pbox, options.oracle.marginal, params.n, rng);
    est = estimate_with_retry(kind == OracleKind::fixed ? *fixed : S, zp, h, eopt);
  }

  rec.floor_clamped = est.floor_clamped;

  // Residual batch W_t.
  ResidualBatch res;
  if (options.residual_override) {
    res = options.residual_override(est, params.m, rng);
  } else if (kind == OracleKind::adaptive) {
    res = residuals_adaptive(draw_adaptive_residual_batch(truth, zp, params.m, rng), est);
  } else {
    const Dataset &pool = kind == OracleKind::fixed ? *fixed : S;
    Dataset W = kind == OracleKind::fixed
                    ? sample_rows(*fixed, params.m, rng)
                    : draw_static(truth, pbox, options.oracle.marginal, params.m, rng);
    std::vector<LocalEstimate> at_y;
    at_y.reserve(W.size());
    for (const auto &w : W)
      at_y.push_back(options.estimate_override
                         ? options.estimate_override(w.predictor)
                         : estimate_with_retry(pool, w.predictor, h, eopt));
    res = residuals_static(W, at_y);
  }

  // Optimization.
  const SurrogateModel model = build_surrogate(z_t, est, res, params.alpha, problem);
  StepResult out;
  model.model_value(z_t, &out.center_subgradient);
  rec.surrogate_value_at_center = model.center_value();
  ProxOptions popt = options.prox;
  if (options.scale_tol_by_alpha) popt.tol *= params.alpha;
  const ProxSolveReport rep = solve_surrogate(model, popt);
  out.z_next = rep.x;
  rec.solver_iters = rep.iterations;
  rec.solver_converged = rep.converged;
  rec.solver_residual = rep.residual;
  rec.step_norm = (out.z_next - z_t).norm();
  // The bound holds for the exact minimizer; allow for the certified
  // solver inaccuracy.
  const double slack = (rep.smooth_path ? 2.0 * rep.residual / params.alpha
                                        : rep.residual) +
                       1e-12 * (1.0 + z_t.norm());
  rec.prox_bound_ok =
      *rec.step_norm <= 2.0 * out.center_subgradient.norm() / params.alpha + slack;
  rec.negative_channel_fraction = model.negative_channel_fraction(out.z_next);
  out.record = std::move(rec);
  return out;
}

RunTrace run_als(const DDUProblem &problem, const GroundTruthModel &truth,
                 const AlsOptions &options, const ParameterSchedule &schedule,
                 long T, std::uint64_t seed, const std::optional<Vec> &z0) {
  if (T < 0) throw ContractViolation("run_als: T must be >= 0");
  problem.validate();
  schedule.validate();
  options.oracle.validate();
  Rng rng(seed);
  Rng diag_rng(derive_seed(seed, 1));

  AlsOptions opts = options;
  if (opts.oracle.kind == OracleKind::fixed && !opts.fixed_data)
    opts.fixed_data = std::make_shared<const Dataset>(
        load_fixed(opts.oracle.fixed_dataset_path,
                   static_cast<int>(problem.predictors().size()),
                   problem.response_dim));

  RunTrace trace;
  trace.method = "als";
  trace.seed = seed;
  trace.schedule = schedule;

  Vec z = z0 ? *z0 : problem.domain.sample_uniform(rng);
  if (!problem.domain.contains(z, 1e-12))
    throw ContractViolation("run_als: initial point is infeasible");

  const AlsDiagnostics &dg = opts.diagnostics;
  std::unique_ptr<SaaEvaluator> saa, moreau_saa;
  if (dg.saa_samples > 0 && dg.crn)
    saa = std::make_unique<SaaEvaluator>(problem, truth, dg.saa_samples, diag_rng);
  if (dg.moreau_every > 0)
    moreau_saa = std::make_unique<SaaEvaluator>(problem, truth, dg.moreau_samples, diag_rng);
  StationarityOptions sopt = dg.stationarity;
  sopt.lambda = dg.moreau_lambda > 0.0 ? dg.moreau_lambda : 0.5 / schedule.rho0;

  auto annotate = [&](IterationRecord &rec, bool closing) {
    if (dg.saa_samples > 0) {
      if (saa) {
        rec.f_saa = saa->value(rec.z);
      } else {
        rec.f_saa = saa_objective(problem, truth, rec.z, dg.saa_samples, diag_rng).mean;
      }
    }
    if (moreau_saa && (closing || rec.t % dg.moreau_every == 0)) {
      const StationarityReport sr = stationarity_report(
          *moreau_saa, problem.domain, rec.z, schedule.rho0, schedule.tau, sopt,
          diag_rng);
      rec.moreau_dist = sr.prox_dist;
      rec.moreau_grad = sr.grad_norm;
    }
  };

  long completed = 0;
  for (long t = 0; t <= T; ++t) {
    StepResult step;
    try {
      step = als_step(z, problem, truth, opts, schedule_eval(schedule, t), t, rng);
    } catch (const std::exception &e) {
      trace.failure = StepFailure(static_cast<int>(t), e.what()).what();
      break;
    }
    annotate(step.record, false);
    trace.records.push_back(std::move(step.record));
    z = std::move(step.z_next);
    completed = t + 1;
  }

  IterationRecord closing;
  closing.t = completed;
  closing.z = z;
  const ScheduleValues sv = schedule_eval(schedule, completed);
  closing.rho = sv.rho;
  closing.alpha = sv.alpha;
  closing.m = sv.m;
  closing.n = sv.n;
  closing.h = sv.h;
  annotate(closing, true);
  trace.records.push_back(std::move(closing));
  trace.final_point = z;

  if (trace.failure) {
    // The weights are only defined for a completed horizon.
    trace.output_index = completed;
    trace.output_point = z;
    return trace;
  }
  trace.weights = polyak_weights_or_uniform(schedule, T);
  trace.output_index = draw_index(trace.weights, rng);
  trace.output_point = trace.records[trace.output_index].z;
  return trace;
}

}  // namespace ddu
