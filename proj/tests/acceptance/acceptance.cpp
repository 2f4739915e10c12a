// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments pick
// a subset, e.g. `ddu_acceptance 4 5`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "ddu/als.hpp"
#include "ddu/baselines.hpp"
#include "ddu/benchmarks/transport.hpp"
#include "ddu/diagnostics.hpp"
#include "ddu/errors.hpp"
#include "ddu/experiment.hpp"
#include "ddu/schedule.hpp"
#include "ddu/surrogate.hpp"

using namespace ddu;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) { return quantile7(std::move(v), 0.5); }

ExperimentConfig config_for(const std::string &problem, const std::string &extra = "") {
  return parse_config_text("{\"problem\":\"" + problem +
                           "\",\"method\":[\"als\"],\"T\":1,\"seed\":1" + extra + "}");
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------- 1
Outcome surrogate_suite() {
  const auto t0 = Clock::now();
  std::ostringstream msg;
  bool ok = true;
  for (const std::string name : {"production_pricing", "facility", "spam", "synthetic"}) {
    const ExperimentConfig cfg = config_for(name);
    const ProblemBundle b = make_bundle(cfg);
    const DDUProblem &pr = b.problem;
    const GroundTruthModel &truth = b.truth;
    Rng rng(derive_seed(11, std::hash<std::string>{}(name)));
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> mdist(1, 6);
    double worst_touch = 0.0, worst_convex = 0.0, worst_exact = 0.0;
    int convex_pairs = 0;
    const int d = pr.dim();
    const double span = pr.domain.diameter() / std::sqrt(static_cast<double>(d));
    for (int inst = 0; inst < 1000; ++inst) {
      const Vec z = pr.domain.sample_uniform(rng);
      const Vec zp = pr.predictor_of(z);
      const double alpha = std::exp(std::log(0.1) + (std::log(10.0) - std::log(0.1)) * 0.5 *
                                                        (1.0 + unif(rng)));
      const int m = mdist(rng);
      ResidualBatch batch;
      for (int i = 0; i < m; ++i) {
        Residual r = truth.residual_sampler(rng);
        batch.residuals.push_back(r.eps);
        batch.aux.push_back(r.aux);
      }

      // Perturbed estimate.
      LocalEstimate ex = exact_local_estimate(truth, zp);
      Vec mean = ex.mean, sd = ex.sd_diag;
      Mat jac = ex.mean_jacobian, sdj = ex.sd_jacobians;
      // Mean up and sd down keeps c + q eps >= 0 wherever the truth has it.
      for (Eigen::Index k = 0; k < mean.size(); ++k) {
        mean[k] += 0.1 * (1.0 + std::abs(mean[k])) * std::abs(nrm(rng));
        sd[k] *= std::exp(-0.1 * std::abs(nrm(rng)));
      }
      for (Eigen::Index k = 0; k < jac.size(); ++k) {
        jac.data()[k] *= 1.0 + 0.1 * nrm(rng);
        sdj.data()[k] *= 1.0 + 0.1 * nrm(rng);
      }
      const LocalEstimate est = make_local_estimate(zp, mean, jac, sd, sdj);
      const SurrogateModel model = build_surrogate(z, est, batch, alpha, pr);

      // Touching identity against the sample cost at the reconstructed responses.
      double touch = 0.0;
      for (int i = 0; i < m; ++i) {
        const Vec xi = est.mean + est.sd_diag.cwiseProduct(batch.residuals[i]);
        touch += pr.evaluate(z, xi, batch.aux[i]);
      }
      touch /= m;
      worst_touch = std::max(worst_touch,
                             std::abs(model.value(z) - touch) / std::max(1.0, std::abs(touch)));

      // Strong convexity on pairs whose channels stay nonnegative where the
      // cost needs it (the transport recourse is convex only there).
      const double radius = name == "facility" ? 0.02 * span : 0.5 * span;
      for (int rep = 0; rep < 3; ++rep) {
        Vec x = z, y = z;
        for (int k = 0; k < d; ++k) {
          x[k] += radius * unif(rng);
          y[k] += radius * unif(rng);
        }
        x = project(x, pr.domain);
        y = project(y, pr.domain);
        if (name == "facility" &&
            (model.negative_channel_fraction(x) > 0.0 || model.negative_channel_fraction(y) > 0.0))
          continue;
        Vec g;
        const double fx = model.evaluate(x, &g);
        const double fy = model.value(y);
        const double slack = fy - fx - g.dot(y - x) - 0.5 * alpha * (y - x).squaredNorm();
        worst_convex = std::min(worst_convex, slack);
        ++convex_pairs;
      }

      // Exact-estimate surrogate against the conceptual one built by hand.
      const LocalEstimate exact = exact_local_estimate(truth, zp);
      const SurrogateModel conceptual_model = build_surrogate(z, exact, batch, alpha, pr);
      const Mat Jc = truth.mean_jacobian(zp);
      const Mat Jq = truth.sd_jacobian ? truth.sd_jacobian(zp) : Mat::Zero(pr.response_dim, zp.size());
      const Vec c = truth.mean(zp), q = truth.sd_diag(zp);
      Vec x = z;
      for (int k = 0; k < d; ++k) x[k] += 0.5 * span * unif(rng);
      x = project(x, pr.domain);
      const Vec dxp = pr.predictor_of(x) - zp;
      double hand = 0.0;
      for (int i = 0; i < m; ++i) {
        const Vec &e = batch.residuals[i];
        const Vec s0 = c + q.cwiseProduct(e);
        const Mat S = Jc + e.asDiagonal() * Jq;
        const Vec s = s0 + S * dxp;
        double w = 0.0;
        if (pr.channels.linearize_whole) {
          const auto &idx = pr.channels.linearize_whole->decision_index;
          for (std::size_t j = 0; j < idx.size(); ++j)
            w += z[idx[j]] * s0[j] + s0[j] * (x[idx[j]] - z[idx[j]]) +
                 z[idx[j]] * S.row(j).dot(dxp);
        }
        hand += pr.cost(x, s, w, batch.aux[i], nullptr);
      }
      hand = hand / m + 0.5 * alpha * (x - z).squaredNorm();
      worst_exact = std::max(worst_exact, std::abs(conceptual_model.value(x) - hand) /
                                              std::max(1.0, std::abs(hand)));
    }
    const bool this_ok = worst_touch <= 1e-12 && worst_convex >= -1e-9 && worst_exact <= 1e-12 &&
                         convex_pairs >= 1000;
    ok = ok && this_ok;
    msg << name << "{touch=" << worst_touch << " convex_slack=" << worst_convex << " over "
        << convex_pairs << " pairs, exact=" << worst_exact << "} ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  msg << "runtime=" << secs << "s";
  return {ok, msg.str()};
}

// ---------------------------------------------------------------- 2
Outcome llr_suite() {
  Rng rng(22);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> ddist(1, 10), ldist(1, 4);
  double worst_affine = 0.0;
  for (int model = 0; model < 100; ++model) {
    const int d = ddist(rng), ell = ldist(rng);
    const double h = 0.5;
    Vec z(d);
    for (int k = 0; k < d; ++k) z[k] = 3.0 * unif(rng);
    Vec b(ell);
    Mat A(ell, d);
    for (int j = 0; j < ell; ++j) b[j] = 5.0 * unif(rng);
    for (int k = 0; k < A.size(); ++k) A.data()[k] = 5.0 * unif(rng);
    const int n = 30 * (d + 1);
    std::vector<Vec> X;
    Mat Y(n, ell);
    for (int i = 0; i < n; ++i) {
      Vec x(d);
      for (int k = 0; k < d; ++k) x[k] = z[k] + h * unif(rng);
      X.push_back(x);
      Y.row(i) = (b + A * (x - z)).transpose();
    }
    const LlrFit fit = llr_fit(X, Y, z, h);
    const double scale = 1.0 + std::max(b.cwiseAbs().maxCoeff(), A.cwiseAbs().maxCoeff());
    worst_affine = std::max(worst_affine, (fit.value - b).cwiseAbs().maxCoeff() / scale);
    worst_affine = std::max(worst_affine, (fit.jacobian - A).cwiseAbs().maxCoeff() / scale);
  }

  // Two-stage variance fixture on the heteroscedastic synthetic model.
  const GroundTruthModel truth = synthetic_truth();
  const BoxDomain box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  const Vec z{{0.2, -0.3}};
  const double h = 0.4;
  const Dataset data = draw_adaptive(truth, box, z, 400, h, ShapeDensity::uniform_cube, rng);
  EstimationOptions eo;
  eo.variance_floor = 1e-6;
  const LocalEstimate est = estimate_local(data, z, h, eo);
  std::vector<Vec> X;
  Mat Y(data.size(), 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    X.push_back(data[i].predictor);
    Y.row(i) = data[i].response.transpose();
  }
  const Mat B1 = oracle::weighted_ls(X, Y, z, h);
  Mat sq(data.size(), 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vec fitted = B1.row(0).transpose() + B1.bottomRows(2).transpose() * (X[i] - z);
    sq.row(i) = (Y.row(i).transpose() - fitted).array().square().matrix().transpose();
  }
  const Mat B2 = oracle::weighted_ls(X, sq, z, h);
  double worst_var = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double q = std::sqrt(B2(0, j));
    const Vec gq = B2.col(j).tail(2) / (2.0 * q);
    worst_var = std::max(worst_var, std::abs(est.sd_diag[j] - q) / q);
    worst_var = std::max(worst_var, (est.sd_jacobians.row(j).transpose() - gq).cwiseAbs().maxCoeff() /
                                        (1.0 + gq.cwiseAbs().maxCoeff()));
    worst_var = std::max(worst_var, (est.mean_jacobian.row(j).transpose() - B1.col(j).tail(2))
                                        .cwiseAbs()
                                        .maxCoeff());
  }

  // Residual round trip.
  const Dataset w = draw_adaptive_residual_batch(truth, z, 50, rng);
  const ResidualBatch rb = residuals_adaptive(w, est);
  double worst_trip = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Vec back = est.mean + est.sd_diag.cwiseProduct(rb.residuals[i]);
    worst_trip = std::max(worst_trip, (back - w[i].response).cwiseAbs().maxCoeff() /
                                          (1.0 + w[i].response.cwiseAbs().maxCoeff()));
  }
  std::ostringstream msg;
  msg << "affine=" << worst_affine << " (<=1e-8) variance=" << worst_var
      << " (<=1e-8) round_trip=" << worst_trip << " (<=1e-10)";
  return {worst_affine <= 1e-8 && worst_var <= 1e-8 && worst_trip <= 1e-10, msg.str()};
}

// ---------------------------------------------------------------- 3
Outcome rate_check() {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = config_for("synthetic");
  const ProblemBundle b = make_bundle(cfg);
  const Vec z{{0.2, -0.3}};
  std::map<OracleKind, RateTable> tables;
  for (OracleKind kind : {OracleKind::adaptive, OracleKind::static_joint}) {
    OracleConfig o = cfg.oracle;
    o.kind = kind;
    Rng rng(derive_seed(33, static_cast<std::uint64_t>(kind)));
    tables[kind] = estimation_rate_experiment(b.truth, b.problem.domain, o, z,
                                              {250, 1000, 4000, 16000}, 200, rng);
  }
  const double sa = tables[OracleKind::adaptive].slope_jac;
  const double ss = tables[OracleKind::static_joint].slope_jac;
  const double secs = seconds_since(t0);
  std::ostringstream msg;
  msg << "adaptive_slope=" << sa << " in [-0.85,-0.50]; static_slope=" << ss
      << "; margin=" << (ss - sa) << " (>=0.1); runtime=" << secs << "s";
  return {sa >= -0.85 && sa <= -0.50 && ss - sa >= 0.1 && secs < 300.0, msg.str()};
}

// ---------------------------------------------------------------- 4, 5, 7
struct PricingRuns {
  bool ready = false;
  double fstar = 0.0;
  std::unique_ptr<oracle::PricingSaa> saa;
  // schedule label -> per-seed traces
  std::map<std::string, std::vector<RunTrace>> runs;
  double oracle_seconds = 0.0;
  double run_seconds = 0.0;
};

PricingRuns &pricing() {
  static PricingRuns pr;
  if (pr.ready) return pr;
  auto t0 = Clock::now();
  pr.saa = std::make_unique<oracle::PricingSaa>(100000, 4242);
  pr.fstar = oracle::pricing_fstar(*pr.saa, 20, 1500, 4343);
  pr.oracle_seconds = seconds_since(t0);

  t0 = Clock::now();
  const ExperimentConfig cfg = config_for("production_pricing");
  const ProblemBundle b = make_bundle(cfg);
  AlsOptions opt = als_options(cfg);
  opt.diagnostics.saa_samples = 0;
  std::map<std::string, ParameterSchedule> schedules;
  schedules["variable"] = cfg.schedule;
  ParameterSchedule c10 = cfg.schedule;
  c10.alpha0 = 10.0;
  c10.b = 0.0;
  schedules["const10"] = c10;
  ParameterSchedule c100 = c10;
  c100.alpha0 = 100.0;
  schedules["const100"] = c100;
  for (const auto &[label, sched] : schedules) {
    for (int s = 0; s < 20; ++s) {
      Rng start(derive_seed(500, s));
      const Vec z0 = b.problem.domain.sample_uniform(start);
      pr.runs[label].push_back(run_als(b.problem, b.truth, opt, sched, 200, 1000 + s, z0));
    }
  }
  pr.run_seconds = seconds_since(t0);
  pr.ready = true;
  return pr;
}

double trace_value_at(const PricingRuns &pr, const RunTrace &tr, long t) {
  for (const auto &r : tr.records)
    if (r.t == t) return pr.saa->value(r.z);
  throw std::runtime_error("trace has no record at t=" + std::to_string(t));
}

Outcome pricing_convergence() {
  const PricingRuns &pr = pricing();
  std::vector<double> gaps;
  int failed = 0;
  for (const auto &tr : pr.runs.at("variable")) {
    if (tr.failure) ++failed;
    gaps.push_back((pr.saa->value(tr.final_point) - pr.fstar) / std::abs(pr.fstar));
  }
  const double med = median(gaps);
  std::ostringstream msg;
  msg << "f*=" << pr.fstar << " median_rel_gap=" << med << " (<1e-2) over " << gaps.size()
      << " seeds, failed_runs=" << failed << ", oracle=" << pr.oracle_seconds
      << "s runs=" << pr.run_seconds << "s";
  return {med < 1e-2 && failed == 0 && pr.oracle_seconds + pr.run_seconds < 600.0, msg.str()};
}

Outcome pricing_constant_alpha() {
  const PricingRuns &pr = pricing();
  auto med_at = [&](const std::string &label, long t) {
    std::vector<double> v;
    for (const auto &tr : pr.runs.at(label)) v.push_back(trace_value_at(pr, tr, t));
    return median(v);
  };
  const double var200 = med_at("variable", 200), c10_200 = med_at("const10", 200);
  const double gap_var50 = med_at("variable", 50) - pr.fstar;
  const double gap_c100_50 = med_at("const100", 50) - pr.fstar;
  const double excess = (c10_200 - var200) / std::abs(var200);
  const double ratio = gap_c100_50 / gap_var50;
  std::ostringstream msg;
  msg << "const10@200 exceeds variable@200 by " << 100.0 * excess << "% (>=2%); const100 gap@50 / "
      << "variable gap@50 = " << ratio << " (>=1.5)";
  return {excess >= 0.02 && ratio >= 1.5, msg.str()};
}

Outcome pricing_stationarity() {
  const PricingRuns &pr = pricing();
  const ExperimentConfig cfg = config_for("production_pricing");
  const ProblemBundle b = make_bundle(cfg);
  Rng saa_rng(777);
  const SaaEvaluator saa(b.problem, b.truth, 20000, saa_rng);
  StationarityOptions so;
  so.lambda = 1.0 / (2.0 * cfg.schedule.rho0);
  std::vector<double> g10, g200;
  for (int s = 0; s < 10; ++s) {
    const RunTrace &tr = pr.runs.at("variable")[s];
    for (const auto &r : tr.records) {
      if (r.t != 10 && r.t != 200) continue;
      Rng rr(derive_seed(900, s * 1000 + r.t));
      const StationarityReport rep =
          stationarity_report(saa, b.problem.domain, r.z, cfg.schedule.rho0, cfg.schedule.tau, so, rr);
      (r.t == 10 ? g10 : g200).push_back(rep.grad_norm);
    }
  }
  const double m10 = median(g10), m200 = median(g200);
  std::ostringstream msg;
  msg << "median Moreau grad_norm t=10: " << m10 << ", t=200: " << m200 << " (need <= "
      << 0.5 * m10 << ")";
  return {g10.size() == 10 && g200.size() == 10 && m200 <= 0.5 * m10, msg.str()};
}

// ---------------------------------------------------------------- 6
Outcome polyak_check() {
  bool uniform_ok = true;
  for (double rho0 : {1.0, 2.0, 5.0})
    for (double tau : {0.0, 0.5})
      for (double alpha0 : {7.0, 10.0, 100.0})
        for (long T : {1L, 10L, 200L, 999L}) {
          ParameterSchedule s;
          s.rho0 = rho0, s.tau = tau, s.alpha0 = alpha0, s.a = 0.0, s.b = 0.0;
          const AveragingWeights w = polyak_weights(s, T);
          const double u = 1.0 / static_cast<double>(T + 1 - w.tbar);
          for (long t = w.tbar; t <= T; ++t) uniform_ok = uniform_ok && w.p[t] == u;
          uniform_ok = uniform_ok && w.tbar == 0;
        }
  double worst = 0.0;
  for (long T : {10L, 200L, 5000L}) {
    ParameterSchedule s;
    s.rho0 = 2.0, s.tau = 1.0, s.alpha0 = 3.0, s.a = 0.0, s.b = 0.5;
    const AveragingWeights w = polyak_weights(s, T);
    double total = 0.0;
    for (long t = w.tbar; t <= T; ++t) total += 1.0 / std::sqrt(t + 1.0);
    for (long t = w.tbar; t <= T; ++t)
      worst = std::max(worst, std::abs(w.p[t] - (1.0 / std::sqrt(t + 1.0)) / total));
  }
  std::ostringstream msg;
  msg << "constant schedules exactly uniform: " << (uniform_ok ? "yes" : "no")
      << "; b=1/2 max deviation from (t+1)^-1/2 = " << worst << " (<=1e-12)";
  return {uniform_ok && worst <= 1e-12, msg.str()};
}

// ---------------------------------------------------------------- 8
Outcome transport_check() {
  Rng rng(88);
  std::uniform_real_distribution<double> Dd(-2.0, 10.0), Cd(0.0, 15.0), rd(0.0, 5.0);
  double worst_ssp = 0.0, worst_greedy = 0.0, worst_gap = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    RowMat D(3, 3);
    Vec C(3), r(3), p(3);
    for (int k = 0; k < 9; ++k) D.data()[k] = Dd(rng);
    for (int k = 0; k < 3; ++k) C[k] = Cd(rng), r[k] = rd(rng), p[k] = rd(rng);
    const double ref = oracle::transport_value(D, C, r, p);
    const TransportSolution a = transport_solve(D, C, r, p);
    const TransportSolution g = transport_solve_greedy(D, C, r, p);
    worst_ssp = std::max(worst_ssp, std::abs(a.value - ref));
    worst_greedy = std::max(worst_greedy, std::abs(g.value - ref));
    worst_gap = std::max({worst_gap, a.gap, g.gap});
  }
  // Every transport solve of a facility run.
  const ExperimentConfig cfg = config_for("facility");
  const ProblemBundle b = make_bundle(cfg);
  AlsOptions opt = als_options(cfg);
  opt.diagnostics.saa_samples = 200;
  for (int s = 0; s < 3; ++s) run_als(b.problem, b.truth, opt, cfg.schedule, 20, 8800 + s);
  const double run_gap = b.facility_stats->max_gap;
  std::ostringstream msg;
  msg << "200 3x3 instances: |ssp-lp|=" << worst_ssp << " |greedy-lp|=" << worst_greedy
      << " gap=" << worst_gap << "; facility runs: " << b.facility_stats->solves
      << " solves, max gap=" << run_gap << " (all <=1e-9)";
  return {worst_ssp <= 1e-9 && worst_greedy <= 1e-9 && worst_gap <= 1e-9 && run_gap <= 1e-9 &&
              b.facility_stats->solves > 0,
          msg.str()};
}

// ---------------------------------------------------------------- 9
Outcome facility_comparison() {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = config_for("facility");
  const ProblemBundle b = make_bundle(cfg);
  const AlsOptions opt = als_options(cfg);
  Rng eval_rng(9090);
  const SaaEvaluator saa(b.problem, b.truth, 1000, eval_rng);
  const int per_iter = static_cast<int>(cfg.schedule.m0 + cfg.schedule.n0);
  std::ostringstream msg;
  bool ok = true;
  for (int budget : {200, 600, 1000}) {
    const long T = budget / per_iter;
    std::vector<double> als_best, po_best;
    for (int seed = 0; seed < 10; ++seed) {
      double best = std::numeric_limits<double>::infinity();
      for (int start = 0; start < 10; ++start) {
        const std::uint64_t s = derive_seed(derive_seed(9000 + budget, seed), start);
        Rng zr(derive_seed(s, 7));
        const Vec z0 = b.problem.domain.sample_uniform(zr);
        const RunTrace tr = run_als(b.problem, b.truth, opt, cfg.schedule, T, s, z0);
        best = std::min(best, saa.value(tr.final_point));
      }
      als_best.push_back(best);
      PoOptions po = cfg.po;
      po.multistart = 10;
      const PoResult res = po_lr_run(b.problem, b.truth, budget, po, derive_seed(9500 + budget, seed));
      double pbest = std::numeric_limits<double>::infinity();
      for (const Vec &x : res.start_points) pbest = std::min(pbest, saa.value(x));
      po_best.push_back(pbest);
    }
    const double ma = median(als_best), mp = median(po_best);
    ok = ok && ma <= mp;
    msg << "budget " << budget << " (ALS T=" << T << "): ALS " << ma << " vs PO-LR " << mp << "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 1200.0 && b.facility_stats->max_gap <= 1e-9;
  msg << "transport max gap=" << b.facility_stats->max_gap << "; runtime=" << secs << "s";
  return {ok, msg.str()};
}

// ---------------------------------------------------------------- 10
Outcome spam_comparison() {
  const auto t0 = Clock::now();
  std::ostringstream msg;
  bool ok = true;
  std::string data_note = "synthetic stand-in";
  std::string extra;
  if (std::ifstream("data/spambase.data")) {
    extra = ",\"problem_options\":{\"data\":\"data/spambase.data\"}";
    data_note = "Spambase";
  }
  for (double kappa : {0.7, 0.1}) {
    std::ostringstream ks;
    ks << extra.substr(0, extra.empty() ? 0 : extra.size() - 1)
       << (extra.empty() ? ",\"problem_options\":{" : ",") << "\"kappa\":" << kappa << "}";
    const ExperimentConfig cfg = config_for("spam", ks.str());
    const ProblemBundle b = make_bundle(cfg);
    std::map<std::string, double> best_mean;
    for (const std::string method : {"als", "spg", "spp"}) {
      double best = std::numeric_limits<double>::infinity();
      for (double alpha0 : {0.01, 0.1, 1.0}) {
        double total = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
          double rep_best = std::numeric_limits<double>::infinity();
          for (int start = 0; start < 10; ++start) {
            const std::uint64_t s = derive_seed(derive_seed(10000 + rep, start), 1);
            Rng zr(derive_seed(s, 3));
            const Vec z0 = b.problem.domain.sample_uniform(zr);
            RunTrace tr;
            if (method == "als") {
              ParameterSchedule sched = cfg.schedule;
              sched.alpha0 = alpha0;
              sched.rho0 = 0.5 * alpha0;
              tr = run_als(b.problem, b.truth, als_options(cfg), sched, 500, s, z0);
            } else {
              EquilibriumConfig eq = cfg.baseline;
              eq.alpha0 = alpha0;
              eq.batch = 10;
              eq.T = 2000;
              tr = method == "spg" ? spg_run(b.problem, b.truth, eq, s, z0)
                                   : spp_run(b.problem, b.truth, eq, s, z0);
            }
            rep_best = std::min(rep_best, spam_average_loss(tr.final_point, *b.spam, b.spam_spec));
          }
          total += rep_best;
        }
        best = std::min(best, total / 10.0);
      }
      best_mean[method] = best;
    }
    msg << "kappa=" << kappa << ": ALS " << best_mean["als"] << " SPG " << best_mean["spg"]
        << " SPP " << best_mean["spp"];
    if (kappa == 0.7) {
      const bool k_ok = best_mean["als"] <= 0.98 * best_mean["spg"] &&
                        best_mean["als"] <= 0.98 * best_mean["spp"];
      ok = ok && k_ok;
      msg << " (ALS <= 0.98 x both: " << (k_ok ? "yes" : "no") << "); ";
    } else {
      msg << " (reported only); ";
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < (data_note == "Spambase" ? 1800.0 : 300.0);
  msg << data_note << ", runtime=" << secs << "s";
  return {ok, msg.str()};
}

}  // namespace

int main(int argc, char **argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"surrogate exactness and strong convexity", surrogate_suite},
      {"local linear regression oracles", llr_suite},
      {"adaptive estimation rate", rate_check},
      {"production-pricing convergence", pricing_convergence},
      {"constant proximal parameter diverges or descends slowly", pricing_constant_alpha},
      {"Polyak averaging weights", polyak_check},
      {"stationarity descent", pricing_stationarity},
      {"transportation solver", transport_check},
      {"facility: ALS vs PO-LR", facility_comparison},
      {"spam: ALS vs SPG/SPP", spam_comparison},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] AC%d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
