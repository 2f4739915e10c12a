#include "ddu/diagnostics.hpp"

#include <cmath>
#include <ostream>

#include "ddu/csv.hpp"
#include "ddu/errors.hpp"

namespace ddu {

SaaEvaluator::SaaEvaluator(const DDUProblem &problem,
                           const GroundTruthModel &truth, long samples,
                           Rng &rng)
    : problem_(problem), truth_(truth) {
  if (samples < 2) throw ContractViolation("saa: need at least 2 samples");
  draws_.reserve(samples);
  for (long i = 0; i < samples; ++i) draws_.push_back(truth.residual_sampler(rng));
}

double SaaEvaluator::value(const Vec &x, Vec *grad) const {
  const Vec xp = problem_.predictor_of(x);
  const Vec c = truth_.mean(xp);
  const Vec q = truth_.sd_diag(xp);
  const int d = problem_.dim();
  const auto &bil = problem_.channels.linearize_whole;
  Vec x_sel;
  if (bil) {
    x_sel.resize(problem_.response_dim);
    for (int j = 0; j < problem_.response_dim; ++j)
      x_sel[j] = x[bil->decision_index[j]];
  }
  double total = 0.0;
  Vec s1, s2;
  CostEval ce;
  if (grad) {
    grad->setZero(d);
    s1 = Vec::Zero(c.size());
    s2 = Vec::Zero(c.size());
  }
  for (const auto &r : draws_) {
    const Vec xi = c + q.cwiseProduct(r.eps);
    const double w = problem_.bilinear(x, xi);
    total += problem_.cost(x, xi, w, r.aux, grad ? &ce : nullptr);
    if (grad) {
      // d xi / dx = J_c + diag(eps) J_q; the bilinear term adds
      // grad_w (sum_j xi_j e_{k_j} + J_xi^T x_sel).
      *grad += ce.grad_x;
      Vec gs = ce.grad_s;
      if (bil) {
        gs += ce.grad_w * x_sel;
        for (int j = 0; j < problem_.response_dim; ++j)
          (*grad)[bil->decision_index[j]] += ce.grad_w * xi[j];
      }
      s1 += gs;
      s2 += r.eps.cwiseProduct(gs);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(draws_.size());
  if (grad) {
    Mat jc = lift_columns(truth_.mean_jacobian(xp), problem_.predictor_index, d);
    *grad += jc.transpose() * s1;
    if (truth_.sd_jacobian) {
      Mat jq = lift_columns(truth_.sd_jacobian(xp), problem_.predictor_index, d);
      *grad += jq.transpose() * s2;
    }
    *grad *= inv_n;
  }
  return total * inv_n;
}

std::vector<double> SaaEvaluator::costs(const Vec &x) const {
  const Vec xp = problem_.predictor_of(x);
  const Vec c = truth_.mean(xp);
  const Vec q = truth_.sd_diag(xp);
  std::vector<double> out;
  out.reserve(draws_.size());
  for (const auto &r : draws_) {
    const Vec xi = c + q.cwiseProduct(r.eps);
    out.push_back(problem_.evaluate(x, xi, r.aux));
  }
  return out;
}

namespace {

SaaEstimate mean_stderr(const std::vector<double> &v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double c : v) mean += c;
  mean /= n;
  double ss = 0.0;
  for (double c : v) ss += (c - mean) * (c - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

SaaEstimate SaaEvaluator::estimate(const Vec &x) const {
  return mean_stderr(costs(x));
}

SaaEstimate saa_objective(const DDUProblem &problem,
                          const GroundTruthModel &truth, const Vec &x, long N,
                          Rng &rng) {
  if (N < 2) throw ContractViolation("saa_objective: N must be >= 2");
  const Vec xp = problem.predictor_of(x);
  std::vector<double> v;
  v.reserve(N);
  for (long i = 0; i < N; ++i) {
    Response r = sample_response(truth, xp, rng);
    v.push_back(problem.evaluate(x, r.xi, r.aux));
  }
  return mean_stderr(v);
}

MoreauResidual moreau_residual(const Vec &x, const Vec &zhat, double lambda) {
  if (!(lambda > 0.0)) throw ContractViolation("moreau_residual: lambda <= 0");
  MoreauResidual r;
  r.dist = (x - zhat).norm();
  r.grad_norm = r.dist / lambda;
  return r;
}

StationarityReport stationarity_report(const SaaEvaluator &saa,
                                       const BoxDomain &box, const Vec &x,
                                       double rho, double tau,
                                       const StationarityOptions &options,
                                       Rng &rng) {
  if (!(rho > tau)) throw ContractViolation("stationarity_report: need rho > tau");
  const double lambda = options.lambda > 0.0 ? options.lambda : 0.5 / rho;
  Objective f = [&saa](const Vec &y, Vec *g) { return saa.value(y, g); };
  std::vector<Vec> starts;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double radius = options.restart_radius * box.diameter();
  for (int r = 1; r < options.restarts; ++r) {
    Vec s(x.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = x[i] + radius * unif(rng);
    starts.push_back(project(s, box));
  }
  MoreauReport mr =
      prox_point(f, tau, lambda, x, box, options.smooth, options.prox, starts);
  StationarityReport rep;
  rep.at = x;
  rep.prox = mr.prox;
  rep.lambda = lambda;
  const MoreauResidual res = moreau_residual(x, mr.prox, lambda);
  rep.prox_dist = res.dist;
  rep.grad_norm = res.grad_norm;
  rep.saa_samples = saa.size();
  return rep;
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ContractViolation("loglog_slope: need two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

RateTable estimation_rate_experiment(const GroundTruthModel &truth,
                                     const BoxDomain &box,
                                     const OracleConfig &oracle, const Vec &z,
                                     const std::vector<long> &n_grid, int reps,
                                     Rng &rng) {
  if (reps < 30) throw ContractViolation("rate experiment: reps must be >= 30");
  if (n_grid.size() < 2)
    throw ContractViolation("rate experiment: need at least two grid points");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw ContractViolation("rate experiment: n_grid must be increasing");
  if (oracle.kind == OracleKind::fixed)
    throw ContractViolation("rate experiment: fixed oracle has no sampling law");
  const Vec c0 = truth.mean(z);
  const Mat j0 = truth.mean_jacobian(z);
  RateTable table;
  std::vector<double> ns, mse_c, mse_j;
  for (long n : n_grid) {
    const double h = oracle.bandwidth(n);
    RateRow row;
    row.n = n;
    row.h = h;
    row.reps = reps;
    for (int r = 0; r < reps; ++r) {
      for (int attempt = 0;; ++attempt) {
        Dataset data =
            oracle.kind == OracleKind::adaptive
                ? draw_adaptive(truth, box, z, static_cast<int>(n), h,
                                oracle.shape, rng, nullptr)
                : draw_static(truth, box, oracle.marginal, static_cast<int>(n), rng);
        try {
          const LlrFit fit = llr_fit(data, z, h);
          row.mse_mean += (fit.value - c0).squaredNorm();
          row.mse_jac += (fit.jacobian - j0).squaredNorm();
          break;
        } catch (const InsufficientLocalData &) {
          if (attempt >= 9) throw;
        }
      }
    }
    row.mse_mean /= reps;
    row.mse_jac /= reps;
    ns.push_back(static_cast<double>(n));
    mse_c.push_back(row.mse_mean);
    mse_j.push_back(row.mse_jac);
    table.rows.push_back(row);
  }
  table.slope_mean = loglog_slope(ns, mse_c);
  table.slope_jac = loglog_slope(ns, mse_j);
  return table;
}

void write_rate_csv(std::ostream &out, const RateTable &table) {
  write_csv_row(out, std::vector<std::string>{"n", "h", "mse_mean", "mse_jac", "reps"});
  for (const auto &r : table.rows)
    write_csv_row(out, std::vector<std::string>{
                           std::to_string(r.n), format_double(r.h),
                           format_double(r.mse_mean), format_double(r.mse_jac),
                           std::to_string(r.reps)});
}

}  // namespace ddu
