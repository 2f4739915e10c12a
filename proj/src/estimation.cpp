#include "ddu/estimation.hpp"

#include <cmath>

#include "ddu/errors.hpp"

namespace ddu {

double kernel_eval(const Vec &u) {
  const double sup = u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
  const double core = 1.0 - sup * sup;
  if (core <= 0.0) return 0.0;
  return std::pow(0.75, static_cast<double>(u.size())) * core;
}

LlrFit llr_fit(const std::vector<Vec> &predictors, const Mat &responses,
               const Vec &z, double h) {
  if (!(h > 0.0)) throw ContractViolation("llr_fit: bandwidth must be > 0");
  const int n = static_cast<int>(predictors.size());
  if (responses.rows() != n)
    throw ContractViolation("llr_fit: predictor/response count mismatch");
  const int d = static_cast<int>(z.size());
  const int p = d + 1;
  const int ell = static_cast<int>(responses.cols());
  const double k0 = std::pow(0.75, static_cast<double>(d));

  // Scaled design rows [1, (X_i - z)/h]; the 1/h^d factor is common to all
  // weights and drops out of the minimizer.
  Mat normal = Mat::Zero(p, p);
  Mat rhs = Mat::Zero(p, ell);
  Vec a(p);
  double weight_sum = 0.0;
  int positive = 0;
  for (int i = 0; i < n; ++i) {
    if (predictors[i].size() != d)
      throw ContractViolation("llr_fit: predictor dimension mismatch");
    Vec u = (predictors[i] - z) / h;
    const double w = kernel_eval(u);
    if (w <= 0.0) continue;
    ++positive;
    weight_sum += w;
    a[0] = 1.0;
    a.tail(d) = u;
    normal.selfadjointView<Eigen::Lower>().rankUpdate(a, w);
    rhs.noalias() += w * a * responses.row(i);
  }
  if (positive < p)
    throw InsufficientLocalData(static_cast<std::size_t>(p - positive),
                                static_cast<std::size_t>(p));
  normal = normal.selfadjointView<Eigen::Lower>();
  normal /= weight_sum;
  rhs /= weight_sum;

  Eigen::SelfAdjointEigenSolver<Mat> eig(normal, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();

  // Ridge of 1e-8 x mean diagonal keeps degenerate designs solvable; two
  // refinement sweeps remove its bias on well-posed designs.
  const double ridge = 1e-8 * normal.trace() / p;
  Mat regularized = normal;
  regularized.diagonal().array() += ridge;
  Eigen::LLT<Mat> llt(regularized);
  if (llt.info() != Eigen::Success)
    throw NumericalBreakdown("llr_fit: normal matrix factorization failed");
  Mat beta = llt.solve(rhs);
  for (int sweep = 0; sweep < 2; ++sweep)
    beta += llt.solve(rhs - normal * beta);
  if (!beta.allFinite())
    throw NumericalBreakdown("llr_fit: non-finite coefficients");

  LlrFit fit;
  fit.value = beta.row(0).transpose();
  fit.jacobian = beta.bottomRows(d).transpose() / h;
  fit.effective_samples = weight_sum / k0;
  fit.condition = lmin > 0.0 ? lmax / lmin
                             : std::numeric_limits<double>::infinity();
  fit.positive_weights = positive;
  return fit;
}

LlrFit llr_fit(const Dataset &data, const Vec &z, double h) {
  if (data.empty()) throw InsufficientLocalData(z.size() + 1, z.size() + 1);
  std::vector<Vec> x;
  x.reserve(data.size());
  Mat y(data.size(), data.front().response.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    x.push_back(data[i].predictor);
    y.row(i) = data[i].response.transpose();
  }
  return llr_fit(x, y, z, h);
}

VarianceFit variance_fit(const Dataset &data,
                         const std::function<Vec(const Vec &)> &mean_fit,
                         const Vec &z, double h, const Vec &floor) {
  if (data.empty()) throw InsufficientLocalData(z.size() + 1, z.size() + 1);
  const int ell = static_cast<int>(data.front().response.size());
  if (floor.size() != ell || !(floor.array() > 0.0).all())
    throw ContractViolation("variance_fit: floor must be positive per entry");
  std::vector<Vec> x;
  x.reserve(data.size());
  Mat sq(data.size(), ell);
  for (std::size_t i = 0; i < data.size(); ++i) {
    x.push_back(data[i].predictor);
    sq.row(i) =
        (data[i].response - mean_fit(data[i].predictor)).array().square().matrix().transpose();
  }
  LlrFit stage2 = llr_fit(x, sq, z, h);
  VarianceFit out;
  out.sd_diag.resize(ell);
  out.sd_jacobians.resize(ell, z.size());
  for (int j = 0; j < ell; ++j) {
    const double f2 = floor[j] * floor[j];
    if (stage2.value[j] < f2) {
      // sqrt(max{v, floor^2}) is flat where the floor binds.
      out.sd_diag[j] = floor[j];
      out.sd_jacobians.row(j).setZero();
      ++out.clamped;
    } else {
      out.sd_diag[j] = std::sqrt(stage2.value[j]);
      out.sd_jacobians.row(j) = stage2.jacobian.row(j) / (2.0 * out.sd_diag[j]);
    }
  }
  return out;
}

VarianceFit variance_fit(const Dataset &data,
                         const std::function<Vec(const Vec &)> &mean_fit,
                         const Vec &z, double h, double floor) {
  if (data.empty()) throw InsufficientLocalData(z.size() + 1, z.size() + 1);
  return variance_fit(data, mean_fit, z, h,
                      Vec::Constant(data.front().response.size(), floor));
}

Mat assemble_G(const Mat &sd_jacobians, const Vec &eps) {
  if (sd_jacobians.rows() != eps.size())
    throw ContractViolation("assemble_G: residual length mismatch");
  return eps.asDiagonal() * sd_jacobians;
}

Vec default_variance_floor(const Dataset &data) {
  const int ell = static_cast<int>(data.front().response.size());
  Vec rms = Vec::Zero(ell);
  for (const auto &s : data) rms += s.response.array().square().matrix();
  rms = (rms / static_cast<double>(data.size())).cwiseSqrt();
  const double global = std::max(rms.maxCoeff(), 1e-9);
  return (1e-3 * rms.cwiseMax(1e-3 * global));
}

namespace {

double step_ulps(double v, int k) {
  for (; k > 0; --k) v = std::nextafter(v, INFINITY);
  for (; k < 0; ++k) v = std::nextafter(v, -INFINITY);
  return v;
}

// Moves q and 1/q by at most a few ulps so that fl(q * inv) == 1.
double reconcile_inverse(double &q) {
  const double inv0 = 1.0 / q;
  if (q * inv0 == 1.0) return inv0;
  for (int dq : {0, -1, 1, -2, 2, -3, 3}) {
    const double qc = step_ulps(q, dq);
    for (int di : {0, -1, 1, -2, 2}) {
      const double ic = step_ulps(1.0 / qc, di);
      if (qc * ic == 1.0) {
        q = qc;
        return ic;
      }
    }
  }
  return inv0;
}

}  // namespace

LocalEstimate make_local_estimate(Vec at, Vec mean, Mat mean_jacobian,
                                  Vec sd_diag, Mat sd_jacobians) {
  if (mean.size() != sd_diag.size() || mean_jacobian.rows() != mean.size() ||
      mean_jacobian.cols() != at.size() ||
      sd_jacobians.rows() != sd_diag.size() ||
      sd_jacobians.cols() != at.size())
    throw ContractViolation("local estimate: inconsistent dimensions");
  if (!(sd_diag.array() > 0.0).all())
    throw ContractViolation("local estimate: sd must be positive");
  LocalEstimate est;
  est.at = std::move(at);
  est.mean = std::move(mean);
  est.mean_jacobian = std::move(mean_jacobian);
  est.sd_diag = std::move(sd_diag);
  est.sd_jacobians = std::move(sd_jacobians);
  est.sd_inv_diag.resize(est.sd_diag.size());
  for (Eigen::Index j = 0; j < est.sd_diag.size(); ++j)
    est.sd_inv_diag[j] = reconcile_inverse(est.sd_diag[j]);
  return est;
}

LocalEstimate estimate_local(const Dataset &data, const Vec &z, double h,
                             const EstimationOptions &options) {
  LlrFit fit = llr_fit(data, z, h);
  const int ell = static_cast<int>(fit.value.size());
  const int d = static_cast<int>(z.size());
  Vec sd = Vec::Ones(ell);
  Mat sd_jac = Mat::Zero(ell, d);
  int clamped = 0;
  if (!options.homoscedastic) {
    const Vec &c0 = fit.value;
    const Mat &jac = fit.jacobian;
    auto mean_fit = [&](const Vec &x) -> Vec { return c0 + jac * (x - z); };
    Vec floor = options.variance_floor > 0.0
                    ? Vec::Constant(ell, options.variance_floor)
                    : default_variance_floor(data);
    VarianceFit vf = variance_fit(data, mean_fit, z, h, floor);
    sd = std::move(vf.sd_diag);
    sd_jac = std::move(vf.sd_jacobians);
    clamped = vf.clamped;
  }
  LocalEstimate est = make_local_estimate(z, fit.value, fit.jacobian,
                                          std::move(sd), std::move(sd_jac));
  est.effective_samples = fit.effective_samples;
  est.condition = fit.condition;
  est.floor_clamped = clamped;
  return est;
}

ResidualBatch residuals_adaptive(const Dataset &batch,
                                 const LocalEstimate &est) {
  if (batch.empty()) throw ContractViolation("residual batch is empty");
  ResidualBatch out;
  out.source = ResidualSource::adaptive;
  out.residuals.reserve(batch.size());
  out.aux.reserve(batch.size());
  for (const auto &s : batch) {
    if (s.predictor.size() != est.at.size() || s.predictor != est.at)
      throw ContractViolation(
          "residuals_adaptive: batch predictor differs from reference point");
    out.residuals.push_back(
        est.sd_inv_diag.cwiseProduct(s.response - est.mean));
    out.aux.push_back(s.aux);
  }
  return out;
}

ResidualBatch residuals_static(const Dataset &batch,
                               const std::vector<LocalEstimate> &estimates) {
  if (batch.empty()) throw ContractViolation("residual batch is empty");
  if (batch.size() != estimates.size())
    throw ContractViolation("residuals_static: " +
                            std::to_string(estimates.size()) +
                            " estimates for " + std::to_string(batch.size()) +
                            " residual samples");
  ResidualBatch out;
  out.source = ResidualSource::static_joint;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto &s = batch[i];
    const auto &est = estimates[i];
    if (s.predictor.size() != est.at.size() || s.predictor != est.at)
      throw ContractViolation("residuals_static: estimate " +
                              std::to_string(i) + " is not at Y_" +
                              std::to_string(i));
    out.residuals.push_back(
        est.sd_inv_diag.cwiseProduct(s.response - est.mean));
    out.aux.push_back(s.aux);
  }
  return out;
}

}  // namespace ddu
