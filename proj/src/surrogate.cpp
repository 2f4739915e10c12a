#include "ddu/surrogate.hpp"

#include <cmath>

#include "ddu/errors.hpp"

namespace ddu {

SurrogateModel::SurrogateModel(Vec center, double alpha,
                               std::vector<AffineChannel> channels,
                               const DDUProblem &problem)
    : center_(std::move(center)),
      alpha_(alpha),
      channels_(std::move(channels)),
      cost_(problem.cost),
      domain_(problem.domain),
      smooth_(problem.cost_smooth),
      bilinear_(problem.channels.linearize_whole.has_value()) {
  if (!(alpha_ > 0.0)) throw ContractViolation("surrogate: alpha must be > 0");
  if (channels_.empty())
    throw ContractViolation("surrogate: at least one channel required");
  if (center_.size() != domain_.dim())
    throw ContractViolation("surrogate: center dimension mismatch");
  for (const auto &c : channels_) {
    if (c.slope.cols() != center_.size() || c.slope.rows() != c.offset.size() ||
        c.offset.size() != problem.response_dim)
      throw ContractViolation("surrogate: channel dimensions inconsistent");
    if (bilinear_ && c.bilinear_slope.size() != center_.size())
      throw ContractViolation("surrogate: bilinear slope dimension mismatch");
  }
}

Vec SurrogateModel::channel_value(std::size_t i, const Vec &x) const {
  const auto &c = channels_[i];
  return c.offset + c.slope * (x - center_);
}

double SurrogateModel::channel_bilinear(std::size_t i, const Vec &x) const {
  if (!bilinear_) return 0.0;
  const auto &c = channels_[i];
  return c.bilinear_offset + c.bilinear_slope.dot(x - center_);
}

double SurrogateModel::model_value(const Vec &x, Vec *grad) const {
  if (x.size() != center_.size())
    throw ContractViolation("surrogate: point dimension mismatch");
  const Vec dx = x - center_;
  const double inv_m = 1.0 / static_cast<double>(channels_.size());
  double total = 0.0;
  if (grad) grad->setZero(x.size());
  CostEval ce;
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    const auto &c = channels_[i];
    const Vec s = c.offset + c.slope * dx;
    const double w = bilinear_ ? c.bilinear_offset + c.bilinear_slope.dot(dx) : 0.0;
    double v;
    try {
      v = cost_(x, s, w, c.aux, grad ? &ce : nullptr);
    } catch (const std::exception &e) {
      throw std::runtime_error("cost failed on channel " + std::to_string(i) +
                               ": " + e.what());
    }
    total += v;
    if (grad) {
      if (ce.grad_x.size() != x.size() || ce.grad_s.size() != s.size())
        throw ContractViolation("cost subgradient unavailable on channel " +
                                std::to_string(i));
      grad->noalias() += ce.grad_x + c.slope.transpose() * ce.grad_s;
      if (bilinear_) *grad += ce.grad_w * c.bilinear_slope;
    }
  }
  if (grad) *grad *= inv_m;
  return total * inv_m;
}

double SurrogateModel::evaluate(const Vec &x, Vec *grad) const {
  double v = model_value(x, grad);
  const Vec dx = x - center_;
  if (grad) grad->noalias() += alpha_ * dx;
  return v + 0.5 * alpha_ * dx.squaredNorm();
}

double SurrogateModel::value(const Vec &x) const { return evaluate(x, nullptr); }

Vec SurrogateModel::subgradient(const Vec &x) const {
  Vec g;
  evaluate(x, &g);
  return g;
}

double SurrogateModel::center_value() const {
  const double inv_m = 1.0 / static_cast<double>(channels_.size());
  double total = 0.0;
  for (const auto &c : channels_)
    total += cost_(center_, c.offset, bilinear_ ? c.bilinear_offset : 0.0,
                   c.aux, nullptr);
  return total * inv_m;
}

double SurrogateModel::negative_channel_fraction(const Vec &x) const {
  long neg = 0, all = 0;
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    const Vec s = channel_value(i, x);
    neg += (s.array() < 0.0).count();
    all += s.size();
  }
  return all ? static_cast<double>(neg) / static_cast<double>(all) : 0.0;
}

SurrogateModel build_surrogate(const Vec &center, const LocalEstimate &est,
                               const ResidualBatch &residuals, double alpha,
                               const DDUProblem &problem) {
  if (!(alpha > 0.0)) throw ContractViolation("build_surrogate: alpha <= 0");
  if (residuals.size() == 0)
    throw ContractViolation("build_surrogate: empty residual batch");
  const int d = problem.dim();
  const int ell = problem.response_dim;
  if (center.size() != d)
    throw ContractViolation("build_surrogate: center dimension mismatch");
  const auto predictors = problem.predictors();
  if (est.mean.size() != ell || est.at.size() != static_cast<Eigen::Index>(predictors.size()))
    throw ContractViolation("build_surrogate: estimate dimensions mismatch");
  if (!predictors.empty() && problem.predictor_of(center) != est.at)
    throw ContractViolation("build_surrogate: estimate not taken at center");

  std::vector<AffineChannel> channels;
  channels.reserve(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const Vec &eps = residuals.residuals[i];
    if (eps.size() != ell)
      throw ContractViolation("build_surrogate: residual length mismatch");
    AffineChannel ch;
    ch.offset = est.mean + est.sd_diag.cwiseProduct(eps);
    ch.slope = lift_columns(est.mean_jacobian + assemble_G(est.sd_jacobians, eps),
                            problem.predictor_index, d);
    ch.aux = residuals.aux.size() > i ? residuals.aux[i] : Aux{};
    if (problem.channels.linearize_whole) {
      // h(x) = sum_j x[k_j] s_j(x) expanded to first order at z.
      const auto &idx = problem.channels.linearize_whole->decision_index;
      ch.bilinear_slope = Vec::Zero(d);
      double h0 = 0.0;
      for (int j = 0; j < ell; ++j) {
        h0 += center[idx[j]] * ch.offset[j];
        ch.bilinear_slope[idx[j]] += ch.offset[j];
        ch.bilinear_slope.noalias() += center[idx[j]] * ch.slope.row(j).transpose();
      }
      ch.bilinear_offset = h0;
    }
    channels.push_back(std::move(ch));
  }
  return SurrogateModel(center, alpha, std::move(channels), problem);
}

LocalEstimate exact_local_estimate(const GroundTruthModel &truth,
                                   const Vec &z) {
  Mat sd_jac = truth.sd_jacobian ? truth.sd_jacobian(z)
                                 : Mat::Zero(truth.response_dim, z.size());
  return make_local_estimate(z, truth.mean(z), truth.mean_jacobian(z),
                             truth.sd_diag(z), std::move(sd_jac));
}

}  // namespace ddu
