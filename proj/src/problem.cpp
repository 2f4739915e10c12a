#include "ddu/problem.hpp"

#include <cmath>
#include <numeric>

#include "ddu/errors.hpp"

namespace ddu {

BoxDomain::BoxDomain(Vec lower, Vec upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size())
    throw ContractViolation("box bounds must be nonempty and equal length");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
      throw ContractViolation("box bounds must be finite");
    if (!(lower_[i] < upper_[i]))
      throw ContractViolation("box coordinate " + std::to_string(i) +
                              " has empty interior");
  }
}

bool BoxDomain::contains(const Vec &x, double tol) const {
  if (x.size() != lower_.size()) return false;
  return ((x.array() >= lower_.array() - tol) &&
          (x.array() <= upper_.array() + tol))
      .all();
}

Vec BoxDomain::sample_uniform(Rng &rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec x(dim());
  for (int i = 0; i < dim(); ++i)
    x[i] = lower_[i] + unif(rng) * (upper_[i] - lower_[i]);
  return x;
}

BoxDomain BoxDomain::restrict(const std::vector<int> &index) const {
  Vec lo(index.size()), hi(index.size());
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] < 0 || index[k] >= dim())
      throw ContractViolation("restrict: coordinate out of range");
    lo[k] = lower_[index[k]];
    hi[k] = upper_[index[k]];
  }
  return BoxDomain(lo, hi);
}

Vec project(const Vec &x, const BoxDomain &domain) {
  if (x.size() != domain.dim())
    throw ContractViolation("project: dimension " + std::to_string(x.size()) +
                            " vs box dimension " +
                            std::to_string(domain.dim()));
  return x.cwiseMax(domain.lower()).cwiseMin(domain.upper());
}

void LipschitzData::validate() const {
  if (!(L_phi >= 0.0 && L_c >= 0.0 && L_q >= 0.0))
    throw ContractViolation("Lipschitz constants must be nonnegative");
  if (ell < 1) throw ContractViolation("response dimension must be >= 1");
}

double weak_convexity_bound(const LipschitzData &lip) {
  lip.validate();
  return lip.L_phi * (lip.L_c + lip.ell * lip.L_q);
}

Vec compose_response(const GroundTruthModel &model, const Vec &x,
                     const Vec &eps) {
  return model.mean(x) + model.sd_diag(x).cwiseProduct(eps);
}

Response sample_response(const GroundTruthModel &model, const Vec &x,
                         Rng &rng) {
  Residual r = model.residual_sampler(rng);
  return {compose_response(model, x, r.eps), std::move(r.aux)};
}

std::vector<int> DDUProblem::predictors() const {
  if (!predictor_index.empty()) return predictor_index;
  std::vector<int> all(dim());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

Vec DDUProblem::predictor_of(const Vec &x) const {
  if (predictor_index.empty()) return x;
  Vec p(predictor_index.size());
  for (std::size_t k = 0; k < predictor_index.size(); ++k)
    p[k] = x[predictor_index[k]];
  return p;
}

BoxDomain DDUProblem::predictor_domain() const {
  if (predictor_index.empty()) return domain;
  return domain.restrict(predictor_index);
}

double DDUProblem::bilinear(const Vec &x, const Vec &xi) const {
  if (!channels.linearize_whole) return 0.0;
  const auto &idx = channels.linearize_whole->decision_index;
  double h = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) h += x[idx[j]] * xi[j];
  return h;
}

double DDUProblem::evaluate(const Vec &x, const Vec &xi,
                            const Aux &aux) const {
  return cost(x, xi, bilinear(x, xi), aux, nullptr);
}

Vec DDUProblem::frozen_gradient(const Vec &x, const Vec &xi,
                                const Aux &aux) const {
  CostEval g;
  cost(x, xi, bilinear(x, xi), aux, &g);
  Vec grad = g.grad_x;
  if (channels.linearize_whole) {
    const auto &idx = channels.linearize_whole->decision_index;
    for (std::size_t j = 0; j < idx.size(); ++j) grad[idx[j]] += g.grad_w * xi[j];
  }
  return grad;
}

void DDUProblem::validate() const {
  if (response_dim < 1) throw ContractViolation("response_dim must be >= 1");
  if (!cost) throw ContractViolation("problem has no cost function");
  for (int i : predictor_index)
    if (i < 0 || i >= dim())
      throw ContractViolation("predictor index out of range");
  if (channels.linearize_whole) {
    const auto &idx = channels.linearize_whole->decision_index;
    if (static_cast<int>(idx.size()) != response_dim)
      throw ContractViolation("bilinear term must pair every response entry");
    for (int i : idx)
      if (i < 0 || i >= dim())
        throw ContractViolation("bilinear decision index out of range");
  }
  if (lipschitz) lipschitz->validate();
}

Mat lift_columns(const Mat &m, const std::vector<int> &index, int d) {
  if (index.empty()) {
    if (m.cols() != d) throw ContractViolation("lift_columns: width mismatch");
    return m;
  }
  if (static_cast<std::size_t>(m.cols()) != index.size())
    throw ContractViolation("lift_columns: width mismatch");
  Mat out = Mat::Zero(m.rows(), d);
  for (std::size_t k = 0; k < index.size(); ++k) out.col(index[k]) = m.col(k);
  return out;
}

}  // namespace ddu
