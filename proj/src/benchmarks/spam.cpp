#include "ddu/benchmarks/spam.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>

#include "ddu/csv.hpp"
#include "ddu/errors.hpp"
#include "ddu/prox_solver.hpp"

namespace ddu {

SpamSpec SpamSpec::for_kappa(double kappa) {
  static const std::pair<double, double> pairs[] = {
      {0.1, 10.0}, {0.3, 3.3}, {0.5, 2.0}, {0.7, 1.4}, {1.0, 1.0}};
  for (const auto &[k, t] : pairs)
    if (std::abs(k - kappa) < 1e-12) {
      SpamSpec s;
      s.kappa = k;
      s.tau_x = t;
      return s;
    }
  throw ContractViolation("spam: no weight bound listed for kappa " + std::to_string(kappa));
}

void SpamSpec::validate() const {
  if (!(kappa > 0.0) || !(tau_x > 0.0))
    throw ContractViolation("spam: kappa and tau_x must be positive");
  if (kappa * tau_x > 1.0 + 1e-12)
    throw ContractViolation("spam: need kappa * tau_x <= 1");
  if (!(lambda_reg >= 0.0) || !(x0_bound > 0.0))
    throw ContractViolation("spam: bad regularization or intercept bound");
}

double log1p_exp(double s) {
  return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

namespace {

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace

SpamDataset spam_ingest(std::istream &in, int keep, double lambda) {
  const CsvTable table = read_numeric_csv(in);
  if (table.rows.empty()) throw ParseError("spam: empty dataset");
  const std::size_t n = table.rows.size();
  const int nf = 57;
  for (std::size_t r = 0; r < n; ++r) {
    if (table.rows[r].size() != 58)
      throw ParseError("spam: expected 58 columns, found " +
                           std::to_string(table.rows[r].size()),
                       table.line_numbers[r]);
    const double y = table.rows[r][57];
    if (y != 0.0 && y != 1.0)
      throw ParseError("spam: label must be 0 or 1", table.line_numbers[r]);
  }
  if (keep < 1 || keep > nf) throw ContractViolation("spam: keep out of range");
  Mat raw(n, nf);
  Vec y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (int k = 0; k < nf; ++k) raw(r, k) = table.rows[r][k];
    y[r] = table.rows[r][57];
  }
  const Vec mean = raw.colwise().mean();
  Vec sd = ((raw.rowwise() - mean.transpose()).array().square().colwise().sum() /
            static_cast<double>(n)).sqrt();
  for (int k = 0; k < nf; ++k)
    if (!(sd[k] > 0.0)) sd[k] = 1.0;
  const Mat zf = (raw.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();

  // Weights (w, bias), both lightly regularized so the problem is strongly convex.
  const double mu = std::max(lambda, 1e-6);
  Objective f = [&](const Vec &theta, Vec *g) {
    const Vec s = zf * theta.head(nf) + Vec::Constant(n, theta[nf]);
    double v = 0.0;
    Vec resid(n);
    for (std::size_t r = 0; r < n; ++r) {
      v += -y[r] * s[r] + log1p_exp(s[r]);
      resid[r] = sigmoid(s[r]) - y[r];
    }
    v = v / n + 0.5 * mu * theta.squaredNorm();
    if (g) {
      g->resize(nf + 1);
      g->head(nf) = zf.transpose() * resid / static_cast<double>(n);
      (*g)[nf] = resid.sum() / static_cast<double>(n);
      *g += mu * theta;
    }
    return v;
  };
  const BoxDomain box(Vec::Constant(nf + 1, -100.0), Vec::Constant(nf + 1, 100.0));
  const ProxSolveReport rep =
      minimize_strongly_convex(f, mu, box, Vec::Zero(nf + 1), true, {1e-8, 20000, 10});
  std::vector<int> idx(nf);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&rep](int a, int b) {
    return std::abs(rep.x[a]) > std::abs(rep.x[b]);
  });
  SpamDataset out;
  out.selected.assign(idx.begin(), idx.begin() + keep);
  std::sort(out.selected.begin(), out.selected.end());
  out.features.resize(n, keep);
  for (int k = 0; k < keep; ++k) out.features.col(k) = raw.col(out.selected[k]);
  if ((out.features.array() < 0.0).any())
    throw ParseError("spam: selected features must be nonnegative");
  out.labels = y;
  return out;
}

SpamDataset spam_ingest(const std::string &path, int keep, double lambda) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spam dataset '" + path + "'");
  return spam_ingest(in, keep, lambda);
}

std::vector<int> synthetic_spam_signal_columns() { return {2, 6, 15, 20, 23, 44, 52}; }

void write_synthetic_spambase(std::ostream &out, int rows, std::uint64_t seed) {
  Rng rng(seed);
  std::exponential_distribution<double> feat(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto signal = synthetic_spam_signal_columns();
  const double weight[] = {2.5, -2.0, 2.2, -2.4, 2.0, 2.6, -2.2};
  std::vector<std::string> header;
  for (int k = 0; k < 57; ++k) header.push_back("f" + std::to_string(k));
  header.push_back("spam");
  write_csv_row(out, header);
  for (int r = 0; r < rows; ++r) {
    std::vector<double> row(58);
    for (int k = 0; k < 57; ++k)
      row[k] = std::round(feat(rng) * 1000.0) / 1000.0;
    double score = 0.0;
    for (std::size_t s = 0; s < signal.size(); ++s)
      score += weight[s] * (row[signal[s]] - 1.0);
    row[57] = unif(rng) < sigmoid(score) ? 1.0 : 0.0;
    write_csv_row(out, row);
  }
}

Vec spam_response(const Vec &x, const Vec &xi0, double kappa) {
  if (x.size() != xi0.size()) throw ContractViolation("spam_response: length mismatch");
  return xi0.cwiseProduct((1.0 - kappa * x.array()).matrix());
}

double spam_loss(const Vec &x, double x0, const Vec &xi, double label,
                 double lambda) {
  const double s = x.dot(xi) + x0;
  return -label * s + log1p_exp(s) + 0.5 * lambda * x.squaredNorm();
}

GroundTruthModel spam_truth(const SpamDataset &data, const SpamSpec &spec) {
  spec.validate();
  if (data.size() == 0) throw ContractViolation("spam_truth: empty dataset");
  const int k = static_cast<int>(data.features.cols());
  const Vec mu0 = data.features.colwise().mean();
  Vec sd0 = ((data.features.rowwise() - mu0.transpose()).array().square().colwise().sum() /
             static_cast<double>(data.size())).sqrt();
  for (int j = 0; j < k; ++j)
    if (!(sd0[j] > 0.0)) sd0[j] = 1.0;
  const double kappa = spec.kappa;
  auto shrink = [kappa](const Vec &x) -> Vec {
    return (1.0 - kappa * x.array()).max(1e-12).matrix();
  };
  GroundTruthModel m;
  m.input_dim = k;
  m.response_dim = k;
  m.mean = [mu0, kappa](const Vec &x) -> Vec { return mu0.cwiseProduct((1.0 - kappa * x.array()).matrix()); };
  m.mean_jacobian = [mu0, kappa](const Vec &) -> Mat { return Mat((-kappa * mu0).asDiagonal()); };
  m.sd_diag = [sd0, shrink](const Vec &x) -> Vec { return sd0.cwiseProduct(shrink(x)); };
  m.sd_jacobian = [sd0, kappa](const Vec &) -> Mat { return Mat((-kappa * sd0).asDiagonal()); };
  const Mat feats = data.features;
  const Vec labels = data.labels;
  m.residual_sampler = [feats, labels, mu0, sd0](Rng &rng) {
    std::uniform_int_distribution<Eigen::Index> pick(0, feats.rows() - 1);
    const Eigen::Index r = pick(rng);
    Residual res;
    res.eps = (feats.row(r).transpose() - mu0).cwiseQuotient(sd0);
    res.aux = {labels[r]};
    return res;
  };
  return m;
}

DDUProblem spam_problem(const SpamSpec &spec) {
  spec.validate();
  DDUProblem pr;
  pr.name = "spam";
  Vec lo(8), hi(8);
  lo << Vec::Constant(7, -spec.tau_x), -spec.x0_bound;
  hi << Vec::Constant(7, spec.tau_x), spec.x0_bound;
  pr.domain = BoxDomain(lo, hi);
  pr.response_dim = 7;
  pr.predictor_index = {0, 1, 2, 3, 4, 5, 6};
  pr.channels.linearize_whole = BilinearTerm{{0, 1, 2, 3, 4, 5, 6}};
  pr.channels.homoscedastic = true;
  pr.cost_smooth = true;
  const double lambda = spec.lambda_reg;
  pr.cost = [lambda](const Vec &x, const Vec &s, double w, const Aux &aux,
                     CostEval *g) {
    if (aux.empty()) throw ContractViolation("spam cost: label missing");
    const double label = aux[0];
    const double score = w + x[7];
    const double v = -label * score + log1p_exp(score) + 0.5 * lambda * x.head(7).squaredNorm();
    if (g) {
      const double dscore = sigmoid(score) - label;
      g->value = v;
      g->grad_x = Vec::Zero(8);
      g->grad_x.head(7) = lambda * x.head(7);
      g->grad_x[7] = dscore;
      g->grad_s = Vec::Zero(s.size());
      g->grad_w = dscore;
    }
    return v;
  };
  return pr;
}

double spam_average_loss(const Vec &decision, const SpamDataset &data,
                         const SpamSpec &spec) {
  const Vec x = decision.head(7);
  double total = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const Vec xi = spam_response(x, data.features.row(r).transpose(), spec.kappa);
    total += spam_loss(x, decision[7], xi, data.labels[r], spec.lambda_reg);
  }
  return total / static_cast<double>(data.size());
}

double spam_accuracy(const Vec &decision, const SpamDataset &data,
                     const SpamSpec &spec) {
  const Vec x = decision.head(7);
  long hits = 0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const Vec xi = spam_response(x, data.features.row(r).transpose(), spec.kappa);
    const bool spam = x.dot(xi) + decision[7] > 0.0;
    hits += spam == (data.labels[r] > 0.5);
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace ddu
