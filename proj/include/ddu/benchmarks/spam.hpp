#ifndef DDU_BENCHMARKS_SPAM_HPP
#define DDU_BENCHMARKS_SPAM_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddu/problem.hpp"

namespace ddu {

/// Strategic spam classification. Decision (x_1..x_7, x0) with |x|_inf <= tau_x
/// and |x0| <= x0_bound.
struct SpamSpec {
  double kappa = 0.7;
  double tau_x = 1.4;
  double lambda_reg = 1e-3;
  double x0_bound = 20.0;

  /// The (kappa, tau_x) pairs of the study: 0.1/10, 0.3/3.3, 0.5/2, 0.7/1.4, 1/1.
  static SpamSpec for_kappa(double kappa);
  void validate() const;
};

struct SpamDataset {
  /// Columns of the source file kept, in ascending order.
  std::vector<int> selected;
  Mat features;  // rows x k, raw scale, nonnegative
  Vec labels;    // 0 or 1
  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
};

/// 57 feature columns plus a 0/1 label. Fits an l2-regularized logistic
/// regression on standardized features and keeps the `keep` columns with the
/// largest absolute weights, on their raw scale.
SpamDataset spam_ingest(std::istream &in, int keep = 7, double lambda = 1e-3);
SpamDataset spam_ingest(const std::string &path, int keep = 7, double lambda = 1e-3);

/// Columns whose weights drive the label in write_synthetic_spambase.
std::vector<int> synthetic_spam_signal_columns();
/// Nonnegative features with a planted logistic signal in seven columns.
void write_synthetic_spambase(std::ostream &out, int rows, std::uint64_t seed);

/// xi0 (1 - kappa x), component-wise.
Vec spam_response(const Vec &x, const Vec &xi0, double kappa);

/// log(1 + exp(s)) without overflow.
double log1p_exp(double s);

/// -label (x'xi + x0) + log(1 + exp(x'xi + x0)) + (lambda/2)|x|^2.
double spam_loss(const Vec &x, double x0, const Vec &xi, double label,
                 double lambda);

/// c(x) = mu0 (1 - kappa x), Q(x) = diag(sd0 (1 - kappa x)); residuals are
/// standardized dataset rows, with the label as the auxiliary payload.
GroundTruthModel spam_truth(const SpamDataset &data, const SpamSpec &spec);

/// Homoscedastic surrogate with x'xi linearized as a whole.
DDUProblem spam_problem(const SpamSpec &spec);

/// Exact average loss over the empirical distribution at decision (x, x0).
double spam_average_loss(const Vec &decision, const SpamDataset &data,
                         const SpamSpec &spec);
double spam_accuracy(const Vec &decision, const SpamDataset &data,
                     const SpamSpec &spec);

}  // namespace ddu

#endif  // DDU_BENCHMARKS_SPAM_HPP
