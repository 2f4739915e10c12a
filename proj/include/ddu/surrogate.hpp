#ifndef DDU_SURROGATE_HPP
#define DDU_SURROGATE_HPP

#include <vector>

#include "ddu/estimation.hpp"
#include "ddu/problem.hpp"

namespace ddu {

/// channel(x) = offset + slope (x - z). When the problem linearizes its
/// bilinear term, w(x) = bilinear_offset + bilinear_slope^T (x - z) replaces
/// the exact h(x, channel(x)).
struct AffineChannel {
  Vec offset;
  Mat slope;
  Aux aux;
  double bilinear_offset = 0.0;
  Vec bilinear_slope;
};

/// Learning-based mini-batch surrogate
///   F(x) = (1/m) sum_i phi(x, channel_i(x), w_i(x); aux_i) + (alpha/2)|x - z|^2,
/// alpha-strongly convex whenever phi is convex.
class SurrogateModel {
 public:
  SurrogateModel(Vec center, double alpha, std::vector<AffineChannel> channels,
                 const DDUProblem &problem);

  const Vec &center() const { return center_; }
  double alpha() const { return alpha_; }
  const std::vector<AffineChannel> &channels() const { return channels_; }
  const BoxDomain &domain() const { return domain_; }
  bool smooth() const { return smooth_; }

  Vec channel_value(std::size_t i, const Vec &x) const;
  double channel_bilinear(std::size_t i, const Vec &x) const;

  double value(const Vec &x) const;
  Vec subgradient(const Vec &x) const;
  /// Value, and a subgradient in `grad` when non-null.
  double evaluate(const Vec &x, Vec *grad) const;
  /// Batch-average cost part without the proximal term.
  double model_value(const Vec &x, Vec *grad = nullptr) const;
  /// (1/m) sum_i phi(z, channel_i(z), w_i(z); aux_i).
  double center_value() const;
  /// Share of channel entries that are negative at x.
  double negative_channel_fraction(const Vec &x) const;

 private:
  Vec center_;
  double alpha_;
  std::vector<AffineChannel> channels_;
  CostFn cost_;
  BoxDomain domain_;
  bool smooth_;
  bool bilinear_;
};

/// Assembles the surrogate at `center` from a predictor-space estimate and
/// empirical residuals: offset_i = c_hat + Q_hat eps_i,
/// slope_i = grad c_hat + G_hat(z, eps_i), lifted to the decision space.
SurrogateModel build_surrogate(const Vec &center, const LocalEstimate &est,
                               const ResidualBatch &residuals, double alpha,
                               const DDUProblem &problem);

/// LocalEstimate holding the true c, grad c, q, grad q at the predictor z.
LocalEstimate exact_local_estimate(const GroundTruthModel &truth,
                                   const Vec &z);

}  // namespace ddu

#endif  // DDU_SURROGATE_HPP
