#ifndef DDU_PROBLEM_HPP
#define DDU_PROBLEM_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddu/types.hpp"

namespace ddu {

/// Axis-aligned feasible box with nonempty interior.
class BoxDomain {
 public:
  BoxDomain() = default;
  BoxDomain(Vec lower, Vec upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vec &lower() const { return lower_; }
  const Vec &upper() const { return upper_; }
  double diameter() const { return (upper_ - lower_).norm(); }
  Vec midpoint() const { return 0.5 * (lower_ + upper_); }
  bool contains(const Vec &x, double tol = 0.0) const;
  Vec sample_uniform(Rng &rng) const;
  /// Sub-box over the given coordinates.
  BoxDomain restrict(const std::vector<int> &index) const;

 private:
  Vec lower_;
  Vec upper_;
};

/// Component-wise clamp onto the box.
Vec project(const Vec &x, const BoxDomain &domain);

struct LipschitzData {
  double L_phi = 0.0;
  double L_c = 0.0;
  double L_q = 0.0;
  int ell = 1;

  void validate() const;
};

/// tau = L_phi (L_c + ell L_q): weak-convexity modulus of the expected cost.
double weak_convexity_bound(const LipschitzData &lip);

struct Residual {
  Vec eps;
  Aux aux;
};

struct Response {
  Vec xi;
  Aux aux;
};

/// Regression model xi(x) = c(x) + Q(x) eps with diagonal Q. Used as the
/// simulator behind the oracles and as the reference in diagnostics.
/// Functions take the predictor (not necessarily the full decision vector).
struct GroundTruthModel {
  int input_dim = 0;
  int response_dim = 0;
  std::function<Vec(const Vec &)> mean;
  std::function<Mat(const Vec &)> mean_jacobian;
  /// Diagonal of Q(x); strictly positive on the domain.
  std::function<Vec(const Vec &)> sd_diag;
  /// Row j is the gradient of q_j; may be empty for homoscedastic models.
  std::function<Mat(const Vec &)> sd_jacobian;
  std::function<Residual(Rng &)> residual_sampler;
};

/// xi = c(x) + Q(x) eps with (eps, aux) drawn from the residual sampler.
Response sample_response(const GroundTruthModel &model, const Vec &x,
                         Rng &rng);
Vec compose_response(const GroundTruthModel &model, const Vec &x,
                     const Vec &eps);

/// Value and one subgradient of phi(x, s, w; aux). `w` is the value of the
/// declared bilinear decision-response term (zero when none is declared).
struct CostEval {
  double value = 0.0;
  Vec grad_x;
  Vec grad_s;
  double grad_w = 0.0;
};

/// grad may be null, in which case only the value is required.
using CostFn = std::function<double(const Vec &x, const Vec &s, double w,
                                    const Aux &aux, CostEval *grad)>;

/// h(x, s) = sum_j x[decision_index[j]] * s[j].
struct BilinearTerm {
  std::vector<int> decision_index;
};

struct SurrogateChannelSpec {
  /// When set, the bilinear term is linearized as a whole at the reference
  /// point instead of being composed with the affine channel.
  std::optional<BilinearTerm> linearize_whole;
  /// Q treated as constant: residuals eps = eta - c_hat, no variance fit.
  bool homoscedastic = false;
};

struct DDUProblem {
  std::string name;
  BoxDomain domain;
  int response_dim = 0;
  /// Decision coordinates the response depends on (all when empty).
  std::vector<int> predictor_index;
  CostFn cost;
  bool cost_smooth = false;
  SurrogateChannelSpec channels;
  std::optional<LipschitzData> lipschitz;
  /// False when the cost is fully determined by the response, which makes
  /// frozen-sample gradient methods inapplicable.
  bool decision_enters_cost = true;

  int dim() const { return domain.dim(); }
  std::vector<int> predictors() const;
  Vec predictor_of(const Vec &x) const;
  BoxDomain predictor_domain() const;
  /// Exact h(x, xi) (zero when no bilinear term is declared).
  double bilinear(const Vec &x, const Vec &xi) const;
  /// phi(x, xi, h(x, xi); aux).
  double evaluate(const Vec &x, const Vec &xi, const Aux &aux) const;
  /// Gradient in x of phi(x, xi, h(x, xi); aux) with xi held fixed.
  Vec frozen_gradient(const Vec &x, const Vec &xi, const Aux &aux) const;
  void validate() const;
};

/// Embeds an ell x dp matrix over predictor columns into ell x d.
Mat lift_columns(const Mat &m, const std::vector<int> &index, int d);

}  // namespace ddu

#endif  // DDU_PROBLEM_HPP
