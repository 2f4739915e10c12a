#ifndef DDU_ESTIMATION_HPP
#define DDU_ESTIMATION_HPP

#include <functional>
#include <vector>

#include "ddu/simulation.hpp"
#include "ddu/types.hpp"

namespace ddu {

/// K(u) = (3/4)^d max{1 - |u|_inf^2, 0}.
double kernel_eval(const Vec &u);

struct LlrFit {
  Vec value;     // b, length ell
  Mat jacobian;  // A, ell x d
  /// Sum of K((X_i - z)/h) / K(0): a sample at z counts as one.
  double effective_samples = 0.0;
  /// Condition number of the kernel-weighted normal matrix of the
  /// bandwidth-scaled design.
  double condition = 0.0;
  int positive_weights = 0;
};

/// Local linear regression at z: per response coordinate, the minimizer of
/// sum_i h^-d K((X_i - z)/h) |y_i - b - A (X_i - z)|^2.
/// Throws InsufficientLocalData when fewer than d+1 weights are positive.
LlrFit llr_fit(const std::vector<Vec> &predictors, const Mat &responses,
               const Vec &z, double h);
LlrFit llr_fit(const Dataset &data, const Vec &z, double h);

struct VarianceFit {
  Vec sd_diag;       // q_hat_j
  Mat sd_jacobians;  // row j: gradient estimate of q_j
  int clamped = 0;   // coordinates lifted to the floor
};

/// Two-stage diagonal variance estimate: LLR of the squared first-stage
/// residuals gives v_hat ~ q^2 and its gradient; then
/// q_hat = sqrt(max{v_hat, floor^2}) and grad q_hat = grad v_hat / (2 q_hat),
/// zero where the floor binds.
VarianceFit variance_fit(const Dataset &data,
                         const std::function<Vec(const Vec &)> &mean_fit,
                         const Vec &z, double h, const Vec &floor);
VarianceFit variance_fit(const Dataset &data,
                         const std::function<Vec(const Vec &)> &mean_fit,
                         const Vec &z, double h, double floor);

/// Row j is eps[j] * grad q_j (the diagonal-Q form of eps^T grad q_j).
Mat assemble_G(const Mat &sd_jacobians, const Vec &eps);

struct LocalEstimate {
  Vec at;
  Vec mean;
  Mat mean_jacobian;
  Vec sd_diag;
  Mat sd_jacobians;
  Vec sd_inv_diag;
  double effective_samples = 0.0;
  double condition = 0.0;
  int floor_clamped = 0;
};

struct EstimationOptions {
  bool homoscedastic = false;
  /// Absolute variance floor; nonpositive selects 1e-3 x per-coordinate RMS
  /// of the responses.
  double variance_floor = 0.0;
};

Vec default_variance_floor(const Dataset &data);

/// Mean, Jacobian and (unless homoscedastic) the variance stage at z.
LocalEstimate estimate_local(const Dataset &data, const Vec &z, double h,
                             const EstimationOptions &options = {});

/// Builds a LocalEstimate from known quantities; the inverse is set so that
/// sd_inv_diag[j] * sd_diag[j] == 1 holds in floating point.
LocalEstimate make_local_estimate(Vec at, Vec mean, Mat mean_jacobian,
                                  Vec sd_diag, Mat sd_jacobians);

enum class ResidualSource { adaptive, static_joint };

struct ResidualBatch {
  std::vector<Vec> residuals;
  std::vector<Aux> aux;
  ResidualSource source = ResidualSource::adaptive;

  std::size_t size() const { return residuals.size(); }
};

/// eps_hat_i = Q_hat(z)^-1 (eta_i - c_hat(z)); every predictor must equal z.
ResidualBatch residuals_adaptive(const Dataset &batch,
                                 const LocalEstimate &est);

/// eps_hat_i = Q_hat(Y_i)^-1 (eta_i - c_hat(Y_i)), estimates aligned by index.
ResidualBatch residuals_static(const Dataset &batch,
                               const std::vector<LocalEstimate> &estimates);

}  // namespace ddu

#endif  // DDU_ESTIMATION_HPP
