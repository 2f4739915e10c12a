#ifndef DDU_SIMULATION_HPP
#define DDU_SIMULATION_HPP

#include <string>
#include <vector>

#include "ddu/problem.hpp"
#include "ddu/types.hpp"

namespace ddu {

struct SamplePair {
  Vec predictor;
  Vec response;
  Aux aux;
};

using Dataset = std::vector<SamplePair>;

enum class OracleKind { adaptive, static_joint, fixed };
enum class ShapeDensity { uniform_cube, truncated_normal };
enum class MarginalKind { uniform, truncated_normal };

/// Predictor marginal of the static oracle. `mean`/`sd` are only read for the
/// truncated normal, which is truncated to the box.
struct StaticMarginal {
  MarginalKind kind = MarginalKind::uniform;
  Vec mean;
  Vec sd;
};

/// h_n = h0 * n^exponent.
struct BandwidthRule {
  double h0 = 1.0;
  double exponent = -1.0 / 6.0;

  double operator()(long n) const;
};

struct OracleConfig {
  OracleKind kind = OracleKind::adaptive;
  ShapeDensity shape = ShapeDensity::uniform_cube;
  BandwidthRule bandwidth;
  StaticMarginal marginal;
  std::string fixed_dataset_path;

  void validate() const;
};

std::string to_string(OracleKind kind);
std::string to_string(ShapeDensity shape);

/// Draw from N(mean, sd^2) truncated to [lo, hi] by inverse-CDF sampling.
double sample_truncated_normal(double mean, double sd, double lo, double hi,
                               Rng &rng);

/// One draw from the base shape density on [-1, 1]^d.
Vec sample_shape(ShapeDensity shape, int d, Rng &rng);

/// Adaptive oracle S_n: predictors from the shape density translated to z and
/// scaled by h, projected onto `box`; responses simulated at each predictor.
/// `projected` (optional) receives the number of predictors moved by the
/// projection.
Dataset draw_adaptive(const GroundTruthModel &model, const BoxDomain &box,
                      const Vec &z, int n, double h, ShapeDensity shape,
                      Rng &rng, int *projected = nullptr);

/// Adaptive residual batch W_m: m responses simulated at z itself.
Dataset draw_adaptive_residual_batch(const GroundTruthModel &model,
                                     const Vec &z, int m, Rng &rng);

Vec sample_marginal(const StaticMarginal &marginal, const BoxDomain &box,
                    Rng &rng);

/// Static oracle: predictors i.i.d. from the marginal over the box.
Dataset draw_static(const GroundTruthModel &model, const BoxDomain &box,
                    const StaticMarginal &marginal, int n, Rng &rng);

/// Reads the fixed-dataset CSV (x_0..x_{d-1}, xi_0..xi_{l-1}, aux...).
Dataset load_fixed(const std::string &path, int d, int ell);

void write_dataset_csv(const std::string &path, const Dataset &data);

}  // namespace ddu

#endif  // DDU_SIMULATION_HPP
