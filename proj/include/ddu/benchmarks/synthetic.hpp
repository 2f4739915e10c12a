#ifndef DDU_BENCHMARKS_SYNTHETIC_HPP
#define DDU_BENCHMARKS_SYNTHETIC_HPP

#include "ddu/problem.hpp"

namespace ddu {

/// Smooth two-dimensional regression model on [-1, 1]^2:
///   c(x) = (sin(2 x1) + x2^2 / 2, cos(x1 + x2) + x1 x2),
///   q(x) = (0.3 + 0.1 x1^2, 0.4 + 0.1 sin(x2)) (ones when homoscedastic),
/// with standard normal noise scaled by `noise`.
struct SyntheticSpec {
  bool heteroscedastic = true;
  double noise = 1.0;
};

GroundTruthModel synthetic_truth(const SyntheticSpec &spec = {});

/// phi(x, s) = |s - (1, 0.5)|^2 / 2 + 0.05 |x|^2 over [-1, 1]^2 (smooth).
DDUProblem synthetic_problem(const SyntheticSpec &spec = {});

}  // namespace ddu

#endif  // DDU_BENCHMARKS_SYNTHETIC_HPP
