#ifndef DDU_BENCHMARKS_TRANSPORT_HPP
#define DDU_BENCHMARKS_TRANSPORT_HPP

#include "ddu/types.hpp"

namespace ddu {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Recourse LP
///   min  sum_i p_i sum_j (D_ij - z_ij) - sum_i r_i sum_j z_ij
///   s.t. sum_i z_ij <= C_j,  0 <= z_ij <= max(D_ij, 0).
/// The linear term keeps D_ij itself, so negative entries still count.
struct TransportSolution {
  double value = 0.0;
  RowMat allocation;  // z, I x J
  Vec capacity_dual;  // v_j >= 0
  RowMat demand_dual;  // pi_ij >= 0 on z_ij <= D_ij+
  /// d value / d D_ij = p_i - pi_ij.
  RowMat subgradient;
  double dual_value = 0.0;
  double gap = 0.0;
  double complementarity = 0.0;
};

/// Successive shortest augmenting paths on source -> sites -> facilities -> sink.
TransportSolution transport_solve(const RowMat &D, const Vec &C, const Vec &r,
                                  const Vec &p);

/// Same LP by per-facility greedy filling in decreasing r_i + p_i; it is
/// exact because the only coupling constraint is each facility's capacity.
TransportSolution transport_solve_greedy(const RowMat &D, const Vec &C,
                                         const Vec &r, const Vec &p);

/// Optimal duals for a given optimal allocation, with gap and complementarity.
void transport_fill_duals(TransportSolution &sol, const RowMat &D, const Vec &C,
                          const Vec &r, const Vec &p);

}  // namespace ddu

#endif  // DDU_BENCHMARKS_TRANSPORT_HPP
