#ifndef DDU_TYPES_HPP
#define DDU_TYPES_HPP

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace ddu {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Opaque per-sample payload carried next to a response (e.g. a class label).
/// Estimation never inspects it.
using Aux = std::vector<double>;

}  // namespace ddu

#endif  // DDU_TYPES_HPP
