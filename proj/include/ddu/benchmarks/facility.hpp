#ifndef DDU_BENCHMARKS_FACILITY_HPP
#define DDU_BENCHMARKS_FACILITY_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "ddu/benchmarks/transport.hpp"
#include "ddu/problem.hpp"

namespace ddu {

/// Facility location with a transportation recourse. Decision
/// (x_1..x_J, y_1..y_J); response D flattened site-major (index i*J + j).
struct FacilitySpec {
  int I = 10;
  int J = 5;
  double lo = 0.0;
  double hi = 10.0;
  double u = 1.5;
  double gamma = 5.0;
  /// Distance floor keeping 1/(u l) finite when a facility sits on a site.
  double eps_l = 1e-6;
  Vec a, b;  // site coordinates
  Vec C;     // capacities
  Vec mu_tilde, sigma_tilde;
  Vec r, p;
  /// Surrogate built without the variance stage.
  bool homoscedastic = false;
  std::uint64_t seed = 0;

  /// Sites uniform on the box; C ~ U(20,40), mu~ ~ U(15,25), sigma~ ~ U(2,5);
  /// r = 1, p = 0.5.
  static FacilitySpec generate(std::uint64_t seed);
  void validate() const;
  int dim() const { return 2 * J; }
  int response_dim() const { return I * J; }
};

std::string facility_to_json(const FacilitySpec &spec);
FacilitySpec facility_from_json(const std::string &text);

struct FacilityTerms {
  RowMat l;     // floored squared distances
  RowMat beta;  // softmax weights, rows sum to 1
  Vec mu, sigma;
};

FacilityTerms facility_terms(const Vec &xy, const FacilitySpec &spec);

/// D_ij = beta_ij mu_i + beta_ij sigma_i eps_ij.
RowMat facility_demand(const Vec &xy, const RowMat &eps, const FacilitySpec &spec);

Vec facility_mean(const Vec &xy, const FacilitySpec &spec);
Mat facility_mean_jacobian(const Vec &xy, const FacilitySpec &spec);
Vec facility_sd(const Vec &xy, const FacilitySpec &spec);
Mat facility_sd_jacobian(const Vec &xy, const FacilitySpec &spec);

GroundTruthModel facility_truth(const FacilitySpec &spec);

/// Solver statistics collected by the facility cost across all calls.
struct FacilityStats {
  long solves = 0;
  double max_gap = 0.0;
  double max_complementarity = 0.0;
};

/// `stats` (optional) accumulates gap information from every recourse solve.
DDUProblem facility_problem(const FacilitySpec &spec,
                            std::shared_ptr<FacilityStats> stats = nullptr);

}  // namespace ddu

#endif  // DDU_BENCHMARKS_FACILITY_HPP
