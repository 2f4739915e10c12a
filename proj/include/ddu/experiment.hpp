#ifndef DDU_EXPERIMENT_HPP
#define DDU_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddu/als.hpp"
#include "ddu/baselines.hpp"
#include "ddu/benchmarks/facility.hpp"
#include "ddu/benchmarks/production_pricing.hpp"
#include "ddu/benchmarks/spam.hpp"
#include "ddu/benchmarks/synthetic.hpp"
#include "ddu/diagnostics.hpp"

namespace ddu {

struct EvaluationConfig {
  long saa_samples = 1000;
  bool crn = true;
  long moreau_every = 0;
  long moreau_samples = 20000;
};

struct RateConfig {
  std::vector<long> n_grid{250, 1000, 4000, 16000};
  int reps = 200;
  /// Empty selects the predictor-box midpoint.
  Vec z;
  std::vector<OracleKind> oracles{OracleKind::adaptive, OracleKind::static_joint};
};

struct ExperimentConfig {
  std::string problem;
  std::vector<std::string> methods;
  OracleConfig oracle;
  ParameterSchedule schedule;
  long T = 0;
  int replications = 1;
  std::uint64_t seed = 0;
  EvaluationConfig evaluation;
  std::string output = "ddu_out";
  /// Worker threads for replications; 0 selects the hardware concurrency.
  int workers = 0;
  ProxOptions prox;

  ProductionPricingSpec pp;
  std::uint64_t facility_instance_seed = 1;
  std::string facility_instance_path;
  bool facility_homoscedastic = false;
  double spam_kappa = 0.7;
  std::string spam_data;
  double spam_x0_bound = 20.0;
  SyntheticSpec synthetic;

  EquilibriumConfig baseline;
  int po_samples = 600;
  PoOptions po;
  RateConfig rate;

  /// The configuration with every default filled in (JSON text).
  std::string resolved;
};

/// Strict parse: unknown keys and type errors raise ConfigError naming the
/// JSON pointer of the offending value.
ExperimentConfig parse_config_text(const std::string &text);
ExperimentConfig parse_config(const std::string &path);

/// Problem, truth model and problem-specific state built from a config.
struct ProblemBundle {
  DDUProblem problem;
  GroundTruthModel truth;
  std::shared_ptr<FacilityStats> facility_stats;
  std::shared_ptr<FacilitySpec> facility;
  std::shared_ptr<SpamDataset> spam;
  SpamSpec spam_spec;
};

ProblemBundle make_bundle(const ExperimentConfig &config);

/// Per-problem defaults used when the config omits a section.
ParameterSchedule default_schedule(const std::string &problem);
double default_bandwidth(const std::string &problem);

/// ALS options (oracle, prox, diagnostics) as run_experiment sets them.
AlsOptions als_options(const ExperimentConfig &config);

struct ExperimentOutcome {
  std::vector<std::string> files;
  std::vector<std::string> failures;
  std::vector<std::string> not_applicable;
};

/// One trace per method and replication, summary.csv and manifest.json under
/// config.output. Replications run on config.workers threads; the artifacts
/// do not depend on the worker count.
ExperimentOutcome run_experiment(const ExperimentConfig &config);

/// Estimation-rate tables for every configured oracle kind.
std::vector<std::pair<OracleKind, RateTable>> run_rate(const ExperimentConfig &config);

/// Type-7 (linear interpolation) sample quantile.
double quantile7(std::vector<double> values, double prob);

struct QuantileRow {
  long t = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Per-t quantiles of `column` across traces; ragged traces are cut to the
/// shortest, with a note in `warnings`.
std::vector<QuantileRow> summarize(const std::vector<std::string> &paths,
                                   const std::string &column,
                                   std::vector<std::string> *warnings = nullptr);
void write_summary_csv(std::ostream &out, const std::vector<QuantileRow> &rows,
                       const std::string &column);

}  // namespace ddu

#endif  // DDU_EXPERIMENT_HPP
