#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddu/als.hpp"
#include "ddu/baselines.hpp"
#include "ddu/benchmarks/facility.hpp"
#include "ddu/benchmarks/production_pricing.hpp"
#include "ddu/errors.hpp"
#include "ddu/experiment.hpp"

using namespace ddu;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_trace(const std::string &name, const std::vector<double> &v) {
  std::ofstream out(name);
  out << "t,f_saa\n";
  for (std::size_t t = 0; t < v.size(); ++t) out << t << ',' << v[t] << '\n';
  return name;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal config takes defaults") {
    const ExperimentConfig c =
        parse_config_text(R"({"problem":"production_pricing","method":["als"],"T":5,"seed":1})");
    CHECK(c.methods == std::vector<std::string>{"als"});
    CHECK(c.replications == 1);
    CHECK(c.schedule.alpha0 == 3.0);
    CHECK(c.schedule.b == 0.7);
  }

  TEST_CASE("unknown key names its pointer") {
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"problem":"production_pricing","method":["als"],"T":5,"seed":1,"alpha":2})"),
        doctest::Contains("/alpha"), ConfigError);
  }

  TEST_CASE("replications must be positive") {
    CHECK_THROWS_AS(parse_config_text(
                        R"({"problem":"production_pricing","method":["als"],"T":5,"seed":1,"replications":0})"),
                    ConfigError);
  }
}

TEST_SUITE("summarize") {
  TEST_CASE("type-7 quantiles") {
    CHECK(quantile7({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile7({3.0, 1.0, 2.0}, 0.25) == 1.5);
    CHECK(quantile7({3.0, 1.0, 2.0}, 0.75) == 2.5);
    CHECK(quantile7({4.0}, 0.25) == 4.0);
  }

  TEST_CASE("across traces") {
    const auto a = write_trace("ddu_unit_a.csv", {1.0, 5.0});
    const auto b = write_trace("ddu_unit_b.csv", {2.0, 5.0});
    const auto c = write_trace("ddu_unit_c.csv", {3.0, 5.0, 9.0});
    std::vector<std::string> warnings;
    const auto rows = summarize({c, a, b}, "f_saa", &warnings);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].median == 2.0);
    CHECK(rows[0].q1 == 1.5);
    CHECK(rows[0].q3 == 2.5);
    CHECK(rows[1].median == 5.0);
    CHECK(!warnings.empty());
    CHECK_THROWS_WITH(summarize({a}, "grad_norm"), doctest::Contains("grad_norm"));
    for (const auto &p : {a, b, c}) fs::remove(p);
  }
}

TEST_SUITE("experiment") {
  TEST_CASE("inventory and determinism") {
    const std::string base = R"({"problem":"production_pricing","method":["als"],"T":4,"seed":9,
      "replications":3,"evaluation":{"saa_samples":50},"output":")";
    const ExperimentOutcome one = run_experiment(parse_config_text(base + "ddu_unit_run1\"}"));
    const ExperimentOutcome two = run_experiment(parse_config_text(base + "ddu_unit_run2\"}"));
    CHECK(one.failures.empty());
    for (int k = 0; k < 3; ++k) {
      const std::string f = "als_rep" + std::to_string(k) + ".csv";
      REQUIRE(fs::exists(fs::path("ddu_unit_run1") / f));
      CHECK(slurp(fs::path("ddu_unit_run1") / f) == slurp(fs::path("ddu_unit_run2") / f));
    }
    CHECK(fs::exists("ddu_unit_run1/summary.csv"));
    CHECK(fs::exists("ddu_unit_run1/manifest.json"));
    CHECK(slurp("ddu_unit_run1/summary.csv").rfind("# quantile rule", 0) == 0);
    fs::remove_all("ddu_unit_run1");
    fs::remove_all("ddu_unit_run2");
  }

  TEST_CASE("worker count does not change the traces") {
    const std::string base = R"({"problem":"synthetic","method":["als","spg"],"T":6,"seed":4,
      "replications":4,"evaluation":{"saa_samples":30},)";
    run_experiment(parse_config_text(base + R"("workers":1,"output":"ddu_unit_w1"})"));
    run_experiment(parse_config_text(base + R"("workers":3,"output":"ddu_unit_w3"})"));
    for (const std::string m : {"als", "spg"})
      for (int k = 0; k < 4; ++k) {
        const std::string f = m + "_rep" + std::to_string(k) + ".csv";
        REQUIRE(fs::exists(fs::path("ddu_unit_w1") / f));
        CHECK(slurp(fs::path("ddu_unit_w1") / f) == slurp(fs::path("ddu_unit_w3") / f));
      }
    CHECK(slurp("ddu_unit_w1/summary.csv") == slurp("ddu_unit_w3/summary.csv"));
    fs::remove_all("ddu_unit_w1");
    fs::remove_all("ddu_unit_w3");
  }

  TEST_CASE("gradient baselines do not apply to the facility problem") {
    const ExperimentOutcome out = run_experiment(parse_config_text(
        R"({"problem":"facility","method":["als","spg"],"T":2,"seed":3,"evaluation":{"saa_samples":0},
            "output":"ddu_unit_fac"})"));
    CHECK(fs::exists("ddu_unit_fac/als_rep0.csv"));
    REQUIRE(out.not_applicable.size() == 1);
    CHECK(out.not_applicable[0].find("spg") != std::string::npos);
    fs::remove_all("ddu_unit_fac");

    const FacilitySpec s = FacilitySpec::generate(1);
    CHECK_THROWS_AS(spg_run(facility_problem(s), facility_truth(s), EquilibriumConfig{}, 1),
                    MethodNotApplicable);
  }

  TEST_CASE("facility negative channels stay rare after warm-up") {
    const ExperimentConfig c = parse_config_text(
        R"({"problem":"facility","method":["als"],"T":60,"seed":7,"evaluation":{"saa_samples":0}})");
    const ProblemBundle b = make_bundle(c);
    Rng start(derive_seed(c.seed, 1000));
    const RunTrace tr = run_als(b.problem, b.truth, als_options(c), c.schedule, c.T,
                                derive_seed(c.seed, 0), b.problem.domain.sample_uniform(start));
    REQUIRE(!tr.failure);
    double sum = 0.0;
    int count = 0;
    for (const auto &r : tr.records)
      if (r.t > 20 && r.step_norm) {
        sum += r.negative_channel_fraction;
        ++count;
      }
    REQUIRE(count == 40);
    CHECK(sum / count < 0.2);
  }

  TEST_CASE("more restarts never hurt PO") {
    const DDUProblem pr = pp_problem();
    const GroundTruthModel truth = pp_truth();
    PoOptions o1, o10;
    o1.multistart = 1;
    o10.multistart = 10;
    const PoResult r1 = po_lr_run(pr, truth, 200, o1, 21);
    const PoResult r10 = po_lr_run(pr, truth, 200, o10, 21);
    CHECK(r10.objective <= r1.objective);
    CHECK(r10.start_points.size() == 10);
  }
}
