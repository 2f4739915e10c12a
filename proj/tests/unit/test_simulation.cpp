#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ddu/benchmarks/synthetic.hpp"
#include "ddu/errors.hpp"
#include "ddu/simulation.hpp"

using namespace ddu;

namespace {

GroundTruthModel quiet_model() {
  GroundTruthModel m = synthetic_truth();
  m.sd_diag = [](const Vec &) { return Vec::Constant(2, 1e-12); };
  return m;
}

std::string temp_file(const std::string &name, const std::string &content) {
  const std::string path = "ddu_unit_" + name;
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_SUITE("simulation") {
  TEST_CASE("adaptive draws stay in the scaled cube") {
    const GroundTruthModel m = synthetic_truth();
    const BoxDomain box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
    Rng rng(3);
    const Vec z = box.midpoint();
    int projected = -1;
    const Dataset d = draw_adaptive(m, box, z, 500, 0.5, ShapeDensity::uniform_cube, rng, &projected);
    REQUIRE(d.size() == 500);
    CHECK(projected == 0);
    for (const auto &s : d) CHECK((s.predictor - z).cwiseAbs().maxCoeff() <= 0.5);
  }

  TEST_CASE("vanishing bandwidth collapses predictors onto z") {
    const GroundTruthModel m = synthetic_truth();
    const BoxDomain box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
    Rng rng(4);
    const Vec z{{0.25, -0.5}};
    for (const auto &s : draw_adaptive(m, box, z, 50, 1e-12, ShapeDensity::truncated_normal, rng))
      CHECK((s.predictor - z).cwiseAbs().maxCoeff() <= 1e-11);
  }

  TEST_CASE("residual batch is simulated at z itself") {
    const GroundTruthModel m = quiet_model();
    Rng rng(5);
    const Vec z{{0.3, 0.1}};
    const Dataset w = draw_adaptive_residual_batch(m, z, 3, rng);
    REQUIRE(w.size() == 3);
    for (const auto &s : w) {
      CHECK(s.predictor == z);
      CHECK((s.response - m.mean(z)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    const GroundTruthModel noisy = synthetic_truth();
    const Dataset v = draw_adaptive_residual_batch(noisy, z, 2, rng);
    CHECK(v[0].response != v[1].response);
  }

  TEST_CASE("static uniform marginal has the box moments") {
    const GroundTruthModel m = synthetic_truth();
    const BoxDomain box(Vec{{0.0, -2.0}}, Vec{{1.0, 2.0}});
    Rng rng(6);
    const int n = 10000;
    const Dataset d = draw_static(m, box, StaticMarginal{}, n, rng);
    Vec mean = Vec::Zero(2);
    for (const auto &s : d) mean += s.predictor;
    mean /= n;
    for (int k = 0; k < 2; ++k) {
      const double range = box.upper()[k] - box.lower()[k];
      CHECK(std::abs(mean[k] - box.midpoint()[k]) <= 5.0 * (range / std::sqrt(12.0)) / std::sqrt(n));
    }
  }

  TEST_CASE("narrow truncated-normal marginal concentrates") {
    const GroundTruthModel m = synthetic_truth();
    const BoxDomain box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
    StaticMarginal marg;
    marg.kind = MarginalKind::truncated_normal;
    marg.mean = Vec{{0.2, -0.1}};
    marg.sd = Vec::Constant(2, 1e-3);
    Rng rng(7);
    for (const auto &s : draw_static(m, box, marg, 200, rng))
      CHECK((s.predictor - marg.mean).cwiseAbs().maxCoeff() <= 6e-3);
  }

  TEST_CASE("fixed dataset loader") {
    const std::string ok = temp_file("fixed_ok.csv", "x0,x1,y0,y1\n1,2,3,4\n5,6,7,8\n9,10,11,12\n");
    const Dataset d = load_fixed(ok, 2, 2);
    REQUIRE(d.size() == 3);
    CHECK(d[0].predictor == Vec{{1.0, 2.0}});
    CHECK(d[2].response == Vec{{11.0, 12.0}});
    std::remove(ok.c_str());

    const std::string bad = temp_file("fixed_bad.csv", "x0,x1,y0,y1\n1,2,3,4\n5,6,7\n");
    CHECK_THROWS_AS(load_fixed(bad, 2, 2), ParseError);
    std::remove(bad.c_str());

    const std::string empty = temp_file("fixed_empty.csv", "");
    CHECK_THROWS_WITH_AS(load_fixed(empty, 2, 2), doctest::Contains("empty dataset"), ParseError);
    std::remove(empty.c_str());
  }

  TEST_CASE("bandwidth rule") {
    BandwidthRule r{2.0, -1.0 / 6.0};
    CHECK(r(64) == doctest::Approx(1.0));
  }
}
