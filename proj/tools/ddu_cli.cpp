// ddu_cli: run experiments, estimation-rate tables and trace summaries.
#include <glob.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ddu/errors.hpp"
#include "ddu/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kPartial = 3;

std::vector<std::string> expand_glob(const std::string &pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_run(const std::string &config, const std::string &out_dir,
            std::optional<std::uint64_t> seed, std::optional<int> workers) {
  ddu::ExperimentConfig c = ddu::parse_config(config);
  if (!out_dir.empty()) c.output = out_dir;
  if (seed) c.seed = *seed;
  if (workers) c.workers = *workers;
  const ddu::ExperimentOutcome res = ddu::run_experiment(c);
  for (const auto &na : res.not_applicable) std::cerr << "not applicable: " << na << "\n";
  for (const auto &f : res.failures) std::cerr << "failed: " << f << "\n";
  std::cout << "wrote " << res.files.size() << " files to " << c.output << "\n";
  return res.failures.empty() ? kOk : kPartial;
}

int cmd_rate(const std::string &config, const std::string &out_dir) {
  ddu::ExperimentConfig c = ddu::parse_config(config);
  if (!out_dir.empty()) c.output = out_dir;
  std::filesystem::create_directories(c.output);
  for (const auto &[kind, table] : ddu::run_rate(c)) {
    const auto path = std::filesystem::path(c.output) / ("rate_" + ddu::to_string(kind) + ".csv");
    std::ofstream f(path, std::ios::binary);
    ddu::write_rate_csv(f, table);
    std::cout << ddu::to_string(kind) << ": slope_mean=" << table.slope_mean
              << " slope_jac=" << table.slope_jac << " (" << path.string() << ")\n";
  }
  return kOk;
}

int cmd_summarize(const std::string &pattern, const std::string &column) {
  const auto paths = expand_glob(pattern);
  if (paths.empty()) {
    std::cerr << "error: no files match '" << pattern << "'\n";
    return kConfigError;
  }
  std::vector<std::string> warnings;
  const auto rows = ddu::summarize(paths, column, &warnings);
  for (const auto &w : warnings) std::cerr << "warning: " << w << "\n";
  ddu::write_summary_csv(std::cout, rows, column);
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"ddu: adaptive surrogate solver for decision-dependent stochastic programs"};
  app.require_subcommand(1);

  std::string config, out_dir, pattern, column;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  auto *run = app.add_subcommand("run", "run the configured experiment");
  run->add_option("--config", config, "JSON config path")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--seed", seed, "base seed (overrides the config)");
  run->add_option("--workers", workers, "worker threads, 0 = hardware concurrency")
      ->check(CLI::NonNegativeNumber);

  auto *rate = app.add_subcommand("rate", "estimation-rate experiment");
  rate->add_option("--config", config, "JSON config path")->required();
  rate->add_option("--out", out_dir, "output directory (overrides the config)");

  auto *sum = app.add_subcommand("summarize", "per-t quantiles across traces");
  sum->add_option("--in", pattern, "glob of trace CSV files")->required();
  sum->add_option("--column", column, "column to summarize")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, out_dir, seed, workers);
    if (*rate) return cmd_rate(config, out_dir);
    return cmd_summarize(pattern, column);
  } catch (const ddu::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPartial;
  }
}
