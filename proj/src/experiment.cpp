#include "ddu/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <set>
#include <thread>
#include <sstream>

#include "ddu/csv.hpp"
#include "ddu/errors.hpp"

namespace ddu {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Typed, strict access to one JSON object.
class Section {
 public:
  Section(const json &j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
    if (!j_.is_object()) throw ConfigError(ptr_.empty() ? "/" : ptr_, "expected an object");
  }

  void allow(std::initializer_list<const char *> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ConfigError(ptr_ + "/" + it.key(), "unknown key");
  }
  bool has(const char *key) const { return j_.contains(key); }
  std::string at(const char *key) const { return ptr_ + "/" + key; }

  double number(const char *key, double fallback) const {
    if (!has(key)) return fallback;
    const json &v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    return v.get<double>();
  }
  long integer(const char *key, long fallback) const {
    if (!has(key)) return fallback;
    const json &v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<long>();
  }
  std::uint64_t unsigned_integer(const char *key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json &v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw ConfigError(at(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }
  bool boolean(const char *key, bool fallback) const {
    if (!has(key)) return fallback;
    const json &v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const char *key, const std::string &fallback) const {
    if (!has(key)) return fallback;
    const json &v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char *key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const json &v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number())
        throw ConfigError(at(key) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  Section child(const char *key) const {
    static const json empty = json::object();
    return has(key) ? Section(j_.at(key), at(key)) : Section(empty, at(key));
  }

 private:
  const json &j_;
  std::string ptr_;
};

Vec to_vec(const std::vector<double> &v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vec(const Vec &v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

OracleKind oracle_kind(const std::string &s, const std::string &ptr) {
  if (s == "adaptive") return OracleKind::adaptive;
  if (s == "static") return OracleKind::static_joint;
  if (s == "fixed") return OracleKind::fixed;
  throw ConfigError(ptr, "unknown oracle kind '" + s + "'");
}

const std::set<std::string> kProblems{"production_pricing", "facility", "spam", "synthetic"};
const std::set<std::string> kMethods{"als", "spg", "spp", "po_lr"};

}  // namespace

ParameterSchedule default_schedule(const std::string &problem) {
  ParameterSchedule s;
  if (problem == "production_pricing") {
    s.rho0 = 2.0, s.a = 0.0, s.alpha0 = 3.0, s.b = 0.7;
    s.m0 = 1, s.n0 = 10, s.tau = 1.0;
  } else if (problem == "facility") {
    s.rho0 = 1.0, s.a = 0.0, s.alpha0 = 2.0, s.b = 0.7;
    s.m0 = 5, s.n0 = 20, s.tau = 0.5;
  } else if (problem == "spam") {
    s.rho0 = 0.05, s.a = 0.0, s.alpha0 = 0.1, s.b = 0.5;
    s.m0 = 10, s.n0 = 30, s.tau = 0.0;
  } else {
    s.rho0 = 1.0, s.a = 0.0, s.alpha0 = 2.0, s.b = 0.5;
    s.m0 = 4, s.n0 = 50, s.tau = 0.5;
  }
  s.j = 0.0;
  s.k = 0.0;
  s.h0 = default_bandwidth(problem);
  return s;
}

double default_bandwidth(const std::string &problem) {
  if (problem == "production_pricing") return 2.0;
  if (problem == "facility") return 2.0;
  if (problem == "spam") return 1.0;
  return 1.0;
}

ExperimentConfig parse_config_text(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  const Section root(doc, "");
  root.allow({"problem", "method", "T", "seed", "replications", "oracle", "schedule",
              "evaluation", "output", "prox", "problem_options", "baseline", "po",
              "rate", "workers"});
  ExperimentConfig c;
  if (!root.has("problem")) throw ConfigError("/problem", "required key missing");
  c.problem = root.string("problem", "");
  if (!kProblems.count(c.problem))
    throw ConfigError("/problem", "unknown problem '" + c.problem + "'");

  if (!root.has("method")) throw ConfigError("/method", "required key missing");
  {
    const json &m = doc.at("method");
    if (m.is_string()) {
      c.methods.push_back(m.get<std::string>());
    } else if (m.is_array() && !m.empty()) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i].is_string())
          throw ConfigError("/method/" + std::to_string(i), "expected a method name");
        c.methods.push_back(m[i].get<std::string>());
      }
    } else {
      throw ConfigError("/method", "expected a nonempty list of methods");
    }
    for (std::size_t i = 0; i < c.methods.size(); ++i)
      if (!kMethods.count(c.methods[i]))
        throw ConfigError("/method/" + std::to_string(i),
                          "unknown method '" + c.methods[i] + "'");
  }
  if (!root.has("T")) throw ConfigError("/T", "required key missing");
  c.T = root.integer("T", 0);
  if (c.T < 0) throw ConfigError("/T", "must be >= 0");
  if (!root.has("seed")) throw ConfigError("/seed", "required key missing");
  c.seed = root.unsigned_integer("seed", 0);
  c.replications = static_cast<int>(root.integer("replications", 1));
  if (c.replications < 1) throw ConfigError("/replications", "must be >= 1");
  c.output = root.string("output", c.output);
  c.workers = static_cast<int>(root.integer("workers", 0));
  if (c.workers < 0) throw ConfigError("/workers", "must be >= 0");

  // Oracle.
  const Section o = root.child("oracle");
  o.allow({"kind", "shape", "h0", "h_exponent", "marginal", "fixed_dataset"});
  c.oracle.kind = oracle_kind(o.string("kind", "adaptive"), o.at("kind"));
  const std::string shape = o.string("shape", "uniform_cube");
  if (shape == "uniform_cube") c.oracle.shape = ShapeDensity::uniform_cube;
  else if (shape == "truncated_normal") c.oracle.shape = ShapeDensity::truncated_normal;
  else throw ConfigError(o.at("shape"), "unknown shape '" + shape + "'");
  c.oracle.bandwidth.h0 = o.number("h0", default_bandwidth(c.problem));
  c.oracle.bandwidth.exponent = o.number("h_exponent", -1.0 / 6.0);
  if (!(c.oracle.bandwidth.h0 > 0.0)) throw ConfigError(o.at("h0"), "must be > 0");
  {
    const Section m = o.child("marginal");
    m.allow({"kind", "mean", "sd"});
    const std::string kind = m.string("kind", "uniform");
    if (kind == "uniform") c.oracle.marginal.kind = MarginalKind::uniform;
    else if (kind == "truncated_normal") c.oracle.marginal.kind = MarginalKind::truncated_normal;
    else throw ConfigError(m.at("kind"), "unknown marginal '" + kind + "'");
    c.oracle.marginal.mean = to_vec(m.numbers("mean", {}));
    c.oracle.marginal.sd = to_vec(m.numbers("sd", {}));
  }
  c.oracle.fixed_dataset_path = o.string("fixed_dataset", "");
  try {
    c.oracle.validate();
  } catch (const ContractViolation &e) {
    throw ConfigError("/oracle", e.what());
  }

  // Schedule.
  c.schedule = default_schedule(c.problem);
  const Section s = root.child("schedule");
  s.allow({"rho0", "a", "alpha0", "b", "m0", "j", "n0", "k", "tau"});
  c.schedule.alpha0 = s.number("alpha0", c.schedule.alpha0);
  if (c.problem == "spam" && !s.has("rho0")) c.schedule.rho0 = 0.5 * c.schedule.alpha0;
  c.schedule.rho0 = s.number("rho0", c.schedule.rho0);
  c.schedule.a = s.number("a", c.schedule.a);
  c.schedule.b = s.number("b", c.schedule.b);
  c.schedule.m0 = s.number("m0", c.schedule.m0);
  c.schedule.j = s.number("j", c.schedule.j);
  c.schedule.n0 = s.number("n0", c.schedule.n0);
  c.schedule.k = s.number("k", c.schedule.k);
  c.schedule.tau = s.number("tau", c.schedule.tau);
  c.schedule.h0 = c.oracle.bandwidth.h0;
  c.schedule.h_exponent = c.oracle.bandwidth.exponent;
  try {
    c.schedule.validate();
  } catch (const ContractViolation &e) {
    throw ConfigError("/schedule", e.what());
  }

  const Section ev = root.child("evaluation");
  ev.allow({"saa_samples", "crn", "moreau_every", "moreau_samples"});
  c.evaluation.saa_samples = ev.integer("saa_samples", c.evaluation.saa_samples);
  c.evaluation.crn = ev.boolean("crn", c.evaluation.crn);
  c.evaluation.moreau_every = ev.integer("moreau_every", c.evaluation.moreau_every);
  c.evaluation.moreau_samples = ev.integer("moreau_samples", c.evaluation.moreau_samples);
  if (c.evaluation.saa_samples == 1 || c.evaluation.saa_samples < 0)
    throw ConfigError(ev.at("saa_samples"), "must be 0 or >= 2");
  if (c.evaluation.moreau_every < 0) throw ConfigError(ev.at("moreau_every"), "must be >= 0");
  if (c.evaluation.moreau_samples < 2)
    throw ConfigError(ev.at("moreau_samples"), "must be >= 2");

  const Section px = root.child("prox");
  px.allow({"tol", "max_iter"});
  c.prox.tol = px.number("tol", c.prox.tol);
  c.prox.max_iter = static_cast<int>(px.integer("max_iter", c.prox.max_iter));
  if (!(c.prox.tol > 0.0)) throw ConfigError(px.at("tol"), "must be > 0");
  if (c.prox.max_iter < 1) throw ConfigError(px.at("max_iter"), "must be >= 1");

  const Section po = root.child("problem_options");
  po.allow({"instance_seed", "instance", "homoscedastic", "kappa", "data", "x0_bound",
            "heteroscedastic", "noise"});
  c.facility_instance_seed = po.unsigned_integer("instance_seed", c.facility_instance_seed);
  c.facility_instance_path = po.string("instance", "");
  c.facility_homoscedastic = po.boolean("homoscedastic", false);
  c.spam_kappa = po.number("kappa", c.spam_kappa);
  c.spam_data = po.string("data", "");
  c.spam_x0_bound = po.number("x0_bound", c.spam_x0_bound);
  c.synthetic.heteroscedastic = po.boolean("heteroscedastic", true);
  c.synthetic.noise = po.number("noise", 1.0);
  if (c.problem == "spam") {
    try {
      SpamSpec::for_kappa(c.spam_kappa);
    } catch (const ContractViolation &e) {
      throw ConfigError(po.at("kappa"), e.what());
    }
  }

  const Section bl = root.child("baseline");
  bl.allow({"alpha0", "batch", "T"});
  c.baseline.alpha0 = bl.number("alpha0", c.baseline.alpha0);
  c.baseline.batch = static_cast<int>(bl.integer("batch", c.baseline.batch));
  c.baseline.T = bl.integer("T", c.T);
  if (!(c.baseline.alpha0 > 0.0)) throw ConfigError(bl.at("alpha0"), "must be > 0");
  if (c.baseline.batch < 1) throw ConfigError(bl.at("batch"), "must be >= 1");

  const Section pl = root.child("po");
  pl.allow({"N", "multistart", "iterations", "step"});
  c.po_samples = static_cast<int>(pl.integer("N", c.po_samples));
  c.po.multistart = static_cast<int>(pl.integer("multistart", c.po.multistart));
  c.po.iterations = static_cast<int>(pl.integer("iterations", c.po.iterations));
  c.po.step = pl.number("step", c.po.step);
  if (c.po.multistart < 1) throw ConfigError(pl.at("multistart"), "must be >= 1");

  const Section rt = root.child("rate");
  rt.allow({"n_grid", "reps", "z", "oracles"});
  if (rt.has("n_grid")) {
    c.rate.n_grid.clear();
    for (double v : rt.numbers("n_grid", {})) {
      if (v < 1 || v != std::floor(v)) throw ConfigError(rt.at("n_grid"), "expected counts");
      c.rate.n_grid.push_back(static_cast<long>(v));
    }
  }
  c.rate.reps = static_cast<int>(rt.integer("reps", c.rate.reps));
  if (c.rate.reps < 30) throw ConfigError(rt.at("reps"), "must be >= 30");
  if (c.rate.n_grid.size() < 2) throw ConfigError(rt.at("n_grid"), "need at least two counts");
  for (std::size_t i = 1; i < c.rate.n_grid.size(); ++i)
    if (c.rate.n_grid[i] <= c.rate.n_grid[i - 1])
      throw ConfigError(rt.at("n_grid"), "counts must increase");
  c.rate.z = to_vec(rt.numbers("z", {}));
  if (rt.has("oracles")) {
    const json &arr = doc.at("rate").at("oracles");
    if (!arr.is_array()) throw ConfigError(rt.at("oracles"), "expected a list");
    c.rate.oracles.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = rt.at("oracles") + "/" + std::to_string(i);
      if (!arr[i].is_string()) throw ConfigError(p, "expected an oracle kind");
      c.rate.oracles.push_back(oracle_kind(arr[i].get<std::string>(), p));
    }
  }

  // Echo with defaults applied.
  json r;
  r["problem"] = c.problem;
  r["method"] = c.methods;
  r["T"] = c.T;
  r["seed"] = c.seed;
  r["replications"] = c.replications;
  r["output"] = c.output;
  r["oracle"] = {{"kind", to_string(c.oracle.kind)},
                 {"shape", to_string(c.oracle.shape)},
                 {"h0", c.oracle.bandwidth.h0},
                 {"h_exponent", c.oracle.bandwidth.exponent},
                 {"marginal",
                  {{"kind", c.oracle.marginal.kind == MarginalKind::uniform ? "uniform"
                                                                          : "truncated_normal"},
                   {"mean", from_vec(c.oracle.marginal.mean)},
                   {"sd", from_vec(c.oracle.marginal.sd)}}},
                 {"fixed_dataset", c.oracle.fixed_dataset_path}};
  r["schedule"] = {{"rho0", c.schedule.rho0}, {"a", c.schedule.a},
                   {"alpha0", c.schedule.alpha0}, {"b", c.schedule.b},
                   {"m0", c.schedule.m0}, {"j", c.schedule.j},
                   {"n0", c.schedule.n0}, {"k", c.schedule.k},
                   {"tau", c.schedule.tau}};
  r["evaluation"] = {{"saa_samples", c.evaluation.saa_samples},
                     {"crn", c.evaluation.crn},
                     {"moreau_every", c.evaluation.moreau_every},
                     {"moreau_samples", c.evaluation.moreau_samples}};
  r["prox"] = {{"tol", c.prox.tol}, {"max_iter", c.prox.max_iter}};
  r["problem_options"] = {{"instance_seed", c.facility_instance_seed},
                          {"instance", c.facility_instance_path},
                          {"homoscedastic", c.facility_homoscedastic},
                          {"kappa", c.spam_kappa},
                          {"data", c.spam_data},
                          {"x0_bound", c.spam_x0_bound},
                          {"heteroscedastic", c.synthetic.heteroscedastic},
                          {"noise", c.synthetic.noise}};
  r["baseline"] = {{"alpha0", c.baseline.alpha0}, {"batch", c.baseline.batch},
                   {"T", c.baseline.T}};
  r["po"] = {{"N", c.po_samples}, {"multistart", c.po.multistart},
             {"iterations", c.po.iterations}, {"step", c.po.step}};
  std::vector<std::string> oracles;
  for (OracleKind k : c.rate.oracles) oracles.push_back(to_string(k));
  r["rate"] = {{"n_grid", c.rate.n_grid}, {"reps", c.rate.reps},
               {"z", from_vec(c.rate.z)}, {"oracles", oracles}};
  c.resolved = r.dump(2);
  return c;
}

ExperimentConfig parse_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ProblemBundle make_bundle(const ExperimentConfig &c) {
  ProblemBundle b;
  if (c.problem == "production_pricing") {
    b.problem = pp_problem(c.pp);
    b.truth = pp_truth(c.pp);
  } else if (c.problem == "facility") {
    FacilitySpec spec;
    if (!c.facility_instance_path.empty()) {
      std::ifstream in(c.facility_instance_path);
      if (!in) throw ParseError("cannot open facility instance '" + c.facility_instance_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      spec = facility_from_json(ss.str());
    } else {
      spec = FacilitySpec::generate(c.facility_instance_seed);
    }
    spec.homoscedastic = c.facility_homoscedastic;
    b.facility = std::make_shared<FacilitySpec>(spec);
    b.facility_stats = std::make_shared<FacilityStats>();
    b.problem = facility_problem(spec, b.facility_stats);
    b.truth = facility_truth(spec);
  } else if (c.problem == "spam") {
    b.spam_spec = SpamSpec::for_kappa(c.spam_kappa);
    b.spam_spec.x0_bound = c.spam_x0_bound;
    if (!c.spam_data.empty()) {
      b.spam = std::make_shared<SpamDataset>(spam_ingest(c.spam_data));
    } else {
      std::stringstream ss;
      write_synthetic_spambase(ss, 200, 7);
      b.spam = std::make_shared<SpamDataset>(spam_ingest(ss));
    }
    b.problem = spam_problem(b.spam_spec);
    b.truth = spam_truth(*b.spam, b.spam_spec);
  } else {
    b.problem = synthetic_problem(c.synthetic);
    b.truth = synthetic_truth(c.synthetic);
  }
  return b;
}

AlsOptions als_options(const ExperimentConfig &c) {
  AlsOptions aopt;
  aopt.oracle = c.oracle;
  aopt.prox = c.prox;
  aopt.diagnostics.saa_samples = c.evaluation.saa_samples;
  aopt.diagnostics.crn = c.evaluation.crn;
  aopt.diagnostics.moreau_every = c.evaluation.moreau_every;
  aopt.diagnostics.moreau_samples = c.evaluation.moreau_samples;
  return aopt;
}

ExperimentOutcome run_experiment(const ExperimentConfig &c) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(c.output);
  ProblemBundle b = make_bundle(c);
  ExperimentOutcome out;
  json manifest;
  manifest["config"] = json::parse(c.resolved);
  // Command-line overrides land in the echo too.
  manifest["config"]["seed"] = c.seed;
  manifest["config"]["output"] = c.output;
  manifest["software"] = {{"name", "ddu"}, {"version", "1.0.0"},
                          {"compiler", __VERSION__},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
  if (b.facility) manifest["facility_instance"] = json::parse(facility_to_json(*b.facility));
  json failures = json::array(), not_applicable = json::array();

  const AlsOptions aopt = als_options(c);
  EquilibriumConfig eq = c.baseline;
  eq.saa_samples = c.evaluation.saa_samples;

  // One task per (replication, method); each owns its bundle so that no
  // mutable state is shared, and results are merged in task order.
  struct Task {
    int rep = 0;
    std::string method;
    std::string path;
    bool written = false;
    bool is_trace = false;
    std::optional<std::string> failure;
    std::optional<std::string> not_applicable;
    FacilityStats stats;
  };
  std::vector<Task> tasks;
  for (int rep = 0; rep < c.replications; ++rep)
    for (const std::string &method : c.methods) {
      Task task;
      task.rep = rep;
      task.method = method;
      tasks.push_back(std::move(task));
    }

  auto run_task = [&](Task &task) {
    ProblemBundle tb = make_bundle(c);
    const int rep = task.rep;
    const std::string &method = task.method;
    const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(rep));
    Rng start_rng(derive_seed(c.seed, 1000 + static_cast<std::uint64_t>(rep)));
    const Vec z0 = tb.problem.domain.sample_uniform(start_rng);
    task.path = (fs::path(c.output) / (method + "_rep" + std::to_string(rep) + ".csv")).string();
    try {
      if (method == "po_lr") {
        const PoResult res = po_lr_run(tb.problem, tb.truth, c.po_samples, c.po, seed);
        std::ofstream f(task.path, std::ios::binary);
        std::vector<std::string> head;
        for (Eigen::Index i = 0; i < res.x.size(); ++i) head.push_back("z_" + std::to_string(i));
        head.push_back("po_objective");
        head.push_back("f_saa");
        write_csv_row(f, head);
        std::vector<std::string> row;
        for (Eigen::Index i = 0; i < res.x.size(); ++i) row.push_back(format_double(res.x[i]));
        row.push_back(format_double(res.objective));
        if (c.evaluation.saa_samples > 0) {
          Rng er(derive_seed(seed, 1));
          row.push_back(format_double(
              SaaEvaluator(tb.problem, tb.truth, c.evaluation.saa_samples, er).value(res.x)));
        } else {
          row.emplace_back();
        }
        write_csv_row(f, row);
        task.written = true;
      } else {
        RunTrace trace;
        if (method == "als") {
          trace = run_als(tb.problem, tb.truth, aopt, c.schedule, c.T, seed, z0);
        } else if (method == "spg") {
          trace = spg_run(tb.problem, tb.truth, eq, seed, z0);
        } else {
          trace = spp_run(tb.problem, tb.truth, eq, seed, z0);
        }
        write_trace_csv(task.path, trace);
        task.written = task.is_trace = true;
        task.failure = trace.failure;
      }
    } catch (const MethodNotApplicable &e) {
      task.not_applicable = e.what();
    } catch (const std::exception &e) {
      task.failure = e.what();
    }
    if (tb.facility_stats) task.stats = *tb.facility_stats;
  };

  const int workers = std::max(
      1, std::min<int>(c.workers > 0 ? c.workers
                                     : static_cast<int>(std::thread::hardware_concurrency()),
                       static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (Task &task : tasks) run_task(task);
  } else {
    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(next_mutex);
          if (next == tasks.size()) return;
          i = next++;
        }
        run_task(tasks[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto &th : pool) th.join();
  }

  std::map<std::string, std::vector<std::string>> traces;
  FacilityStats merged;
  for (const Task &task : tasks) {
    const std::string stem = task.method + "_rep" + std::to_string(task.rep);
    if (task.written) out.files.push_back(task.path);
    if (task.is_trace) traces[task.method].push_back(task.path);
    if (task.not_applicable && task.rep == 0) {
      out.not_applicable.push_back(task.method + ": " + *task.not_applicable);
      not_applicable.push_back({{"method", task.method}, {"reason", *task.not_applicable}});
    }
    if (task.failure) {
      out.failures.push_back(stem + ": " + *task.failure);
      failures.push_back({{"method", task.method}, {"replication", task.rep}, {"error", *task.failure}});
    }
    merged.solves += task.stats.solves;
    merged.max_gap = std::max(merged.max_gap, task.stats.max_gap);
    merged.max_complementarity = std::max(merged.max_complementarity, task.stats.max_complementarity);
  }

  const std::string summary_path = (fs::path(c.output) / "summary.csv").string();
  {
    std::ofstream f(summary_path, std::ios::binary);
    f << "# quantile rule: type-7 linear interpolation; column: f_saa\n";
    write_csv_row(f, std::vector<std::string>{"method", "t", "median", "q1", "q3"});
    for (const auto &[method, paths] : traces) {
      std::vector<std::string> warn;
      std::vector<QuantileRow> rows;
      try {
        rows = summarize(paths, "f_saa", &warn);
      } catch (const std::exception &e) {
        std::cerr << "warning: no summary for " << method << ": " << e.what() << "\n";
      }
      for (const auto &w : warn) std::cerr << "warning: " << w << "\n";
      for (const auto &r : rows)
        write_csv_row(f, std::vector<std::string>{method, std::to_string(r.t),
                                                  format_double(r.median),
                                                  format_double(r.q1),
                                                  format_double(r.q3)});
    }
  }
  out.files.push_back(summary_path);

  manifest["failures"] = failures;
  manifest["not_applicable"] = not_applicable;
  manifest["files"] = out.files;
  if (b.facility_stats)
    manifest["transport"] = {{"solves", merged.solves},
                             {"max_gap", merged.max_gap},
                             {"max_complementarity", merged.max_complementarity}};
  manifest["workers"] = workers;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string manifest_path = (fs::path(c.output) / "manifest.json").string();
  std::ofstream(manifest_path, std::ios::binary) << manifest.dump(2) << "\n";
  out.files.push_back(manifest_path);
  return out;
}

std::vector<std::pair<OracleKind, RateTable>> run_rate(const ExperimentConfig &c) {
  ProblemBundle b = make_bundle(c);
  const BoxDomain pbox = b.problem.predictor_domain();
  const Vec z = c.rate.z.size() ? c.rate.z : pbox.midpoint();
  if (z.size() != pbox.dim()) throw ConfigError("/rate/z", "dimension mismatch");
  std::vector<std::pair<OracleKind, RateTable>> out;
  for (OracleKind kind : c.rate.oracles) {
    OracleConfig o = c.oracle;
    o.kind = kind;
    Rng rng(derive_seed(c.seed, static_cast<std::uint64_t>(kind)));
    out.emplace_back(kind, estimation_rate_experiment(b.truth, pbox, o, z, c.rate.n_grid,
                                                      c.rate.reps, rng));
  }
  return out;
}

double quantile7(std::vector<double> v, double prob) {
  if (v.empty()) throw ContractViolation("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace {

struct LooseTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

LooseTable read_trace(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace '" + path + "'");
  LooseTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParseError("row width differs from header", lineno);
    std::vector<double> row;
    for (const auto &cell : cells) {
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!cell.empty() && !parse_double(cell, v))
        throw ParseError("non-numeric cell '" + cell + "'", lineno);
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

std::vector<QuantileRow> summarize(const std::vector<std::string> &paths,
                                   const std::string &column,
                                   std::vector<std::string> *warnings) {
  if (paths.empty()) throw ContractViolation("summarize: no traces given");
  std::vector<LooseTable> tables;
  std::vector<std::size_t> cols;
  std::size_t shortest = std::numeric_limits<std::size_t>::max(), longest = 0;
  for (const auto &p : paths) {
    tables.push_back(read_trace(p));
    const auto &h = tables.back().header;
    const auto it = std::find(h.begin(), h.end(), column);
    if (it == h.end())
      throw ContractViolation("column '" + column + "' not found in " + p);
    cols.push_back(static_cast<std::size_t>(it - h.begin()));
    shortest = std::min(shortest, tables.back().rows.size());
    longest = std::max(longest, tables.back().rows.size());
  }
  if (shortest < longest && warnings)
    warnings->push_back("ragged traces; aligned on the shortest (" +
                        std::to_string(shortest) + " rows)");
  const auto tcol = std::find(tables[0].header.begin(), tables[0].header.end(), "t");
  std::vector<QuantileRow> out;
  for (std::size_t r = 0; r < shortest; ++r) {
    std::vector<double> vals;
    for (std::size_t k = 0; k < tables.size(); ++k) {
      const double v = tables[k].rows[r][cols[k]];
      if (!std::isnan(v)) vals.push_back(v);
    }
    if (vals.empty()) continue;
    QuantileRow q;
    q.t = tcol != tables[0].header.end()
              ? static_cast<long>(tables[0].rows[r][tcol - tables[0].header.begin()])
              : static_cast<long>(r);
    q.median = quantile7(vals, 0.5);
    q.q1 = quantile7(vals, 0.25);
    q.q3 = quantile7(vals, 0.75);
    out.push_back(q);
  }
  return out;
}

void write_summary_csv(std::ostream &out, const std::vector<QuantileRow> &rows,
                       const std::string &column) {
  out << "# quantile rule: type-7 linear interpolation; column: " << column << "\n";
  write_csv_row(out, std::vector<std::string>{"t", "median", "q1", "q3"});
  for (const auto &r : rows)
    write_csv_row(out, std::vector<std::string>{std::to_string(r.t), format_double(r.median),
                                                format_double(r.q1), format_double(r.q3)});
}

}  // namespace ddu
