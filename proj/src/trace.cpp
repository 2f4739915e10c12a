#include "ddu/trace.hpp"

#include <fstream>

#include "ddu/csv.hpp"
#include "ddu/errors.hpp"

namespace ddu {

std::vector<std::string> trace_header(int d) {
  std::vector<std::string> h{"t"};
  for (int i = 0; i < d; ++i) h.push_back("z_" + std::to_string(i));
  for (const char *c : {"rho", "alpha", "m", "n", "h", "f_saa", "step_norm",
                        "moreau_dist", "moreau_grad", "solver_iters", "surrogate_value",
                        "solver_converged", "solver_residual", "prox_bound_ok",
                        "negative_channel_fraction", "projected_samples", "floor_clamped"})
    h.emplace_back(c);
  return h;
}

namespace {

std::string opt(const std::optional<double> &v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

void write_trace_csv(std::ostream &out, const RunTrace &trace) {
  const int d = trace.records.empty()
                    ? static_cast<int>(trace.final_point.size())
                    : static_cast<int>(trace.records.front().z.size());
  write_csv_row(out, trace_header(d));
  for (const auto &r : trace.records) {
    std::vector<std::string> row{std::to_string(r.t)};
    for (Eigen::Index i = 0; i < r.z.size(); ++i)
      row.push_back(format_double(r.z[i]));
    row.push_back(format_double(r.rho));
    row.push_back(format_double(r.alpha));
    row.push_back(std::to_string(r.m));
    row.push_back(std::to_string(r.n));
    row.push_back(format_double(r.h));
    row.push_back(opt(r.f_saa));
    row.push_back(opt(r.step_norm));
    row.push_back(opt(r.moreau_dist));
    row.push_back(opt(r.moreau_grad));
    row.push_back(std::to_string(r.solver_iters));
    row.push_back(opt(r.surrogate_value_at_center));
    row.push_back(r.solver_converged ? "1" : "0");
    row.push_back(format_double(r.solver_residual));
    row.push_back(r.prox_bound_ok ? "1" : "0");
    row.push_back(format_double(r.negative_channel_fraction));
    row.push_back(std::to_string(r.projected_samples));
    row.push_back(std::to_string(r.floor_clamped));
    write_csv_row(out, row);
  }
}

void write_trace_csv(const std::string &path, const RunTrace &trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write trace '" + path + "'");
  write_trace_csv(out, trace);
}

}  // namespace ddu
