#include "ddu/simulation.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ddu/csv.hpp"
#include "ddu/errors.hpp"

namespace ddu {

double BandwidthRule::operator()(long n) const {
  if (n < 1) throw ContractViolation("bandwidth rule needs n >= 1");
  return h0 * std::pow(static_cast<double>(n), exponent);
}

void OracleConfig::validate() const {
  if (!(bandwidth.h0 > 0.0))
    throw ContractViolation("bandwidth base h0 must be positive");
  if (kind == OracleKind::fixed && fixed_dataset_path.empty())
    throw ContractViolation("fixed oracle requires a dataset path");
  if (marginal.kind == MarginalKind::truncated_normal &&
      (marginal.mean.size() == 0 || marginal.mean.size() != marginal.sd.size()))
    throw ContractViolation("truncated normal marginal needs mean and sd");
}

std::string to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::adaptive: return "adaptive";
    case OracleKind::static_joint: return "static";
    case OracleKind::fixed: return "fixed";
  }
  return "?";
}

std::string to_string(ShapeDensity shape) {
  return shape == ShapeDensity::uniform_cube ? "uniform_cube"
                                             : "truncated_normal";
}

double sample_truncated_normal(double mean, double sd, double lo, double hi,
                               Rng &rng) {
  if (!(sd > 0.0) || !(lo <= hi))
    throw ContractViolation("truncated normal: need sd > 0 and lo <= hi");
  static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  double a = (lo - mean) / sd;
  double b = (hi - mean) / sd;
  // Work in the lower tail for accuracy.
  bool flip = a > 0.0;
  if (flip) {
    std::swap(a, b);
    a = -a;
    b = -b;
  }
  const double fa = a == -INFINITY ? 0.0 : boost::math::cdf(std_normal, a);
  const double fb = b == INFINITY ? 1.0 : boost::math::cdf(std_normal, b);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = fa + unif(rng) * (fb - fa);
  double s;
  if (u <= 0.0 || u >= 1.0 || fb - fa <= 0.0) {
    s = fb - fa <= 0.0 ? (std::abs(a) < std::abs(b) ? a : b) : (u <= 0.0 ? a : b);
  } else {
    s = boost::math::quantile(std_normal, u);
  }
  s = std::clamp(s, a, b);
  if (flip) s = -s;
  return std::clamp(mean + sd * s, lo, hi);
}

Vec sample_shape(ShapeDensity shape, int d, Rng &rng) {
  Vec u(d);
  if (shape == ShapeDensity::uniform_cube) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < d; ++i) u[i] = unif(rng);
  } else {
    for (int i = 0; i < d; ++i)
      u[i] = sample_truncated_normal(0.0, 1.0, -1.0, 1.0, rng);
  }
  return u;
}

Dataset draw_adaptive(const GroundTruthModel &model, const BoxDomain &box,
                      const Vec &z, int n, double h, ShapeDensity shape,
                      Rng &rng, int *projected) {
  if (n < 1) throw ContractViolation("draw_adaptive: n must be >= 1");
  if (!(h > 0.0)) throw ContractViolation("draw_adaptive: h must be > 0");
  if (!box.contains(z, 1e-12))
    throw ContractViolation("draw_adaptive: reference point infeasible");
  Dataset data;
  data.reserve(n);
  int moved = 0;
  for (int i = 0; i < n; ++i) {
    Vec x = z + h * sample_shape(shape, box.dim(), rng);
    Vec xp = project(x, box);
    if (xp != x) ++moved;
    Response r = sample_response(model, xp, rng);
    data.push_back({std::move(xp), std::move(r.xi), std::move(r.aux)});
  }
  if (projected) *projected = moved;
  return data;
}

Dataset draw_adaptive_residual_batch(const GroundTruthModel &model,
                                     const Vec &z, int m, Rng &rng) {
  if (m < 1) throw ContractViolation("residual batch: m must be >= 1");
  Dataset data;
  data.reserve(m);
  for (int i = 0; i < m; ++i) {
    Response r = sample_response(model, z, rng);
    data.push_back({z, std::move(r.xi), std::move(r.aux)});
  }
  return data;
}

Vec sample_marginal(const StaticMarginal &marginal, const BoxDomain &box,
                    Rng &rng) {
  if (marginal.kind == MarginalKind::uniform) return box.sample_uniform(rng);
  if (marginal.mean.size() != box.dim() || marginal.sd.size() != box.dim())
    throw ContractViolation("marginal dimension does not match the box");
  Vec x(box.dim());
  for (int i = 0; i < box.dim(); ++i)
    x[i] = sample_truncated_normal(marginal.mean[i], marginal.sd[i],
                                   box.lower()[i], box.upper()[i], rng);
  return x;
}

Dataset draw_static(const GroundTruthModel &model, const BoxDomain &box,
                    const StaticMarginal &marginal, int n, Rng &rng) {
  if (n < 1) throw ContractViolation("draw_static: n must be >= 1");
  Dataset data;
  data.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec x = sample_marginal(marginal, box, rng);
    Response r = sample_response(model, x, rng);
    data.push_back({std::move(x), std::move(r.xi), std::move(r.aux)});
  }
  return data;
}

Dataset load_fixed(const std::string &path, int d, int ell) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path + "'");
  CsvTable table = read_numeric_csv(in);
  if (table.rows.empty()) throw ParseError("empty dataset");
  const std::size_t width = table.rows.front().size();
  if (width < static_cast<std::size_t>(d + ell))
    throw ParseError("expected at least " + std::to_string(d + ell) +
                         " columns, found " + std::to_string(width),
                     table.line_numbers.front());
  Dataset data;
  data.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    if (row.size() != width)
      throw ParseError("expected " + std::to_string(width) +
                           " columns, found " + std::to_string(row.size()),
                       table.line_numbers[r]);
    SamplePair s;
    s.predictor = Eigen::Map<const Vec>(row.data(), d);
    s.response = Eigen::Map<const Vec>(row.data() + d, ell);
    s.aux.assign(row.begin() + d + ell, row.end());
    data.push_back(std::move(s));
  }
  return data;
}

void write_dataset_csv(const std::string &path, const Dataset &data) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write dataset '" + path + "'");
  if (data.empty()) return;
  const auto &f = data.front();
  std::vector<std::string> header;
  for (Eigen::Index i = 0; i < f.predictor.size(); ++i)
    header.push_back("x_" + std::to_string(i));
  for (Eigen::Index i = 0; i < f.response.size(); ++i)
    header.push_back("xi_" + std::to_string(i));
  for (std::size_t i = 0; i < f.aux.size(); ++i)
    header.push_back("aux_" + std::to_string(i));
  write_csv_row(out, header);
  for (const auto &s : data) {
    std::vector<double> row(s.predictor.data(),
                            s.predictor.data() + s.predictor.size());
    row.insert(row.end(), s.response.data(),
               s.response.data() + s.response.size());
    row.insert(row.end(), s.aux.begin(), s.aux.end());
    write_csv_row(out, row);
  }
}

}  // namespace ddu
