#include "ddu/benchmarks/facility.hpp"

#include <cmath>
#include <json.hpp>

#include "ddu/errors.hpp"
#include "ddu/simulation.hpp"

namespace ddu {

FacilitySpec FacilitySpec::generate(std::uint64_t seed) {
  FacilitySpec s;
  s.seed = seed;
  Rng rng(seed);
  std::uniform_real_distribution<double> box(s.lo, s.hi);
  auto draw = [&rng](int n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
  };
  s.a.resize(s.I);
  s.b.resize(s.I);
  for (int i = 0; i < s.I; ++i) {
    s.a[i] = box(rng);
    s.b[i] = box(rng);
  }
  s.C = draw(s.J, 20.0, 40.0);
  s.mu_tilde = draw(s.I, 15.0, 25.0);
  s.sigma_tilde = draw(s.I, 2.0, 5.0);
  s.r = Vec::Constant(s.I, 1.0);
  s.p = Vec::Constant(s.I, 0.5);
  return s;
}

void FacilitySpec::validate() const {
  if (I < 1 || J < 1) throw ContractViolation("facility: need I, J >= 1");
  if (!(lo < hi)) throw ContractViolation("facility: empty box");
  if (!(u > 0.0) || !(gamma > 0.0) || !(eps_l > 0.0))
    throw ContractViolation("facility: u, gamma, eps_l must be positive");
  if (a.size() != I || b.size() != I || mu_tilde.size() != I ||
      sigma_tilde.size() != I || r.size() != I || p.size() != I || C.size() != J)
    throw ContractViolation("facility: parameter lengths do not match I, J");
  if (!(mu_tilde.array() > 0.0).all() || !(sigma_tilde.array() > 0.0).all())
    throw ContractViolation("facility: mu~ and sigma~ must be positive");
}

namespace {

using nlohmann::json;

json to_array(const Vec &v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec from_array(const json &j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string facility_to_json(const FacilitySpec &s) {
  json j;
  j["I"] = s.I;
  j["J"] = s.J;
  j["lo"] = s.lo;
  j["hi"] = s.hi;
  j["u"] = s.u;
  j["gamma"] = s.gamma;
  j["eps_l"] = s.eps_l;
  j["a"] = to_array(s.a);
  j["b"] = to_array(s.b);
  j["C"] = to_array(s.C);
  j["mu_tilde"] = to_array(s.mu_tilde);
  j["sigma_tilde"] = to_array(s.sigma_tilde);
  j["r"] = to_array(s.r);
  j["p"] = to_array(s.p);
  j["homoscedastic"] = s.homoscedastic;
  j["seed"] = s.seed;
  return j.dump(2);
}

FacilitySpec facility_from_json(const std::string &text) {
  FacilitySpec s;
  try {
    const json j = json::parse(text);
    s.I = j.at("I").get<int>();
    s.J = j.at("J").get<int>();
    s.lo = j.at("lo").get<double>();
    s.hi = j.at("hi").get<double>();
    s.u = j.at("u").get<double>();
    s.gamma = j.at("gamma").get<double>();
    s.eps_l = j.at("eps_l").get<double>();
    s.a = from_array(j.at("a"));
    s.b = from_array(j.at("b"));
    s.C = from_array(j.at("C"));
    s.mu_tilde = from_array(j.at("mu_tilde"));
    s.sigma_tilde = from_array(j.at("sigma_tilde"));
    s.r = from_array(j.at("r"));
    s.p = from_array(j.at("p"));
    s.homoscedastic = j.value("homoscedastic", false);
    s.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception &e) {
    throw ParseError(std::string("facility instance: ") + e.what());
  }
  s.validate();
  return s;
}

FacilityTerms facility_terms(const Vec &xy, const FacilitySpec &s) {
  if (xy.size() != s.dim()) throw ContractViolation("facility: decision length");
  FacilityTerms t;
  t.l.resize(s.I, s.J);
  t.beta.resize(s.I, s.J);
  t.mu.resize(s.I);
  t.sigma.resize(s.I);
  for (int i = 0; i < s.I; ++i) {
    double inv_sum = 0.0;
    for (int j = 0; j < s.J; ++j) {
      const double dx = xy[j] - s.a[i], dy = xy[s.J + j] - s.b[i];
      t.l(i, j) = std::max(dx * dx + dy * dy, s.eps_l);
      inv_sum += 1.0 / (s.u * t.l(i, j));
    }
    const double lmin = t.l.row(i).minCoeff();
    double z = 0.0;
    for (int j = 0; j < s.J; ++j) {
      t.beta(i, j) = std::exp(-(t.l(i, j) - lmin) / s.gamma);
      z += t.beta(i, j);
    }
    t.beta.row(i) /= z;
    const double g = -std::expm1(-inv_sum);
    t.mu[i] = s.mu_tilde[i] * g;
    t.sigma[i] = s.sigma_tilde[i] * g;
  }
  return t;
}

RowMat facility_demand(const Vec &xy, const RowMat &eps, const FacilitySpec &s) {
  const FacilityTerms t = facility_terms(xy, s);
  RowMat D(s.I, s.J);
  // beta (mu + sigma eps) = beta sigma (mu~/sigma~ + eps); this form is
  // exactly zero at the lower truncation point.
  for (int i = 0; i < s.I; ++i) {
    const double ratio = s.mu_tilde[i] / s.sigma_tilde[i];
    for (int j = 0; j < s.J; ++j)
      D(i, j) = t.beta(i, j) * t.sigma[i] * (ratio + eps(i, j));
  }
  return D;
}

Vec facility_mean(const Vec &xy, const FacilitySpec &s) {
  const FacilityTerms t = facility_terms(xy, s);
  Vec c(s.response_dim());
  for (int i = 0; i < s.I; ++i)
    for (int j = 0; j < s.J; ++j) c[i * s.J + j] = t.beta(i, j) * t.mu[i];
  return c;
}

Vec facility_sd(const Vec &xy, const FacilitySpec &s) {
  const FacilityTerms t = facility_terms(xy, s);
  Vec q(s.response_dim());
  for (int i = 0; i < s.I; ++i)
    for (int j = 0; j < s.J; ++j) q[i * s.J + j] = t.beta(i, j) * t.sigma[i];
  return q;
}

namespace {

// Jacobian of beta_ij * scale_i * g_i, with g_i = 1 - exp(-sum_j 1/(u l_ij)).
Mat scaled_jacobian(const Vec &xy, const FacilitySpec &s, const Vec &scale) {
  const FacilityTerms t = facility_terms(xy, s);
  const int d = s.dim();
  Mat jac = Mat::Zero(s.response_dim(), d);
  Vec dl_dx(s.J), dl_dy(s.J);
  for (int i = 0; i < s.I; ++i) {
    double inv_sum = 0.0;
    for (int j = 0; j < s.J; ++j) {
      const double dx = xy[j] - s.a[i], dy = xy[s.J + j] - s.b[i];
      const bool floored = dx * dx + dy * dy < s.eps_l;
      dl_dx[j] = floored ? 0.0 : 2.0 * dx;
      dl_dy[j] = floored ? 0.0 : 2.0 * dy;
      inv_sum += 1.0 / (s.u * t.l(i, j));
    }
    const double g = -std::expm1(-inv_sum);
    const double eg = std::exp(-inv_sum);
    // d g_i / d(coordinate of facility k) = eg * (-1/(u l_ik^2)) dl_ik.
    for (int k = 0; k < s.J; ++k) {
      const double ds = -1.0 / (s.u * t.l(i, k) * t.l(i, k));
      const double dgx = eg * ds * dl_dx[k];
      const double dgy = eg * ds * dl_dy[k];
      for (int j = 0; j < s.J; ++j) {
        const double bij = t.beta(i, j);
        const double db = bij * ((j == k ? 1.0 : 0.0) - t.beta(i, k)) * (-1.0 / s.gamma);
        const int row = i * s.J + j;
        jac(row, k) = scale[i] * (db * dl_dx[k] * g + bij * dgx);
        jac(row, s.J + k) = scale[i] * (db * dl_dy[k] * g + bij * dgy);
      }
    }
  }
  return jac;
}

}  // namespace

Mat facility_mean_jacobian(const Vec &xy, const FacilitySpec &s) {
  return scaled_jacobian(xy, s, s.mu_tilde);
}

Mat facility_sd_jacobian(const Vec &xy, const FacilitySpec &s) {
  return scaled_jacobian(xy, s, s.sigma_tilde);
}

GroundTruthModel facility_truth(const FacilitySpec &spec) {
  spec.validate();
  GroundTruthModel m;
  m.input_dim = spec.dim();
  m.response_dim = spec.response_dim();
  m.mean = [spec](const Vec &xy) { return facility_mean(xy, spec); };
  m.mean_jacobian = [spec](const Vec &xy) { return facility_mean_jacobian(xy, spec); };
  m.sd_diag = [spec](const Vec &xy) { return facility_sd(xy, spec); };
  m.sd_jacobian = [spec](const Vec &xy) { return facility_sd_jacobian(xy, spec); };
  m.residual_sampler = [spec](Rng &rng) {
    Residual r;
    r.eps.resize(spec.response_dim());
    for (int i = 0; i < spec.I; ++i) {
      const double bound = spec.mu_tilde[i] / spec.sigma_tilde[i];
      for (int j = 0; j < spec.J; ++j)
        r.eps[i * spec.J + j] = sample_truncated_normal(0.0, 1.0, -bound, bound, rng);
    }
    return r;
  };
  return m;
}

DDUProblem facility_problem(const FacilitySpec &spec,
                            std::shared_ptr<FacilityStats> stats) {
  spec.validate();
  DDUProblem pr;
  pr.name = "facility";
  pr.domain = BoxDomain(Vec::Constant(spec.dim(), spec.lo),
                        Vec::Constant(spec.dim(), spec.hi));
  pr.response_dim = spec.response_dim();
  pr.channels.homoscedastic = spec.homoscedastic;
  pr.cost_smooth = false;
  pr.decision_enters_cost = false;
  const int I = spec.I, J = spec.J;
  const Vec C = spec.C, r = spec.r, p = spec.p;
  pr.cost = [I, J, C, r, p, stats](const Vec &x, const Vec &s, double,
                                   const Aux &, CostEval *g) {
    const RowMat D = Eigen::Map<const RowMat>(s.data(), I, J);
    const TransportSolution sol = transport_solve_greedy(D, C, r, p);
    if (stats) {
      ++stats->solves;
      stats->max_gap = std::max(stats->max_gap, sol.gap);
      stats->max_complementarity =
          std::max(stats->max_complementarity, sol.complementarity);
    }
    if (g) {
      g->value = sol.value;
      g->grad_x = Vec::Zero(x.size());
      g->grad_s = Eigen::Map<const Vec>(sol.subgradient.data(), I * J);
      g->grad_w = 0.0;
    }
    return sol.value;
  };
  return pr;
}

}  // namespace ddu
