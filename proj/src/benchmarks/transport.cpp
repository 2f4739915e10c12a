#include "ddu/benchmarks/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ddu/errors.hpp"

namespace ddu {

namespace {

void check_inputs(const RowMat &D, const Vec &C, const Vec &r, const Vec &p) {
  if (C.size() != D.cols() || r.size() != D.rows() || p.size() != D.rows())
    throw ContractViolation("transport: dimension mismatch");
  if (!D.allFinite() || !C.allFinite() || !r.allFinite() || !p.allFinite())
    throw ContractViolation("transport: non-finite input");
  if ((C.array() < 0.0).any())
    throw ContractViolation("transport: negative capacity");
}

struct Edge {
  int to;
  int rev;
  double cap;
  double cost;
};

struct Network {
  std::vector<std::vector<Edge>> adj;
  explicit Network(int n) : adj(n) {}
  void add(int u, int v, double cap, double cost) {
    adj[u].push_back({v, static_cast<int>(adj[v].size()), cap, cost});
    adj[v].push_back({u, static_cast<int>(adj[u].size()) - 1, 0.0, -cost});
  }
};

}  // namespace

void transport_fill_duals(TransportSolution &sol, const RowMat &D, const Vec &C,
                          const Vec &r, const Vec &p) {
  const int I = static_cast<int>(D.rows());
  const int J = static_cast<int>(D.cols());
  const Vec w = r + p;
  const double tol = 1e-12 * (1.0 + D.cwiseAbs().maxCoeff() + C.cwiseAbs().maxCoeff());
  sol.capacity_dual = Vec::Zero(J);
  sol.demand_dual = RowMat::Zero(I, J);
  for (int j = 0; j < J; ++j) {
    const double used = sol.allocation.col(j).sum();
    if (used < C[j] - tol) continue;
    // Binding capacity: price it at the best weight left unserved.
    double v = 0.0;
    for (int i = 0; i < I; ++i)
      if (sol.allocation(i, j) < std::max(D(i, j), 0.0) - tol) v = std::max(v, w[i]);
    sol.capacity_dual[j] = v;
  }
  double dual_max = 0.0, primal_max = 0.0, linear = 0.0, cs = 0.0;
  for (int j = 0; j < J; ++j) {
    const double v = sol.capacity_dual[j];
    dual_max += C[j] * v;
    double used = 0.0;
    for (int i = 0; i < I; ++i) {
      const double cap = std::max(D(i, j), 0.0);
      const double z = sol.allocation(i, j);
      const double pi = std::max(w[i] - v, 0.0);
      sol.demand_dual(i, j) = pi;
      dual_max += cap * pi;
      primal_max += w[i] * z;
      linear += p[i] * D(i, j);
      used += z;
      cs = std::max(cs, z * std::abs(v + pi - w[i]));
      cs = std::max(cs, (cap - z) * pi);
    }
    cs = std::max(cs, (C[j] - used) * v);
  }
  sol.value = linear - primal_max;
  sol.dual_value = linear - dual_max;
  sol.gap = std::abs(dual_max - primal_max);
  sol.complementarity = cs;
  sol.subgradient.resize(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      sol.subgradient(i, j) = p[i] - (D(i, j) >= 0.0 ? sol.demand_dual(i, j) : 0.0);
}

TransportSolution transport_solve(const RowMat &D, const Vec &C, const Vec &r,
                                  const Vec &p) {
  check_inputs(D, C, r, p);
  const int I = static_cast<int>(D.rows());
  const int J = static_cast<int>(D.cols());
  const int src = 0, sink = 1 + I + J;
  Network net(I + J + 2);
  const Vec w = r + p;
  for (int i = 0; i < I; ++i) {
    double row = 0.0;
    for (int j = 0; j < J; ++j) row += std::max(D(i, j), 0.0);
    net.add(src, 1 + i, row, 0.0);
    for (int j = 0; j < J; ++j)
      net.add(1 + i, 1 + I + j, std::max(D(i, j), 0.0), -w[i]);
  }
  for (int j = 0; j < J; ++j) net.add(1 + I + j, sink, C[j], 0.0);

  const int N = I + J + 2;
  const double inf = std::numeric_limits<double>::infinity();
  const double eps = 1e-14;
  // Augment along cheapest paths while they still reduce cost. Bellman-Ford
  // handles the negative arc costs; the network is tiny.
  for (int iter = 0; iter < 4 * (I * J + I + J) + 8; ++iter) {
    std::vector<double> dist(N, inf);
    std::vector<int> prev_node(N, -1), prev_edge(N, -1);
    dist[src] = 0.0;
    for (int round = 0; round < N; ++round) {
      bool changed = false;
      for (int u = 0; u < N; ++u) {
        if (dist[u] == inf) continue;
        for (int e = 0; e < static_cast<int>(net.adj[u].size()); ++e) {
          const Edge &ed = net.adj[u][e];
          if (ed.cap <= eps) continue;
          if (dist[u] + ed.cost < dist[ed.to] - 1e-15) {
            dist[ed.to] = dist[u] + ed.cost;
            prev_node[ed.to] = u;
            prev_edge[ed.to] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == inf || dist[sink] >= -1e-15) break;
    double push = inf;
    for (int v = sink; v != src; v = prev_node[v])
      push = std::min(push, net.adj[prev_node[v]][prev_edge[v]].cap);
    for (int v = sink; v != src; v = prev_node[v]) {
      Edge &ed = net.adj[prev_node[v]][prev_edge[v]];
      ed.cap -= push;
      net.adj[v][ed.rev].cap += push;
    }
  }

  TransportSolution sol;
  sol.allocation = RowMat::Zero(I, J);
  for (int i = 0; i < I; ++i)
    for (const Edge &ed : net.adj[1 + i])
      if (ed.to >= 1 + I && ed.to < 1 + I + J)
        sol.allocation(i, ed.to - 1 - I) = net.adj[ed.to][ed.rev].cap;
  transport_fill_duals(sol, D, C, r, p);
  return sol;
}

TransportSolution transport_solve_greedy(const RowMat &D, const Vec &C,
                                         const Vec &r, const Vec &p) {
  check_inputs(D, C, r, p);
  const int I = static_cast<int>(D.rows());
  const int J = static_cast<int>(D.cols());
  const Vec w = r + p;
  std::vector<int> order(I);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&w](int a, int b) { return w[a] > w[b]; });
  TransportSolution sol;
  sol.allocation = RowMat::Zero(I, J);
  for (int j = 0; j < J; ++j) {
    double left = C[j];
    for (int i : order) {
      if (left <= 0.0 || w[i] <= 0.0) break;
      const double z = std::min(std::max(D(i, j), 0.0), left);
      sol.allocation(i, j) = z;
      left -= z;
    }
  }
  transport_fill_duals(sol, D, C, r, p);
  return sol;
}

}  // namespace ddu
