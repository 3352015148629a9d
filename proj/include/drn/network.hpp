#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "drn/graph.hpp"
#include "drn/percolation.hpp"

namespace drn {

// ---------------------------------------------------------------------------
// Conductance assignment
// ---------------------------------------------------------------------------

// Biased: c(e) = lambda^{-|e|}. Table: explicit values. Disordered: open
// edges take c1, closed edges c2, under a percolation config.
struct ConductanceSpec {
  enum class Kind { biased, table, disordered };
  Kind kind = Kind::biased;
  double lambda = 1.0;
  std::vector<double> table;
  std::shared_ptr<ConductanceSpec> c1, c2;

  static ConductanceSpec Biased(double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("Biased: lambda must be positive");
    ConductanceSpec s;
    s.kind = Kind::biased;
    s.lambda = lambda;
    return s;
  }
  static ConductanceSpec Table(std::vector<double> values) {
    for (double v : values)
      if (!(v >= 0)) throw std::invalid_argument("Table: negative conductance");
    ConductanceSpec s;
    s.kind = Kind::table;
    s.table = std::move(values);
    return s;
  }
  static ConductanceSpec Disordered(ConductanceSpec open_spec, ConductanceSpec closed_spec) {
    ConductanceSpec s;
    s.kind = Kind::disordered;
    s.c1 = std::make_shared<ConductanceSpec>(std::move(open_spec));
    s.c2 = std::make_shared<ConductanceSpec>(std::move(closed_spec));
    return s;
  }

  // |e| and the open/closed state refer to the graph the edge lives in.
  double value(const RootedGraph& g, int e, const PercConfig* cfg) const {
    switch (kind) {
      case Kind::biased:
        return std::pow(lambda, -static_cast<double>(g.edist[e]));
      case Kind::table:
        if (e >= static_cast<int>(table.size()))
          throw std::invalid_argument("Table: missing entry for edge");
        return table[e];
      case Kind::disordered:
        if (!cfg) throw std::invalid_argument("Disordered: needs a percolation config");
        return (cfg->is_open(e) ? *c1 : *c2).value(g, e, cfg);
    }
    return 0.0;
  }
};

struct Network {
  const RootedGraph* graph = nullptr;
  std::vector<double> c;   // conductance per edge
  std::vector<double> pi;  // vertex weight, sum of incident conductances

  int n_vertices() const { return graph->n_vertices(); }
  int n_edges() const { return graph->n_edges(); }
};

inline Network make_network(const RootedGraph& g, const ConductanceSpec& spec,
                            const PercConfig* cfg = nullptr) {
  Network net;
  net.graph = &g;
  net.c.resize(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e) {
    double v = spec.value(g, e, cfg);
    if (!(v >= 0)) throw std::invalid_argument("make_network: negative conductance");
    net.c[e] = v;
  }
  net.pi.assign(g.n_vertices(), 0.0);
  for (int e = 0; e < g.n_edges(); ++e) {
    net.pi[g.edges[e].u] += net.c[e];
    if (!g.is_loop(e)) net.pi[g.edges[e].v] += net.c[e];
  }
  return net;
}

// Network on a fiber quotient: each quotient edge carries the sum of its
// source edges' conductances, with |e| and open/closed states read in the
// source graph.
inline Network make_network_quotient(const CollapseResult& col, const RootedGraph& source,
                                     const ConductanceSpec& spec,
                                     const PercConfig* cfg = nullptr) {
  const RootedGraph& g = col.graph;
  Network net;
  net.graph = &g;
  net.c.assign(g.n_edges(), 0.0);
  for (int e = 0; e < g.n_edges(); ++e)
    for (int src : col.provenance[e]) net.c[e] += spec.value(source, src, cfg);
  net.pi.assign(g.n_vertices(), 0.0);
  for (int e = 0; e < g.n_edges(); ++e) {
    net.pi[g.edges[e].u] += net.c[e];
    net.pi[g.edges[e].v] += net.c[e];
  }
  return net;
}

// ---------------------------------------------------------------------------
// Effective resistance
// ---------------------------------------------------------------------------

enum class SolveMethod { iterative, dense };

struct ResistanceResult {
  double R = 0.0;
  bool infinite = false;   // A, Z disconnected in the positive-conductance support
  bool converged = true;   // iterative solver met the tolerance
  double residual = 0.0;   // relative residual attained
  int iters = 0;
  std::vector<double> potential;  // v = 1 on A, 0 on Z
  std::vector<double> flow;       // unit-strength harmonic current, oriented u->v
};

namespace detail {

// CG with Jacobi preconditioning on the interior Laplacian system.
// Pushes the relative residual to 1e-13 while progress holds; converged
// means at least 1e-10 was reached before the iteration cap.
inline void solve_interior_cg(const Network& net, const std::vector<int>& interior,
                              const std::vector<int>& idx_of, const std::vector<char>& in_A,
                              std::vector<double>& x, double& residual, int& iters,
                              bool& converged) {
  const RootedGraph& g = *net.graph;
  int m = static_cast<int>(interior.size());
  std::vector<double> diag(m, 0.0), b(m, 0.0);
  for (int i = 0; i < m; ++i) {
    int u = interior[i];
    for (auto [w, e] : g.adj[u]) {
      if (g.is_loop(e) || net.c[e] == 0.0) continue;
      diag[i] += net.c[e];
      if (in_A[w]) b[i] += net.c[e];
    }
  }
  auto apply_L = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int i = 0; i < m; ++i) {
      int u = interior[i];
      double s = diag[i] * v[i];
      for (auto [w, e] : g.adj[u]) {
        if (g.is_loop(e) || net.c[e] == 0.0) continue;
        int j = idx_of[w];
        if (j >= 0) s -= net.c[e] * v[j];
      }
      out[i] = s;
    }
  };
  x.assign(m, 0.0);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  iters = 0;
  converged = true;
  residual = 0.0;
  if (m == 0 || bnorm == 0.0) return;

  std::vector<double> r = b, z(m), pvec(m), Ap(m);
  for (int i = 0; i < m; ++i) z[i] = r[i] / diag[i];
  pvec = z;
  double rz = 0.0;
  for (int i = 0; i < m; ++i) rz += r[i] * z[i];
  int cap = 50 * g.n_vertices();
  double tol = 1e-13, tol_ok = 1e-10;
  int stall = 0;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double rn = 0.0;
    for (double v : r) rn += v * v;
    residual = std::sqrt(rn) / bnorm;
    if (residual <= tol) break;
    if (residual < best * (1.0 - 1e-3)) {
      best = residual;
      stall = 0;
    } else if (++stall >= 50) {
      // rounding floor reached; accept if past the soft tolerance
      converged = residual <= tol_ok;
      break;
    }
    if (iters >= cap) {
      converged = residual <= tol_ok;
      break;
    }
    apply_L(pvec, Ap);
    double pAp = 0.0;
    for (int i = 0; i < m; ++i) pAp += pvec[i] * Ap[i];
    if (pAp <= 0.0) {
      converged = false;
      break;
    }
    double alpha = rz / pAp;
    for (int i = 0; i < m; ++i) {
      x[i] += alpha * pvec[i];
      r[i] -= alpha * Ap[i];
    }
    for (int i = 0; i < m; ++i) z[i] = r[i] / diag[i];
    double rz2 = 0.0;
    for (int i = 0; i < m; ++i) rz2 += r[i] * z[i];
    double beta = rz2 / rz;
    rz = rz2;
    for (int i = 0; i < m; ++i) pvec[i] = z[i] + beta * pvec[i];
    ++iters;
  }
}

inline void solve_interior_dense(const Network& net, const std::vector<int>& interior,
                                 const std::vector<int>& idx_of, const std::vector<char>& in_A,
                                 std::vector<double>& x) {
  const RootedGraph& g = *net.graph;
  int m = static_cast<int>(interior.size());
  x.assign(m, 0.0);
  if (m == 0) return;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    int u = interior[i];
    for (auto [w, e] : g.adj[u]) {
      if (g.is_loop(e) || net.c[e] == 0.0) continue;
      L(i, i) += net.c[e];
      int j = idx_of[w];
      if (j >= 0) L(i, j) -= net.c[e];
      if (in_A[w]) b(i) += net.c[e];
    }
  }
  Eigen::VectorXd sol = L.ldlt().solve(b);
  for (int i = 0; i < m; ++i) x[i] = sol(i);
}

}  // namespace detail

// R(A <-> Z) with the harmonic potential (1 on A, 0 on Z) and the
// unit-strength current. Infinite resistance (no positive-conductance
// path) is reported distinctly from solver non-convergence.
inline ResistanceResult effective_resistance(const Network& net, const std::vector<int>& A,
                                             const std::vector<int>& Z,
                                             SolveMethod method = SolveMethod::iterative) {
  const RootedGraph& g = *net.graph;
  if (A.empty() || Z.empty()) throw std::invalid_argument("effective_resistance: empty terminal");
  std::vector<char> in_A(g.n_vertices(), 0), in_Z(g.n_vertices(), 0);
  for (int v : A) in_A.at(v) = 1;
  for (int v : Z) {
    if (in_A.at(v)) throw std::invalid_argument("effective_resistance: terminals overlap");
    in_Z[v] = 1;
  }

  ResistanceResult res;
  // reachability over positive conductances
  {
    std::vector<char> seen(g.n_vertices(), 0);
    std::queue<int> q;
    for (int v : A) {
      seen[v] = 1;
      q.push(v);
    }
    bool hit = false;
    while (!q.empty() && !hit) {
      int x = q.front();
      q.pop();
      for (auto [y, e] : g.adj[x]) {
        if (net.c[e] == 0.0 || seen[y]) continue;
        if (in_Z[y]) {
          hit = true;
          break;
        }
        seen[y] = 1;
        q.push(y);
      }
    }
    if (!hit) {
      res.infinite = true;
      res.R = std::numeric_limits<double>::infinity();
      return res;
    }
  }

  std::vector<int> interior, idx_of(g.n_vertices(), -1);
  for (int v = 0; v < g.n_vertices(); ++v)
    if (!in_A[v] && !in_Z[v]) {
      idx_of[v] = static_cast<int>(interior.size());
      interior.push_back(v);
    }

  std::vector<double> x;
  if (method == SolveMethod::iterative)
    detail::solve_interior_cg(net, interior, idx_of, in_A, x, res.residual, res.iters,
                              res.converged);
  else
    detail::solve_interior_dense(net, interior, idx_of, in_A, x);

  res.potential.assign(g.n_vertices(), 0.0);
  for (int v = 0; v < g.n_vertices(); ++v)
    res.potential[v] = in_A[v] ? 1.0 : (idx_of[v] >= 0 ? x[idx_of[v]] : 0.0);

  // current out of A at unit voltage = effective conductance
  double strength = 0.0;
  std::vector<double> current(g.n_edges(), 0.0);
  for (int e = 0; e < g.n_edges(); ++e) {
    if (g.is_loop(e)) continue;
    int u = g.edges[e].u, v = g.edges[e].v;
    current[e] = net.c[e] * (res.potential[u] - res.potential[v]);
    if (in_A[u] && !in_A[v]) strength += current[e];
    if (in_A[v] && !in_A[u]) strength -= current[e];
  }
  if (!(strength > 0.0)) {
    res.converged = false;
    res.R = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  res.R = 1.0 / strength;
  res.flow.resize(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e) res.flow[e] = current[e] / strength;
  return res;
}

// P[walk from a hits Z before returning to a] = C(a <-> Z) / pi(a).
inline double escape_probability(const Network& net, int a, const std::vector<int>& Z,
                                 SolveMethod method = SolveMethod::iterative) {
  auto r = effective_resistance(net, {a}, Z, method);
  if (r.infinite) return 0.0;
  return (1.0 / r.R) / net.pi[a];
}

// Energy of a flow given per-edge values oriented u->v: sum theta^2 r over
// edges. A nonzero value on a zero-conductance edge makes the energy infinite.
inline double flow_energy(const Network& net, const std::vector<double>& theta) {
  double s = 0.0;
  for (int e = 0; e < net.n_edges(); ++e) {
    if (theta[e] == 0.0) continue;
    if (net.c[e] == 0.0) return std::numeric_limits<double>::infinity();
    s += theta[e] * theta[e] / net.c[e];
  }
  return s;
}

inline double dirichlet_energy(const Network& net, const std::vector<double>& v) {
  const RootedGraph& g = *net.graph;
  double s = 0.0;
  for (int e = 0; e < net.n_edges(); ++e) {
    if (g.is_loop(e)) continue;
    double dv = v[g.edges[e].u] - v[g.edges[e].v];
    s += net.c[e] * dv * dv;
  }
  return s;
}

// Nash-Williams: sum over cutsets of 1 / (cutset conductance sum), a lower
// bound on R(root <-> boundary). Cutsets must be pairwise disjoint and each
// must separate (validated).
inline double nash_williams_bound(const Network& net, const std::vector<Cutset>& cutsets,
                                  int boundary_dist) {
  const RootedGraph& g = *net.graph;
  std::vector<char> used(g.n_edges(), 0);
  double total = 0.0;
  for (const auto& cut : cutsets) {
    if (!cutset_separates(g, cut.edges, boundary_dist))
      throw std::invalid_argument("nash_williams_bound: cutset does not separate");
    double csum = 0.0;
    for (int e : cut.edges) {
      if (used[e]) throw std::invalid_argument("nash_williams_bound: cutsets overlap");
      used[e] = 1;
      csum += net.c[e];
    }
    if (csum == 0.0) return std::numeric_limits<double>::infinity();
    total += 1.0 / csum;
  }
  return total;
}

// R(root <-> level n) on a tree by leaf-to-root series/parallel recursion.
// Exact and overflow-safe at depths far beyond linear-solver comfort.
inline double tree_resistance_exact(const Network& net, int depth) {
  const RootedGraph& g = *net.graph;
  if (g.n_edges() != g.n_vertices() - 1)
    throw std::invalid_argument("tree_resistance_exact: not a tree");
  // children via the geodesic structure: parent is the neighbor closer to root
  std::vector<double> R_sub(g.n_vertices(), -1.0);  // R(v <-> level depth) below v
  // process vertices by decreasing distance
  std::vector<int> order(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return g.vdist[a] > g.vdist[b]; });
  for (int v : order) {
    if (g.vdist[v] == depth) {
      R_sub[v] = 0.0;
      continue;
    }
    double C = 0.0;
    for (auto [w, e] : g.adj[v]) {
      if (g.vdist[w] != g.vdist[v] + 1) continue;
      if (R_sub[w] < 0.0 || net.c[e] == 0.0) continue;  // subtree misses level depth
      C += 1.0 / (1.0 / net.c[e] + R_sub[w]);
    }
    R_sub[v] = (C > 0.0) ? 1.0 / C : -1.0;
  }
  if (R_sub[g.root] < 0.0) return std::numeric_limits<double>::infinity();
  return R_sub[g.root];
}

}  // namespace drn
