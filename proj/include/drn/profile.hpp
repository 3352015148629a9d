#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "drn/network.hpp"
#include "drn/percolation.hpp"
#include "drn/scaled.hpp"

namespace drn {

struct ProfileRow {
  int n = 0;
  double R = 0.0;
  double nw_lower = 0.0;
  double flow_upper = 0.0;  // energy of the harmonic unit flow, = R when exact
  double residual = 0.0;
  int iters = 0;
};

// Wired effective resistances R(o <-> z_n) over an increasing radius list,
// with a Nash-Williams certificate per radius. Drives classification.
struct ResistanceProfile {
  std::string family;
  std::uint64_t seed = 0;
  double p = 0.0;
  double lambda1 = 1.0, lambda2 = 1.0;
  std::vector<ProfileRow> rows;
};

namespace detail {

// Star-mesh elimination of every vertex except the root and the merged
// sphere-n vertex, outermost (largest distance) first so fill-in stays on
// the shrinking frontier. All-positive Scaled arithmetic: no cancellation,
// immune to conductance ranges like 2^{+-10^4} that break double-precision
// factorizations.
inline double star_mesh_wired(const RootedGraph& g, const std::vector<Scaled>& cond, int n) {
  const int z = -1;  // merged sphere-n vertex
  std::map<int, std::map<int, Scaled>> adj;
  auto node_of = [&](int v) { return g.vdist[v] >= n ? z : v; };
  for (int e = 0; e < g.n_edges(); ++e) {
    int u = g.edges[e].u, v = g.edges[e].v;
    if (g.vdist[u] > n || g.vdist[v] > n) continue;  // outside the ball
    int a = node_of(u), b = node_of(v);
    if (a == b) continue;
    adj[a][b] += cond[e];
    adj[b][a] += cond[e];
  }
  std::vector<int> order;
  for (auto& [v, nb] : adj)
    if (v != z && v != g.root) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.vdist[a] != g.vdist[b]) return g.vdist[a] > g.vdist[b];
    return a > b;
  });
  for (int v : order) {
    auto& nb = adj[v];
    Scaled total;
    for (auto& [w, cw] : nb) total += cw;
    for (auto it1 = nb.begin(); it1 != nb.end(); ++it1) {
      auto it2 = it1;
      for (++it2; it2 != nb.end(); ++it2) {
        Scaled fill = it1->second * it2->second / total;
        adj[it1->first][it2->first] += fill;
        adj[it2->first][it1->first] += fill;
      }
    }
    for (auto& [w, cw] : nb) adj[w].erase(v);
    adj.erase(v);
  }
  auto it = adj[g.root].find(z);
  if (it == adj[g.root].end()) return std::numeric_limits<double>::infinity();
  return Scaled::inverse(it->second).to_double();
}

// Greedy disjoint-annulus closed cutsets: scan outward, close each annulus
// at the first outer radius where the closed cutset exists.
inline double nw_from_closed_cutsets(const PercConfig& cfg, const std::vector<double>& c, int n,
                                     std::vector<Cutset>* out_cuts = nullptr) {
  double total = 0.0;
  int a = 0;
  while (a < n) {
    bool found = false;
    for (int b = a + 1; b <= n; ++b) {
      auto cut = extract_closed_cutset(cfg, a, b);
      if (!cut) continue;
      double csum = 0.0;
      for (int e : cut->edges) csum += c[e];
      if (csum > 0.0) total += 1.0 / csum;
      if (out_cuts) out_cuts->push_back(*cut);
      a = b;
      found = true;
      break;
    }
    if (!found) break;  // spheres a and n open-connected: no more closed cutsets
  }
  return total;
}

}  // namespace detail

inline std::vector<double> disordered_conductances(const RootedGraph& g, const PercConfig& cfg,
                                                   double lambda1, double lambda2) {
  std::vector<double> c(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e)
    c[e] = std::pow(cfg.is_open(e) ? lambda1 : lambda2, -static_cast<double>(g.edist[e]));
  return c;
}

// Profile over wired balls of a lattice-like family. builder(radius) must
// assign structural edge keys consistently across radii.
inline ResistanceProfile profile_lattice(const std::function<RootedGraph(int)>& builder,
                                         const std::string& family, double lambda1, double lambda2,
                                         std::uint64_t seed, double p,
                                         const std::vector<int>& radii) {
  ResistanceProfile prof{family, seed, p, lambda1, lambda2, {}};
  for (int n : radii) {
    auto g = builder(n);
    Environment env(seed, g);
    PercConfig cfg(env, p);
    auto c = disordered_conductances(g, cfg, lambda1, lambda2);
    std::vector<Scaled> sc(g.n_edges());
    for (int e = 0; e < g.n_edges(); ++e)
      sc[e] = Scaled::pow(cfg.is_open(e) ? lambda1 : lambda2, -g.edist[e]);
    ProfileRow row;
    row.n = n;
    row.R = detail::star_mesh_wired(g, sc, n);
    row.flow_upper = row.R;  // harmonic unit flow attains energy R exactly
    row.nw_lower = detail::nw_from_closed_cutsets(cfg, c, n);
    prof.rows.push_back(row);
  }
  // wired monotonicity
  for (std::size_t i = 1; i < prof.rows.size(); ++i)
    if (!(prof.rows[i].R >= prof.rows[i - 1].R * (1.0 - 1e-8)))
      throw std::runtime_error("profile: wired resistance decreased with radius");
  return prof;
}

// ---------------------------------------------------------------------------
// Band graphs at huge radii (Z-Cayley segments, collapsed ladders)
// ---------------------------------------------------------------------------

// position[v] is the integer line coordinate; edges jump at most max_jump.
struct BandProfileInput {
  const RootedGraph* graph = nullptr;
  std::vector<int> position;
  std::vector<Scaled> cond;  // per-edge conductance, all positive
  int max_jump = 1;
};

namespace detail {

// Nash-Williams from line cuts: a cutset pairs one right cut (all edges
// crossing x + 1/2) with one left cut; cuts spaced >= max_jump are
// edge-disjoint. Pairs the two sides' smallest sums.
inline double band_nw_bound(const BandProfileInput& in, int n) {
  const RootedGraph& g = *in.graph;
  int xmax = 0;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (g.vdist[v] <= n) xmax = std::max(xmax, std::abs(in.position[v]));
  if (xmax < 1) return 0.0;
  // crossing-conductance sums per cut position, right side x>=0, left x<0
  std::map<int, Scaled> right, left;
  for (int e = 0; e < g.n_edges(); ++e) {
    int u = g.edges[e].u, v = g.edges[e].v;
    if (g.vdist[u] > n || g.vdist[v] > n) continue;
    int lo = std::min(in.position[u], in.position[v]);
    int hi = std::max(in.position[u], in.position[v]);
    for (int x = lo; x < hi; ++x) {
      if (x >= 0 && x < xmax) right[x] += in.cond[e];
      if (x < 0 && x >= -xmax) left[x] += in.cond[e];
    }
  }
  // greedy spaced selection of the smallest sums per side
  auto pick = [&](std::map<int, Scaled>& sums) {
    std::vector<std::pair<int, Scaled>> v(sums.begin(), sums.end());
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    std::vector<Scaled> chosen;
    std::vector<int> used;
    for (auto& [x, s] : v) {
      bool ok = true;
      for (int u : used) ok = ok && std::abs(u - x) >= in.max_jump;
      if (!ok) continue;
      used.push_back(x);
      chosen.push_back(s);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  };
  auto r = pick(right), l = pick(left);
  double total = 0.0;
  for (std::size_t i = 0; i < std::min(r.size(), l.size()); ++i)
    total += Scaled::inverse(r[i] + l[i]).to_double();
  return total;
}

}  // namespace detail

inline ResistanceProfile profile_band(const BandProfileInput& in, const std::string& family,
                                      double lambda1, double lambda2, std::uint64_t seed, double p,
                                      const std::vector<int>& radii) {
  ResistanceProfile prof{family, seed, p, lambda1, lambda2, {}};
  for (int n : radii) {
    ProfileRow row;
    row.n = n;
    row.R = detail::star_mesh_wired(*in.graph, in.cond, n);
    row.flow_upper = row.R;
    row.nw_lower = detail::band_nw_bound(in, n);
    prof.rows.push_back(row);
  }
  for (std::size_t i = 1; i < prof.rows.size(); ++i)
    if (!(prof.rows[i].R >= prof.rows[i - 1].R * (1.0 - 1e-8)))
      throw std::runtime_error("profile: wired resistance decreased with radius");
  return prof;
}

// Convenience: disordered band input over a materialized band graph, with
// |e| and open states read from a source graph (identity by default).
inline BandProfileInput make_band_input(const RootedGraph& g, const std::vector<int>& position,
                                        int max_jump, std::uint64_t seed, double p, double lambda1,
                                        double lambda2) {
  BandProfileInput in;
  in.graph = &g;
  in.position = position;
  in.max_jump = max_jump;
  Environment env(seed, g);
  PercConfig cfg(env, p);
  in.cond.resize(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e)
    in.cond[e] = Scaled::pow(cfg.is_open(e) ? lambda1 : lambda2, -g.edist[e]);
  return in;
}

// Band input for a fiber-collapsed graph: per-edge conductances sum the
// source edges' disordered values (open state and |e| read from the source),
// in scaled arithmetic so huge line radii survive.
inline BandProfileInput make_band_input_quotient(const CollapseResult& col,
                                                 const RootedGraph& source,
                                                 const std::vector<int>& position, int max_jump,
                                                 std::uint64_t seed, double p, double lambda1,
                                                 double lambda2) {
  BandProfileInput in;
  in.graph = &col.graph;
  in.position = position;
  in.max_jump = max_jump;
  Environment env(seed, source);
  PercConfig cfg(env, p);
  in.cond.assign(col.graph.n_edges(), Scaled());
  for (int e = 0; e < col.graph.n_edges(); ++e)
    for (int src : col.provenance[e])
      in.cond[e] += Scaled::pow(cfg.is_open(src) ? lambda1 : lambda2, -source.edist[src]);
  return in;
}

// Cayley graph of Z with the given generator set, profiled at word radii.
inline ResistanceProfile profile_z_cayley(const std::vector<int>& gens, double lambda1,
                                          double lambda2, std::uint64_t seed, double p,
                                          const std::vector<int>& radii) {
  if (radii.empty()) throw std::invalid_argument("profile_z_cayley: empty radii");
  int max_jump = 0;
  for (int s : gens) max_jump = std::max(max_jump, std::abs(s));
  int n_max = *std::max_element(radii.begin(), radii.end());
  // line range covering every vertex within the largest word radius
  auto g = build_z_cayley(gens, max_jump * (n_max + 1));
  std::vector<int> position(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) position[v] = v - max_jump * (n_max + 1);
  auto in = make_band_input(g, position, max_jump, seed, p, lambda1, lambda2);
  return profile_band(in, "z_cayley", lambda1, lambda2, seed, p, radii);
}

// Ladder Z x C_k collapsed onto its base line, profiled at line radii.
inline ResistanceProfile profile_ladder_collapsed(int k, double lambda1, double lambda2,
                                                  std::uint64_t seed, double p,
                                                  const std::vector<int>& radii) {
  if (radii.empty()) throw std::invalid_argument("profile_ladder_collapsed: empty radii");
  int len = *std::max_element(radii.begin(), radii.end());
  auto g = build_ladder(k, len);
  std::vector<int> fiber(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) fiber[v] = g.coords[v][0] + len;
  auto col = collapse_fibers(g, fiber, 2 * len + 1);
  std::vector<int> position(col.graph.n_vertices());
  for (int b = 0; b < col.graph.n_vertices(); ++b) position[b] = b - len;
  auto in = make_band_input_quotient(col, g, position, 1, seed, p, lambda1, lambda2);
  return profile_band(in, "ladder_collapsed", lambda1, lambda2, seed, p, radii);
}

// ---------------------------------------------------------------------------
// Deep regular trees, never materialized
// ---------------------------------------------------------------------------

// One depth-first pass over the full T^d truncation computes the wired
// resistance to every target depth at once, plus per-annulus Nash-Williams
// accumulators. Annuli are the gaps between consecutive radii; the cutset
// of annulus [a,b) is {closed edges with |e| in [a,b)} union {open edges
// at level b-1 whose path from level a is all open} (a superset of a
// separating set, hence a valid, if conservative, cutset).
inline ResistanceProfile profile_tree(int d, double lambda1, double lambda2, std::uint64_t seed,
                                      double p, const std::vector<int>& radii) {
  if (d < 3) throw std::invalid_argument("profile_tree: d >= 3");
  if (radii.empty() || radii.size() > 8) throw std::invalid_argument("profile_tree: 1..8 radii");
  ResistanceProfile prof{"regular_tree d=" + std::to_string(d), seed, p, lambda1, lambda2, {}};
  const int T = static_cast<int>(radii.size());
  const int D = radii.back();

  std::vector<double> c_open(D), c_closed(D);
  for (int k = 0; k < D; ++k) {
    c_open[k] = std::pow(lambda1, -static_cast<double>(k));
    c_closed[k] = std::pow(lambda2, -static_cast<double>(k));
  }
  // annulus index per level: annulus t covers [radii[t-1], radii[t])
  std::vector<int> annulus(D);
  for (int k = 0, t = 0; k < D; ++k) {
    while (k >= radii[t]) ++t;
    annulus[k] = t;
  }
  std::vector<double> closed_sum(T, 0.0), cross_sum(T, 0.0);

  struct Frame {
    std::uint64_t key;
    int depth;
    int nchild;
    int next_child;
    bool open_from_annulus_start;  // tree path from level radii[t-1] all open
    double C[8];                   // conductance to sphere radii[t], per target
  };
  std::vector<Frame> stack(D + 1);
  int top = 0;
  stack[0] = {kTreeRootKey, 0, d, 0, true, {}};
  for (int t = 0; t < T; ++t) stack[0].C[t] = 0.0;

  while (top >= 0) {
    Frame& f = stack[top];
    if (f.next_child == f.nchild) {
      // fold into parent (or finish)
      if (top == 0) break;
      Frame& par = stack[top - 1];
      int k = par.depth;  // edge level = |e|
      bool is_open = rng::uniform(seed, f.key) <= p;
      double ce = is_open ? c_open[k] : c_closed[k];
      for (int t = 0; t < T; ++t) {
        if (radii[t] <= k) continue;
        if (radii[t] == f.depth) {
          par.C[t] += ce;  // child sits on the target sphere
        } else {
          double Rsub = 1.0 / f.C[t];
          par.C[t] += 1.0 / (1.0 / ce + Rsub);
        }
      }
      --top;
      continue;
    }
    int ci = f.next_child++;
    std::uint64_t ck = tree_child_key(f.key, ci);
    double u = rng::uniform(seed, ck);
    bool is_open = u <= p;
    int k = f.depth;  // edge level
    int t_edge = annulus[k];
    if (!is_open) closed_sum[t_edge] += c_closed[k];
    bool child_open_flag;
    if (k + 1 == radii[t_edge]) {
      // edge crosses into the next annulus (or the outer boundary)
      if (is_open && f.open_from_annulus_start) cross_sum[t_edge] += c_open[k];
      child_open_flag = true;  // fresh annulus starts at the child's level
    } else {
      child_open_flag = f.open_from_annulus_start && is_open;
    }
    if (f.depth + 1 == D) {
      // leaf child: fold immediately without pushing
      double ce = is_open ? c_open[k] : c_closed[k];
      for (int t = 0; t < T; ++t)
        if (radii[t] == D) f.C[t] += ce;
      continue;
    }
    Frame& ch = stack[++top];
    ch.key = ck;
    ch.depth = f.depth + 1;
    ch.nchild = d - 1;
    ch.next_child = 0;
    ch.open_from_annulus_start = child_open_flag;
    for (int t = 0; t < T; ++t) ch.C[t] = 0.0;
  }

  for (int t = 0; t < T; ++t) {
    ProfileRow row;
    row.n = radii[t];
    row.R = 1.0 / stack[0].C[t];
    row.flow_upper = row.R;
    double nw = 0.0;
    for (int j = 0; j <= t; ++j) {
      double s = closed_sum[j] + cross_sum[j];
      if (s > 0.0) nw += 1.0 / s;
    }
    row.nw_lower = nw;
    prof.rows.push_back(row);
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline void profile_csv(const ResistanceProfile& prof, std::ostream& os, bool header = true) {
  if (header) os << "seed,p,n,R,nw_lower,flow_upper,residual,iters\n";
  char buf[256];
  for (const auto& r : prof.rows) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%d\n",
                  static_cast<unsigned long long>(prof.seed), prof.p, r.n, r.R, r.nw_lower,
                  r.flow_upper, r.residual, r.iters);
    os << buf;
  }
}

}  // namespace drn
