#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "drn/graph.hpp"
#include "drn/rng.hpp"

namespace drn {

// One seed realizes every retention level at once: U_e is a pure function
// of (seed, structural edge key), so configs at different p are coupled
// edgewise and identical across runs, threads and truncation radii.
struct Environment {
  std::uint64_t seed = 0;
  const RootedGraph* graph = nullptr;

  Environment() = default;
  Environment(std::uint64_t s, const RootedGraph& g) : seed(s), graph(&g) {}

  double uniform(int e) const { return rng::uniform(seed, graph->edge_key[e]); }
};

struct PercConfig {
  const Environment* env = nullptr;
  double p = 0.0;

  PercConfig() = default;
  PercConfig(const Environment& e, double prob) : env(&e), p(prob) {}

  const RootedGraph& graph() const { return *env->graph; }
  bool is_open(int e) const { return env->uniform(e) <= p; }
};

struct Cluster {
  std::vector<int> vertices;
  std::vector<int> open_edges;
  std::vector<char> in_cluster;  // indexed by vertex id
};

// Open-connected component of v.
inline Cluster cluster_of(const PercConfig& cfg, int v) {
  const RootedGraph& g = cfg.graph();
  Cluster cl;
  cl.in_cluster.assign(g.n_vertices(), 0);
  std::vector<char> edge_seen(g.n_edges(), 0);
  std::queue<int> q;
  cl.in_cluster.at(v) = 1;
  cl.vertices.push_back(v);
  q.push(v);
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (auto [y, e] : g.adj[x]) {
      if (!cfg.is_open(e)) continue;
      if (!edge_seen[e]) {
        edge_seen[e] = 1;
        cl.open_edges.push_back(e);
      }
      if (!cl.in_cluster[y]) {
        cl.in_cluster[y] = 1;
        cl.vertices.push_back(y);
        q.push(y);
      }
    }
  }
  return cl;
}

struct Cutset {
  std::vector<int> edges;
  int r_in = -1, r_out = -1;
};

// Checks that removing the cutset disconnects the root from every vertex
// at distance >= r_out (the declared boundary).
inline bool cutset_separates(const RootedGraph& g, const std::vector<int>& cut, int boundary_dist) {
  std::vector<char> blocked(g.n_edges(), 0);
  for (int e : cut) blocked.at(e) = 1;
  std::vector<char> seen(g.n_vertices(), 0);
  std::queue<int> q;
  seen[g.root] = 1;
  q.push(g.root);
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    if (g.vdist[x] >= boundary_dist) return false;
    for (auto [y, e] : g.adj[x]) {
      if (blocked[e] || seen[y]) continue;
      seen[y] = 1;
      q.push(y);
    }
  }
  return true;
}

// Closed edge boundary of the vertices open-reachable from sphere r_in
// inside the annulus [r_in, r_out). Exists iff no open annulus path joins
// the two spheres. With r_in = 0 on a tree this is the outer boundary of
// the truncated open cluster of the root.
inline std::optional<Cutset> extract_closed_cutset(const PercConfig& cfg, int r_in, int r_out) {
  const RootedGraph& g = cfg.graph();
  if (r_in < 0 || r_in >= r_out) throw std::invalid_argument("extract_closed_cutset: bad radii");
  // open-reach from sphere r_in, staying at distances < r_out
  std::vector<char> reach(g.n_vertices(), 0);
  std::queue<int> q;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (g.vdist[v] == r_in) {
      reach[v] = 1;
      q.push(v);
    }
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (auto [y, e] : g.adj[x]) {
      if (reach[y] || !cfg.is_open(e)) continue;
      if (g.vdist[y] >= r_out) return std::nullopt;  // spheres open-connected
      reach[y] = 1;
      q.push(y);
    }
  }
  Cutset cut;
  cut.r_in = r_in;
  cut.r_out = r_out;
  for (int e = 0; e < g.n_edges(); ++e) {
    if (g.is_loop(e)) continue;
    int u = g.edges[e].u, v = g.edges[e].v;
    bool ru = reach[u], rv = reach[v];
    if (ru == rv) continue;
    int outside = ru ? v : u;
    if (g.vdist[outside] < r_in) continue;  // boundary toward the root, not separating outward
    cut.edges.push_back(e);
  }
  return cut;
}

// ---------------------------------------------------------------------------
// Planar dual on grid boxes
// ---------------------------------------------------------------------------

// Dual of a w x h grid box: one vertex per interior face plus one outer
// vertex; a dual edge crosses each primal edge. A dual edge is open iff
// its primal edge is closed.
struct DualConfig {
  RootedGraph graph;
  std::vector<int> primal_edge;  // dual edge id -> primal edge id
  std::vector<int> dual_edge;    // primal edge id -> dual edge id
  const PercConfig* primal = nullptr;

  bool is_open(int e) const { return !primal->is_open(primal_edge[e]); }
};

inline DualConfig dual_config(const PercConfig& cfg) {
  const RootedGraph& g = cfg.graph();
  if (g.family != Family::grid_box)
    throw std::invalid_argument("dual_config: needs a grid_box graph");
  int w = 0, h = 0;
  for (const auto& c : g.coords) {
    w = std::max(w, c[0] + 1);
    h = std::max(h, c[1] + 1);
  }
  if (w < 2 || h < 2) throw std::invalid_argument("dual_config: box too thin");
  int fw = w - 1, fh = h - 1;
  int outer = fw * fh;  // the single outer face

  DualConfig res;
  RootedGraph& d = res.graph;
  d.family = Family::derived;
  d.family_desc = "dual of " + g.family_desc;
  d.adj.resize(outer + 1);
  d.root = outer;
  auto face_id = [&](int fx, int fy) {
    if (fx < 0 || fx >= fw || fy < 0 || fy >= fh) return outer;
    return fy * fw + fx;
  };
  res.primal_edge.reserve(g.n_edges());
  res.dual_edge.assign(g.n_edges(), -1);
  for (int e = 0; e < g.n_edges(); ++e) {
    const auto& cu = g.coords[g.edges[e].u];
    const auto& cv = g.coords[g.edges[e].v];
    int x = std::min(cu[0], cv[0]), y = std::min(cu[1], cv[1]);
    int fa, fb;
    if (cu[1] == cv[1]) {  // horizontal primal edge: faces above and below
      fa = face_id(x, y);
      fb = face_id(x, y - 1);
    } else {  // vertical primal edge: faces left and right
      fa = face_id(x, y);
      fb = face_id(x - 1, y);
    }
    if (fa == fb) continue;  // cannot happen on a w,h >= 2 box
    res.dual_edge[e] = d.n_edges();
    res.primal_edge.push_back(e);
    detail::add_edge(d, fa, fb, rng::hash2(g.edge_key[e], 0x6475616cULL));
  }
  detail::finalize_distances(d);
  res.primal = &cfg;
  return res;
}

// ---------------------------------------------------------------------------
// Edge-disjoint open crossings (Menger via unit-capacity max-flow)
// ---------------------------------------------------------------------------

enum class CrossDir { horizontal, vertical };

// Maximum number of edge-disjoint open crossings of a grid box, left-right
// or top-bottom. Unit capacity per open edge, BFS augmenting paths.
inline int count_edge_disjoint_crossings(const PercConfig& cfg, CrossDir dir) {
  const RootedGraph& g = cfg.graph();
  if (g.family != Family::grid_box)
    throw std::invalid_argument("count_edge_disjoint_crossings: needs a grid_box graph");
  int w = 0, h = 0;
  for (const auto& c : g.coords) {
    w = std::max(w, c[0] + 1);
    h = std::max(h, c[1] + 1);
  }
  if (w < 2 && dir == CrossDir::horizontal)
    throw std::invalid_argument("count_edge_disjoint_crossings: degenerate box");
  if (h < 2 && dir == CrossDir::vertical)
    throw std::invalid_argument("count_edge_disjoint_crossings: degenerate box");

  auto is_source = [&](int v) {
    return dir == CrossDir::horizontal ? g.coords[v][0] == 0 : g.coords[v][1] == 0;
  };
  auto is_sink = [&](int v) {
    return dir == CrossDir::horizontal ? g.coords[v][0] == w - 1 : g.coords[v][1] == h - 1;
  };

  // residual capacity per (edge, orientation): cap[e][0] u->v, cap[e][1] v->u
  std::vector<std::array<int, 2>> cap(g.n_edges(), {0, 0});
  for (int e = 0; e < g.n_edges(); ++e)
    if (cfg.is_open(e) && !g.is_loop(e)) cap[e] = {1, 1};

  int flow = 0;
  std::vector<int> pred_edge(g.n_vertices());
  std::vector<int> pred_vertex(g.n_vertices());
  while (true) {
    std::vector<char> seen(g.n_vertices(), 0);
    std::queue<int> q;
    for (int v = 0; v < g.n_vertices(); ++v)
      if (is_source(v)) {
        seen[v] = 1;
        pred_edge[v] = -1;
        q.push(v);
      }
    int reached = -1;
    while (!q.empty() && reached < 0) {
      int x = q.front();
      q.pop();
      for (auto [y, e] : g.adj[x]) {
        int orient = (g.edges[e].u == x) ? 0 : 1;
        if (seen[y] || cap[e][orient] == 0) continue;
        seen[y] = 1;
        pred_edge[y] = e;
        pred_vertex[y] = x;
        if (is_sink(y)) {
          reached = y;
          break;
        }
        q.push(y);
      }
    }
    if (reached < 0) break;
    for (int v = reached; pred_edge[v] >= 0; v = pred_vertex[v]) {
      int e = pred_edge[v];
      int orient = (g.edges[e].u == pred_vertex[v]) ? 0 : 1;
      cap[e][orient] -= 1;
      cap[e][1 - orient] += 1;
    }
    ++flow;
  }
  return flow;
}

// ---------------------------------------------------------------------------
// Lazy Z^d one-arm estimation
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t pack_point(const std::vector<int>& c) {
  std::uint64_t k = 0;
  for (int x : c) k = (k << 16) | static_cast<std::uint16_t>(x);
  return k;
}

// True iff the open cluster of the origin reaches l1 distance n; lazy BFS,
// no ball materialization. Edge keys match build_zd_ball exactly.
inline bool origin_reaches_sphere(int d, double p, int n, std::uint64_t seed) {
  std::vector<std::vector<int>> frontier = {std::vector<int>(d, 0)};
  std::unordered_set<std::uint64_t> seen = {pack_point(frontier[0])};
  auto norm1 = [](const std::vector<int>& c) {
    int s = 0;
    for (int x : c) s += std::abs(x);
    return s;
  };
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& x : frontier) {
      for (int a = 0; a < d; ++a) {
        for (int dir : {+1, -1}) {
          auto y = x;
          y[a] += dir;
          std::uint64_t key =
              dir > 0 ? detail::lattice_key(x, a) : detail::lattice_key(y, a);
          if (rng::uniform(seed, key) > p) continue;
          if (!seen.insert(pack_point(y)).second) continue;
          if (norm1(y) >= n) return true;
          next.push_back(std::move(y));
        }
      }
    }
    frontier = std::move(next);
  }
  return false;
}

}  // namespace detail

struct OneArmEstimate {
  double p_hat;
  double std_err;
  int hits;
  int replicas;
};

// Monte Carlo frequency of {origin's open cluster reaches the l1 sphere
// of radius n} on Z^d, with binomial standard error.
inline OneArmEstimate estimate_one_arm(int d, double p, int n, int replicas, std::uint64_t seed) {
  if (replicas < 1) throw std::invalid_argument("estimate_one_arm: replicas >= 1");
  int hits = 0;
  for (int r = 0; r < replicas; ++r)
    if (detail::origin_reaches_sphere(d, p, n, rng::sub_seed(seed, r))) ++hits;
  double ph = static_cast<double>(hits) / replicas;
  double se = std::sqrt(ph * (1.0 - ph) / replicas);
  return {ph, se, hits, replicas};
}

}  // namespace drn
