#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "drn/rng.hpp"

namespace drn {

enum class Family { zd_ball, regular_tree, z_cayley, ladder, grid_box, derived, custom };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::zd_ball: return "zd_ball";
    case Family::regular_tree: return "regular_tree";
    case Family::z_cayley: return "z_cayley";
    case Family::ladder: return "ladder";
    case Family::grid_box: return "grid_box";
    case Family::derived: return "derived";
    case Family::custom: return "custom";
  }
  return "?";
}

// Finite rooted graph with canonical vertex/edge ids and distance labels.
// |x| is the BFS distance to the root, |e| = min(|x|,|y|) for e = {x,y}.
// Multigraphs are allowed (parallel edges, loops) for derived graphs.
struct RootedGraph {
  struct Edge {
    int u, v;
  };

  Family family = Family::custom;
  std::string family_desc = "custom";
  int root = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<std::pair<int, int>>> adj;  // vertex -> (neighbor, edge id)
  std::vector<int> vdist;
  std::vector<int> edist;
  // Structural edge identity, stable across truncation radii of the same
  // family, so one percolation environment spans a whole exhaustion.
  std::vector<std::uint64_t> edge_key;
  // Lattice coordinates when the family has them (zd_ball, grid_box, ladder).
  std::vector<std::vector<int>> coords;

  int n_vertices() const { return static_cast<int>(adj.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  bool is_loop(int e) const { return edges[e].u == edges[e].v; }
  int other_end(int e, int x) const { return edges[e].u == x ? edges[e].v : edges[e].u; }

  int max_distance() const {
    int m = 0;
    for (int d : vdist) m = std::max(m, d);
    return m;
  }

  std::vector<int> sphere(int r) const {
    std::vector<int> s;
    for (int v = 0; v < n_vertices(); ++v)
      if (vdist[v] == r) s.push_back(v);
    return s;
  }
};

namespace detail {

inline std::vector<int> bfs_distances(const RootedGraph& g, int start) {
  std::vector<int> dist(g.n_vertices(), -1);
  std::queue<int> q;
  dist[start] = 0;
  q.push(start);
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (auto [y, e] : g.adj[x]) {
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        q.push(y);
      }
    }
  }
  return dist;
}

inline void finalize_distances(RootedGraph& g) {
  g.vdist = bfs_distances(g, g.root);
  for (int d : g.vdist)
    if (d < 0) throw std::invalid_argument("graph is not connected");
  g.edist.resize(g.edges.size());
  for (int e = 0; e < g.n_edges(); ++e)
    g.edist[e] = std::min(g.vdist[g.edges[e].u], g.vdist[g.edges[e].v]);
}

inline void add_edge(RootedGraph& g, int u, int v, std::uint64_t key) {
  int e = g.n_edges();
  g.edges.push_back({u, v});
  g.edge_key.push_back(key);
  g.adj[u].emplace_back(v, e);
  if (v != u) g.adj[v].emplace_back(u, e);
}

// Packs small signed lattice data into a structural key.
inline std::uint64_t lattice_key(const std::vector<int>& c, int axis) {
  std::uint64_t k = 0;
  for (int x : c) k = k * 2097152ULL + static_cast<std::uint64_t>(x + 1048576);
  k = k * 8ULL + static_cast<std::uint64_t>(axis);
  return rng::mix64(k + rng::kGolden);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Family builders
// ---------------------------------------------------------------------------

// Closed l1-ball of Z^d around the origin. Vertex ids ordered by
// (distance, lexicographic coordinates); edges by (vertex id, axis).
inline RootedGraph build_zd_ball(int d, int radius) {
  if (d < 1) throw std::invalid_argument("zd_ball: d must be >= 1");
  if (radius < 0) throw std::invalid_argument("zd_ball: negative radius");
  std::vector<std::vector<int>> pts;
  std::vector<int> cur(d, 0);
  // enumerate all points with |x|_1 <= radius
  auto rec = [&](auto&& self, int axis, int budget) -> void {
    if (axis == d) {
      pts.push_back(cur);
      return;
    }
    for (int x = -budget; x <= budget; ++x) {
      cur[axis] = x;
      self(self, axis + 1, budget - std::abs(x));
    }
    cur[axis] = 0;
  };
  rec(rec, 0, radius);
  auto norm1 = [](const std::vector<int>& p) {
    int s = 0;
    for (int x : p) s += std::abs(x);
    return s;
  };
  std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
    int na = norm1(a), nb = norm1(b);
    if (na != nb) return na < nb;
    return a < b;
  });
  std::map<std::vector<int>, int> id_of;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) id_of[pts[i]] = i;

  RootedGraph g;
  g.family = Family::zd_ball;
  g.family_desc = "zd_ball d=" + std::to_string(d) + " radius=" + std::to_string(radius);
  g.adj.resize(pts.size());
  g.coords = pts;
  g.root = 0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    for (int a = 0; a < d; ++a) {
      auto nb = pts[i];
      nb[a] += 1;
      auto it = id_of.find(nb);
      if (it != id_of.end()) detail::add_edge(g, i, it->second, detail::lattice_key(pts[i], a));
    }
  }
  detail::finalize_distances(g);
  return g;
}

// d-regular tree truncated at the given depth: root has d children, every
// other internal vertex d-1. Ids in BFS order; edge keys follow the same
// hash chain as the lazy tree samplers so environments agree.
inline constexpr std::uint64_t kTreeRootKey = 0x7261576b6f6f7231ULL;

inline std::uint64_t tree_child_key(std::uint64_t parent_key, int child_index) {
  return rng::hash2(parent_key, static_cast<std::uint64_t>(child_index));
}

inline RootedGraph build_regular_tree(int d, int depth) {
  if (d < 1) throw std::invalid_argument("regular_tree: d must be >= 1");
  if (depth < 0) throw std::invalid_argument("regular_tree: negative depth");
  RootedGraph g;
  g.family = Family::regular_tree;
  g.family_desc = "regular_tree d=" + std::to_string(d) + " depth=" + std::to_string(depth);
  g.adj.emplace_back();
  g.root = 0;
  std::vector<std::pair<int, std::uint64_t>> level = {{0, kTreeRootKey}};
  for (int lev = 0; lev < depth; ++lev) {
    std::vector<std::pair<int, std::uint64_t>> next;
    int nchild = (lev == 0) ? d : d - 1;
    for (auto [vid, vkey] : level) {
      for (int c = 0; c < nchild; ++c) {
        int w = g.n_vertices();
        g.adj.emplace_back();
        std::uint64_t ck = tree_child_key(vkey, c);
        detail::add_edge(g, vid, w, ck);
        next.emplace_back(w, ck);
      }
    }
    level = std::move(next);
  }
  detail::finalize_distances(g);
  return g;
}

// Cayley graph of Z with a symmetric generator set, restricted to the
// integer segment [-radius, radius]. Vertex id = x + radius.
inline RootedGraph build_z_cayley(std::vector<int> generators, int radius) {
  if (radius < 0) throw std::invalid_argument("z_cayley: negative radius");
  std::vector<int> gens;
  for (int s : generators) {
    if (s == 0) throw std::invalid_argument("z_cayley: zero generator");
    gens.push_back(std::abs(s));
  }
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  if (gens.empty()) throw std::invalid_argument("z_cayley: empty generator set");

  RootedGraph g;
  g.family = Family::z_cayley;
  g.family_desc = "z_cayley radius=" + std::to_string(radius) + " gens=";
  for (int s : gens) g.family_desc += "+-" + std::to_string(s);
  g.adj.resize(2 * radius + 1);
  g.root = radius;  // x = 0
  for (int x = -radius; x <= radius; ++x) {
    for (int s : gens) {
      if (x + s <= radius)
        detail::add_edge(g, x + radius, x + s + radius, detail::lattice_key({x}, s));
    }
  }
  detail::finalize_distances(g);
  return g;
}

// Finite segment of Z x C_k: positions -length..length, rung cycle C_k.
// Vertex id = (x+length)*k + y, root (0,0).
inline RootedGraph build_ladder(int rung_size, int length) {
  if (rung_size < 3) throw std::invalid_argument("ladder: rung cycle needs k >= 3");
  if (length < 0) throw std::invalid_argument("ladder: negative length");
  int k = rung_size;
  RootedGraph g;
  g.family = Family::ladder;
  g.family_desc = "ladder rung=C" + std::to_string(k) + " length=" + std::to_string(length);
  int w = 2 * length + 1;
  g.adj.resize(static_cast<std::size_t>(w) * k);
  g.coords.resize(static_cast<std::size_t>(w) * k);
  g.root = length * k;  // (0, 0)
  auto id = [&](int x, int y) { return (x + length) * k + y; };
  for (int x = -length; x <= length; ++x)
    for (int y = 0; y < k; ++y) g.coords[id(x, y)] = {x, y};
  for (int x = -length; x <= length; ++x) {
    for (int y = 0; y < k; ++y) {
      // rung edge within the cycle (skip the duplicate when k == 2)
      int y2 = (y + 1) % k;
      if (y < y2 || (y2 == 0 && y == k - 1))
        detail::add_edge(g, id(x, y), id(x, y2), detail::lattice_key({x, y}, 0));
      if (x + 1 <= length)
        detail::add_edge(g, id(x, y), id(x + 1, y), detail::lattice_key({x, y}, 1));
    }
  }
  detail::finalize_distances(g);
  return g;
}

// w x h vertex box of Z^2 with root at the lower-left corner.
// Vertex id = y*w + x.
inline RootedGraph build_grid_box(int w, int h) {
  if (w < 1 || h < 1) throw std::invalid_argument("grid_box: degenerate box");
  RootedGraph g;
  g.family = Family::grid_box;
  g.family_desc = "grid_box w=" + std::to_string(w) + " h=" + std::to_string(h);
  g.adj.resize(static_cast<std::size_t>(w) * h);
  g.coords.resize(static_cast<std::size_t>(w) * h);
  g.root = 0;
  auto id = [&](int x, int y) { return y * w + x; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g.coords[id(x, y)] = {x, y};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) detail::add_edge(g, id(x, y), id(x + 1, y), detail::lattice_key({x, y}, 0));
      if (y + 1 < h) detail::add_edge(g, id(x, y), id(x, y + 1), detail::lattice_key({x, y}, 1));
    }
  }
  detail::finalize_distances(g);
  return g;
}

// ---------------------------------------------------------------------------
// Geodesic spanning tree
// ---------------------------------------------------------------------------

struct GeodesicTree {
  int root;
  std::vector<int> parent;      // parent[v], -1 at the root
  std::vector<int> parent_edge; // edge id into the parent, -1 at the root
  std::vector<int> depth;
};

// Distance-preserving spanning tree: parent of x is its smallest-id
// neighbor at distance |x|-1.
inline GeodesicTree geodesic_spanning_tree(const RootedGraph& g) {
  GeodesicTree t;
  t.root = g.root;
  t.parent.assign(g.n_vertices(), -1);
  t.parent_edge.assign(g.n_vertices(), -1);
  t.depth = g.vdist;
  for (int x = 0; x < g.n_vertices(); ++x) {
    if (x == g.root) continue;
    int best = -1, best_e = -1;
    for (auto [y, e] : g.adj[x]) {
      if (g.vdist[y] == g.vdist[x] - 1 && (best < 0 || y < best)) {
        best = y;
        best_e = e;
      }
    }
    if (best < 0) throw std::logic_error("geodesic_spanning_tree: no parent candidate");
    t.parent[x] = best;
    t.parent_edge[x] = best_e;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Derived graphs
// ---------------------------------------------------------------------------

struct ContractResult {
  RootedGraph graph;
  std::vector<int> vertex_map;  // old vertex id -> new vertex id
  int z;                        // id of the merged boundary vertex
  std::vector<int> edge_map;    // old edge id -> new edge id, -1 if dropped
};

// Wired contraction: merges the boundary set into a single vertex z,
// keeps parallel edges, drops loops.
inline ContractResult contract_boundary(const RootedGraph& g, const std::vector<int>& boundary) {
  if (boundary.empty()) throw std::invalid_argument("contract_boundary: empty boundary");
  std::vector<char> in_b(g.n_vertices(), 0);
  for (int v : boundary) in_b.at(v) = 1;
  if (in_b[g.root]) throw std::invalid_argument("contract_boundary: boundary contains the root");

  ContractResult res;
  res.vertex_map.assign(g.n_vertices(), -1);
  int next = 0;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (!in_b[v]) res.vertex_map[v] = next++;
  res.z = next;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (in_b[v]) res.vertex_map[v] = res.z;

  RootedGraph& h = res.graph;
  h.family = Family::derived;
  h.family_desc = "derived(contract) of " + g.family_desc;
  h.adj.resize(next + 1);
  h.root = res.vertex_map[g.root];
  res.edge_map.assign(g.n_edges(), -1);
  for (int e = 0; e < g.n_edges(); ++e) {
    int u = res.vertex_map[g.edges[e].u];
    int v = res.vertex_map[g.edges[e].v];
    if (u == v) continue;  // loop at z (or pre-existing loop): removed
    res.edge_map[e] = h.n_edges();
    detail::add_edge(h, u, v, g.edge_key[e]);
  }
  detail::finalize_distances(h);
  return res;
}

struct CollapseResult {
  RootedGraph graph;
  std::vector<std::vector<int>> provenance;  // quotient edge -> source edge ids
  std::vector<int> dropped_loops;            // source edges collapsed to loops
};

// Quotient by a fiber map (vertex -> base id in [0, n_base)). Parallel
// edges are kept with provenance so conductances can be summed downstream;
// edges inside one fiber become loops and are dropped.
inline CollapseResult collapse_fibers(const RootedGraph& g, const std::vector<int>& fiber_of,
                                      int n_base) {
  if (static_cast<int>(fiber_of.size()) != g.n_vertices())
    throw std::invalid_argument("collapse_fibers: fiber map not total");
  std::vector<char> hit(n_base, 0);
  for (int b : fiber_of) {
    if (b < 0 || b >= n_base) throw std::invalid_argument("collapse_fibers: fiber out of range");
    hit[b] = 1;
  }
  for (int b = 0; b < n_base; ++b)
    if (!hit[b]) throw std::invalid_argument("collapse_fibers: fiber map not surjective");

  CollapseResult res;
  RootedGraph& h = res.graph;
  h.family = Family::derived;
  h.family_desc = "derived(collapse) of " + g.family_desc;
  h.adj.resize(n_base);
  h.root = fiber_of[g.root];
  for (int e = 0; e < g.n_edges(); ++e) {
    int u = fiber_of[g.edges[e].u];
    int v = fiber_of[g.edges[e].v];
    if (u == v) {
      res.dropped_loops.push_back(e);
      continue;
    }
    detail::add_edge(h, u, v, g.edge_key[e]);
    res.provenance.push_back({e});
  }
  detail::finalize_distances(h);
  return res;
}

// Text dump: header with the family tag, then one line per edge.
inline void dump_edges(const RootedGraph& g, std::ostream& os) {
  os << "# " << g.family_desc << " vertices=" << g.n_vertices() << " edges=" << g.n_edges()
     << " root=" << g.root << "\n";
  for (int e = 0; e < g.n_edges(); ++e)
    os << e << " " << g.edges[e].u << " " << g.edges[e].v << " " << g.edist[e] << " "
       << (g.is_loop(e) ? 1 : 0) << "\n";
}

}  // namespace drn
