#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <sstream>

#include "drn/graph.hpp"

using namespace drn;

namespace {

void check_invariants(const RootedGraph& g) {
  // edge distance = min of endpoint distances, exhaustively
  for (int e = 0; e < g.n_edges(); ++e)
    REQUIRE(g.edist[e] == std::min(g.vdist[g.edges[e].u], g.vdist[g.edges[e].v]));
  REQUIRE(g.vdist[g.root] == 0);
}

std::multiset<std::pair<int, int>> edge_table(const RootedGraph& g) {
  std::multiset<std::pair<int, int>> t;
  for (auto& e : g.edges) t.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  return t;
}

}  // namespace

TEST_CASE("zd_ball d=1 radius=3 is the path -3..3") {
  auto g = build_zd_ball(1, 3);
  REQUIRE(g.n_vertices() == 7);
  REQUIRE(g.n_edges() == 6);
  check_invariants(g);
  // the edge {2,3} has |e| = 2
  for (int e = 0; e < g.n_edges(); ++e) {
    int a = g.coords[g.edges[e].u][0], b = g.coords[g.edges[e].v][0];
    if (std::min(a, b) == 2 && std::max(a, b) == 3) REQUIRE(g.edist[e] == 2);
  }
}

TEST_CASE("regular_tree d=3 depth=2 has 10 vertices") {
  auto g = build_regular_tree(3, 2);
  REQUIRE(g.n_vertices() == 10);
  REQUIRE(g.n_edges() == 9);
  check_invariants(g);
  REQUIRE(static_cast<int>(g.adj[g.root].size()) == 3);
  // adjacent vertices differ in distance by exactly 1
  for (auto& e : g.edges) REQUIRE(std::abs(g.vdist[e.u] - g.vdist[e.v]) == 1);
}

TEST_CASE("z_cayley {+-2,+-3} radius=4") {
  auto g = build_z_cayley({2, 3, -2, -3}, 4);
  REQUIRE(g.n_vertices() == 9);  // -4..4
  check_invariants(g);
  std::set<int> nbrs;
  for (auto [y, e] : g.adj[g.root]) nbrs.insert(y - 4);  // id = x + radius
  REQUIRE(nbrs == std::set<int>{-3, -2, 2, 3});
}

TEST_CASE("ladder Z x C4") {
  auto g = build_ladder(4, 3);
  REQUIRE(g.n_vertices() == 7 * 4);
  check_invariants(g);
  // every vertex away from the ends has degree 4 (2 rung + 2 axis)
  for (int v = 0; v < g.n_vertices(); ++v)
    if (std::abs(g.coords[v][0]) < 3) REQUIRE(g.adj[v].size() == 4);
}

TEST_CASE("grid box counts") {
  auto g = build_grid_box(5, 4);
  REQUIRE(g.n_vertices() == 20);
  REQUIRE(g.n_edges() == 4 * 4 + 5 * 3);
  check_invariants(g);
}

TEST_CASE("rebuild determinism") {
  auto a = build_zd_ball(2, 5), b = build_zd_ball(2, 5);
  REQUIRE(a.n_edges() == b.n_edges());
  for (int e = 0; e < a.n_edges(); ++e) {
    REQUIRE(a.edges[e].u == b.edges[e].u);
    REQUIRE(a.edges[e].v == b.edges[e].v);
    REQUIRE(a.edge_key[e] == b.edge_key[e]);
  }
}

TEST_CASE("structural edge keys are stable across radii") {
  auto small = build_zd_ball(2, 3), big = build_zd_ball(2, 6);
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::uint64_t> keys;
  for (int e = 0; e < small.n_edges(); ++e)
    keys[{small.coords[small.edges[e].u], small.coords[small.edges[e].v]}] = small.edge_key[e];
  int matched = 0;
  for (int e = 0; e < big.n_edges(); ++e) {
    auto it = keys.find({big.coords[big.edges[e].u], big.coords[big.edges[e].v]});
    if (it != keys.end()) {
      REQUIRE(it->second == big.edge_key[e]);
      ++matched;
    }
  }
  REQUIRE(matched == small.n_edges());
}

TEST_CASE("geodesic spanning tree is the identity on trees") {
  auto g = build_regular_tree(3, 3);
  auto t = geodesic_spanning_tree(g);
  for (int v = 0; v < g.n_vertices(); ++v) {
    if (v == g.root) continue;
    // unique neighbor toward the root
    int up = -1;
    for (auto [y, e] : g.adj[v])
      if (g.vdist[y] == g.vdist[v] - 1) up = y;
    REQUIRE(t.parent[v] == up);
  }
}

TEST_CASE("geodesic spanning tree on zd_ball d=2 radius=1 is a star") {
  auto g = build_zd_ball(2, 1);
  auto t = geodesic_spanning_tree(g);
  for (int v = 0; v < g.n_vertices(); ++v)
    if (v != g.root) REQUIRE(t.parent[v] == g.root);
}

TEST_CASE("geodesic spanning tree preserves distances on zd_ball d=2 radius=10") {
  auto g = build_zd_ball(2, 10);
  auto t = geodesic_spanning_tree(g);
  for (int v = 0; v < g.n_vertices(); ++v) {
    // walk up to the root, counting steps
    int steps = 0, x = v;
    while (x != g.root) {
      REQUIRE(g.vdist[t.parent[x]] == g.vdist[x] - 1);
      x = t.parent[x];
      ++steps;
    }
    REQUIRE(steps == g.vdist[v]);
  }
}

TEST_CASE("contract_boundary on the path 0-1-2") {
  auto g = build_zd_ball(1, 1);  // path -1, 0, 1 with root in the middle
  auto res = contract_boundary(g, g.sphere(1));
  REQUIRE(res.graph.n_vertices() == 2);
  REQUIRE(res.graph.n_edges() == 2);  // both end edges become parallel into z
  REQUIRE(res.graph.root != res.z);
}

TEST_CASE("contract_boundary of the radius-2 sphere in zd_ball d=2") {
  auto g = build_zd_ball(2, 2);
  auto res = contract_boundary(g, g.sphere(2));
  REQUIRE(res.graph.n_vertices() == 6);  // 5 interior + z
  // enumeration oracle: edges with exactly one endpoint at distance 2
  int crossing = 0;
  for (auto& e : g.edges) crossing += (g.vdist[e.u] == 2) != (g.vdist[e.v] == 2);
  int deg_z = 0;
  for (auto& e : res.graph.edges) deg_z += (e.u == res.z) + (e.v == res.z);
  REQUIRE(deg_z == crossing);
  REQUIRE(crossing == 12);
}

TEST_CASE("contracting all non-root vertices of a star") {
  auto g = build_zd_ball(2, 1);
  std::vector<int> boundary;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (v != g.root) boundary.push_back(v);
  auto res = contract_boundary(g, boundary);
  REQUIRE(res.graph.n_vertices() == 2);
  REQUIRE(res.graph.n_edges() == 4);
}

TEST_CASE("contract_boundary rejects the root") {
  auto g = build_zd_ball(1, 2);
  REQUIRE_THROWS_AS(contract_boundary(g, {g.root}), std::invalid_argument);
}

TEST_CASE("collapse_fibers of a ladder along rungs") {
  int len = 5, k = 4;
  auto g = build_ladder(k, len);
  std::vector<int> fiber(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) fiber[v] = g.coords[v][0] + len;
  auto res = collapse_fibers(g, fiber, 2 * len + 1);
  REQUIRE(res.graph.n_vertices() == 2 * len + 1);
  REQUIRE(res.graph.n_edges() == k * 2 * len);                       // 4 parallel per step
  REQUIRE(static_cast<int>(res.dropped_loops.size()) == k * (2 * len + 1));  // all rungs
  // provenance partitions the non-loop source edges
  std::set<int> prov;
  for (auto& lst : res.provenance)
    for (int e : lst) REQUIRE(prov.insert(e).second);
  REQUIRE(static_cast<int>(prov.size() + res.dropped_loops.size()) == g.n_edges());
}

TEST_CASE("collapse_fibers with the identity map") {
  auto g = build_z_cayley({2, 3, -2, -3}, 6);
  std::vector<int> fiber(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) fiber[v] = v;
  auto res = collapse_fibers(g, fiber, g.n_vertices());
  REQUIRE(res.graph.n_edges() == g.n_edges());
  REQUIRE(res.dropped_loops.empty());
  REQUIRE(edge_table(res.graph) == edge_table(g));
}

TEST_CASE("collapse_fibers rejects non-surjective maps") {
  auto g = build_zd_ball(1, 1);
  REQUIRE_THROWS_AS(collapse_fibers(g, {0, 0, 0}, 2), std::invalid_argument);
}

TEST_CASE("builder input validation") {
  REQUIRE_THROWS_AS(build_zd_ball(0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(build_zd_ball(2, -1), std::invalid_argument);
  REQUIRE_THROWS_AS(build_z_cayley({}, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(build_z_cayley({0}, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(build_regular_tree(0, 2), std::invalid_argument);
}

TEST_CASE("dump_edges format") {
  auto g = build_zd_ball(1, 1);
  std::ostringstream os;
  dump_edges(g, os);
  std::string out = os.str();
  REQUIRE(out.rfind("# zd_ball d=1 radius=1", 0) == 0);
  REQUIRE(std::count(out.begin(), out.end(), '\n') == 1 + g.n_edges());
}
