#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "drn/profile.hpp"

using namespace drn;

namespace {
std::function<RootedGraph(int)> zd_builder(int d) {
  return [d](int n) { return build_zd_ball(d, n); };
}
}  // namespace

TEST_CASE("lattice profile on Z, all closed, lambda2=2: geometric divergence") {
  // both sides in parallel, each side sum of 2^k: R_n = (2^n - 1)/2
  auto prof = profile_lattice(zd_builder(1), "z", 0.5, 2.0, 7, 0.0, {2, 4, 8});
  for (const auto& row : prof.rows) {
    double expect = (std::pow(2.0, row.n) - 1.0) / 2.0;
    REQUIRE(row.R == Catch::Approx(expect).epsilon(1e-9));
    // width-1 closed annuli make Nash-Williams tight on Z
    REQUIRE(row.nw_lower == Catch::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("lattice profile on Z, all open, lambda1=1/2: bounded resistance") {
  auto prof = profile_lattice(zd_builder(1), "z", 0.5, 2.0, 7, 1.0, {2, 4, 8});
  for (const auto& row : prof.rows) {
    double expect = (1.0 - std::pow(2.0, -row.n));  // two sides of sum 2^{-k} in parallel
    REQUIRE(row.R == Catch::Approx(expect).epsilon(1e-9));
    REQUIRE(row.nw_lower == 0.0);  // no closed cutset exists
  }
}

TEST_CASE("lattice profile rows are monotone and certified") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto prof = profile_lattice(zd_builder(2), "z2", 0.5, 2.0, seed, 0.45, {3, 6, 12});
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
      if (i) REQUIRE(prof.rows[i].R >= prof.rows[i - 1].R - 1e-9);
      REQUIRE(prof.rows[i].nw_lower <= prof.rows[i].R + 1e-9);
      REQUIRE(prof.rows[i].flow_upper >= prof.rows[i].R - 1e-9);
      REQUIRE(prof.rows[i].residual < 1e-8);
    }
  }
}

TEST_CASE("lattice profile matches the generic solver on the wired ball") {
  int n = 6;
  auto g = build_zd_ball(2, n);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Environment env(seed, g);
    PercConfig cfg(env, 0.5);
    auto c = disordered_conductances(g, cfg, 0.5, 2.0);
    auto con = contract_boundary(g, g.sphere(n));
    Network net;
    net.graph = &con.graph;
    net.c.assign(con.graph.n_edges(), 0.0);
    for (int e = 0; e < g.n_edges(); ++e)
      if (con.edge_map[e] >= 0) net.c[con.edge_map[e]] = c[e];
    net.pi.assign(con.graph.n_vertices(), 1.0);
    auto r = effective_resistance(net, {con.graph.root}, {con.z}, SolveMethod::dense);
    auto prof = profile_lattice(zd_builder(2), "z2", 0.5, 2.0, seed, 0.5, {n});
    REQUIRE(prof.rows[0].R == Catch::Approx(r.R).epsilon(1e-8));
  }
}

TEST_CASE("lattice profile cutsets validate as a disjoint separating family") {
  int n = 8;
  auto g = build_zd_ball(2, n);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Environment env(seed, g);
    PercConfig cfg(env, 0.3);
    auto c = disordered_conductances(g, cfg, 0.5, 2.0);
    std::vector<Cutset> cuts;
    double nw = detail::nw_from_closed_cutsets(cfg, c, n, &cuts);
    Network net;
    net.graph = &g;
    net.c = c;
    net.pi.assign(g.n_vertices(), 1.0);
    // nash_williams_bound revalidates disjointness and separation
    double nw2 = nash_williams_bound(net, cuts, n);
    REQUIRE(nw == Catch::Approx(nw2));
  }
}

TEST_CASE("tree profile matches a materialized dense solve") {
  int depth = 6;
  auto g = build_regular_tree(3, depth);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Environment env(seed, g);
    PercConfig cfg(env, 0.6);
    auto net = make_network(g, ConductanceSpec::Disordered(ConductanceSpec::Biased(0.5),
                                                           ConductanceSpec::Biased(2.0)),
                            &cfg);
    auto prof = profile_tree(3, 0.5, 2.0, seed, 0.6, {2, 4, 6});
    for (const auto& row : prof.rows) {
      auto r = effective_resistance(net, {g.root}, g.sphere(row.n), SolveMethod::dense);
      REQUIRE(row.R == Catch::Approx(r.R).epsilon(1e-8));
      REQUIRE(row.nw_lower <= row.R + 1e-9);
    }
  }
}

TEST_CASE("tree profile NW accumulators match a brute-force recount") {
  int depth = 6;
  std::vector<int> radii = {3, 6};
  auto g = build_regular_tree(3, depth);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Environment env(seed, g);
    PercConfig cfg(env, 0.4);
    auto prof = profile_tree(3, 0.5, 2.0, seed, 0.4, radii);
    // recount: annulus 0 = levels [0,3), annulus 1 = [3,6)
    double sums[2] = {0.0, 0.0};
    for (int e = 0; e < g.n_edges(); ++e) {
      int k = g.edist[e];
      int t = k < 3 ? 0 : 1;
      if (!cfg.is_open(e)) {
        sums[t] += std::pow(2.0, -static_cast<double>(k));
      } else if (k == radii[t] - 1) {
        // open crossing: path from level (t==0 ? 0 : 3) must be all open
        int v = g.vdist[g.edges[e].u] > g.vdist[g.edges[e].v] ? g.edges[e].u : g.edges[e].v;
        int cur = g.edges[e].u == v ? g.edges[e].v : g.edges[e].u;
        bool ok = true;
        int lo = t == 0 ? 0 : 3;
        while (g.vdist[cur] > lo) {
          int up = -1, upe = -1;
          for (auto [y, f] : g.adj[cur])
            if (g.vdist[y] == g.vdist[cur] - 1) up = y, upe = f;
          ok = ok && cfg.is_open(upe);
          cur = up;
        }
        if (ok) sums[t] += std::pow(0.5, -static_cast<double>(k));
      }
    }
    double nw1 = sums[0] > 0 ? 1.0 / sums[0] : 0.0;
    double nw2 = nw1 + (sums[1] > 0 ? 1.0 / sums[1] : 0.0);
    REQUIRE(prof.rows[0].nw_lower == Catch::Approx(nw1));
    REQUIRE(prof.rows[1].nw_lower == Catch::Approx(nw2));
  }
}

TEST_CASE("band profile matches a dense solve on a Z-Cayley segment") {
  int word_radius = 5;
  auto g = build_z_cayley({2, 3, -2, -3}, 3 * word_radius);
  std::vector<int> pos(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) pos[v] = v - 3 * word_radius;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto in = make_band_input(g, pos, 3, seed, 0.7, 0.5, 1.0);
    auto prof = profile_band(in, "zc23", 0.5, 1.0, seed, 0.7, {3, word_radius});
    for (const auto& row : prof.rows) {
      // oracle: dense solve on the ball with the same conductances
      Environment env(seed, g);
      PercConfig cfg(env, 0.7);
      auto c = disordered_conductances(g, cfg, 0.5, 1.0);
      // restrict to the ball of word radius row.n
      std::vector<double> cr = c;
      for (int e = 0; e < g.n_edges(); ++e)
        if (g.vdist[g.edges[e].u] > row.n || g.vdist[g.edges[e].v] > row.n) cr[e] = 0.0;
      Network net;
      net.graph = &g;
      net.c = cr;
      net.pi.assign(g.n_vertices(), 1.0);
      auto r = effective_resistance(net, {g.root}, g.sphere(row.n), SolveMethod::dense);
      REQUIRE(row.R == Catch::Approx(r.R).epsilon(1e-8));
      REQUIRE(row.nw_lower <= row.R + 1e-9);
    }
  }
}

TEST_CASE("band profile on the Z path reproduces the geometric series") {
  int R = 8;
  auto g = build_z_cayley({1, -1}, R);
  std::vector<int> pos(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) pos[v] = v - R;
  auto in = make_band_input(g, pos, 1, 3, 0.0, 0.5, 2.0);
  auto prof = profile_band(in, "z", 0.5, 2.0, 3, 0.0, {4, 8});
  for (const auto& row : prof.rows) {
    double expect = (std::pow(2.0, row.n) - 1.0) / 2.0;
    REQUIRE(row.R == Catch::Approx(expect).epsilon(1e-9));
    REQUIRE(row.nw_lower == Catch::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("band profile handles radius 2000 with huge conductances") {
  int R = 2000;
  auto g = build_z_cayley({2, 3, -2, -3}, R);
  std::vector<int> pos(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) pos[v] = v - R;
  int wr = g.vdist[0] > g.vdist[2 * R] ? g.vdist[0] : g.vdist[2 * R];
  wr -= 1;
  auto in = make_band_input(g, pos, 3, 9, 0.9, 0.5, 1.0);
  auto prof = profile_band(in, "zc23", 0.5, 1.0, 9, 0.9, {wr / 2, wr});
  REQUIRE(std::isfinite(prof.rows[1].R));
  REQUIRE(prof.rows[1].R > 0.0);
  REQUIRE(prof.rows[1].nw_lower <= prof.rows[1].R + 1e-9);
}

TEST_CASE("profile CSV schema") {
  auto prof = profile_lattice(zd_builder(1), "z", 0.5, 2.0, 7, 0.0, {2});
  std::ostringstream os;
  profile_csv(prof, os);
  std::string out = os.str();
  REQUIRE(out.rfind("seed,p,n,R,nw_lower,flow_upper,residual,iters\n", 0) == 0);
  REQUIRE(std::count(out.begin(), out.end(), '\n') == 2);
}

TEST_CASE("z_cayley profile helper matches a dense solve at small radii") {
  for (std::uint64_t seed : {3ULL, 4ULL}) {
    auto prof = profile_z_cayley({2, 3, -2, -3}, 0.5, 1.0, seed, 0.6, {2, 3, 4, 5});
    // independent dense oracle on a freshly built segment
    int R = 3 * 6;
    auto g = build_z_cayley({2, 3, -2, -3}, R);
    Environment env(seed, g);
    PercConfig cfg(env, 0.6);
    std::vector<double> cond(g.n_edges());
    for (int e = 0; e < g.n_edges(); ++e)
      cond[e] = std::pow(cfg.is_open(e) ? 0.5 : 1.0, -g.edist[e]);
    auto net = make_network(g, ConductanceSpec::Table(cond));
    for (const auto& row : prof.rows) {
      auto oracle = effective_resistance(net, {g.root}, g.sphere(row.n), SolveMethod::dense);
      REQUIRE(row.R == Catch::Approx(oracle.R).epsilon(1e-9));
      REQUIRE(row.nw_lower <= row.R + 1e-9);
    }
  }
}

TEST_CASE("collapsed ladder profile matches a dense solve on the quotient") {
  for (std::uint64_t seed : {11ULL, 12ULL}) {
    auto prof = profile_ladder_collapsed(4, 0.5, 1.0, seed, 0.5, {2, 4, 6, 8});
    int len = 8;
    auto g = build_ladder(4, len);
    std::vector<int> fiber(g.n_vertices());
    for (int v = 0; v < g.n_vertices(); ++v) fiber[v] = g.coords[v][0] + len;
    auto col = collapse_fibers(g, fiber, 2 * len + 1);
    Environment env(seed, g);
    PercConfig cfg(env, 0.5);
    auto net = make_network_quotient(col, g, ConductanceSpec::Disordered(ConductanceSpec::Biased(0.5), ConductanceSpec::Biased(1.0)), &cfg);
    for (const auto& row : prof.rows) {
      auto oracle =
          effective_resistance(net, {col.graph.root}, col.graph.sphere(row.n), SolveMethod::dense);
      REQUIRE(row.R == Catch::Approx(oracle.R).epsilon(1e-9));
      REQUIRE(row.nw_lower <= row.R + 1e-9);
    }
  }
}

TEST_CASE("virtually-Z helpers handle line radii in the thousands") {
  auto zc = profile_z_cayley({2, 3, -2, -3}, 0.5, 1.0, 5, 0.5, {500, 1000});
  REQUIRE(std::isfinite(zc.rows[1].R));
  REQUIRE(zc.rows[1].R >= zc.rows[0].R * (1.0 - 1e-9));
  auto lad = profile_ladder_collapsed(4, 0.5, 1.0, 5, 0.5, {500, 1000});
  REQUIRE(std::isfinite(lad.rows[1].R));
  REQUIRE(lad.rows[1].R >= lad.rows[0].R * (1.0 - 1e-9));
}
