#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "drn/walks.hpp"

using namespace drn;

namespace {
RootedGraph path_graph(int n_edges) {
  RootedGraph g;
  g.family_desc = "path";
  g.adj.resize(n_edges + 1);
  g.root = 0;
  for (int i = 0; i < n_edges; ++i) detail::add_edge(g, i, i + 1, 3000 + i);
  detail::finalize_distances(g);
  return g;
}
}  // namespace

TEST_CASE("walk on a single edge hits the stop set in one step") {
  auto g = path_graph(1);
  auto net = make_network(g, ConductanceSpec::Biased(1.0));
  auto s = simulate_walk(net, 0, 100, {1}, 42);
  REQUIRE(s.hit_stop);
  REQUIRE(s.steps == 1);
}

TEST_CASE("escape frequency matches the electrical escape probability") {
  auto g = path_graph(10);
  auto net = make_network(g, ConductanceSpec::Biased(1.0));
  double expect = escape_probability(net, 0, {10});  // 1/10
  int n = 10000, hits = 0;
  for (int r = 0; r < n; ++r) {
    // escape = hit 10 before the first return to 0
    auto s = simulate_walk(net, 0, 1000000, {10}, rng::sub_seed(5, r));
    hits += (s.hit_stop && s.returns == 0) ? 1 : 0;
  }
  double freq = static_cast<double>(hits) / n;
  double se = std::sqrt(expect * (1 - expect) / n);
  REQUIRE(std::abs(freq - expect) < 3 * se + 1e-9);
}

TEST_CASE("one-step frequencies follow conductances") {
  // star with conductances 1 and 3: step to the heavy leaf 3/4 of the time
  RootedGraph g;
  g.adj.resize(3);
  g.root = 0;
  detail::add_edge(g, 0, 1, 1);
  detail::add_edge(g, 0, 2, 2);
  detail::finalize_distances(g);
  auto net = make_network(g, ConductanceSpec::Table({1.0, 3.0}));
  int n = 20000, heavy = 0;
  for (int r = 0; r < n; ++r) {
    auto s = simulate_walk(net, 0, 1, {2}, rng::sub_seed(11, r));
    heavy += s.hit_stop;
  }
  double freq = static_cast<double>(heavy) / n;
  REQUIRE(std::abs(freq - 0.75) < 0.02);
}

TEST_CASE("biased half-line walk steps toward the root 2/3 of the time") {
  auto g = path_graph(200);
  auto net = make_network(g, ConductanceSpec::Biased(2.0));
  // from interior x, P(step toward 0) = 2/3; measure a long trajectory
  long long toward = 0, total = 0;
  int x = 100;
  rng::Stream rnd(77);
  for (int t = 0; t < 100000; ++t) {
    if (x <= 10 || x >= 190) x = 100;  // drift pins the walk; restart mid-line
    double pi = net.c[x - 1] + net.c[x];  // edges {x-1,x} and {x,x+1}
    double u = rnd.next_uniform() * pi;
    ++total;
    if (u < net.c[x - 1]) {
      ++toward;
      --x;
    } else {
      ++x;
    }
  }
  REQUIRE(std::abs(static_cast<double>(toward) / total - 2.0 / 3.0) < 0.02);
}

TEST_CASE("z_drw_threshold closed form") {
  REQUIRE(z_drw_threshold(0.5, 2.0) == Catch::Approx(0.5));
  REQUIRE(z_drw_threshold(0.2, 0.5) == 0.0);  // both drifts outward
  REQUIRE(z_drw_threshold(2.0, 4.0) == 1.0);  // both drifts inward
  REQUIRE_THROWS_AS(z_drw_threshold(2.0, 1.0), std::invalid_argument);
  // monotone in lambda1 on the interior regime
  REQUIRE(z_drw_threshold(0.4, 2.0) <= z_drw_threshold(0.6, 2.0));
}

TEST_CASE("classify_z_drw: deterministic all-open environment is transient") {
  auto res = classify_z_drw(0.5, 2.0, 1.0, 10000, 3);
  REQUIRE(res.verdict == Verdict::transient);
  REQUIRE(res.side_bounded[0]);
  REQUIRE(res.side_bounded[1]);
}

TEST_CASE("classify_z_drw: all-closed environment is recurrent") {
  auto res = classify_z_drw(0.5, 2.0, 0.0, 10000, 3);
  REQUIRE(res.verdict == Verdict::recurrent);
}

TEST_CASE("classify_z_drw across the 1/2 threshold") {
  int rec = 0, tra = 0;
  for (int s = 0; s < 20; ++s) {
    auto lo = classify_z_drw(0.5, 2.0, 0.3, 20000, rng::sub_seed(9, s));
    auto hi = classify_z_drw(0.5, 2.0, 0.7, 20000, rng::sub_seed(9, s));
    rec += lo.verdict == Verdict::recurrent;
    tra += hi.verdict == Verdict::transient;
  }
  REQUIRE(rec >= 18);
  REQUIRE(tra >= 18);
}

TEST_CASE("f values: boundary conditions and monotonicity") {
  auto f = z_drw_f_values(0.5, 2.0, 0.5, 50, 17);
  REQUIRE(f[0] == 0.0);
  REQUIRE(f[1] == 1.0);
  for (int i = 1; i <= 50; ++i) REQUIRE(f[i] >= f[i - 1]);
}

TEST_CASE("f is pointwise nonincreasing in p on a shared environment") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto f_lo = z_drw_f_values(0.5, 2.0, 0.3, 100, seed);
    auto f_hi = z_drw_f_values(0.5, 2.0, 0.6, 100, seed);
    for (std::size_t i = 0; i < f_lo.size(); ++i) REQUIRE(f_hi[i] <= f_lo[i] + 1e-12);
  }
}

TEST_CASE("tree_drw_threshold closed forms") {
  REQUIRE(tree_drw_threshold(3, 1.0, 4.0) == Catch::Approx(1.0 / 3.0));
  REQUIRE(tree_drw_threshold(3, 2.0, 4.0) == 1.0);   // lambda1 = d-1 boundary
  REQUIRE(tree_drw_threshold(3, 1.0, 1.5) == 0.0);   // lambda2 < d-1
  REQUIRE(tree_drw_threshold(3, 1.5, 4.0) == Catch::Approx(0.6));
  REQUIRE_THROWS_AS(tree_drw_threshold(2, 0.5, 2.0), std::invalid_argument);
}

TEST_CASE("tree_drw_threshold variational solve agrees with the closed form") {
  for (auto [l1, l2] : {std::pair{1.0, 4.0}, {1.5, 4.0}, {1.2, 3.0}, {1.8, 8.0}}) {
    double cf = tree_drw_threshold(3, l1, l2);
    double bi = tree_drw_threshold_variational(3, l1, l2);
    REQUIRE(bi == Catch::Approx(cf).margin(1e-8));
  }
}

TEST_CASE("tree_drw_threshold is monotone in lambda1") {
  double prev = 0.0;
  for (double l1 : {0.3, 0.6, 1.0, 1.4, 1.8}) {
    double v = tree_drw_threshold(3, l1, 4.0);
    REQUIRE(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("speed estimate: d=1, lambda=1/3 gives 1/2") {
  auto est = estimate_speed(1, 1.0 / 3.0, 20000, 30, 123);
  REQUIRE(est.guard_hits == 0);
  REQUIRE(std::abs(est.mean - 0.5) < 0.02);
}

TEST_CASE("speed estimate: d=2, lambda=1/2 gives 1/3") {
  auto est = estimate_speed(2, 0.5, 20000, 30, 123);
  REQUIRE(est.guard_hits == 0);
  REQUIRE(std::abs(est.mean - 1.0 / 3.0) < 0.02);
}
