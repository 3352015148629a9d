#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "drn/graph.hpp"
#include "drn/rng.hpp"

namespace drn {

// Generation counts of the open cluster of the root in the d-regular tree.
// Sampled level by level with the same per-edge keys as build_regular_tree,
// so the cluster is coupled with every other consumer of the environment.
struct GWClusterStats {
  int d = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::vector<long long> level_sizes;  // |T_n| for n = 0..depth
  std::vector<double> martingale;      // M_n = |T_n| / (d (d-1)^{n-1} p^n), n = 1..depth
  bool extinct = false;
  int extinction_generation = -1;  // first n with |T_n| = 0
  double growth = 0.0;             // |T_depth|^{1/depth}, 0 when extinct
};

inline GWClusterStats gw_statistics(int d, double p, int depth, std::uint64_t seed) {
  if (d < 3) throw std::invalid_argument("gw_statistics: d must be >= 3");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("gw_statistics: p must be in [0,1]");
  if (depth < 1) throw std::invalid_argument("gw_statistics: depth must be >= 1");

  GWClusterStats st;
  st.d = d;
  st.p = p;
  st.seed = seed;
  st.level_sizes.assign(depth + 1, 0);
  st.level_sizes[0] = 1;

  std::vector<std::uint64_t> level = {kTreeRootKey}, next;
  double mean = 1.0;  // d (d-1)^{n-1} p^n
  for (int n = 1; n <= depth; ++n) {
    mean *= (n == 1 ? d : d - 1) * p;
    next.clear();
    int fanout = (n == 1) ? d : d - 1;
    for (std::uint64_t k : level) {
      for (int i = 0; i < fanout; ++i) {
        std::uint64_t ck = tree_child_key(k, i);
        if (rng::uniform(seed, ck) <= p) next.push_back(ck);
      }
    }
    level.swap(next);
    st.level_sizes[n] = static_cast<long long>(level.size());
    st.martingale.push_back(mean > 0.0 ? st.level_sizes[n] / mean : 0.0);
    if (level.empty()) {
      st.extinct = true;
      st.extinction_generation = n;
      for (int m = n + 1; m <= depth; ++m) st.martingale.push_back(0.0);
      break;
    }
  }
  if (!st.extinct)
    st.growth = std::pow(static_cast<double>(st.level_sizes[depth]), 1.0 / depth);
  return st;
}

// Thinning experiment for the cluster's own percolation threshold.  Each
// replica samples one cluster, then a coupled family of q-thinnings of it:
// for every root-to-level path the bottleneck is the largest thinning uniform
// on the path, so the smallest q keeping some path alive is a min-max over
// the cluster, computed in one sweep.
struct ClusterPcEstimate {
  double pc = 1.0;
  double grid_step = 0.02;
  int depth = 0;
  int replicas = 0;
  int surviving = 0;                  // replicas whose unthinned cluster reaches depth
  std::vector<double> grid;           // thinning retentions q
  std::vector<double> survival;       // P(thinned cluster reaches depth | cluster reaches depth)
  std::vector<double> continuation;   // reach-depth count / reach-half-depth count
  double critical_ratio = 0.5;        // exact continuation ratio of the critical process
};

namespace detail {

// Bottleneck thinning uniforms from a vertex to depth `half` and to `depth`.
struct Bottleneck {
  double half, full;
};

inline Bottleneck cluster_bottlenecks(int d, double p, std::uint64_t env_seed,
                                      std::uint64_t thin_seed, std::uint64_t key, int dep,
                                      int half, int depth) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Bottleneck b{dep == half ? 0.0 : kInf, dep == depth ? 0.0 : kInf};
  if (dep == depth) return b;
  int fanout = (dep == 0) ? d : d - 1;
  for (int i = 0; i < fanout; ++i) {
    std::uint64_t ck = tree_child_key(key, i);
    if (rng::uniform(env_seed, ck) > p) continue;
    double u = rng::uniform(thin_seed, ck);
    auto cb = cluster_bottlenecks(d, p, env_seed, thin_seed, ck, dep + 1, half, depth);
    b.full = std::min(b.full, std::max(u, cb.full));
    if (dep < half) b.half = std::min(b.half, std::max(u, cb.half));
  }
  return b;
}

// Reach probabilities of the exactly-critical thinned process: offspring
// Bin(d-1, 1/(d-1)) off the root, Bin(d, 1/(d-1)) at the root.  Used as the
// crossing level for the continuation ratio, which kills the leading
// finite-depth bias of a plain crossing at 1/2.
inline double critical_continuation_ratio(int d, int half, int depth) {
  double pi = 1.0 / (d - 1);
  std::vector<double> a(depth + 1);
  a[0] = 1.0;
  for (int k = 1; k <= depth; ++k) a[k] = 1.0 - std::pow(1.0 - pi * a[k - 1], d - 1);
  auto root_reach = [&](int k) { return 1.0 - std::pow(1.0 - pi * a[k - 1], d); };
  return root_reach(depth) / root_reach(half);
}

}  // namespace detail

inline ClusterPcEstimate estimate_cluster_pc(int d, double p, int depth, int replicas,
                                             double grid_step, std::uint64_t seed) {
  if (d < 3) throw std::invalid_argument("estimate_cluster_pc: d must be >= 3");
  if (p <= 1.0 / (d - 1))
    throw std::invalid_argument("estimate_cluster_pc: need p > 1/(d-1) for surviving clusters");
  if (depth < 2) throw std::invalid_argument("estimate_cluster_pc: depth must be >= 2");
  if (replicas < 1) throw std::invalid_argument("estimate_cluster_pc: replicas must be >= 1");
  if (grid_step <= 0.0 || grid_step > 0.5)
    throw std::invalid_argument("estimate_cluster_pc: grid_step must be in (0, 0.5]");

  ClusterPcEstimate est;
  est.grid_step = grid_step;
  est.depth = depth;
  est.replicas = replicas;
  int half = depth / 2;

  std::vector<double> bh, bf;
  bh.reserve(replicas);
  bf.reserve(replicas);
  for (int r = 0; r < replicas; ++r) {
    std::uint64_t env_seed = rng::sub_seed(seed, 2 * static_cast<std::uint64_t>(r));
    std::uint64_t thin_seed = rng::sub_seed(seed, 2 * static_cast<std::uint64_t>(r) + 1);
    auto b = detail::cluster_bottlenecks(d, p, env_seed, thin_seed, kTreeRootKey, 0, half, depth);
    bh.push_back(b.half);
    bf.push_back(b.full);
  }
  std::sort(bh.begin(), bh.end());
  std::sort(bf.begin(), bf.end());
  auto count_le = [](const std::vector<double>& v, double q) {
    return static_cast<long long>(std::upper_bound(v.begin(), v.end(), q) - v.begin());
  };
  est.surviving = static_cast<int>(count_le(bf, 1.0));
  if (est.surviving == 0)
    throw std::runtime_error("estimate_cluster_pc: no surviving cluster within replica budget");

  for (double q = grid_step; q < 1.0 + grid_step / 2; q += grid_step) {
    double qq = std::min(q, 1.0);
    long long nf = count_le(bf, qq), nh = count_le(bh, qq);
    est.grid.push_back(qq);
    est.survival.push_back(static_cast<double>(nf) / est.surviving);
    est.continuation.push_back(nh > 0 ? static_cast<double>(nf) / nh : 0.0);
  }

  // first crossing of the critical ratio by the continuation ratio,
  // linearly interpolated between neighboring grid points
  est.critical_ratio = detail::critical_continuation_ratio(d, half, depth);
  est.pc = 1.0;
  double q_prev = 0.0, r_prev = 0.0;
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    double r = est.continuation[i];
    if (r >= est.critical_ratio) {
      double t = (r > r_prev) ? (est.critical_ratio - r_prev) / (r - r_prev) : 1.0;
      est.pc = q_prev + t * (est.grid[i] - q_prev);
      break;
    }
    q_prev = est.grid[i];
    r_prev = r;
  }
  return est;
}

inline double branching_number_of_cluster(double pc_estimate) {
  if (!(pc_estimate > 0.0) || pc_estimate > 1.0)
    throw std::invalid_argument("branching_number_of_cluster: estimate must be in (0,1]");
  return 1.0 / pc_estimate;
}

}  // namespace drn
