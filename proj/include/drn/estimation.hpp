#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drn/graph.hpp"
#include "drn/network.hpp"
#include "drn/percolation.hpp"
#include "drn/profile.hpp"
#include "drn/rng.hpp"
#include "drn/trees.hpp"
#include "drn/verdict.hpp"

namespace drn {

// ---------------------------------------------------------------------------
// Profile classification
// ---------------------------------------------------------------------------

// Decision gates. The growth-ratio gate compares successive resistance
// increments across doubled radii; 0 disables it, in which case profiles
// that fire neither hard gate come back undecided.
struct ClassifyRule {
  double plateau_tol = 0.05;  // transient when the last doubling grew R by at most this fraction
  double nw_gate = 10.0;      // recurrent when the certified lower bound exceeds this...
  double nw_growth = 2.0;     // ...and kept growing by this factor over the last doubling
  double ratio_gate = 0.0;    // increment ratio threshold; recurrent at or above, transient below
};

struct Classification {
  Verdict verdict = Verdict::undecided;
  bool conflict = false;  // both hard gates fired
  double nw_last = 0.0;
  double nw_prev = 0.0;
  double nw_growth = 0.0;
  double plateau = 0.0;       // (R_N - R_{N/2}) / R_{N/2}
  double growth_ratio = 0.0;  // (R_N - R_{N/2}) / (R_{N/2} - R_{N/4})
  ClassifyRule rule;
};

// Assumes geometrically spaced radii (each roughly double the previous), so
// the last three rows give the two most recent doubling increments.
inline Classification classify_transience(const ResistanceProfile& prof, ClassifyRule rule = {}) {
  const auto& rows = prof.rows;
  if (rows.size() < 4) throw std::invalid_argument("classify_transience: need at least 4 radii");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].n <= rows[i - 1].n)
      throw std::invalid_argument("classify_transience: radii must be strictly increasing");

  Classification out;
  out.rule = rule;
  std::size_t k = rows.size() - 1;
  double R2 = rows[k].R, R1 = rows[k - 1].R, R0 = rows[k - 2].R;
  out.nw_last = rows[k].nw_lower;
  out.nw_prev = rows[k - 1].nw_lower;
  out.nw_growth = out.nw_prev > 0.0 ? out.nw_last / out.nw_prev
                                    : (out.nw_last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

  if (!std::isfinite(R2)) {  // no open or closed path to the boundary exists at all
    out.verdict = Verdict::recurrent;
    return out;
  }
  out.plateau = R1 > 0.0 ? (R2 - R1) / R1 : 0.0;
  double inc_prev = R1 - R0, inc_last = R2 - R1;
  out.growth_ratio = inc_prev > 0.0 ? inc_last / inc_prev
                                    : (inc_last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

  bool rec_hard = out.nw_last >= rule.nw_gate && out.nw_growth >= rule.nw_growth;
  bool tra_hard = out.plateau <= rule.plateau_tol;
  if (rec_hard && tra_hard) {
    out.verdict = Verdict::undecided;
    out.conflict = true;
  } else if (rec_hard) {
    out.verdict = Verdict::recurrent;
  } else if (tra_hard) {
    out.verdict = Verdict::transient;
  } else if (rule.ratio_gate > 0.0) {
    out.verdict = out.growth_ratio >= rule.ratio_gate ? Verdict::recurrent : Verdict::transient;
  } else {
    out.verdict = Verdict::undecided;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form thresholds
// ---------------------------------------------------------------------------

// Exact phase thresholds where a formula is available:
//   d-regular trees, 0 < l1 < d-1 <= l2:      (l1 v 1) / (d-1)
//   Z^1:                                      1 (no transition below full retention)
//   Z^2, 0 < l1 < 1 <= l2:                    1/2 (the planar percolation threshold)
//   line-like Cayley graphs (Z with extra
//   generators, Z x C_k ladders), l1 < 1 < l2: 1
// Everything else: no closed form at this time.
inline std::optional<double> pc_star_closed_forms(Family family, int d, double lambda1,
                                                  double lambda2) {
  if (!(lambda1 > 0.0 && lambda1 < lambda2))
    throw std::invalid_argument("pc_star_closed_forms: need 0 < lambda1 < lambda2");
  switch (family) {
    case Family::regular_tree:
      if (d >= 3 && lambda1 < d - 1 && lambda2 >= d - 1)
        return std::max(lambda1, 1.0) / (d - 1);
      return std::nullopt;
    case Family::zd_ball:
      if (d == 1) return 1.0;
      if (d == 2 && lambda1 < 1.0 && lambda2 >= 1.0) return 0.5;
      return std::nullopt;
    case Family::z_cayley:
    case Family::ladder:
      if (lambda1 < 1.0 && lambda2 > 1.0) return 1.0;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Threshold bisection
// ---------------------------------------------------------------------------

struct ProbeResult {
  double p = 0.0;
  int recurrent = 0, transient = 0, undecided = 0;
  Verdict median = Verdict::undecided;
};

struct ThresholdEstimate {
  double p_lo = 0.0, p_hi = 1.0;
  std::vector<ProbeResult> probes;
  bool refused = false;  // too many undecided verdicts at some probe
  double refused_at = -1.0;
  bool no_transition_high = false;  // every probe recurrent; threshold at 1 at this scale
  bool no_transition_low = false;   // every probe transient
  std::optional<double> closed_form;
};

struct BisectSpec {
  Family family = Family::regular_tree;
  int d = 3;
  double lambda1 = 1.0, lambda2 = 2.0;
  std::vector<int> radii;  // ball radii, or tree depths
  int seeds = 30;
  std::uint64_t seed_base = 0;
  double delta = 0.05;
  ClassifyRule rule;
  double undecided_cap = 0.30;
};

namespace detail {

inline ResistanceProfile bisect_profile(const BisectSpec& spec, double p, std::uint64_t seed) {
  switch (spec.family) {
    case Family::regular_tree:
      return profile_tree(spec.d, spec.lambda1, spec.lambda2, seed, p, spec.radii);
    case Family::zd_ball: {
      int d = spec.d;
      auto builder = [d](int n) { return build_zd_ball(d, n); };
      return profile_lattice(builder, "zd_ball", spec.lambda1, spec.lambda2, seed, p, spec.radii);
    }
    default:
      throw std::invalid_argument("bisect_pc_star: unsupported family");
  }
}

}  // namespace detail

inline ThresholdEstimate bisect_pc_star(const BisectSpec& spec) {
  if (spec.delta < 0.02) throw std::invalid_argument("bisect_pc_star: delta must be >= 0.02");
  if (spec.seeds < 30) throw std::invalid_argument("bisect_pc_star: need at least 30 seeds");
  if (spec.radii.size() < 4)
    throw std::invalid_argument("bisect_pc_star: need at least 4 radii");

  ThresholdEstimate est;
  est.closed_form = pc_star_closed_forms(spec.family, spec.d, spec.lambda1, spec.lambda2);

  auto probe = [&](double p) {
    ProbeResult pr;
    pr.p = p;
    for (int s = 0; s < spec.seeds; ++s) {
      auto prof = detail::bisect_profile(spec, p, rng::sub_seed(spec.seed_base, s));
      switch (classify_transience(prof, spec.rule).verdict) {
        case Verdict::recurrent: ++pr.recurrent; break;
        case Verdict::transient: ++pr.transient; break;
        case Verdict::undecided: ++pr.undecided; break;
      }
    }
    if (pr.undecided > spec.undecided_cap * spec.seeds) {
      pr.median = Verdict::undecided;
    } else {
      // median of the verdicts ordered recurrent < undecided < transient
      int half = spec.seeds / 2;
      pr.median = (pr.recurrent > half)   ? Verdict::recurrent
                  : (pr.transient > half) ? Verdict::transient
                                          : Verdict::undecided;
    }
    est.probes.push_back(pr);
    return pr.median;
  };

  while (est.p_hi - est.p_lo > spec.delta) {
    double p = 0.5 * (est.p_lo + est.p_hi);
    Verdict v = probe(p);
    if (v == Verdict::recurrent) {
      est.p_lo = p;
    } else if (v == Verdict::transient) {
      est.p_hi = p;
    } else {
      est.refused = true;
      est.refused_at = p;
      break;
    }
  }
  bool all_rec = !est.probes.empty(), all_tra = !est.probes.empty();
  for (const auto& pr : est.probes) {
    all_rec = all_rec && pr.median == Verdict::recurrent;
    all_tra = all_tra && pr.median == Verdict::transient;
  }
  est.no_transition_high = all_rec && est.p_hi == 1.0;
  est.no_transition_low = all_tra && est.p_lo == 0.0;
  return est;
}

// ---------------------------------------------------------------------------
// Shell subnetworks of Z^2 and the current-uniqueness sum
// ---------------------------------------------------------------------------

struct ShellRD {
  int n = 0;
  double rd = 0.0;  // max over vertex pairs of effective resistance inside the shell
  int vertices = 0;
  int edges = 0;
  bool regime_ok = true;  // lambda1 < lambda2 <= 1, where the 4(n+1) bound applies
};

namespace detail {

// The shell W_n: edges of Z^2 whose endpoint closer to the origin sits at
// l1-distance exactly n. Vertices are the l1-spheres n and n+1.
struct ShellGraph {
  std::vector<std::array<int, 2>> verts;
  std::map<std::array<int, 2>, int> index;
  std::vector<std::array<int, 3>> edges;  // endpoint ids + edge id slot
  std::vector<std::uint64_t> keys;
  std::vector<int> edist;
};

inline ShellGraph build_shell(int n) {
  ShellGraph sg;
  auto touch = [&](std::array<int, 2> p) {
    auto it = sg.index.find(p);
    if (it != sg.index.end()) return it->second;
    int id = static_cast<int>(sg.verts.size());
    sg.index.emplace(p, id);
    sg.verts.push_back(p);
    return id;
  };
  auto l1 = [](std::array<int, 2> p) { return std::abs(p[0]) + std::abs(p[1]); };
  // walk the sphere-n diamond; add ring edges and outward edges
  std::vector<std::array<int, 2>> ring;
  for (int x = -n; x <= n; ++x) {
    int y = n - std::abs(x);
    ring.push_back({x, y});
    if (y != 0) ring.push_back({x, -y});
  }
  for (auto u : ring) {
    int ui = touch(u);
    for (int a = 0; a < 2; ++a) {
      for (int dir : {+1, -1}) {
        std::array<int, 2> v = u;
        v[a] += dir;
        int lv = l1(v);
        if (lv < n) continue;
        if (lv == n && !(v > u)) continue;  // ring edge seen from the smaller endpoint
        int vi = touch(v);
        // key convention: the edge from x to x+e_a is keyed by (x, a)
        std::uint64_t key = dir > 0 ? lattice_key({u[0], u[1]}, a) : lattice_key({v[0], v[1]}, a);
        sg.edges.push_back({ui, vi, 0});
        sg.keys.push_back(key);
        sg.edist.push_back(n);
      }
    }
  }
  return sg;
}

}  // namespace detail

inline ShellRD shell_rd(int n, std::uint64_t seed, double p, double lambda1, double lambda2) {
  if (n < 1) throw std::invalid_argument("shell_rd: n must be >= 1");
  auto sg = detail::build_shell(n);
  int V = static_cast<int>(sg.verts.size());
  ShellRD out;
  out.n = n;
  out.vertices = V;
  out.edges = static_cast<int>(sg.edges.size());
  out.regime_ok = lambda1 < lambda2 && lambda2 <= 1.0;

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(V, V);
  for (std::size_t e = 0; e < sg.edges.size(); ++e) {
    bool open = rng::uniform(seed, sg.keys[e]) <= p;
    double c = std::pow(open ? lambda1 : lambda2, -sg.edist[e]);
    int u = sg.edges[e][0], v = sg.edges[e][1];
    L(u, u) += c;
    L(v, v) += c;
    L(u, v) -= c;
    L(v, u) -= c;
  }
  // connectivity of the shell (guaranteed for l1-spheres; checked anyway)
  {
    std::vector<int> seen(V, 0), stack = {0};
    seen[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < V; ++v)
        if (v != u && L(u, v) != 0.0 && !seen[v]) {
          seen[v] = 1;
          ++cnt;
          stack.push_back(v);
        }
    }
    if (cnt != V) throw std::logic_error("shell_rd: shell subnetwork is disconnected");
  }
  // ground the last vertex and invert; R(u,v) = M(u,u)+M(v,v)-2M(u,v)
  int g = V - 1;
  Eigen::MatrixXd Lr = L.topLeftCorner(g, g);
  Eigen::MatrixXd M = Lr.ldlt().solve(Eigen::MatrixXd::Identity(g, g));
  auto entry = [&](int u, int v) { return (u == g || v == g) ? 0.0 : M(u, v); };
  double rd = 0.0;
  for (int u = 0; u < V; ++u)
    for (int v = u + 1; v < V; ++v)
      rd = std::max(rd, entry(u, u) + entry(v, v) - 2.0 * entry(u, v));
  out.rd = rd;
  return out;
}

inline double rd_sum(int n_max, std::uint64_t seed, double p, double lambda1, double lambda2,
                     std::vector<ShellRD>* shells = nullptr) {
  if (n_max < 1) throw std::invalid_argument("rd_sum: n_max must be >= 1");
  double sum = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    auto s = shell_rd(n, seed, p, lambda1, lambda2);
    sum += 1.0 / s.rd;
    if (shells) shells->push_back(s);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Cluster growth
// ---------------------------------------------------------------------------

struct GrowthEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  int surviving = 0;
  int replicas = 0;
  double reference = 0.0;  // (d-1)p on trees; 0 when no reference value exists
  bool has_reference = false;
};

// |B_depth intersect K_o|^(1/depth) statistics over surviving replicas.
inline GrowthEstimate estimate_cluster_growth(Family family, int d, double p, int depth,
                                              int replicas, std::uint64_t seed) {
  if (replicas < 1) throw std::invalid_argument("estimate_cluster_growth: replicas must be >= 1");
  GrowthEstimate est;
  est.replicas = replicas;
  std::vector<double> vals;
  if (family == Family::regular_tree) {
    est.reference = (d - 1) * p;
    est.has_reference = true;
    for (int r = 0; r < replicas; ++r) {
      auto st = gw_statistics(d, p, depth, rng::sub_seed(seed, r));
      if (!st.extinct) vals.push_back(st.growth);
    }
  } else if (family == Family::zd_ball) {
    auto g = build_zd_ball(d, depth);
    for (int r = 0; r < replicas; ++r) {
      Environment env(rng::sub_seed(seed, r), g);
      PercConfig cfg(env, p);
      auto cl = cluster_of(cfg, g.root);
      bool survives = false;
      for (int v : cl.vertices) survives = survives || g.vdist[v] >= depth;
      if (survives)
        vals.push_back(std::pow(static_cast<double>(cl.vertices.size()), 1.0 / depth));
    }
  } else {
    throw std::invalid_argument("estimate_cluster_growth: unsupported family");
  }
  est.surviving = static_cast<int>(vals.size());
  if (!vals.empty()) {
    double s = 0.0, s2 = 0.0;
    for (double v : vals) {
      s += v;
      s2 += v * v;
    }
    est.mean = s / vals.size();
    if (vals.size() > 1)
      est.std_err = std::sqrt(std::max(0.0, (s2 / vals.size() - est.mean * est.mean) /
                                                (vals.size() - 1.0)));
  }
  return est;
}

}  // namespace drn
