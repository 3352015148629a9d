// drn-lab: batch experiment runner for disordered random networks.
// Every subcommand is a thin shell over the library; outputs are
// deterministic functions of the (config, seeds) pair.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drn/estimation.hpp"
#include "drn/walks.hpp"

using json = nlohmann::ordered_json;
using namespace drn;

namespace {

constexpr const char* kTool = "drn-lab";
constexpr const char* kVersion = "1.0.0";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Binds options so that a JSON config file can supply any value a flag did
// not; flags always win.
class ConfigBinder {
 public:
  explicit ConfigBinder(CLI::App* cmd) : cmd_(cmd) {
    cmd_->add_option("--config", config_path_, "JSON config file; flags override its values");
  }

  template <class T>
  CLI::Option* bind(const std::string& long_flag, T& var, const std::string& desc) {
    auto* opt = cmd_->add_option(long_flag, var, desc);
    std::string key = long_flag.substr(2);
    setters_.push_back([&var, key, opt](const json& j) {
      if (opt->count() == 0 && j.contains(key)) var = j.at(key).get<T>();
    });
    return opt;
  }

  // call after parsing, before using any bound value
  void apply() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw std::invalid_argument("config: cannot open file '" + config_path_ + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw std::invalid_argument("config: invalid JSON in '" + config_path_ + "': " + e.what());
    }
    for (auto& s : setters_) s(j);
  }

 private:
  CLI::App* cmd_;
  std::string config_path_;
  std::vector<std::function<void(const json&)>> setters_;
};

struct OutputSpec {
  std::string out;     // empty = stdout
  std::string format;  // csv | json
};

void add_output_options(ConfigBinder& b, OutputSpec& o, const std::string& default_format) {
  o.format = default_format;
  b.bind("--out", o.out, "output file path (stdout when omitted)");
  b.bind("--format", o.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

// Writes the data bytes plus a manifest echoing the effective config, so the
// table is self-describing. Thread-count style knobs stay out of the
// manifest to keep bytes identical across environments.
void emit(const OutputSpec& o, const std::string& bytes, const std::string& command,
          const json& effective_config) {
  if (o.out.empty()) {
    std::cout << bytes;
    return;
  }
  json manifest;
  manifest["tool"] = kTool;
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["format"] = o.format;
  manifest["config"] = effective_config;
  std::ofstream mf(o.out + ".manifest.json", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write manifest next to '" + o.out + "'");
  mf << manifest.dump(2) << "\n";
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write output file '" + o.out + "'");
  f << bytes;
}

// ---------------------------------------------------------------------------
// family dispatch
// ---------------------------------------------------------------------------

const char* kFamilies = "z, z2, z3, t3, t4, t5, zc23, ladder4";

ResistanceProfile run_profile(const std::string& family, double l1, double l2, std::uint64_t seed,
                              double p, const std::vector<int>& radii) {
  if (family == "z" || family == "z2" || family == "z3") {
    int d = family == "z" ? 1 : family[1] - '0';
    auto builder = [d](int n) { return build_zd_ball(d, n); };
    return profile_lattice(builder, family, l1, l2, seed, p, radii);
  }
  if (family == "t3" || family == "t4" || family == "t5")
    return profile_tree(family[1] - '0', l1, l2, seed, p, radii);
  if (family == "zc23") return profile_z_cayley({2, 3, -2, -3}, l1, l2, seed, p, radii);
  if (family == "ladder4") return profile_ladder_collapsed(4, l1, l2, seed, p, radii);
  throw std::invalid_argument("family: unknown value '" + family + "' (expected one of " +
                              kFamilies + ")");
}

std::string profiles_csv(const std::vector<ResistanceProfile>& profs) {
  std::ostringstream os;
  bool first = true;
  for (const auto& prof : profs) {
    profile_csv(prof, os, first);
    first = false;
  }
  return os.str();
}

json profile_json(const ResistanceProfile& prof) {
  json rows = json::array();
  for (const auto& r : prof.rows)
    rows.push_back({{"n", r.n},
                    {"R", r.R},
                    {"nw_lower", r.nw_lower},
                    {"flow_upper", r.flow_upper},
                    {"residual", r.residual},
                    {"iters", r.iters}});
  return json{{"family", prof.family}, {"seed", prof.seed}, {"p", prof.p}, {"rows", rows}};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct CommonProfileArgs {
  std::string family = "t3";
  double l1 = 1.0, l2 = 2.0;
  std::vector<int> radii;
  std::uint64_t seed = 0;
  int seeds = 1;
  int jobs = 1;
};

void add_profile_options(ConfigBinder& b, CommonProfileArgs& a) {
  b.bind("--family", a.family, std::string("graph family: ") + kFamilies);
  b.bind("--l1", a.l1, "open-edge bias lambda1");
  b.bind("--l2", a.l2, "closed-edge bias lambda2");
  b.bind("--radii", a.radii, "profile radii / depths, increasing")->expected(-1);
  b.bind("--seed", a.seed, "base seed; per-replica seeds derive from it");
  b.bind("--seeds", a.seeds, "number of independent environments");
  b.bind("--jobs", a.jobs, "worker count hint (results never depend on it)");
}

void validate_profile_args(const CommonProfileArgs& a) {
  require(a.seeds >= 1, "seeds: need at least one seed");
  require(a.jobs >= 1, "jobs: must be >= 1");
  require(!a.radii.empty(), "radii: list must be nonempty");
  for (std::size_t i = 1; i < a.radii.size(); ++i)
    require(a.radii[i] > a.radii[i - 1], "radii: must be strictly increasing");
  require(a.l1 > 0 && a.l1 < a.l2, "l1/l2: need 0 < l1 < l2");
}

int cmd_resist(const CommonProfileArgs& a, double p, const OutputSpec& o) {
  validate_profile_args(a);
  require(p >= 0.0 && p <= 1.0, "p: must lie in [0,1]");
  std::vector<ResistanceProfile> profs;
  for (int s = 0; s < a.seeds; ++s)
    profs.push_back(run_profile(a.family, a.l1, a.l2, rng::sub_seed(a.seed, s), p, a.radii));
  json cfg{{"family", a.family}, {"l1", a.l1},     {"l2", a.l2}, {"p", p},
           {"radii", a.radii},   {"seed", a.seed}, {"seeds", a.seeds}};
  if (o.format == "csv") {
    emit(o, profiles_csv(profs), "resist", cfg);
  } else {
    json out{{"config", cfg}, {"profiles", json::array()}};
    for (const auto& prof : profs) out["profiles"].push_back(profile_json(prof));
    emit(o, out.dump(2) + "\n", "resist", cfg);
  }
  return 0;
}

int cmd_sweep(const CommonProfileArgs& a, const std::vector<double>& p_grid, const OutputSpec& o) {
  validate_profile_args(a);
  require(!p_grid.empty(), "p-grid: list must be nonempty");
  for (double p : p_grid) require(p >= 0.0 && p <= 1.0, "p-grid: entries must lie in [0,1]");
  std::vector<ResistanceProfile> profs;
  for (double p : p_grid)
    for (int s = 0; s < a.seeds; ++s)
      profs.push_back(run_profile(a.family, a.l1, a.l2, rng::sub_seed(a.seed, s), p, a.radii));
  json cfg{{"family", a.family}, {"l1", a.l1},     {"l2", a.l2},   {"p_grid", p_grid},
           {"radii", a.radii},   {"seed", a.seed}, {"seeds", a.seeds}};
  if (o.format == "csv") {
    emit(o, profiles_csv(profs), "sweep", cfg);
  } else {
    json out{{"config", cfg}, {"profiles", json::array()}};
    for (const auto& prof : profs) out["profiles"].push_back(profile_json(prof));
    emit(o, out.dump(2) + "\n", "sweep", cfg);
  }
  return 0;
}

int cmd_bisect(const CommonProfileArgs& a, double delta, const ClassifyRule& rule,
               const OutputSpec& o) {
  validate_profile_args(a);
  BisectSpec spec;
  if (a.family == "t3" || a.family == "t4" || a.family == "t5") {
    spec.family = Family::regular_tree;
    spec.d = a.family[1] - '0';
  } else if (a.family == "z" || a.family == "z2" || a.family == "z3") {
    spec.family = Family::zd_ball;
    spec.d = a.family == "z" ? 1 : a.family[1] - '0';
  } else {
    throw std::invalid_argument("family: bisect supports z, z2, z3, t3, t4, t5");
  }
  spec.lambda1 = a.l1;
  spec.lambda2 = a.l2;
  spec.radii = a.radii;
  spec.seeds = a.seeds;
  spec.seed_base = a.seed;
  spec.delta = delta;
  spec.rule = rule;
  auto est = bisect_pc_star(spec);

  json cfg{{"family", a.family},       {"l1", a.l1},
           {"l2", a.l2},               {"radii", a.radii},
           {"seed", a.seed},           {"seeds", a.seeds},
           {"delta", delta},           {"tau", rule.plateau_tol},
           {"nw_gate", rule.nw_gate},  {"nw_growth", rule.nw_growth},
           {"ratio_gate", rule.ratio_gate}};
  json probes = json::array();
  for (const auto& pr : est.probes) {
    double n = a.seeds;
    probes.push_back({{"p", pr.p},
                      {"verdicts",
                       {{"recurrent", pr.recurrent},
                        {"transient", pr.transient},
                        {"undecided", pr.undecided}}},
                      {"fractions",
                       {{"recurrent", pr.recurrent / n},
                        {"transient", pr.transient / n},
                        {"undecided", pr.undecided / n}}},
                      {"median", verdict_name(pr.median)}});
  }
  json out{{"family", a.family},
           {"lambda1", a.l1},
           {"lambda2", a.l2},
           {"probes", probes},
           {"bracket", {est.p_lo, est.p_hi}},
           {"closed_form", est.closed_form ? json(*est.closed_form) : json(nullptr)},
           {"refused", est.refused}};
  if (est.refused) out["refused_at"] = est.refused_at;
  if (est.no_transition_high) out["note"] = "no transition in (0,1) at this scale";
  emit(o, out.dump(2) + "\n", "bisect", cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and certification lab for disordered random networks"};
  app.require_subcommand(1);

  // resist ------------------------------------------------------------------
  auto* resist = app.add_subcommand("resist", "resistance profile with certificates");
  ConfigBinder resist_b(resist);
  CommonProfileArgs resist_a;
  double resist_p = 0.5;
  OutputSpec resist_o;
  add_profile_options(resist_b, resist_a);
  resist_b.bind("--p", resist_p, "retention parameter");
  add_output_options(resist_b, resist_o, "csv");

  // sweep -------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "resistance profiles over a p grid");
  ConfigBinder sweep_b(sweep);
  CommonProfileArgs sweep_a;
  std::vector<double> sweep_grid;
  OutputSpec sweep_o;
  add_profile_options(sweep_b, sweep_a);
  sweep_b.bind("--p-grid", sweep_grid, "retention values to sweep")->expected(-1);
  add_output_options(sweep_b, sweep_o, "csv");

  // bisect ------------------------------------------------------------------
  auto* bisect = app.add_subcommand("bisect", "bracket the phase threshold p_c*");
  ConfigBinder bisect_b(bisect);
  CommonProfileArgs bisect_a;
  double bisect_delta = 0.05;
  ClassifyRule bisect_rule;
  OutputSpec bisect_o;
  add_profile_options(bisect_b, bisect_a);
  bisect_b.bind("--delta", bisect_delta, "bracket width target (>= 0.02)");
  bisect_b.bind("--tau", bisect_rule.plateau_tol, "transient plateau gate");
  bisect_b.bind("--nw-gate", bisect_rule.nw_gate, "recurrent certificate gate");
  bisect_b.bind("--nw-growth", bisect_rule.nw_growth, "certificate doubling-growth gate");
  bisect_b.bind("--ratio-gate", bisect_rule.ratio_gate,
                "increment-ratio gate for otherwise-undecided profiles (0 = off)");
  add_output_options(bisect_b, bisect_o, "json");

  // drw-z -------------------------------------------------------------------
  auto* drwz = app.add_subcommand("drw-z", "classify the disordered random walk on Z");
  ConfigBinder drwz_b(drwz);
  double drwz_l1 = 0.5, drwz_l2 = 2.0, drwz_p = 0.5;
  int drwz_range = 100000, drwz_seeds = 1, drwz_jobs = 1;
  std::uint64_t drwz_seed = 0;
  OutputSpec drwz_o;
  drwz_b.bind("--l1", drwz_l1, "left-drift bias lambda1");
  drwz_b.bind("--l2", drwz_l2, "right-drift bias lambda2");
  drwz_b.bind("--p", drwz_p, "site retention");
  drwz_b.bind("--range", drwz_range, "half-line range L");
  drwz_b.bind("--seed", drwz_seed, "base seed");
  drwz_b.bind("--seeds", drwz_seeds, "number of environments");
  drwz_b.bind("--jobs", drwz_jobs, "worker count hint");
  add_output_options(drwz_b, drwz_o, "json");

  // drw-tree ----------------------------------------------------------------
  auto* drwt = app.add_subcommand("drw-tree", "threshold of the disordered walk on T^d");
  ConfigBinder drwt_b(drwt);
  int drwt_d = 3;
  double drwt_l1 = 1.0, drwt_l2 = 4.0;
  OutputSpec drwt_o;
  drwt_b.bind("--d", drwt_d, "tree degree");
  drwt_b.bind("--l1", drwt_l1, "lambda1");
  drwt_b.bind("--l2", drwt_l2, "lambda2");
  add_output_options(drwt_b, drwt_o, "json");

  // tree-stats --------------------------------------------------------------
  auto* tstats = app.add_subcommand("tree-stats", "cluster generation counts on T^d");
  ConfigBinder tstats_b(tstats);
  int ts_d = 3, ts_depth = 20, ts_seeds = 1, ts_replicas = 2000;
  double ts_p = 0.8, ts_grid = 0.02;
  bool ts_cluster_pc = false;
  std::uint64_t ts_seed = 0;
  OutputSpec tstats_o;
  tstats_b.bind("--d", ts_d, "tree degree");
  tstats_b.bind("--p", ts_p, "retention");
  tstats_b.bind("--depth", ts_depth, "generations to sample");
  tstats_b.bind("--seed", ts_seed, "base seed");
  tstats_b.bind("--seeds", ts_seeds, "number of clusters (csv rows)");
  tstats_b.bind("--cluster-pc", ts_cluster_pc, "estimate the cluster's own threshold instead");
  tstats_b.bind("--replicas", ts_replicas, "replicas for the threshold estimate");
  tstats_b.bind("--grid-step", ts_grid, "thinning grid step");
  add_output_options(tstats_b, tstats_o, "csv");

  // crossings ---------------------------------------------------------------
  auto* cross = app.add_subcommand("crossings", "edge-disjoint open crossings of a grid box");
  ConfigBinder cross_b(cross);
  int cr_w = 5, cr_h = 4, cr_seeds = 1;
  double cr_p = 0.5;
  std::uint64_t cr_seed = 0;
  OutputSpec cross_o;
  cross_b.bind("--width", cr_w, "box width (vertices)");
  cross_b.bind("--height", cr_h, "box height (vertices)");
  cross_b.bind("--p", cr_p, "retention");
  cross_b.bind("--seed", cr_seed, "base seed");
  cross_b.bind("--seeds", cr_seeds, "number of environments");
  add_output_options(cross_b, cross_o, "csv");

  // current-uniq ------------------------------------------------------------
  auto* cu = app.add_subcommand("current-uniq", "shell diameters for the uniqueness criterion");
  ConfigBinder cu_b(cu);
  int cu_nmax = 24;
  double cu_p = 0.5, cu_l1 = 0.5, cu_l2 = 1.0;
  std::uint64_t cu_seed = 0;
  OutputSpec cu_o;
  cu_b.bind("--nmax", cu_nmax, "largest shell index");
  cu_b.bind("--p", cu_p, "retention");
  cu_b.bind("--l1", cu_l1, "lambda1");
  cu_b.bind("--l2", cu_l2, "lambda2");
  cu_b.bind("--seed", cu_seed, "environment seed");
  add_output_options(cu_b, cu_o, "csv");

  // speed -------------------------------------------------------------------
  auto* speed = app.add_subcommand("speed", "escape speed of the biased walk on Z^d");
  ConfigBinder speed_b(speed);
  int sp_d = 2, sp_replicas = 100;
  long long sp_steps = 100000;
  double sp_lambda = 0.5;
  std::uint64_t sp_seed = 0;
  OutputSpec speed_o;
  speed_b.bind("--d", sp_d, "dimension");
  speed_b.bind("--lambda", sp_lambda, "inward bias, in (0,1)");
  speed_b.bind("--steps", sp_steps, "steps per replica");
  speed_b.bind("--replicas", sp_replicas, "replicas");
  speed_b.bind("--seed", sp_seed, "base seed");
  add_output_options(speed_b, speed_o, "json");

  // one-arm -----------------------------------------------------------------
  auto* onearm = app.add_subcommand("one-arm", "one-arm reach frequencies on Z^d");
  ConfigBinder onearm_b(onearm);
  int oa_d = 2, oa_replicas = 10000;
  std::vector<int> oa_n = {8, 16, 32};
  double oa_p = 0.5;
  std::uint64_t oa_seed = 0;
  OutputSpec onearm_o;
  onearm_b.bind("--d", oa_d, "dimension");
  onearm_b.bind("--p", oa_p, "retention");
  onearm_b.bind("--n", oa_n, "sphere radii")->expected(-1);
  onearm_b.bind("--replicas", oa_replicas, "replicas per radius");
  onearm_b.bind("--seed", oa_seed, "base seed");
  add_output_options(onearm_b, onearm_o, "csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (resist->parsed()) {
      resist_b.apply();
      return cmd_resist(resist_a, resist_p, resist_o);
    }
    if (sweep->parsed()) {
      sweep_b.apply();
      return cmd_sweep(sweep_a, sweep_grid, sweep_o);
    }
    if (bisect->parsed()) {
      bisect_b.apply();
      return cmd_bisect(bisect_a, bisect_delta, bisect_rule, bisect_o);
    }
    if (drwz->parsed()) {
      drwz_b.apply();
      require(drwz_seeds >= 1, "seeds: need at least one seed");
      require(drwz_jobs >= 1, "jobs: must be >= 1");
      require(drwz_p >= 0.0 && drwz_p <= 1.0, "p: must lie in [0,1]");
      json cfg{{"l1", drwz_l1}, {"l2", drwz_l2},     {"p", drwz_p},
               {"range", drwz_range}, {"seed", drwz_seed}, {"seeds", drwz_seeds}};
      int counts[3] = {0, 0, 0};
      json per_seed = json::array();
      std::ostringstream csv;
      csv << "seed,verdict,tail_neg,tail_pos\n";
      for (int s = 0; s < drwz_seeds; ++s) {
        auto res =
            classify_z_drw(drwz_l1, drwz_l2, drwz_p, drwz_range, rng::sub_seed(drwz_seed, s));
        counts[static_cast<int>(res.verdict)]++;
        per_seed.push_back({{"seed", s}, {"verdict", verdict_name(res.verdict)}});
        csv << s << ',' << verdict_name(res.verdict) << ',' << fmt17(res.tail_increment[0])
            << ',' << fmt17(res.tail_increment[1]) << "\n";
      }
      if (drwz_o.format == "csv") {
        emit(drwz_o, csv.str(), "drw-z", cfg);
      } else {
        json out{{"config", cfg},
                 {"threshold_closed_form", z_drw_threshold(drwz_l1, drwz_l2)},
                 {"verdicts",
                  {{"recurrent", counts[0]}, {"transient", counts[1]}, {"undecided", counts[2]}}},
                 {"per_seed", per_seed}};
        emit(drwz_o, out.dump(2) + "\n", "drw-z", cfg);
      }
      return 0;
    }
    if (drwt->parsed()) {
      drwt_b.apply();
      json cfg{{"d", drwt_d}, {"l1", drwt_l1}, {"l2", drwt_l2}};
      json out{{"config", cfg},
               {"threshold_closed_form", tree_drw_threshold(drwt_d, drwt_l1, drwt_l2)},
               {"threshold_variational", tree_drw_threshold_variational(drwt_d, drwt_l1, drwt_l2)}};
      emit(drwt_o, out.dump(2) + "\n", "drw-tree", cfg);
      return 0;
    }
    if (tstats->parsed()) {
      tstats_b.apply();
      require(ts_seeds >= 1, "seeds: need at least one seed");
      json cfg{{"d", ts_d},       {"p", ts_p},           {"depth", ts_depth},
               {"seed", ts_seed}, {"seeds", ts_seeds},   {"cluster_pc", ts_cluster_pc},
               {"replicas", ts_replicas}, {"grid_step", ts_grid}};
      if (ts_cluster_pc) {
        auto est = estimate_cluster_pc(ts_d, ts_p, ts_depth, ts_replicas, ts_grid, ts_seed);
        json out{{"config", cfg},
                 {"pc", est.pc},
                 {"branching", branching_number_of_cluster(est.pc)},
                 {"critical_ratio", est.critical_ratio},
                 {"surviving", est.surviving}};
        emit(tstats_o, out.dump(2) + "\n", "tree-stats", cfg);
        return 0;
      }
      std::ostringstream csv;
      csv << "seed,n,count,ratio\n";
      json clusters = json::array();
      for (int s = 0; s < ts_seeds; ++s) {
        auto st = gw_statistics(ts_d, ts_p, ts_depth, rng::sub_seed(ts_seed, s));
        json levels = json::array();
        for (int n = 1; n <= ts_depth; ++n) {
          csv << s << ',' << n << ',' << st.level_sizes[n] << ',' << fmt17(st.martingale[n - 1])
              << "\n";
          levels.push_back({{"n", n}, {"count", st.level_sizes[n]}, {"ratio", st.martingale[n - 1]}});
        }
        clusters.push_back({{"seed", s}, {"extinct", st.extinct}, {"levels", levels}});
      }
      if (tstats_o.format == "csv")
        emit(tstats_o, csv.str(), "tree-stats", cfg);
      else
        emit(tstats_o, json{{"config", cfg}, {"clusters", clusters}}.dump(2) + "\n", "tree-stats",
             cfg);
      return 0;
    }
    if (cross->parsed()) {
      cross_b.apply();
      require(cr_seeds >= 1, "seeds: need at least one seed");
      require(cr_w >= 2 && cr_h >= 2, "width/height: need at least 2x2 vertices");
      json cfg{{"width", cr_w}, {"height", cr_h}, {"p", cr_p},
               {"seed", cr_seed}, {"seeds", cr_seeds}};
      auto g = build_grid_box(cr_w, cr_h);
      std::ostringstream csv;
      csv << "seed,horizontal,vertical\n";
      json rows = json::array();
      for (int s = 0; s < cr_seeds; ++s) {
        Environment env(rng::sub_seed(cr_seed, s), g);
        PercConfig pc(env, cr_p);
        int h = count_edge_disjoint_crossings(pc, CrossDir::horizontal);
        int v = count_edge_disjoint_crossings(pc, CrossDir::vertical);
        csv << s << ',' << h << ',' << v << "\n";
        rows.push_back({{"seed", s}, {"horizontal", h}, {"vertical", v}});
      }
      if (cross_o.format == "csv")
        emit(cross_o, csv.str(), "crossings", cfg);
      else
        emit(cross_o, json{{"config", cfg}, {"rows", rows}}.dump(2) + "\n", "crossings", cfg);
      return 0;
    }
    if (cu->parsed()) {
      cu_b.apply();
      json cfg{{"nmax", cu_nmax}, {"p", cu_p}, {"l1", cu_l1}, {"l2", cu_l2}, {"seed", cu_seed}};
      std::vector<ShellRD> shells;
      double sum = rd_sum(cu_nmax, cu_seed, cu_p, cu_l1, cu_l2, &shells);
      std::ostringstream csv;
      csv << "n,vertices,edges,rd,running_inv_sum\n";
      double run = 0.0;
      json rows = json::array();
      for (const auto& s : shells) {
        run += 1.0 / s.rd;
        csv << s.n << ',' << s.vertices << ',' << s.edges << ',' << fmt17(s.rd) << ','
            << fmt17(run) << "\n";
        rows.push_back({{"n", s.n}, {"rd", s.rd}});
      }
      if (cu_o.format == "csv")
        emit(cu_o, csv.str(), "current-uniq", cfg);
      else
        emit(cu_o, json{{"config", cfg}, {"shells", rows}, {"inv_sum", sum}}.dump(2) + "\n",
             "current-uniq", cfg);
      return 0;
    }
    if (speed->parsed()) {
      speed_b.apply();
      json cfg{{"d", sp_d},
               {"lambda", sp_lambda},
               {"steps", sp_steps},
               {"replicas", sp_replicas},
               {"seed", sp_seed}};
      auto est = estimate_speed(sp_d, sp_lambda, sp_steps, sp_replicas, sp_seed);
      json out{{"config", cfg},
               {"mean", est.mean},
               {"std_err", est.std_err},
               {"replicas", est.replicas},
               {"guard_hits", est.guard_hits}};
      emit(speed_o, out.dump(2) + "\n", "speed", cfg);
      return 0;
    }
    if (onearm->parsed()) {
      onearm_b.apply();
      require(!oa_n.empty(), "n: radius list must be nonempty");
      json cfg{{"d", oa_d}, {"p", oa_p}, {"n", oa_n}, {"replicas", oa_replicas},
               {"seed", oa_seed}};
      std::ostringstream csv;
      csv << "n,p_hat,std_err,hits,replicas\n";
      json rows = json::array();
      for (int n : oa_n) {
        auto est = estimate_one_arm(oa_d, oa_p, n, oa_replicas, rng::sub_seed(oa_seed, n));
        csv << n << ',' << fmt17(est.p_hat) << ',' << fmt17(est.std_err) << ',' << est.hits << ','
            << est.replicas << "\n";
        rows.push_back({{"n", n}, {"p_hat", est.p_hat}, {"std_err", est.std_err}});
      }
      if (onearm_o.format == "csv")
        emit(onearm_o, csv.str(), "one-arm", cfg);
      else
        emit(onearm_o, json{{"config", cfg}, {"rows", rows}}.dump(2) + "\n", "one-arm", cfg);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
