#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef DRN_CLI_PATH
#error "DRN_CLI_PATH must point at the drn-lab binary"
#endif

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(DRN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string tmp_path(const std::string& name) { return "/tmp/drn_cli_test_" + name; }

}  // namespace

TEST_CASE("cli: identical configs produce identical bytes") {
  auto a = tmp_path("det_a.csv"), b = tmp_path("det_b.csv");
  std::string args = "resist --family z2 --l1 0.5 --l2 2 --p 0.45 --radii 2 4 8 16 --seeds 3";
  REQUIRE(run(args + " --jobs 1 --out " + a) == 0);
  REQUIRE(run(args + " --jobs 4 --out " + b) == 0);
  REQUIRE(slurp(a) == slurp(b));
  REQUIRE(slurp(a + ".manifest.json") == slurp(b + ".manifest.json"));
}

TEST_CASE("cli: resist csv carries the declared schema and LF newlines") {
  auto out = tmp_path("schema.csv");
  REQUIRE(run("resist --family z --l1 0.5 --l2 2 --p 0 --radii 2 4 --out " + out) == 0);
  auto bytes = slurp(out);
  REQUIRE(bytes.rfind("seed,p,n,R,nw_lower,flow_upper,residual,iters\n", 0) == 0);
  REQUIRE(bytes.find('\r') == std::string::npos);
}

TEST_CASE("cli: manifest echoes the config") {
  auto out = tmp_path("manifest.csv");
  REQUIRE(run("resist --family t3 --l1 1.5 --l2 4 --p 0.6 --radii 2 4 8 --seeds 2 --out " + out) ==
          0);
  auto manifest = slurp(out + ".manifest.json");
  REQUIRE(manifest.find("\"tool\": \"drn-lab\"") != std::string::npos);
  REQUIRE(manifest.find("\"family\": \"t3\"") != std::string::npos);
  REQUIRE(manifest.find("\"seeds\": 2") != std::string::npos);
}

TEST_CASE("cli: invalid configs exit 2 with a field-level message") {
  REQUIRE(run("resist --family z --radii 2 4 --p 0.5 --seeds 0") == 2);
  REQUIRE(run("resist --family nope --radii 2 4 --p 0.5") == 2);
  REQUIRE(run("resist --family z --radii 4 2 --p 0.5") == 2);
  REQUIRE(run("resist --family z --radii 2 4 --p 1.5") == 2);
  REQUIRE(run("bisect --family z2 --l1 0.5 --l2 2 --radii 2 4 8 16 --seeds 30 --delta 0.001") == 2);
  REQUIRE(run("no-such-subcommand") != 0);
}

TEST_CASE("cli: json config supplies values and flags override it") {
  auto cfg = tmp_path("cfg.json");
  {
    std::ofstream f(cfg);
    f << "{\"p\": 0.25, \"seeds\": 2, \"radii\": [2, 4]}\n";
  }
  auto out_cfg = tmp_path("from_cfg.csv"), out_flag = tmp_path("from_flag.csv");
  REQUIRE(run("resist --family z --l1 0.5 --l2 2 --config " + cfg + " --out " + out_cfg) == 0);
  auto bytes = slurp(out_cfg);
  REQUIRE(bytes.find(",0.25,") != std::string::npos);
  // flag wins over the file
  REQUIRE(run("resist --family z --l1 0.5 --l2 2 --config " + cfg + " --p 0.75 --out " +
              out_flag) == 0);
  REQUIRE(slurp(out_flag).find(",0.75,") != std::string::npos);
}

TEST_CASE("cli: crossings of a fully open box count the parallel lines") {
  auto out = tmp_path("cross.csv");
  REQUIRE(run("crossings --width 5 --height 4 --p 1 --seeds 1 --out " + out) == 0);
  REQUIRE(slurp(out) == "seed,horizontal,vertical\n0,4,5\n");
}

TEST_CASE("cli: tree-stats sampling is reproducible across runs") {
  auto a = tmp_path("ts_a.csv"), b = tmp_path("ts_b.csv");
  std::string args = "tree-stats --d 3 --p 0.8 --depth 8 --seeds 5 --seed 42";
  REQUIRE(run(args + " --out " + a) == 0);
  REQUIRE(run(args + " --out " + b) == 0);
  REQUIRE(slurp(a) == slurp(b));
  REQUIRE(slurp(a).rfind("seed,n,count,ratio\n", 0) == 0);
}
