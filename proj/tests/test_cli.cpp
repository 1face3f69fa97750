#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ensra/io.hpp"
#include "ensra/sim.hpp"

using namespace ensra;

namespace {

struct Result {
  int status = 0;
  std::string out;
};

Result shell(const std::string& args) {
  const std::string cmd = std::string(ENSRA_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

const std::string kTiny = std::string(ENSRA_CONFIG_DIR) + "/tiny.yaml";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run prints the library's CSV row") {
  const Result r = shell("run -c " + kTiny);
  REQUIRE(r.status == 0);
  const ParsedConfig pc = parse_config(kTiny);
  const Scenario sc = Scenario::make(pc.cfg, pc.topo);
  const RunMetrics m = run(sc, generate_trace(pc.cfg, sc.topo), pc.algorithm);
  std::ostringstream expect;
  write_csv(expect, {make_row(0, pc.cfg, pc.algorithm, m)});
  CHECK(r.out == expect.str());
}

TEST_CASE("overrides and algorithm flag reach the run") {
  const Result r = shell("run -c " + kTiny + " --algorithm heuristic --set V=2 --set num_frames=5");
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  const auto rows = read_csv(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].algorithm == "heuristic");
  CHECK(rows[0].V == 2.0);
  CHECK(rows[0].frames == 5);
}

TEST_CASE("sweep emits one row per value and replication") {
  const Result r = shell("sweep -c " + kTiny + " --axis V --values 0.1,1 --reps 2 --set num_frames=5");
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  CHECK(read_csv(in).size() == 4);
}

TEST_CASE("validate runs only the named suite") {
  const Result r = shell("validate -c " + kTiny + " --suite bianchi");
  CHECK(r.status == 0);
  CHECK(r.out.find("bianchi") != std::string::npos);
  CHECK(r.out.find("stage2") == std::string::npos);
}

TEST_CASE("dump-trace writes the realized trace") {
  const Result r = shell("dump-trace -c " + kTiny);
  REQUIRE(r.status == 0);
  const ParsedConfig pc = parse_config(kTiny);
  std::ostringstream expect;
  write_trace(expect, generate_trace(pc.cfg, pc.topo));
  CHECK(r.out == expect.str());
}

TEST_CASE("configuration errors exit with status 2") {
  CHECK(shell("run -c " + kTiny + " --set bogus=1").status == 2);
  CHECK(shell("run -c /nonexistent.yaml").status == 2);
  CHECK(shell("run -c " + kTiny + " --algorithm magic").status == 2);
}

}
