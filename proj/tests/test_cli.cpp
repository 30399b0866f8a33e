#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string data(const char* name) {
  return std::string(ISL_TEST_DATA_DIR) + "/" + name;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(ISL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("classify: clean system exits 0 and writes the report") {
  REQUIRE(run_cli("classify " + data("sys_a.json") + " --out /tmp/isl_cli_a") == 0);
  std::string json = slurp("/tmp/isl_cli_a/classification.json");
  CHECK(json.find("\"schema_version\": 1") != std::string::npos);
  CHECK(json.find("\"type\": \"I\"") != std::string::npos);
  CHECK(slurp("/tmp/isl_cli_a/phase_portrait.svg").find("<svg") == 0);
}

TEST_CASE("classify: SYS-E reports the Type IV point and the Type II curve") {
  REQUIRE(run_cli("classify " + data("sys_e.json") + " --out /tmp/isl_cli_e") == 0);
  std::string json = slurp("/tmp/isl_cli_e/classification.json");
  CHECK(json.find("\"type\": \"IV\"") != std::string::npos);
  CHECK(json.find("\"type\": \"II\"") != std::string::npos);
  CHECK(json.find("\"singular_curves\"") != std::string::npos);
}

TEST_CASE("classify: degenerate system exits 2") {
  CHECK(run_cli("classify " + data("sys_degenerate.json") + " --out /tmp/isl_cli_deg") == 2);
}

TEST_CASE("invalid manifests exit 1") {
  CHECK(run_cli("classify " + data("sys_invalid.json") + " --out /tmp/isl_cli_bad") == 1);
  CHECK(run_cli("classify /nonexistent.json --out /tmp/isl_cli_bad") == 1);
}

TEST_CASE("reeb: emits JSON, valid DOT, and the fibration SVG") {
  REQUIRE(run_cli("reeb " + data("sys_h.json") + " --out /tmp/isl_cli_h") == 0);
  std::string json = slurp("/tmp/isl_cli_h/reeb.json");
  CHECK(json.find("\"vertices\"") != std::string::npos);
  CHECK(json.find("\"edges\"") != std::string::npos);
  std::string dot = slurp("/tmp/isl_cli_h/reeb.dot");
  CHECK(dot.find("graph reeb {") == 0);
  CHECK(dot.find("--") != std::string::npos);
  CHECK(slurp("/tmp/isl_cli_h/fibration.svg").find("<svg") == 0);
}

TEST_CASE("invariants: SYS-T monodromy table") {
  REQUIRE(run_cli("invariants " + data("sys_t.json") + " --out /tmp/isl_cli_t") == 0);
  std::string json = slurp("/tmp/isl_cli_t/invariants.json");
  CHECK(json.find("\"edge_monodromy\"") != std::string::npos);
  CHECK(json.find("\"monodromy_samples\"") != std::string::npos);
}

TEST_CASE("compare: orbital and isomorphism modes") {
  REQUIRE(run_cli("compare " + data("sys_a.json") + " " + data("sys_b.json") +
                  " --mode orbital --out /tmp/isl_cli_cmp") == 0);
  std::string json = slurp("/tmp/isl_cli_cmp/verdict.json");
  CHECK(json.find("\"result\": \"equivalent\"") != std::string::npos);

  REQUIRE(run_cli("compare " + data("sys_a.json") + " " + data("sys_a_double.json") +
                  " --mode iso --out /tmp/isl_cli_cmp2") == 0);
  std::string json2 = slurp("/tmp/isl_cli_cmp2/verdict.json");
  CHECK(json2.find("\"result\": \"inequivalent\"") != std::string::npos);
}

TEST_CASE("hamiltonize: SYS-T fails symplectic, passes poisson") {
  REQUIRE(run_cli("hamiltonize " + data("sys_t.json") +
                  " --structure symplectic --out /tmp/isl_cli_hs") == 0);
  std::string symp = slurp("/tmp/isl_cli_hs/structure.json");
  CHECK(symp.find("\"pass\": false") != std::string::npos);
  CHECK(symp.find("\"no_type2_type4\": false") != std::string::npos);

  REQUIRE(run_cli("hamiltonize " + data("sys_t.json") +
                  " --structure poisson --out /tmp/isl_cli_hp") == 0);
  std::string poi = slurp("/tmp/isl_cli_hp/structure.json");
  CHECK(poi.find("\"pass\": true") != std::string::npos);
  CHECK(poi.find("\"max_residual\"") != std::string::npos);
  CHECK(slurp("/tmp/isl_cli_hp/density.csv").rfind("x,y,w", 0) == 0);
}

TEST_CASE("outputs are byte-identical across runs") {
  REQUIRE(run_cli("classify " + data("sys_h.json") + " --out /tmp/isl_cli_det1") == 0);
  REQUIRE(run_cli("classify " + data("sys_h.json") + " --out /tmp/isl_cli_det2") == 0);
  CHECK(slurp("/tmp/isl_cli_det1/classification.json") ==
        slurp("/tmp/isl_cli_det2/classification.json"));
  REQUIRE(run_cli("reeb " + data("sys_a.json") + " --out /tmp/isl_cli_det3") == 0);
  REQUIRE(run_cli("reeb " + data("sys_a.json") + " --out /tmp/isl_cli_det4") == 0);
  CHECK(slurp("/tmp/isl_cli_det3/reeb.json") == slurp("/tmp/isl_cli_det4/reeb.json"));
}

TEST_CASE("ISL_THREADS=1 still produces identical classification output") {
  REQUIRE(run_cli("classify " + data("sys_h.json") + " --out /tmp/isl_cli_omp1") == 0);
  std::string cmd = std::string("ISL_THREADS=1 ") + ISL_CLI_PATH + " classify " +
                    data("sys_h.json") + " --out /tmp/isl_cli_omp2 > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(slurp("/tmp/isl_cli_omp1/classification.json") ==
        slurp("/tmp/isl_cli_omp2/classification.json"));
}
