// End-to-end checks of the command-line surface: exit codes and report
// contents, run against the installed binary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + std::string(CARNOT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("validate and info exit 0 on builtins") {
  CHECK(run_cli("validate engel").exit_code == 0);
  const CliResult info = run_cli("info engel");
  CHECK(info.exit_code == 0);
  for (const std::string needle :
       {"n                          4", "k                          2",
        "step                       3", "growth_vector              (2, 3, 4)",
        "hausdorff_dimension        7", "geodesic_dimension         10",
        "rifford_bound              9", "fat                        false",
        "ideal                      false"})
    CHECK_MESSAGE(info.out.find(needle) != std::string::npos, needle);
}

TEST_CASE("CARNOT_SEED overrides the default seed") {
  const CliResult r = run_cli("mcp exponent heisenberg:1 --format json", "CARNOT_SEED=12345 ");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"seed\": 12345") != std::string::npos);
}

TEST_CASE("violation search exit codes: 1 when found, 0 when not") {
  CHECK(run_cli("mcp violate heisenberg:1 --N 4.9 --eps-pz 0.1").exit_code == 1);
  CHECK(run_cli("mcp violate heisenberg:1 --N 5").exit_code == 0);
}

TEST_CASE("mcp check verdict drives the exit code") {
  CHECK(run_cli("mcp check heisenberg:1 --K 0 --N 5 --samples 20000").exit_code == 0);
  CHECK(run_cli("mcp check heisenberg:1 --K 0 --N 4 --samples 20000").exit_code == 1);
}

TEST_CASE("input errors exit 3") {
  CHECK(run_cli("info /no/such/file.spec").exit_code == 3);
  CHECK(run_cli("log heisenberg:1 --point 0,0,1").exit_code == 3);  // cut locus
  CHECK(run_cli("mcp check heisenberg:1 --K 0.5 --N 5 --samples 100").exit_code == 3);
}

TEST_CASE("spec files load from disk") {
  const std::string path = "cli_test_spec.txt";
  {
    std::ofstream f(path);
    f << "format_version 1\ntype corank1\nk 2\nA 0 2\nA -2 0\n";
  }
  const CliResult r = run_cli("info " + path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("geodesic_dimension") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("json format is available after the subcommand") {
  const CliResult r = run_cli("info heisenberg:1 --format json");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"hausdorff_dimension\": 4") != std::string::npos);
}

TEST_CASE("--out writes the report to a file") {
  const std::string path = "cli_test_report.csv";
  const CliResult r = run_cli("mcp check heisenberg:1 --K 0 --N 5 --samples 5000 --format csv --out " +
                              path);
  CHECK(r.exit_code == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header == "t,lhs,rhs,margin,std_error");
  std::remove(path.c_str());
}
