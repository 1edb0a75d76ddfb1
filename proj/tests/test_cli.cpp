#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

std::string cli() {
  const char* p = std::getenv("PSITREE_CLI");
  REQUIRE(p != nullptr);
  return p;
}

// Runs the binary with the given arguments; returns the exit code and
// captures stdout.
int run_cli(const std::string& args, std::string* out) {
  std::string cmd = cli() + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  std::string s;
  char buf[4096];
  size_t k;
  while ((k = fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, k);
  int status = pclose(f);
  if (out) *out = s;
  return WEXITSTATUS(status);
}

json run_json(const std::string& args) {
  std::string out;
  int rc = run_cli(args, &out);
  REQUIRE(rc == 0);
  return json::parse(out);
}

}  // namespace

TEST_CASE("bracket: bound, truncation, schema") {
  json r = run_json("bracket --n0 8");
  CHECK(r.at("schema") == 1);
  CHECK(r.at("command") == "bracket");
  CHECK(r.at("inputs").at("n0") == 8);
  CHECK(r.at("results").at("bound_truncated_4") == "3.0487");
}

TEST_CASE("sequence: exact CSV rows") {
  std::string out;
  int rc = run_cli("sequence --family phylo --n-max 6 --format csv", &out);
  CHECK(rc == 0);
  CHECK(out == "n,value\n0,0\n1,1\n2,2\n3,2\n4,16/9\n5,13/9\n6,28/25\n");
}

TEST_CASE("ars: verdict and resonances") {
  json r = run_json("ars --family fringe --t 3");
  CHECK(r.at("results").at("verdict") == "incompatible");
  CHECK(r.at("results").at("resonances").front() == 2);
  // The r = 6 obstruction is what forces the logarithms in the first place.
  json b = run_json("ars --family bst --d 2");
  CHECK(b.at("results").at("verdict") == "incompatible");
  CHECK(b.at("results").at("residual") == "98/3125");
  CHECK(b.at("results").at("resonances") == json::array({6}));
  json o = run_json("ars --family bst --d 3");
  CHECK(o.at("results").at("resonances").empty());
}

TEST_CASE("expand: exact coefficients in the report") {
  json r = run_json("expand --family mary --m 2 --order 5");
  bool found = false;
  for (const auto& t : r.at("results").at("terms"))
    if (t.at("exp") == -5 && t.at("coeff") == "56/3125") found = true;
  CHECK(found);
}

TEST_CASE("solve: digits and comparison table") {
  json r = run_json("solve --family bst --digits 12 --compare-paper");
  std::string rho = r.at("results").at("rho").at("decimal");
  CHECK(rho.substr(0, 14) == "3.140857567202");
  CHECK(r.at("results").at("resonance") == 6);
  for (const auto& e : r.at("results").at("compare_paper"))
    CHECK(e.at("pass") == true);
}

TEST_CASE("integrable: CSV header and exact column") {
  std::string out;
  int rc = run_cli(
      "integrable --nu 2 --n-lo 10 --n-hi 12 --precision 192 --format csv",
      &out);
  CHECK(rc == 0);
  CHECK(out.rfind("n,predicted,exact,rel_error\n", 0) == 0);
  CHECK(out.find("-16531/4934151040") != std::string::npos);
}

TEST_CASE("reports are deterministic and replayable") {
  std::string a, b;
  CHECK(run_cli("sequence --family boltzmann --nu 3 --n-max 12", &a) == 0);
  CHECK(run_cli("sequence --family boltzmann --nu 3 --n-max 12", &b) == 0);
  CHECK(a == b);
  CHECK(!a.empty());

  std::string path = "/tmp/psitree_cli_report.json";
  {
    std::ofstream os(path, std::ios::binary);
    os << a;
  }
  std::string c;
  CHECK(run_cli("--from-report " + path, &c) == 0);
  CHECK(a == c);
}

TEST_CASE("exit codes: usage 2, numeric 3, unsupported 4") {
  CHECK(run_cli("expand --family nosuch", nullptr) == 2);
  CHECK(run_cli("no-such-subcommand", nullptr) == 2);
  CHECK(run_cli("", nullptr) == 2);
  CHECK(run_cli("ars --family mary --format xml", nullptr) == 2);
  CHECK(run_cli("solve --family fringe --t 2 --digits 6", nullptr) == 4);
  CHECK(run_cli("solve --family mary --m 3 --digits 6", nullptr) == 4);
  CHECK(run_cli("solve --family partition --d 3 --digits 6", nullptr) == 4);
  CHECK(run_cli("bracket --n0 0", nullptr) == 3);
  CHECK(run_cli("--help", nullptr) == 0);
}
