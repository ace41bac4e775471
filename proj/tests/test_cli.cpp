#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace {

struct Run {
  int exit_code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" RAIRY_CLI_PATH "\" " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (const std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<double> fields(const std::string& row) {
  std::vector<double> v;
  std::istringstream in(row);
  for (std::string f; std::getline(in, f, ',');) v.push_back(std::stod(f));
  return v;
}

// value of "key=" inside a '#' header line
std::string header_value(const std::string& out, const std::string& key) {
  for (const auto& l : lines(out)) {
    if (l.empty() || l[0] != '#') continue;
    const auto p = l.find(" " + key + "=");
    if (p == std::string::npos) continue;
    const auto start = p + key.size() + 2;
    return l.substr(start, l.find(' ', start) - start);
  }
  return {};
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& body) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("rairy_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".cfg");
    std::ofstream(path) << body;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("kernel-grid: 17 x 17 table") {
  const Run r = run("kernel-grid --r 2 --tau 0.5 --min -4 --max 4 --step 0.5");
  REQUIRE(r.exit_code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2 + 17 * 17);
  CHECK(ls[0] == "# schema=1");
  CHECK(ls[1] == "zeta_x,zeta_y,K,abs_err");
  for (std::size_t k = 2; k < ls.size(); ++k) {
    const auto f = fields(ls[k]);
    REQUIRE(f.size() == 4);
    CHECK(std::isfinite(f[2]));
    CHECK(f[3] < 1e-8);
  }
}

TEST_CASE("kernel-grid: classical oracle column") {
  const Run r = run("kernel-grid --r 0 --min -3 --max 3 --step 1 --oracle airy");
  REQUIRE(r.exit_code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2 + 49);
  for (std::size_t k = 2; k < ls.size(); ++k) CHECK(fields(ls[k])[5] < 1e-7);
  CHECK(run("kernel-grid --r 1 --min 0 --max 1 --step 1 --oracle airy").exit_code == 2);
}

TEST_CASE("invalid input exits with status 2") {
  CHECK(run("kernel-grid --step 0").exit_code == 2);
  CHECK(run("kernel-grid --r -1").exit_code == 2);
  CHECK(run("no-such-command").exit_code == 2);
  CHECK(run("fr-cdf --quad-order 1").exit_code == 2);
  CHECK(run("eq-measure --potential 0,0,-1").exit_code == 2);
}

TEST_CASE("eq-measure: Gaussian potential at the critical source") {
  const Run r = run("eq-measure --potential 0,0,0.5 --a 1");
  REQUIRE(r.exit_code == 0);
  std::map<std::string, std::string> kv;
  for (const auto& l : lines(r.out)) {
    const auto c = l.find(',');
    if (l.empty() || l[0] == '#' || c == std::string::npos) continue;
    kv[l.substr(0, c)] = l.substr(c + 1);
  }
  CHECK(kv["regime"] == "critical");
  CHECK(std::stod(kv["beta"]) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::stod(kv["alpha"]) == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(std::stod(kv["a_c"]) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(run("eq-measure --potential 0,0,0.5 --a 0.5").out.find("subcritical") != std::string::npos);
  CHECK(run("eq-measure --potential 0,0,0.5 --a 2").out.find("supercritical") != std::string::npos);
}

TEST_CASE("fr-cdf: small table") {
  const Run r = run("fr-cdf --r 1 --s-min -2 --s-max 0 --s-step 1");
  REQUIRE(r.exit_code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2 + 3);
  CHECK(ls[1] == "s,F,est_error");
  CHECK(fields(ls[2])[1] < fields(ls[3])[1]);
  CHECK(fields(ls[3])[1] < fields(ls[4])[1]);
}

TEST_CASE("mc-edge: seeded runs are reproducible") {
  const std::string args = "mc-edge --n 30 --r 1 --draws 40 --seed 5 --table-step 0.5";
  const Run a = run(args), b = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(run("mc-edge --n 30 --r 1 --draws 40 --seed 6 --table-step 0.5").out != a.out);
  CHECK(header_value(a.out, "draws") == "40");
  CHECK(!header_value(a.out, "ks").empty());
}

TEST_CASE("layered configuration: flags over environment over file") {
  const TempFile cfg("# test config\nn=20\ndraws=10\ntable_step=1\na=1.5\n");
  const std::string base = "mc-edge --config " + cfg.path.string();
  CHECK(std::stod(header_value(run(base).out, "a")) == 1.5);
  CHECK(std::stod(header_value(run(base, "RAIRY_A=1.25").out, "a")) == 1.25);
  CHECK(std::stod(header_value(run(base + " --a 1.125", "RAIRY_A=1.25").out, "a")) == 1.125);
  CHECK(header_value(run(base).out, "n") == "20");

  const TempFile bad("bogus_key=3\n");
  CHECK(run("mc-edge --config " + bad.path.string()).exit_code == 2);
}

TEST_CASE("json output") {
  const Run r = run("kernel-grid --format json --r 1 --min 0 --max 1 --step 1");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["rows"].size() == 4);
  CHECK(j["rows"][0]["K"].get<double>() == doctest::Approx(0.303672853038209).epsilon(1e-9));
}

TEST_CASE("verify: fast suite passes") {
  const Run r = run("verify --suite fast");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("all checks passed") != std::string::npos);
}
