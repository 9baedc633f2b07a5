#include <stdexcept>
#include <doctest.h>

#include "cchr/report.hpp"
#include "cchr/sim_engine.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cchr;

namespace {

const std::string kCli = CCHR_CLI_PATH;
const std::string kFixture = std::string(CCHR_FIXTURE_DIR) + "/frank_weibull.csv";

int run(const std::string& args) {
  int status = std::system((kCli + " " + args + " 2>/dev/null").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "cchr_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const std::string kFitArgs = " --input " + kFixture +
                             " --schema x1:discrete,x2:continuous --starts 2 --seed 4 --jobs 1";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fit report fields and determinism") {
  auto a = scratch("fit_a.json"), b = scratch("fit_b.json");
  int rc = run("fit" + kFitArgs + " --weights naive --out " + a.string());
  CHECK((rc == 0 || rc == 2));
  run("fit" + kFitArgs + " --weights naive --out " + b.string());
  CHECK(slurp(a) == slurp(b));
  json j = json::parse(slurp(a));
  for (const char* key : {"theta", "loglik", "converged", "n_outer", "hazard", "weights"})
    CHECK(j.contains(key));
  CHECK(std::isfinite(j["loglik"].get<double>()));
  for (auto& [k, v] : j["theta"].items()) CHECK(std::isfinite(v.get<double>()));
  for (double w : j["weights"].get<std::vector<double>>()) CHECK(w == 1.0);
  CHECK(j["hazard"]["time"].size() == j["hazard"]["increment"].size());
}

TEST_CASE("oracle and proposed weight modes") {
  auto o = scratch("fit_oracle.json");
  int rc = run("fit" + kFitArgs + " --weights oracle --out " + o.string());
  CHECK((rc == 0 || rc == 2));
  json j = json::parse(slurp(o));
  int zeros = 0;
  for (double w : j["weights"].get<std::vector<double>>()) zeros += w == 0.0;
  CHECK(zeros > 0);
  auto p = scratch("fit_proposed.json");
  rc = run("fit" + kFitArgs + " --weights proposed --out " + p.string());
  CHECK((rc == 0 || rc == 2));
}

TEST_CASE("bad input gives exit code 1") {
  CHECK(run("fit --input /nonexistent.csv --schema x1:discrete,x2:continuous") == 1);
  CHECK(run("fit" + kFitArgs + " --copula clayton") == 1);
}

TEST_CASE("fit report round trip") {
  auto a = scratch("fit_rt.json");
  run("fit" + kFitArgs + " --weights naive --out " + a.string());
  json j = json::parse(slurp(a));
  FitResult f = fit_from_json(j);
  CHECK(fit_to_json(f) == j);
  json again = json::parse(fit_to_json(f).dump());
  CHECK(fit_from_json(again).theta_hat == f.theta_hat);
  CHECK(fit_from_json(again).hazard == f.hazard);
}

TEST_CASE("bootstrap report round trip") {
  BootstrapResult b;
  b.B = 2;
  b.names = {"alpha", "nu"};
  b.point = {0.1, 1.1};
  b.estimates = {{0.2, 1.0}, {0.05, 1.3}};
  b.se = {0.1, 0.2};
  b.nulls = {0.0, 1.0};
  b.p_values = {0.5, std::nan("")};
  json j = bootstrap_to_json(b);
  BootstrapResult back = bootstrap_from_json(json::parse(j.dump()));
  CHECK(back.estimates == b.estimates);
  CHECK(std::isnan(back.p_values[1]));
  CHECK(back.p_values[0] == 0.5);
}

TEST_CASE("select emits 21 ranked rows") {
  auto out = scratch("select.csv");
  auto js = scratch("select.json");
  const std::string args = " --input " + kFixture + " --schema x1:discrete,x2:continuous";
  int rc = std::system((kCli + " select" + args + " --starts 3 --weights naive --max-outer 30 --out " +
                        js.string() + " > " + out.string() + " 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  std::istringstream lines(slurp(out));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "rank,copula,censoring,loglik");
  int rows = 0;
  double prev = 1e300;
  while (std::getline(lines, line)) {
    ++rows;
    auto last = line.substr(line.rfind(',') + 1);
    if (last != "NA") {
      double ll = std::stod(last);
      CHECK(ll <= prev);
      prev = ll;
    }
  }
  CHECK(rows == 21);
  CHECK(json::parse(slurp(js))["models"].size() == 21);
}

TEST_CASE("simulate writes metrics and the replicate dump") {
  auto prefix = scratch("sim").string();
  auto design = scratch("design.json");
  std::ofstream(design) << R"({"preset": "lowdep", "n": 150, "replications": 2, "n_starts": 1,
                               "outer_tol": 1e-4, "estimator": "oracle"})";
  int rc = run("simulate --design " + design.string() + " --seed 3 --out " + prefix);
  CHECK(rc == 0);
  std::string metrics = slurp(prefix + "_metrics.csv");
  CHECK(metrics.rfind("parameter,truth,bias,esd,rmse,cr\n", 0) == 0);
  CHECK(metrics.find("\nalpha,-0.6,") != std::string::npos);
  std::istringstream est(slurp(prefix + "_estimates.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(est, line)) ++rows;
  CHECK(rows == 2);
  std::string first = slurp(prefix + "_metrics.csv");
  run("simulate --design " + design.string() + " --seed 3 --out " + prefix);
  CHECK(slurp(prefix + "_metrics.csv") == first);
}

TEST_CASE("lowdep preset loads the design table exactly") {
  auto out = scratch("gen.csv");
  CHECK(run("generate --preset lowdep --n 50 --seed 1 --out " + out.string()) == 0);
  CHECK(slurp(out).rfind("y,delta1,delta2,z,w,x1,x2,g\n", 0) == 0);
}

}
