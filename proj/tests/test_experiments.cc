#include "pgff/experiments.hh"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pgff;

namespace {

std::string slurp(const std::filesystem::path &p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

} // namespace

TEST_CASE("variational report") {
  RunConfig c;
  c.experiment = "variational";
  c.a = c.b = 1;
  const Report r = run_experiment(c);
  CHECK(r.pass);
  CHECK(r.metrics["xi_crit"].get<double>() == doctest::Approx(8));
  CHECK(r.metrics["knots"][0].get<double>() == doctest::Approx(0.25));
  CHECK(r.metrics["knots"][1].get<double>() == doctest::Approx(0.75));
}

TEST_CASE("partition check at N = 4") {
  RunConfig c;
  c.experiment = "partition-check";
  c.N = 4;
  const Report r = run_experiment(c);
  CHECK(r.pass);
  CHECK(r.metrics["slab_identity_residual"].get<double>() <= 1e-8);
}

TEST_CASE("config validation names the rule") {
  RunConfig c;
  c.N = 5;
  CHECK_THROWS_WITH_AS(validate(c), "N must be even and >= 2", ConfigError);
  c.N = 8;
  c.burn_in = c.sweeps;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig();
  c.experiment = "nonsense";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig();
  c.beta = 0.3;
  CHECK_THROWS_WITH_AS(validate(c), "N^beta must be an integer dividing N", ConfigError);
}

TEST_CASE("json config and overrides") {
  const RunConfig c = RunConfig::from_json(Json::parse(R"({"d": 2, "N": 6, "epsilon": 3.5})"));
  CHECK(c.d == 2);
  CHECK(c.N == 6);
  CHECK(c.epsilon == 3.5);
  CHECK_THROWS_AS(RunConfig::from_json(Json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(Json::parse(R"({"N": "eight"})")), ConfigError);
  RunConfig o = c;
  o.set("schedule=sequential");
  o.set("epsilon_grid=[1, 2]");
  CHECK(o.schedule == "sequential");
  CHECK(o.epsilon_grid.size() == 2);
  CHECK_THROWS_AS(o.set("novalue"), ConfigError);
  // every default is echoed
  CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("empty report is valid json") {
  Report r;
  r.experiment = "variational";
  r.config = RunConfig().to_json();
  const auto dir = std::filesystem::temp_directory_path() / "pgff_empty_report";
  const auto files = emit_report(r, dir);
  REQUIRE(files.size() == 1);
  const Json j = Json::parse(slurp(files[0]));
  CHECK(j["metrics"].empty());
  CHECK(j["config"]["N"] == 8);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sample run writes report, trajectory and snapshot deterministically") {
  RunConfig c;
  c.experiment = "sample";
  c.d = 3;
  c.N = 4;
  c.epsilon = 2;
  c.sweeps = 300;
  c.burn_in = 50;
  const auto dir = std::filesystem::temp_directory_path() / "pgff_sample_report";
  std::filesystem::remove_all(dir);
  const auto first = emit_report(run_experiment(c), dir);
  CHECK(first.size() == 3);
  const auto sub = dir / "sample-seed1";
  CHECK(std::filesystem::exists(sub / "report.json"));
  CHECK(std::filesystem::exists(sub / "final.pgff"));
  const std::string csv = slurp(sub / "trajectory.csv");
  CHECK(csv.rfind("sweep,pinned_fraction,l1_to_hhat,l1_to_hbar,omega_plus,energy", 0) == 0);
  emit_report(run_experiment(c), dir);
  CHECK(slurp(sub / "trajectory.csv") == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("other experiments run at small sizes") {
  for (const char *name : {"greens", "capacity", "domination", "free-energy"}) {
    RunConfig c;
    c.experiment = name;
    c.N = 4;
    c.samples = 2000;
    c.epsilon = 10;
    const Report r = run_experiment(c);
    INFO(std::string(name), " ", r.checks.dump());
    CHECK(r.pass);
  }
}
