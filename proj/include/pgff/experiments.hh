#pragma once

#include "pgff/observables.hh"
#include "pgff/partition.hh"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pgff {

using Json = nlohmann::ordered_json;

/// Invalid configuration; the message names the violated rule.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string experiment = "sample";
  int d = 3;
  int N = 8;
  int ell = 2;               ///< free-box side (free-energy, domination)
  double a = 1;
  double b = 1;
  double epsilon = 1;
  std::vector<double> epsilon_grid; ///< overrides epsilon where a scan makes sense
  double xi = 0;             ///< 0 = critical_xi(a, b)
  double beta = 0.5;
  double gamma = 0.8;
  double eta = 0.2;
  std::uint64_t seed = 1;
  long sweeps = 10000;
  long burn_in = 1000;
  long thinning = 10;
  int threads = 1;
  std::string schedule = "checkerboard";
  std::string init = "zero";
  int images = 8;            ///< transverse image truncation (greens)
  long samples = 20000;      ///< domination draws, capacity sets, MC bridges
  int walk_steps = 200;      ///< n_max for the walk constants
  int sites = 2;             ///< domination region size
  double psi = 1;            ///< domination boundary value
  std::string out = "out";

  Json to_json() const;
  /// Unknown keys are rejected.
  static RunConfig from_json(const Json &j);
  /// Applies one "key=value" override, value parsed as JSON when possible.
  void set(const std::string &assignment);
};

inline const std::vector<std::string> &experiment_names() {
  static const std::vector<std::string> names{"sample",   "variational",     "free-energy",
                                              "greens",   "capacity",        "partition-check",
                                              "domination", "acceptance"};
  return names;
}

/// Throws ConfigError on the first violated rule.
void validate(const RunConfig &cfg);

/// A file produced alongside report.json.
struct Artifact {
  std::string name;
  std::string text;              ///< CSV body (when not a snapshot)
  bool snapshot = false;
  Snapshot field;                ///< cylinder field (when a snapshot)
};

struct Report {
  std::string experiment;
  std::string version;
  Json config;
  Json metrics = Json::object();
  Json budgets = Json::object(); ///< error bounds of truncated computations
  Json checks = Json::array();   ///< hard invariants: {name, pass, detail}
  bool pass = true;
  double wall_seconds = 0;
  std::vector<Artifact> artifacts;

  void check(const std::string &name, bool ok, const std::string &detail = {});
  Json to_json() const;
};

std::string version_string();

/// `log` receives progress lines (acceptance prints one per criterion).
Report run_experiment(const RunConfig &cfg,
                      const std::function<void(const std::string &)> &log = {});

/// Writes report.json and the artifacts into dir/<experiment>-seed<seed>/;
/// returns the written paths.
std::vector<std::filesystem::path> emit_report(const Report &report,
                                               const std::filesystem::path &dir);

/// Bracketing cell of a log-epsilon grid for the critical free energy.
struct Calibration {
  double target_xi = 0;
  int ell = 0;
  std::vector<double> log_eps;   ///< grid
  std::vector<double> xi_hat;    ///< thermodynamic-integration estimate per grid point
  double statistical_se = 0;
  double discretisation = 0;
  double gap = 0;                ///< finite-box bias bound (xi_hat underestimates)
  bool found = false;
  double log_eps_lo = 0;         ///< xi_hat(lo) <= target < xi_hat(hi)
  double log_eps_hi = 0;
};

/// One thermodynamic-integration run up to the top of the grid; xi_hat at a
/// grid point is read off the cumulative integral by linear interpolation.
Calibration calibrate_critical_eps(int d, int ell, double a, double b, double log_eps_lo,
                                   double log_eps_hi, double step, const ThermoOptions &opt);

} // namespace pgff
