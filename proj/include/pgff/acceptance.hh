#pragma once

#include "pgff/experiments.hh"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pgff {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  double limit_seconds = 0; ///< runtime bound; exceeding it fails the criterion
  Json metrics = Json::object();
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<int> only; ///< empty = all twelve
};

/// Runs the acceptance suite; `on_result` sees each criterion as it finishes.
std::vector<CriterionResult>
run_acceptance(const AcceptanceOptions &opt,
               const std::function<void(const CriterionResult &)> &on_result = {});

/// "PASS  3  decoupling ... (detail) [12.3 s]"
std::string format_result(const CriterionResult &r);

} // namespace pgff
