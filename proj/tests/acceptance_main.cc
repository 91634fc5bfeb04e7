// Runs the acceptance suite; exit status is nonzero if any criterion fails.
#include "pgff/acceptance.hh"
#include "pgff/util.hh"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  CLI::App app{"pgff acceptance suite"};
  pgff::AcceptanceOptions opt;
  app.add_option("--seed", opt.seed, "random seed");
  app.add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  app.add_option("--only", opt.only, "criterion ids to run");
  CLI11_PARSE(app, argc, argv);
  opt.threads = pgff::resolve_threads(opt.threads);

  int failed = 0;
  const auto results = pgff::run_acceptance(opt, [&](const pgff::CriterionResult &r) {
    std::cout << pgff::format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  });
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
