// Runs the acceptance criteria and prints one PASS/FAIL line per criterion
// (indented detail lines follow). Exit code 0 when all pass, 3 otherwise.
#include <cstdio>
#include <exception>
#include <vector>

#include <CLI11.hpp>

#include "rmtlab/acceptance.hpp"
#include "rmtlab/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rmtlab acceptance suite"};
  std::vector<int> ids;
  rmt::AcceptanceOptions options;
  app.add_option("-c,--criterion", ids, "criterion number (repeatable; default all)")->check(CLI::Range(1, rmt::kCriterionCount));
  app.add_option("-w,--workers", options.workers, "worker threads (0 = all)");
  app.add_option("--seed", options.seed, "base seed");
  app.add_option("--budget-scale", options.budget_scale, "budget multiplier (default 8 / hardware threads)");
  CLI11_PARSE(app, argc, argv);
  if (ids.empty())
    for (int i = 1; i <= rmt::kCriterionCount; ++i) ids.push_back(i);
  bool all = true;
  try {
    rmt::run_acceptance(ids, options, [&](const rmt::CriterionResult& r) {
      std::printf("%s\n", rmt::format_result(r).c_str());
      std::fflush(stdout);
      all &= r.passed();
    });
  } catch (const rmt::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 2;
  }
  return all ? 0 : 3;
}
