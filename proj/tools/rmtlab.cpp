// rmtlab command-line front end.
//
//   rmtlab <kind> --config <file> [--out <dir>] [--workers k] [--plot-data]
//   rmtlab oracle <curve> --grid a:b:n [--order m] [--beta b] [--out file]
//   rmtlab verify [--criterion k ...] [--workers k]
//
// Exit codes: 0 pass, 1 validation error, 2 runtime failure, 3 acceptance failure.

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmtlab/acceptance.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/keyvalue.hpp"
#include "rmtlab/reference.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/runner.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAcceptance = 3;

/// "a:b:n" (uniform) or "x1,x2,...".
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream in(text);
    std::string a, b, n;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, n))
      throw rmt::ValidationError("--grid: expected a:b:n");
    try {
      return rmt::linear_grid(std::stod(a), std::stod(b), std::stoi(n));
    } catch (const std::logic_error&) {
      throw rmt::ValidationError("--grid: expected a:b:n with numbers");
    }
  }
  rmt::KeyValues kv;
  kv.set("grid", text);
  out = kv.get_doubles("grid");
  rmt::require(!out.empty(), "--grid: empty");
  return out;
}

rmt::ReferenceCurve oracle_curve(const std::string& curve, const std::vector<double>& grid, int order, int beta) {
  auto pointwise = [&](const std::string& kind, const std::function<double(double)>& f) {
    rmt::ReferenceCurve c;
    c.kind = kind;
    c.grid = grid;
    for (double x : grid) c.values.push_back(f(x));
    return c;
  };
  if (curve == "gap-density" || curve == "gap-cdf" || curve == "gap-probability") {
    const auto law = rmt::gap_density_fredholm(grid, order > 0 ? order : 48);
    return curve == "gap-density" ? law.density : curve == "gap-cdf" ? law.cdf : law.gap_probability;
  }
  if (curve == "surmise") return pointwise(curve, [&](double s) { return rmt::wigner_surmise(s, beta); });
  if (curve == "surmise-cdf") return pointwise(curve, [&](double s) { return rmt::wigner_surmise_cdf(s, beta); });
  if (curve == "tracy-widom")
    return pointwise(curve, [&](double s) { return rmt::tracy_widom_cdf(s, beta, order > 0 ? order : 80); });
  if (curve == "tracy-widom-painleve") return rmt::tracy_widom_painleve(grid);
  if (curve == "airy") return pointwise(curve, rmt::airy_function);
  if (curve == "airy-derivative") return pointwise(curve, rmt::airy_derivative);
  if (curve == "sine-kernel") return pointwise(curve, rmt::sine_kernel);
  if (curve == "semicircle") return pointwise(curve, rmt::density_semicircle);
  if (curve == "semicircle-counting") return pointwise(curve, rmt::counting_semicircle);
  throw rmt::ValidationError("unknown oracle curve '" + curve + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rmtlab: random-matrix spectral statistics"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = -1;
  bool plot_data = false;
  std::map<std::string, CLI::App*> kinds;
  for (const auto& name : rmt::experiment_kind_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "key = value (or flat JSON) config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (0 = all hardware threads)");
    sub->add_flag("--plot-data", plot_data, "also write whitespace-separated .dat files");
    kinds[name] = sub;
  }

  auto* oracle = app.add_subcommand("oracle", "write a reference curve as CSV");
  std::string curve, grid_text, oracle_out;
  int order = 0, beta = 2;
  oracle->add_option("curve", curve,
                     "gap-density | gap-cdf | gap-probability | surmise | surmise-cdf | tracy-widom | "
                     "tracy-widom-painleve | airy | airy-derivative | sine-kernel | semicircle | semicircle-counting")
      ->required();
  oracle->add_option("--grid", grid_text, "a:b:n or a comma list")->required();
  oracle->add_option("--order", order, "quadrature order (0 = default)");
  oracle->add_option("--beta", beta, "symmetry class for surmise / Tracy-Widom");
  oracle->add_option("--out", oracle_out, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  std::vector<int> criteria;
  rmt::AcceptanceOptions acceptance;
  verify->add_option("-c,--criterion", criteria, "criterion number (repeatable; default all)")
      ->check(CLI::Range(1, rmt::kCriterionCount));
  verify->add_option("--workers", acceptance.workers, "worker threads (0 = all)");
  verify->add_option("--seed", acceptance.seed, "base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (oracle->parsed()) {
      const auto c = oracle_curve(curve, parse_grid(grid_text), order, beta);
      if (oracle_out.empty()) {
        c.write_csv(std::cout);
      } else {
        std::ofstream f(oracle_out);
        if (!f) throw rmt::RuntimeFailure("cannot write " + oracle_out);
        c.write_csv(f);
      }
      return 0;
    }
    if (verify->parsed()) {
      if (criteria.empty())
        for (int i = 1; i <= rmt::kCriterionCount; ++i) criteria.push_back(i);
      bool all = true;
      rmt::run_acceptance(criteria, acceptance, [&](const rmt::CriterionResult& r) {
        std::printf("%s\n", rmt::format_result(r).c_str());
        std::fflush(stdout);
        all &= r.passed();
      });
      return all ? 0 : kExitAcceptance;
    }
    for (const auto& [name, sub] : kinds) {
      if (!sub->parsed()) continue;
      auto kv = rmt::KeyValues::load(config_path);
      if (workers >= 0) kv.set("workers", std::to_string(workers));
      if (!out_dir.empty()) kv.set("out", out_dir);
      auto config = rmt::ExperimentConfig::from_keyvalues(rmt::parse_experiment_kind(name), kv);
      config.plot_data = plot_data;
      const auto m = rmt::run_experiment(config);
      std::printf("%s: %s%s, %zu files in %s (%.2f s, %d workers)\n", name.c_str(), m.status.c_str(),
                  m.reused ? " (reused verified outputs)" : "", m.files.size(), config.out_dir.c_str(),
                  m.wall_seconds, m.workers);
      if (m.status == "refused") return kExitValidation;
      if (m.status == "failed") return kExitAcceptance;
      return 0;
    }
  } catch (const rmt::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
