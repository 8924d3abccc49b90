// Command-line entry point: loads a configuration, runs one experiment (or all of them),
// writes the artifacts and a manifest, and reports failed checks.
//
// Exit status: 0 when every check passes, 1 when a check fails or a solver gives up,
// 2 on a configuration or usage error.

#include "refugia/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace {

constexpr int kCheckFailed = 1;
constexpr int kUsageError = 2;

struct Arguments {
  std::string config_path;
  std::string out = "results";
  std::uint64_t seed = 1;
  bool svg = false;
  std::vector<std::string> overrides;
};

refugia::Config load_config(const Arguments& args) {
  refugia::Config config = args.config_path.empty() ? refugia::Config{} : refugia::Config::load(args.config_path);
  for (const auto& o : args.overrides) config.apply_override(o);
  return config;
}

int report(const std::vector<refugia::ExperimentResult>& results) {
  int failed = 0;
  for (const auto& r : results) {
    int passed = 0;
    for (const auto& c : r.report.checks) passed += c.passed ? 1 : 0;
    fmt::print("[{}] {}/{} checks passed\n", r.name, passed, r.report.checks.size());
    for (const auto& line : r.summary) fmt::print("  {}\n", line);
    for (const auto& c : r.report.checks) {
      if (c.passed) continue;
      ++failed;
      fmt::print(stderr, "FAILED {}: {} (lhs {:.6g}, rhs {:.6g}, margin {:.3g})\n", r.name, c.name, c.lhs, c.rhs,
                 c.margin);
    }
  }
  return failed == 0 ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-habitat logistic model with refuges: thresholds, eigenvalue studies and steady states"};
  app.fallthrough();
  app.require_subcommand(1);

  Arguments args;
  app.add_option("--config", args.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", args.out, "output directory")->capture_default_str();
  app.add_option("--seed", args.seed, "seed of the randomized property instances")->capture_default_str();
  app.add_flag("--svg", args.svg, "also write SVG charts");
  app.add_option("--override", args.overrides, "key=value applied after the configuration file")->take_all();

  for (const auto& name : refugia::experiment_names()) app.add_subcommand(name, "run the " + name + " experiment");
  app.add_subcommand("all", "run every experiment, one subdirectory each");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    const refugia::Config config = load_config(args);
    refugia::ArtifactWriter writer(args.out);
    writer.write_text("config.txt", config.canonical());
    const refugia::RunOptions options{args.seed, args.svg};
    std::vector<refugia::ExperimentResult> results;
    if (experiment == "all")
      results = refugia::run_all(config, options, writer);
    else
      results.push_back(refugia::run_experiment(experiment, config, options, writer));
    writer.write_manifest();
    fmt::print("wrote {} files to {}\n", writer.entries().size(), writer.root().string());
    return report(results);
  } catch (const refugia::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "{} failed: {}\n", experiment, e.what());
    return kCheckFailed;
  }
}
