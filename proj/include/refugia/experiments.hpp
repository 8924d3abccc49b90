#pragma once
/** @file experiments.hpp
 *  @brief Named experiments: each runs one study, writes its tables and returns its checks.
 */

#include "refugia/config.hpp"
#include "refugia/report.hpp"
#include "refugia/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace refugia {

struct RunOptions {
  std::uint64_t seed = 1;
  bool svg = false;
};

struct ExperimentResult {
  std::string name;
  PropertyReport report;
  std::vector<std::string> summary;  ///< short human-readable lines
};

/// Experiment names accepted by run_experiment, without "all".
const std::vector<std::string>& experiment_names();

/// Runs one experiment, writing its files under `prefix` inside the writer's root.
/// Throws ConfigError for an unknown name or invalid settings.
ExperimentResult run_experiment(const std::string& name, const Config& config, const RunOptions& options,
                                ArtifactWriter& writer, const std::string& prefix = "");

/// Every experiment in its own subdirectory.
std::vector<ExperimentResult> run_all(const Config& config, const RunOptions& options, ArtifactWriter& writer);

/// CSV of the checks: name, passed, lhs, rhs, margin.
CsvTable checks_table(const PropertyReport& report);

/// Geometry-only variants of `config` with the refuges of a named preset.
Config with_preset_geometry(const Config& config, const std::string& preset);

}  // namespace refugia
