#pragma once
/** @file config.hpp
 *  @brief Flat `key = value` configuration, named presets and conversion to a ProblemSpec.
 */

#include "refugia/domain.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace refugia {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered key/value store.  Keys are validated against a fixed vocabulary.
class Config {
 public:
  /// Built-in defaults (the refuge-1-longer geometry).
  Config();

  /// Parses `key = value` lines; `#` starts a comment.  A `preset` key is applied
  /// first, wherever it appears, and the remaining keys override it.
  static Config parse(std::istream& in);
  static Config load(const std::string& path);
  static Config preset(const std::string& name);
  static const std::vector<std::string>& preset_names();

  /// Applies one `key=value` override; `preset=name` copies that preset's keys.
  void set(const std::string& key, const std::string& value);
  void apply_override(const std::string& assignment);

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  /// Canonical `key=value` lines, sorted by key.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Builds and validates the problem; throws ConfigError on bad input.
ProblemSpec make_problem(const Config& config);

/// Numerical settings of the experiments.
struct ExperimentSettings {
  int alpha_steps = 10;          ///< alpha = lambda_star * ratio^k, k = 0..steps
  double alpha_ratio = 4.0;
  double trichotomy_tolerance = 1e-6;  ///< relative to lambda_infinity
  int branch_points = 24;
  int branch_probes = 6;         ///< extra points approaching lambda_star geometrically
  int scan_points = 16;
  double scan_margin = 0.1;      ///< fraction of the window width
  int blowup_steps = 12;
  double blowup_threshold = 1e3;
  double epsilon = 0.05;         ///< exclusion distance from refuge 1
  int k_max_exponent = 14;
};

ExperimentSettings make_settings(const Config& config);

}  // namespace refugia
