#include "refugia/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace refugia {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> table{
      {"preset", "default"},
      {"x_left", "0"},
      {"x_gamma", "1"},
      {"x_right", "2"},
      {"n1", "2000"},
      {"n2", "2000"},
      {"refuge1_lo", "0.2"},
      {"refuge1_hi", "0.6"},
      {"refuge2_lo", "1.4"},
      {"refuge2_hi", "1.6"},
      {"p", "2"},
      {"gamma1", "1"},
      {"gamma2", "3"},
      {"m", "constant"},
      {"m_value", "1"},
      {"m_slope", "0"},
      {"a", "ramp"},
      {"a_amplitude", "100"},
      {"a_width", "0.05"},
      {"a_exponent", "0.5"},
      {"alpha_steps", "10"},
      {"alpha_ratio", "4"},
      {"trichotomy_tolerance", "1e-6"},
      {"branch_points", "24"},
      {"branch_probes", "6"},
      {"scan_points", "16"},
      {"scan_margin", "0.1"},
      {"blowup_steps", "12"},
      {"blowup_threshold", "1000"},
      {"epsilon", "0.05"},
      {"k_max_exponent", "14"},
  };
  return table;
}

const std::map<std::string, std::map<std::string, std::string>>& presets() {
  static const std::map<std::string, std::map<std::string, std::string>> table{
      {"default", {}},
      {"blowup", {{"p", "3"}}},
      {"both", {{"refuge1_lo", "0.3"}, {"refuge1_hi", "0.6"}, {"refuge2_lo", "1.3"}, {"refuge2_hi", "1.6"}}},
      {"refuge2", {{"refuge1_lo", "0.4"}, {"refuge1_hi", "0.6"}, {"refuge2_lo", "1.2"}, {"refuge2_hi", "1.7"}}},
      {"no-refuge", {{"a", "constant"}, {"a_amplitude", "1"}}},
  };
  return table;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

Config::Config() : values_(defaults()) {}

const std::vector<std::string>& Config::preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : presets()) out.push_back(name);
    return out;
  }();
  return names;
}

Config Config::preset(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError(fmt::format("unknown preset '{}'", name));
  Config c;
  for (const auto& [k, v] : it->second) c.values_[k] = v;
  c.values_["preset"] = name;
  return c;
}

Config Config::parse(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", number));
    entries.emplace_back(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
  }
  Config c;
  for (const auto& [k, v] : entries)
    if (k == "preset") c = preset(v);
  for (const auto& [k, v] : entries)
    if (k != "preset") c.set(k, v);
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read configuration '{}'", path));
  return parse(in);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!defaults().contains(key)) throw ConfigError(fmt::format("unknown key '{}'", key));
  if (value.empty()) throw ConfigError(fmt::format("empty value for '{}'", key));
  if (key == "preset") {
    const Config chosen = preset(value);
    for (const auto& [k, _] : presets().at(value)) values_[k] = chosen.values_.at(k);
    values_[key] = value;
    return;
  }
  values_[key] = value;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not key=value", assignment));
  set(trim(std::string_view(assignment).substr(0, eq)), trim(std::string_view(assignment).substr(eq + 1)));
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(fmt::format("missing key '{}'", key));
  return it->second;
}

double Config::number(const std::string& key) const {
  const std::string& s = get(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError(fmt::format("'{}' is not a number: '{}'", key, s));
  return v;
}

int Config::integer(const std::string& key) const {
  const std::string& s = get(key);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError(fmt::format("'{}' is not an integer: '{}'", key, s));
  return v;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += fmt::format("{}={}\n", k, v);
  return out;
}

ProblemSpec make_problem(const Config& config) {
  ProblemSpec spec;
  spec.domain = {config.number("x_left"), config.number("x_gamma"), config.number("x_right"), config.integer("n1"),
                 config.integer("n2")};
  spec.refuges.refuge1 = {config.number("refuge1_lo"), config.number("refuge1_hi")};
  spec.refuges.refuge2 = {config.number("refuge2_lo"), config.number("refuge2_hi")};
  spec.p = config.number("p");
  spec.gamma1 = config.number("gamma1");
  spec.gamma2 = config.number("gamma2");

  const std::string& m = config.get("m");
  if (m == "constant") {
    spec.m = PiecewiseField::constant(config.number("m_value"));
  } else if (m == "affine") {
    spec.m = affine_field(config.number("m_value"), config.number("m_slope"), spec.domain.x_left);
  } else {
    throw ConfigError(fmt::format("unknown weight preset '{}'", m));
  }

  const std::string& a = config.get("a");
  const double amplitude = config.number("a_amplitude");
  if (a == "ramp") {
    spec.a = crowding_ramp(spec.refuges, amplitude, config.number("a_width"), config.number("a_exponent"));
  } else if (a == "bump") {
    spec.a = crowding_bump(spec.refuges, amplitude, config.number("a_width"));
  } else if (a == "step") {
    spec.a = crowding_step(spec.refuges, amplitude);
    spec.crowding_flagged = true;
  } else if (a == "constant") {
    spec.a = PiecewiseField::constant(amplitude);
  } else {
    throw ConfigError(fmt::format("unknown crowding preset '{}'", a));
  }

  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const Grid grid = make_grid(spec.domain);
  const NodalPair mv = sample_field(spec.m, grid);
  if (!(std::min(mv.u1.minCoeff(), mv.u2.minCoeff()) > 0.0)) throw ConfigError("weight m must be positive");
  return spec;
}

ExperimentSettings make_settings(const Config& config) {
  ExperimentSettings s;
  s.alpha_steps = config.integer("alpha_steps");
  s.alpha_ratio = config.number("alpha_ratio");
  s.trichotomy_tolerance = config.number("trichotomy_tolerance");
  s.branch_points = config.integer("branch_points");
  s.branch_probes = config.integer("branch_probes");
  s.scan_points = config.integer("scan_points");
  s.scan_margin = config.number("scan_margin");
  s.blowup_steps = config.integer("blowup_steps");
  s.blowup_threshold = config.number("blowup_threshold");
  s.epsilon = config.number("epsilon");
  s.k_max_exponent = config.integer("k_max_exponent");
  if (s.alpha_steps < 1 || !(s.alpha_ratio > 1.0)) throw ConfigError("alpha ladder needs steps >= 1 and ratio > 1");
  if (s.branch_points < 2 || s.scan_points < 4 || s.blowup_steps < 3 || s.k_max_exponent < 1)
    throw ConfigError("ladder sizes too small");
  if (!(s.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  return s;
}

}  // namespace refugia
