#include "refugia/experiments.hpp"

#include "refugia/alpha_limit.hpp"
#include "refugia/blowup.hpp"
#include "refugia/properties.hpp"
#include "refugia/steady.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <fmt/format.h>

namespace refugia {

namespace {

struct Context {
  const Config& config;
  ProblemSpec spec;
  ExperimentSettings settings;
  RunOptions options;
  ArtifactWriter& writer;
  std::string prefix;

  std::string path(const std::string& file) const { return prefix.empty() ? file : prefix + "/" + file; }
  void csv(const std::string& file, const CsvTable& table) const { writer.write_csv(path(file), table); }
  void svg(const std::string& file, const ChartSpec& chart, const std::vector<Series>& series) const {
    if (options.svg) writer.write_text(path(file), render_svg(chart, series));
  }
};

void append(PropertyReport& into, const PropertyReport& from) {
  into.checks.insert(into.checks.end(), from.checks.begin(), from.checks.end());
}

std::string thresholds_line(const Thresholds& t) {
  return fmt::format("lambda_star = {:.8g}, lambda_m1 = {:.8g}, lambda_m2 = {:.8g}, lambda_infinity = {:.8g}",
                     t.lambda_star, t.lambda_m1, t.lambda_m2, t.lambda_infinity);
}

ExperimentResult thresholds_experiment(const Context& ctx) {
  const Thresholds t = compute_thresholds(ctx.spec);
  CsvTable table({"quantity", "value"});
  table.add_row({"lambda_star", t.lambda_star});
  table.add_row({"lambda_m1", t.lambda_m1});
  table.add_row({"lambda_m2", t.lambda_m2});
  table.add_row({"lambda_infinity", t.lambda_infinity});
  table.add_row({"grid_lambda_m1", t.grid_lambda_m1});
  table.add_row({"grid_lambda_m2", t.grid_lambda_m2});
  ctx.csv("thresholds.csv", table);

  ExperimentResult r{"thresholds", {}, {thresholds_line(t)}};
  r.report.checks.push_back({"window nonempty", t.window_nonempty, t.lambda_star, t.lambda_infinity,
                             t.lambda_infinity - t.lambda_star});
  if (!t.diagnostic.empty()) r.summary.push_back(t.diagnostic);
  return r;
}

ExperimentResult eigen_properties_experiment(const Context& ctx) {
  ExperimentResult r{"eigen-properties", {}, {}};
  append(r.report, scalar_eigen_properties_suite(ctx.spec));
  append(r.report, shift_identity_checks(ctx.spec, ctx.options.seed, 5));
  append(r.report, sigma_shape_checks(ctx.spec, 20));
  append(r.report, maximum_principle_checks(ctx.spec, ctx.options.seed + 1, 20));
  append(r.report, simplicity_checks(ctx.spec, ctx.options.seed + 2, 5));
  return r;
}

ExperimentResult alpha_sweep_experiment(const Context& ctx) {
  const auto& s = ctx.settings;
  const Thresholds t0 = compute_thresholds(ctx.spec);
  const AlphaSweep sweep =
      run_alpha_sweep(ctx.spec, alpha_ladder(t0.lambda_star, s.alpha_steps, s.alpha_ratio), s.trichotomy_tolerance);

  CsvTable table({"alpha", "lambda", "normalization", "gradient_norm_sq", "jump_sq", "crowding_integral",
                  "mass_refuge1", "mass_refuge2"});
  for (const auto& rec : sweep.records)
    table.add_row({rec.alpha, rec.lambda, rec.normalization, rec.gradient_norm_sq, rec.jump_sq, rec.crowding_integral,
                   rec.mass_refuge1, rec.mass_refuge2});
  ctx.csv("alpha_sweep.csv", table);

  const Grid grid = make_grid(ctx.spec.domain);
  const Vector x = unknown_coordinates(grid);
  CsvTable profile({"x", "phi"});
  for (Index i = 0; i < x.size(); ++i) profile.add_row({x(i), sweep.limit.phi_limit(i)});
  ctx.csv("limit_profile.csv", profile);

  ExperimentResult r{"alpha-sweep", check_alpha_sweep(sweep, ctx.spec), {}};
  r.summary.push_back(fmt::format("lambda at alpha_max = {:.8g}, lambda_infinity = {:.8g}, branch = {}",
                                  sweep.limit.lambda_limit, sweep.thresholds.lambda_infinity,
                                  to_string(sweep.limit.branch)));

  const std::vector<std::pair<std::string, Trichotomy>> geometries{
      {"default", Trichotomy::refuge1}, {"both", Trichotomy::both}, {"refuge2", Trichotomy::refuge2}};
  for (const auto& [preset, expected] : geometries) {
    const Thresholds t = compute_thresholds(make_problem(with_preset_geometry(ctx.config, preset)));
    const Trichotomy found = classify_trichotomy(t, s.trichotomy_tolerance);
    r.report.checks.push_back({fmt::format("trichotomy tag on the {} geometry is {}", preset, to_string(expected)),
                               found == expected, t.lambda_m1, t.lambda_m2, t.lambda_m2 - t.lambda_m1});
  }

  std::vector<double> alphas;
  std::vector<double> lambdas;
  for (const auto& rec : sweep.records)
    if (rec.alpha > 0.0) {
      alphas.push_back(rec.alpha);
      lambdas.push_back(rec.lambda);
    }
  ctx.svg("alpha_sweep.svg", {"weighted eigenvalue against crowding scale", "alpha", "lambda", true, false},
          {{"lambda(alpha)", alphas, lambdas},
           {"lambda_infinity", {alphas.front(), alphas.back()},
            {sweep.thresholds.lambda_infinity, sweep.thresholds.lambda_infinity}}});
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> phi(sweep.limit.phi_limit.data(), sweep.limit.phi_limit.data() + x.size());
  ctx.svg("limit_profile.svg", {"eigenfunction at the largest alpha", "x", "phi", false, false}, {{"phi", xs, phi}});
  return r;
}

CsvTable window_points_table(const std::vector<WindowPoint>& points) {
  CsvTable table({"lambda", "kind", "sub_built", "super_built", "sup_u", "iterations"});
  for (const auto& p : points)
    table.add_row({p.lambda, to_string(p.kind), p.sub_built, p.super_built, p.sup_u, p.iterations});
  return table;
}

ExperimentResult branch_experiment(const Context& ctx) {
  const auto& s = ctx.settings;
  const Thresholds t = compute_thresholds(ctx.spec);
  const SteadyBranch branch = trace_branch(ctx.spec, default_branch_grid(t, s.branch_points, s.branch_probes));

  CsvTable table({"lambda", "sup_u", "sup_u1", "sup_u2", "u1_at_gamma", "u2_at_gamma", "refuge1_max", "residual",
                  "cross_agreement"});
  std::vector<double> lambdas;
  std::vector<double> sups;
  for (const auto& p : branch.points) {
    table.add_row({p.lambda, p.sup_u, p.sup_u1, p.sup_u2, p.u1_at_gamma, p.u2_at_gamma, p.refuge1_max,
                   p.state.residual, p.cross_agreement});
    lambdas.push_back(p.lambda);
    sups.push_back(p.sup_u);
  }
  ctx.csv("branch.csv", table);
  if (!branch.probes.empty()) ctx.csv("branch_probes.csv", window_points_table(branch.probes));
  ctx.svg("branch.svg", {"steady-state branch", "lambda", "sup u", false, true}, {{"sup u", lambdas, sups}});

  ExperimentResult r{"branch", check_branch(branch), {thresholds_line(t)}};
  r.summary.push_back(fmt::format("{} branch points on ({:.6g}, {:.6g})", branch.points.size(), t.lambda_star,
                                  window_top(t)));
  return r;
}

ExperimentResult window_scan_experiment(const Context& ctx) {
  const auto& s = ctx.settings;
  const WindowScan scan = window_scan(ctx.spec, s.scan_points, s.scan_margin);
  ctx.csv("window_scan.csv", window_points_table(scan.points));

  ExperimentResult r{"window-scan", {}, {thresholds_line(scan.thresholds)}};
  for (const auto& p : scan.points) r.summary.push_back(fmt::format("  lambda = {:10.5g}  {}", p.lambda, to_string(p.kind)));
  for (const auto& m : scan.mismatches) r.summary.push_back("mismatch: " + m);
  r.report.checks.push_back({"positive solutions exactly inside the window", scan.matches_window,
                             static_cast<double>(scan.mismatches.size()), 0.0,
                             -static_cast<double>(scan.mismatches.size())});
  return r;
}

BlowupSweep run_blowup(const Context& ctx) {
  const Thresholds t = compute_thresholds(ctx.spec);
  return blowup_sweep(ctx.spec, blowup_ladder(t, ctx.settings.blowup_steps), ctx.settings.epsilon);
}

ExperimentResult blowup_experiment(const Context& ctx) {
  const BlowupSweep sweep = run_blowup(ctx);
  CsvTable table({"lambda", "refuge1_min_u1", "refuge1_max_u1", "sup_u2", "omega_eps_max_u1", "ratio"});
  std::vector<double> gaps;
  std::vector<double> mins;
  const double top = sweep.thresholds.grid_lambda_infinity();
  for (const auto& rec : sweep.records) {
    table.add_row({rec.lambda, rec.refuge1_min_u1, rec.refuge1_max_u1, rec.sup_u2, rec.omega_eps_max_u1, rec.ratio});
    gaps.push_back(top - rec.lambda);
    mins.push_back(rec.refuge1_min_u1);
  }
  ctx.csv("blowup_sweep.csv", table);
  ctx.svg("blowup_sweep.svg", {"refuge-1 minimum near the top of the window", "top - lambda", "min u1", true, true},
          {{"min over refuge 1 of u1", gaps, mins}});

  ExperimentResult r{"blowup", check_blowup(sweep, ctx.settings.blowup_threshold), {}};
  r.summary.push_back(fmt::format("{} ladder steps, uniform far-set bound {:.6g}, habitat-2 bound {:.6g}",
                                  sweep.records.size(), sweep.uniform_bound, sweep.u2_bound));
  if (sweep.failed_lambda)
    r.summary.push_back(fmt::format("ladder stopped at lambda = {:.10g}: {}", *sweep.failed_lambda, sweep.failure));
  return r;
}

ExperimentResult large_solution_experiment(const Context& ctx) {
  const Thresholds t = compute_thresholds(ctx.spec);
  const LargeSolutionLadder ladder = minimal_large_solution(ctx.spec, t.grid_lambda_infinity(),
                                                            k_ladder(ctx.settings.k_max_exponent), ctx.settings.epsilon);
  CsvTable table({"k", "compact_set_sup", "delta_to_prev"});
  std::vector<double> ks;
  std::vector<double> deltas;
  for (std::size_t j = 0; j < ladder.ks.size(); ++j) {
    table.add_row({ladder.ks[j], ladder.compact_sup[j], ladder.delta_to_prev[j]});
    if (j > 0) {
      ks.push_back(ladder.ks[j]);
      deltas.push_back(ladder.delta_to_prev[j]);
    }
  }
  ctx.csv("large_solution.csv", table);

  const Vector x = unknown_coordinates(make_grid(ctx.spec.domain));
  CsvTable minimal({"x", "compact", "u_minimal"});
  for (Index i = 0; i < x.size(); ++i)
    minimal.add_row({x(i), ladder.compact[static_cast<std::size_t>(i)], ladder.minimal(i)});
  ctx.csv("minimal_large_solution.csv", minimal);

  const BlowupSweep sweep = run_blowup(ctx);
  const LimitComparison cmp = compare_to_large_solution(sweep, ladder);
  CsvTable distance({"lambda", "distance"});
  for (std::size_t j = 0; j < cmp.lambdas.size(); ++j) distance.add_row({cmp.lambdas[j], cmp.distance[j]});
  ctx.csv("limit_comparison.csv", distance);
  ctx.svg("large_solution.svg", {"relative change along the k ladder", "k", "delta", true, true},
          {{"delta_to_prev", ks, deltas}});

  ExperimentResult r{"large-solution", check_large_solution(ladder), {}};
  append(r.report, check_limit_comparison(cmp));
  r.summary.push_back(fmt::format("k up to {:.6g} at lambda = {:.10g}; observed step ratio {:.4g}", ladder.ks.back(),
                                  ladder.lambda, ladder.contraction));
  return r;
}

using Runner = std::function<ExperimentResult(const Context&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"thresholds", thresholds_experiment},         {"eigen-properties", eigen_properties_experiment},
      {"alpha-sweep", alpha_sweep_experiment},       {"branch", branch_experiment},
      {"window-scan", window_scan_experiment},       {"blowup", blowup_experiment},
      {"large-solution", large_solution_experiment},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"thresholds", "eigen-properties", "alpha-sweep", "branch",
                                              "window-scan", "blowup", "large-solution"};
  return names;
}

CsvTable checks_table(const PropertyReport& report) {
  CsvTable table({"check", "passed", "lhs", "rhs", "margin"});
  for (const auto& c : report.checks) table.add_row({c.name, c.passed, c.lhs, c.rhs, c.margin});
  return table;
}

Config with_preset_geometry(const Config& config, const std::string& preset) {
  const Config geometry = Config::preset(preset);
  Config out = config;
  for (const char* key : {"refuge1_lo", "refuge1_hi", "refuge2_lo", "refuge2_hi"}) out.set(key, geometry.get(key));
  return out;
}

ExperimentResult run_experiment(const std::string& name, const Config& config, const RunOptions& options,
                                ArtifactWriter& writer, const std::string& prefix) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw ConfigError(fmt::format("unknown experiment '{}'", name));
  const Context ctx{config, make_problem(config), make_settings(config), options, writer, prefix};
  ExperimentResult result = it->second(ctx);
  ctx.csv("checks.csv", checks_table(result.report));
  return result;
}

std::vector<ExperimentResult> run_all(const Config& config, const RunOptions& options, ArtifactWriter& writer) {
  std::vector<ExperimentResult> out;
  for (const auto& name : experiment_names()) out.push_back(run_experiment(name, config, options, writer, name));
  return out;
}

}  // namespace refugia
