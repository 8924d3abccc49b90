// End-to-end acceptance run at full resolution.  Prints one PASS/FAIL line per
// criterion and exits nonzero when any line fails.

#include "refugia/assembly.hpp"
#include "refugia/experiments.hpp"
#include "refugia/properties.hpp"
#include "refugia/spectral.hpp"
#include "oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

using namespace refugia;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr double pi2 = std::numbers::pi * std::numbers::pi;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string passed_count(const PropertyReport& r) {
  const auto passed = std::count_if(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.passed; });
  return fmt::format("{}/{} checks passed", passed, r.checks.size());
}

/// Largest |margin|; for identity checks the margin is the deviation.
double largest_deviation(const PropertyReport& r) {
  double worst = 0.0;
  for (const auto& c : r.checks) worst = std::max(worst, std::abs(c.margin));
  return worst;
}

/// Smallest margin over ordering checks (those not named as identities).
double smallest_ordering_margin(const PropertyReport& r) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : r.checks)
    if (c.name.find("shift") == std::string::npos) worst = std::min(worst, c.margin);
  return worst;
}

std::string listing(const PropertyReport& r) {
  std::string out;
  for (const auto& c : r.checks) out += fmt::format("; {} {:.3g} vs {:.3g}", c.name, c.lhs, c.rhs);
  return out;
}

std::string failed_names(const PropertyReport& r) {
  std::string out;
  for (const auto& c : r.checks)
    if (!c.passed) out += fmt::format("; FAILED {} (lhs {:.6g}, rhs {:.6g})", c.name, c.lhs, c.rhs);
  return out;
}

Outcome from_report(const PropertyReport& r, std::string extra = {}) {
  return {r.all_passed(), passed_count(r) + extra + failed_names(r)};
}

double relative_error(double value, double exact) { return std::abs(value - exact) / std::abs(exact); }

Config preset(const std::string& name) { return Config::preset(name); }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("refugia_acceptance_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ExperimentResult run(const std::string& experiment, const Config& config, const std::string& dir) {
  ArtifactWriter writer(scratch(dir));
  return run_experiment(experiment, config, {kSeed, false}, writer);
}

double scalar_value(Interval span, Index n, BoundaryCondition left, BoundaryCondition right) {
  ScalarOperatorSpec s;
  s.grid = make_scalar_grid(span, n);
  s.left = left;
  s.right = right;
  const ScalarOperator op = assemble_scalar(s);
  return principal_eigenpair(op, unit_mass(op)).value;
}

Outcome analytic_eigenvalues() {
  const auto d = BoundaryCondition::dirichlet();
  const double dd = relative_error(scalar_value({0, 1}, 2000, d, d), pi2);
  const double nd = relative_error(scalar_value({0, 1}, 2000, BoundaryCondition::neumann(), d), pi2 / 4);
  const ProblemSpec spec = make_problem(Config{});
  const Grid grid = make_grid(spec.domain);
  const double r1 = relative_error(refuge_eigenpair(spec, grid, 1).value, pi2 / std::pow(spec.refuges.refuge1.length(), 2));
  const double r2 = relative_error(refuge_eigenpair(spec, grid, 2).value, pi2 / std::pow(spec.refuges.refuge2.length(), 2));
  const double worst = std::max({dd, nd, r1, r2});
  return {worst <= 5e-5,
          fmt::format("relative errors: dirichlet {:.2e}, reflecting-dirichlet {:.2e}, refuge1 {:.2e}, refuge2 {:.2e}",
                      dd, nd, r1, r2)};
}

Outcome dense_oracle() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_value = 0.0;
  double worst_vector = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    ProblemSpec spec = make_problem(Config{});
    const double xg = 0.5 + u(rng);
    spec.domain = {0.0, xg, xg + 0.5 + u(rng), 8 + static_cast<int>(192 * u(rng)), 8 + static_cast<int>(192 * u(rng))};
    spec.refuges.refuge1 = {0.2 * xg, 0.6 * xg};
    spec.refuges.refuge2 = {xg + 0.1, xg + 0.3};
    spec.gamma1 = 0.2 + 2.0 * u(rng);
    spec.gamma2 = spec.gamma1 * (1.0 + 3.0 * u(rng));
    const PiecewiseField c = random_potential(rng(), 15.0) + crowding_ramp(spec.refuges, 50.0 * u(rng), 0.05, 0.5);
    const double m0 = 0.5 + u(rng);
    const double m1 = 0.4 * u(rng);
    const PiecewiseField m([=](double x) { return m0 + m1 * std::cos(4 * x); }, [=](double x) { return m0 + m1 * x; });
    const Grid grid = make_grid(spec.domain);
    const EigenPair banded = principal_eigenpair(assemble_interface(spec, grid, c), interface_mass(spec, grid, m));
    const test::DenseEigen dense =
        test::dense_principal(test::energy_matrix(spec, grid, c), test::energy_mass(spec, grid, m));
    worst_value = std::max(worst_value, relative_error(banded.value, dense.value));
    worst_vector = std::max(worst_vector, (banded.vector - dense.vector).cwiseAbs().maxCoeff());
  }
  return {worst_value <= 1e-8 && worst_vector <= 1e-6,
          fmt::format("10 random specs, n <= 200: eigenvalue rel. gap {:.2e}, eigenvector gap {:.2e}", worst_value,
                      worst_vector)};
}

Outcome ordering_suite() {
  const PropertyReport r = scalar_eigen_properties_suite(make_problem(Config{}));
  const double margin = smallest_ordering_margin(r);
  return {r.all_passed() && margin > 0.0,
          fmt::format("{}, smallest strict margin {:.3g}", passed_count(r), margin) + listing(r) + failed_names(r)};
}

Outcome alpha_limit() {
  const ExperimentResult r = run("alpha-sweep", Config{}, "alpha");
  return from_report(r.report, r.summary.empty() ? "" : "; " + r.summary.front());
}

Outcome window() {
  const ExperimentResult r = run("window-scan", Config{}, "window");
  std::string kinds;
  for (std::size_t i = 1; i < r.summary.size(); ++i) kinds += r.summary[i].substr(r.summary[i].rfind(' ') + 1) + " ";
  return {r.report.all_passed(), "16 points: " + kinds};
}

Outcome branch() {
  const ExperimentResult r = run("branch", Config{}, "branch");
  return from_report(r.report, listing(r.report));
}

Outcome blowup() {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult r = run("blowup", preset("blowup"), "blowup");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {r.report.all_passed() && seconds <= 300.0,
          fmt::format("{:.1f} s, {}; {}", seconds, passed_count(r.report), r.summary.front()) +
              failed_names(r.report)};
}

Outcome large_solution() {
  const ExperimentResult r = run("large-solution", preset("blowup"), "large");
  return from_report(r.report, "; " + r.summary.back());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const Config config = preset("blowup");
  std::vector<std::filesystem::path> roots;
  for (const char* name : {"repeat_a", "repeat_b"}) {
    roots.push_back(scratch(name));
    ArtifactWriter writer(roots.back());
    run_all(config, {kSeed, false}, writer);
    writer.write_manifest();
  }
  int files = 0;
  std::vector<std::string> different;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(roots[0])) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    ++files;
    const auto relative = std::filesystem::relative(entry.path(), roots[0]);
    if (slurp(entry.path()) != slurp(roots[1] / relative)) different.push_back(relative.string());
  }
  const bool manifests = slurp(roots[0] / "manifest.txt") == slurp(roots[1] / "manifest.txt");
  std::string detail = fmt::format("{} CSV files compared, {} differ, manifests {}", files, different.size(),
                                   manifests ? "identical" : "differ");
  for (const auto& d : different) detail += "; " + d;
  return {files > 0 && different.empty() && manifests, detail};
}

}  // namespace

int main() {
  const ProblemSpec spec = make_problem(Config{});
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"analytic eigenvalue oracle", analytic_eigenvalues},
      {"dense-oracle equivalence", dense_oracle},
      {"shift identity",
       [&] {
         const PropertyReport r = shift_identity_checks(spec, kSeed, 5);
         return from_report(r, fmt::format(", largest deviation {:.2e}", largest_deviation(r)));
       }},
      {"Sigma shape", [&] { const PropertyReport r = sigma_shape_checks(spec, 20); return from_report(r, listing(r)); }},
      {"eigenvalue ordering suite", ordering_suite},
      {"maximum principle", [&] { return from_report(maximum_principle_checks(spec, kSeed, 20)); }},
      {"alpha limit", alpha_limit},
      {"existence window", window},
      {"branch properties", branch},
      {"non-simultaneous blow-up", blowup},
      {"minimal large solution", large_solution},
      {"determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) ++failures;
    fmt::print("{} {:2} {} [{:.1f} s]: {}\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
