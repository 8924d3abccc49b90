#include "refugia/properties.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace refugia {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

PiecewiseField::Function random_wave(std::mt19937_64& rng, double max_base) {
  const double base = uniform(rng, 0.0, max_base);
  const double amp = uniform(rng, 0.0, base);
  const double freq = uniform(rng, 0.5, 4.0) * std::numbers::pi;
  const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return [=](double x) { return base + amp * std::sin(freq * x + phase); };
}

double unit_eigenvalue(const ProblemSpec& spec, const Grid& grid, const PiecewiseField& c) {
  return principal_eigenpair(assemble_interface(spec, grid, c), interface_mass(spec, grid, PiecewiseField::constant(1.0)))
      .value;
}

}  // namespace

PiecewiseField random_potential(std::uint64_t seed, double max_base) {
  std::mt19937_64 rng(seed);
  auto on1 = random_wave(rng, max_base);
  auto on2 = random_wave(rng, max_base);
  return PiecewiseField(std::move(on1), std::move(on2), "random");
}

PropertyReport shift_identity_checks(const ProblemSpec& spec, std::uint64_t seed, int count) {
  const Grid grid = make_grid(spec.domain);
  std::mt19937_64 rng(seed);
  PropertyReport report;
  for (int i = 0; i < count; ++i) {
    const PiecewiseField c = random_potential(rng(), 20.0);
    const double s = uniform(rng, 0.1, 10.0);
    const double base = unit_eigenvalue(spec, grid, c);
    const double shifted = unit_eigenvalue(spec, grid, c + s);
    const double deviation = shifted - base - s;
    report.checks.push_back({fmt::format("shift identity #{} (s = {:.4g})", i + 1, s), std::abs(deviation) <= 1e-9,
                             base + s, shifted, deviation});
  }
  return report;
}

PropertyReport sigma_shape_checks(const ProblemSpec& spec, int samples, double slack) {
  if (samples < 3) throw std::invalid_argument("need at least three samples");
  const Grid grid = make_grid(spec.domain);
  const Thresholds t = compute_thresholds(spec);
  const SigmaMap sigma(spec, grid, PiecewiseField::constant(0.0), spec.m);
  std::vector<double> values;
  const double top = 1.5 * t.lambda_infinity;
  for (int j = 0; j < samples; ++j) values.push_back(sigma(top * j / (samples - 1)));

  double largest_first = -std::numeric_limits<double>::infinity();
  double largest_second = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < values.size(); ++j) {
    largest_first = std::max(largest_first, values[j] - values[j - 1]);
    if (j + 1 < values.size())
      largest_second = std::max(largest_second, values[j + 1] - 2.0 * values[j] + values[j - 1]);
  }
  PropertyReport report;
  report.checks.push_back({"sigma decreasing", largest_first < 0.0, largest_first, 0.0, -largest_first});
  report.checks.push_back({"sigma concave", largest_second <= slack, largest_second, slack, slack - largest_second});
  return report;
}

PropertyReport maximum_principle_checks(const ProblemSpec& spec, std::uint64_t seed, int count) {
  const Grid grid = make_grid(spec.domain);
  std::mt19937_64 rng(seed);
  PropertyReport report;
  for (int i = 0; i < count; ++i) {
    const InterfaceOperator op = assemble_interface(spec, grid, random_potential(rng(), 10.0) + 1e-3);
    Vector f(op.size());
    for (Index j = 0; j < f.size(); ++j) f(j) = uniform(rng, 0.0, 1.0) < 0.7 ? 0.0 : uniform(rng, 0.0, 1.0);
    f(static_cast<Index>(rng() % static_cast<std::uint64_t>(f.size()))) = 1.0;
    const Vector u = solve_linear(op, f);
    const double low = u.minCoeff();
    report.checks.push_back({fmt::format("maximum principle #{}", i + 1), low > 0.0, 0.0, low, low});
  }
  return report;
}

PropertyReport simplicity_checks(const ProblemSpec& spec, std::uint64_t seed, int starts) {
  const Grid grid = make_grid(spec.domain);
  const InterfaceOperator op = assemble_interface(spec, grid, PiecewiseField::constant(0.0));
  const MassMatrix mass = interface_mass(spec, grid, spec.m);
  const EigenPair reference = principal_eigenpair(op, mass);
  std::mt19937_64 rng(seed);
  double value_gap = 0.0;
  double vector_gap = 0.0;
  for (int i = 0; i < starts; ++i) {
    Vector start(op.size());
    for (Index j = 0; j < start.size(); ++j) start(j) = uniform(rng, 0.01, 1.0);
    const EigenPair e = principal_eigenpair_from(op, mass, start);
    value_gap = std::max(value_gap, std::abs(e.value - reference.value) / (1.0 + std::abs(reference.value)));
    vector_gap = std::max(vector_gap, (e.vector - reference.vector).cwiseAbs().maxCoeff());
  }
  PropertyReport report;
  report.checks.push_back({"same eigenvalue from random starts", value_gap <= 1e-9, value_gap, 1e-9, 1e-9 - value_gap});
  report.checks.push_back({"same eigenvector from random starts", vector_gap <= 1e-6, vector_gap, 1e-6,
                           1e-6 - vector_gap});
  return report;
}

}  // namespace refugia
