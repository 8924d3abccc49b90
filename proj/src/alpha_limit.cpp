#include "refugia/alpha_limit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace refugia {

std::string to_string(Trichotomy t) {
  switch (t) {
    case Trichotomy::both: return "both";
    case Trichotomy::refuge1: return "refuge1";
    case Trichotomy::refuge2: return "refuge2";
  }
  return "unknown";
}

std::vector<double> alpha_ladder(double lambda_star, int steps, double ratio) {
  std::vector<double> out{0.0};
  double alpha = lambda_star;
  for (int k = 0; k <= steps; ++k, alpha *= ratio) out.push_back(alpha);
  return out;
}

namespace {

double gradient_sq(const Vector& u, double h) {
  return (u.tail(u.size() - 1) - u.head(u.size() - 1)).squaredNorm() / h;
}

double masked_sum(const Vector& v, const std::vector<bool>& mask) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) s += v(i);
  return s;
}

}  // namespace

AlphaRecord alpha_record(const ProblemSpec& spec, const Grid& grid, double alpha) {
  const PiecewiseField crowding = alpha * spec.a;
  const SigmaMap sigma(spec, grid, crowding, spec.m);
  AlphaRecord r;
  r.alpha = alpha;
  r.lambda = find_weight_root([&sigma](double l) { return sigma(l); }).value;

  const Vector& w = sigma.base().weights;
  const Vector m = sigma.weight();
  Vector phi = sigma.eigenpair(r.lambda).vector;
  phi /= std::sqrt(w.cwiseProduct(m).dot(phi.cwiseAbs2()));
  r.phi = phi;
  const Vector density = w.cwiseProduct(m).cwiseProduct(phi.cwiseAbs2());
  r.normalization = density.sum();

  const NodalPair nodal = to_nodal(grid, phi);
  r.gradient_norm_sq = gradient_sq(nodal.u1, grid.h1) + gradient_sq(nodal.u2, grid.h2);
  const double jump = nodal.u2(0) - nodal.u1(grid.n1());
  r.jump_sq = jump * jump;
  const Vector a = to_unknowns(sample_field(spec.a, grid));
  r.crowding_integral = w.cwiseProduct(a).dot(phi.cwiseAbs2());
  r.mass_refuge1 = masked_sum(density, refuge_node_mask(spec, grid, 1));
  r.mass_refuge2 = masked_sum(density, refuge_node_mask(spec, grid, 2));
  return r;
}

Trichotomy classify_trichotomy(const Thresholds& t, double tolerance) {
  if (std::abs(t.lambda_m1 - t.lambda_m2) <= tolerance * t.lambda_infinity) return Trichotomy::both;
  return t.lambda_m1 < t.lambda_m2 ? Trichotomy::refuge1 : Trichotomy::refuge2;
}

AlphaSweep run_alpha_sweep(const ProblemSpec& spec, const std::vector<double>& alphas, double trichotomy_tolerance) {
  if (alphas.empty() || alphas.front() < 0.0) throw std::invalid_argument("alphas must be nonnegative");
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (!(alphas[i] > alphas[i - 1])) throw std::invalid_argument("alphas must be strictly increasing");

  const Grid grid = make_grid(spec.domain);
  AlphaSweep sweep;
  sweep.alphas = alphas;
  sweep.thresholds = compute_thresholds(spec);
  for (double alpha : alphas) {
    try {
      sweep.records.push_back(alpha_record(spec, grid, alpha));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("alpha = {:.6g}: {}", alpha, e.what()));
    }
  }

  const AlphaRecord& last = sweep.records.back();
  LimitProfile& limit = sweep.limit;
  limit.lambda_limit = last.lambda;
  limit.phi_limit = last.phi;
  limit.branch = classify_trichotomy(sweep.thresholds, trichotomy_tolerance);
  double inside = 0.0;
  if (limit.branch != Trichotomy::refuge2) inside += last.mass_refuge1;
  if (limit.branch != Trichotomy::refuge1) inside += last.mass_refuge2;
  limit.mass_outside = last.normalization - inside;
  return sweep;
}

PropertyReport check_alpha_bounds(const AlphaRecord& r, const ProblemSpec& spec) {
  constexpr double slack = 1.05;
  const double ratio = spec.gamma2 / spec.gamma1;
  auto bound = [](std::string name, double lhs, double rhs) {
    return PropertyCheck{std::move(name), lhs <= rhs, lhs, rhs, rhs - lhs};
  };
  PropertyReport report;
  report.checks.push_back(bound("gradient energy", r.gradient_norm_sq, slack * ratio * r.lambda));
  report.checks.push_back(bound("membrane jump", r.jump_sq, slack * r.lambda / spec.gamma1));
  report.checks.push_back(bound("crowding energy", r.alpha * r.crowding_integral, slack * ratio * r.lambda));
  return report;
}

double alpha_upper_bound(const ProblemSpec& spec) {
  const Grid grid = make_grid(spec.domain);
  const NodalPair m = sample_field(spec.m, grid);
  double bound = std::numeric_limits<double>::infinity();
  for (int which : {1, 2}) {
    const ScalarOperator op = assemble_scalar(ScalarOperatorSpec{refuge_grid(spec, grid, which)});
    const double dirichlet = principal_eigenpair(op, unit_mass(op)).value;
    const double min_m = which == 1 ? m.u1.minCoeff() : m.u2.head(m.u2.size() - 1).minCoeff();
    bound = std::min(bound, dirichlet / min_m);
  }
  return bound;
}

PropertyReport check_alpha_sweep(const AlphaSweep& sweep, const ProblemSpec& spec, double gap_tolerance,
                                 double mass_tolerance) {
  PropertyReport report;
  const auto& rec = sweep.records;

  bool increasing = true;
  double smallest_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rec.size(); ++i) {
    increasing = increasing && rec[i].lambda > rec[i - 1].lambda;
    smallest_step = std::min(smallest_step, rec[i].lambda - rec[i - 1].lambda);
  }
  report.checks.push_back({"eigenvalue strictly increasing in alpha", increasing, 0.0, smallest_step, smallest_step});

  const double upper = alpha_upper_bound(spec);
  double largest = -std::numeric_limits<double>::infinity();
  for (const auto& r : rec) largest = std::max(largest, r.lambda);
  report.checks.push_back({"below the refuge upper bound", largest < upper, largest, upper, upper - largest});

  bool energy = true;
  double energy_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : rec) {
    for (const auto& c : check_alpha_bounds(r, spec).checks) {
      energy = energy && c.passed;
      energy_margin = std::min(energy_margin, c.margin);
    }
  }
  report.checks.push_back({"energy bounds at every alpha", energy, 0.0, energy_margin, energy_margin});

  bool normalized = true;
  for (const auto& r : rec) normalized = normalized && std::abs(r.normalization - 1.0) <= 1e-10;
  report.checks.push_back({"normalization preserved", normalized, 1.0, rec.back().normalization,
                           rec.back().normalization - 1.0});

  const double target = sweep.thresholds.lambda_infinity;
  const double gap = std::abs(sweep.limit.lambda_limit - target);
  report.checks.push_back({"gap to lambda_infinity at the largest alpha", gap <= gap_tolerance * target, gap,
                           gap_tolerance * target, gap_tolerance * target - gap});
  report.checks.push_back({"mass outside the selected refuges", sweep.limit.mass_outside <= mass_tolerance,
                           sweep.limit.mass_outside, mass_tolerance, mass_tolerance - sweep.limit.mass_outside});
  return report;
}

}  // namespace refugia
