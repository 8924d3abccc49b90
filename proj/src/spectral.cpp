#include "refugia/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace refugia {

namespace {

/// Nodes below this fraction of the maximum are left out of the Collatz-Wielandt ratios,
/// whose rounding error grows as the entry shrinks.
constexpr double kRatioFloor = 1e-8;

Vector pointwise_weight(const LinearOperator& a, const MassMatrix& m) {
  if (m.diag.size() != a.size()) throw std::invalid_argument("mass does not match the operator");
  Vector d = m.diag.cwiseQuotient(a.weights);
  if (!(d.minCoeff() > 0.0)) throw std::invalid_argument("mass must be strictly positive");
  return d;
}

}  // namespace

double gershgorin_lower_bound(const LinearOperator& a, const MassMatrix& m) {
  const Vector d = pointwise_weight(a, m);
  const auto& mat = a.matrix;
  double lower = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < mat.rows(); ++i) {
    double off = 0.0;
    for (Index j = std::max<Index>(0, i - mat.lower()); j <= std::min<Index>(mat.rows() - 1, i + mat.upper()); ++j)
      if (j != i) off += std::abs(mat(i, j));
    lower = std::min(lower, (mat(i, i) - off) / d(i));
  }
  return lower;
}

MassMatrix unit_mass(const LinearOperator& a) { return MassMatrix{a.weights}; }

EigenPair principal_eigenpair(const LinearOperator& a, const MassMatrix& m, std::optional<double> shift_hint,
                              const EigenOptions& options) {
  return principal_eigenpair_from(a, m, Vector::Ones(a.size()), shift_hint, options);
}

EigenPair principal_eigenpair_from(const LinearOperator& a, const MassMatrix& m, const Vector& start,
                                   std::optional<double> shift_hint, const EigenOptions& options) {
  const Index n = a.size();
  const Vector d = pointwise_weight(a, m);
  const Vector& s = a.symmetrizer;
  const double safe_shift = gershgorin_lower_bound(a, m) - 1.0;
  double shift = shift_hint ? std::min(*shift_hint, std::numeric_limits<double>::max()) : safe_shift;

  if (start.size() != n) throw std::invalid_argument("start vector does not match the operator");
  Vector x = start.cwiseMax(0.0);
  if (!(x.maxCoeff() > 0.0)) throw std::invalid_argument("start vector must have a positive entry");
  x /= x.maxCoeff();

  BandedLU<double> lu;
  double factored_shift = std::numeric_limits<double>::quiet_NaN();
  double estimate = std::numeric_limits<double>::quiet_NaN();
  EigenPair out;

  for (int it = 1; it <= options.max_iterations; ++it) {
    if (!(shift == factored_shift)) {
      BandedMatrix<double> shifted = a.matrix;
      shifted.add_to_diagonal(-shift * d);
      try {
        lu.compute(shifted);
      } catch (const SingularMatrixError&) {
        shift -= 1e-6 * (1.0 + std::abs(shift));
        continue;
      }
      factored_shift = shift;
    }
    Vector y = lu.solve(d.cwiseProduct(x));
    const double ymax = y.maxCoeff();
    if (!(ymax > 0.0) || y.minCoeff() < -1e-12 * ymax) {
      if (shift <= safe_shift) throw std::runtime_error("principal positivity violated");
      shift = safe_shift;
      continue;
    }
    x = (y / ymax).cwiseMax(0.0);

    const Vector r = a.matrix * x;
    const double previous = estimate;
    const double norm = x.dot(s.cwiseProduct(d).cwiseProduct(x));
    estimate = x.dot(s.cwiseProduct(r)) / norm;
    // Rounding floor of the quotient: the stencil sums cancel at the scale of |A| |x|.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         x.dot(s.cwiseProduct(a.matrix.abs_times(x))) / norm;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (x(i) < kRatioFloor) continue;
      const double q = r(i) / (d(i) * x(i));
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    out.iterations = it;
    out.lower_bound = lo;
    out.upper_bound = hi;

    if (it >= 2 &&
        std::abs(estimate - previous) <= std::max(options.tolerance * (1.0 + std::abs(estimate)), floor)) {
      out.value = estimate;
      out.vector = x;
      out.residual = a.weights.cwiseProduct(r - estimate * d.cwiseProduct(x)).cwiseAbs().maxCoeff();
      out.underflowed = (x.array() == 0.0).count();
      return out;
    }

    if (std::isfinite(lo)) {
      const double candidate =
          std::min(lo, estimate) - std::max(0.5 * (hi - lo), 1e-6 * (1.0 + std::abs(lo)));
      if (candidate > shift) shift = candidate;
    }
  }
  const Vector r = a.matrix * x;
  const double residual = a.weights.cwiseProduct(r - estimate * d.cwiseProduct(x)).cwiseAbs().maxCoeff();
  throw std::runtime_error(
      fmt::format("inverse iteration did not converge in {} steps (residual {:.3e})", options.max_iterations, residual));
}

SigmaMap::SigmaMap(const ProblemSpec& spec, const Grid& grid, const PiecewiseField& c, const PiecewiseField& m)
    : base_(assemble_interface(spec, grid, c)), m_(to_unknowns(sample_field(m, grid))) {}

EigenPair SigmaMap::eigenpair(double lambda) const {
  LinearOperator op = base_;
  op.matrix.add_to_diagonal(-lambda * m_);
  return principal_eigenpair(op, unit_mass(op));
}

double sigma_of_lambda(const ProblemSpec& spec, const PiecewiseField& c, const PiecewiseField& m, double lambda) {
  return SigmaMap(spec, make_grid(spec.domain), c, m)(lambda);
}

WeightedEigenvalue find_weight_root(const std::function<double(double)>& sigma, double tolerance, int max_expansions) {
  WeightedEigenvalue out;
  auto eval = [&](double lambda) {
    ++out.evaluations;
    return sigma(lambda);
  };
  std::vector<double> sequence;

  double a = 0.0;
  double fa = eval(a);
  sequence.push_back(fa);
  if (fa == 0.0) {
    out.value = 0.0;
    out.sign_changes = 1;
    return out;
  }
  double b = 0.0;
  double fb = fa;
  int expansions = 0;
  if (fa > 0.0) {
    b = 1.0;
    fb = eval(b);
    sequence.push_back(fb);
    while (fb > 0.0) {
      if (++expansions > max_expansions) throw std::runtime_error("bracket expansion cap exceeded");
      a = b;
      fa = fb;
      b *= 2.0;
      fb = eval(b);
      sequence.push_back(fb);
    }
    for (double probe = 2.0 * b; probe <= 4.0 * b; probe *= 2.0) sequence.push_back(eval(probe));
  } else {
    a = -1.0;
    fa = eval(a);
    sequence.insert(sequence.begin(), fa);
    while (fa < 0.0) {
      if (++expansions > max_expansions) throw std::runtime_error("bracket expansion cap exceeded");
      b = a;
      fb = fa;
      a *= 2.0;
      fa = eval(a);
      sequence.insert(sequence.begin(), fa);
    }
    for (double probe = 2.0 * a; probe >= 4.0 * a; probe *= 2.0) sequence.insert(sequence.begin(), eval(probe));
  }
  for (std::size_t i = 1; i < sequence.size(); ++i)
    if ((sequence[i - 1] > 0.0) != (sequence[i] > 0.0)) ++out.sign_changes;

  // Illinois variant of regula falsi.
  int side = 0;
  double c = 0.5 * (a + b);
  double fc = 0.0;
  for (int it = 0; it < 200; ++it) {
    c = b - fb * (b - a) / (fb - fa);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    fc = eval(c);
    if (std::abs(fc) <= tolerance) break;
    if (fc > 0.0) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (b - a <= 1e-15 * (1.0 + std::abs(c))) break;
  }
  out.value = c;
  out.sigma_at_root = fc;
  return out;
}

WeightedEigenvalue weighted_principal_eigenvalue(const ProblemSpec& spec, const PiecewiseField& c,
                                                 const PiecewiseField& m) {
  const SigmaMap sigma(spec, make_grid(spec.domain), c, m);
  return find_weight_root([&sigma](double lambda) { return sigma(lambda); });
}

std::vector<bool> refuge_node_mask(const ProblemSpec& spec, const Grid& grid, int which) {
  std::vector<bool> mask(static_cast<std::size_t>(grid.unknowns()), false);
  if (which == 1) {
    for (Index j = 0; j < grid.x1.size(); ++j)
      mask[static_cast<std::size_t>(j)] = spec.refuges.refuge1.contains(grid.x1(j));
  } else {
    for (Index j = 0; j + 1 < grid.x2.size(); ++j)
      mask[static_cast<std::size_t>(grid.offset2() + j)] = spec.refuges.refuge2.contains(grid.x2(j));
  }
  return mask;
}

EigenPair refuge_eigenpair(const ProblemSpec& spec, const Grid& grid, int which) {
  const ScalarOperator op = assemble_scalar(ScalarOperatorSpec{refuge_grid(spec, grid, which)});
  Vector m(op.size());
  for (Index j = 0; j < op.size(); ++j) m(j) = which == 1 ? spec.m.eval1(op.x(j)) : spec.m.eval2(op.x(j));
  return principal_eigenpair(op, lumped_mass(op, m));
}

EigenPair grid_refuge_eigenpair(const ProblemSpec& spec, const Grid& grid, int which) {
  const InterfaceOperator full = assemble_interface(spec, grid, PiecewiseField::constant(0.0));
  std::vector<bool> fixed = refuge_node_mask(spec, grid, which);
  fixed.flip();
  const ReducedSystem reduced = eliminate_unknowns(full, fixed, Vector::Zero(full.size()));
  const Vector m_all = to_unknowns(sample_field(spec.m, grid));
  Vector m(static_cast<Index>(reduced.kept.size()));
  for (Index r = 0; r < m.size(); ++r) m(r) = m_all(reduced.kept[static_cast<std::size_t>(r)]);
  return principal_eigenpair(reduced.op, lumped_mass(reduced.op, m));
}

Thresholds compute_thresholds(const ProblemSpec& spec) {
  spec.validate();
  const Grid grid = make_grid(spec.domain);
  Thresholds t;
  t.lambda_star = weighted_principal_eigenvalue(spec, PiecewiseField::constant(0.0), spec.m).value;
  t.lambda_m1 = refuge_eigenpair(spec, grid, 1).value;
  t.lambda_m2 = refuge_eigenpair(spec, grid, 2).value;
  t.lambda_infinity = std::min(t.lambda_m1, t.lambda_m2);
  t.grid_lambda_m1 = grid_refuge_eigenpair(spec, grid, 1).value;
  t.grid_lambda_m2 = grid_refuge_eigenpair(spec, grid, 2).value;
  t.window_nonempty = t.lambda_star > 0.0 && t.lambda_star < t.lambda_infinity;
  if (!t.window_nonempty)
    t.diagnostic = fmt::format("empty window: lambda_star = {:.6g}, lambda_infinity = {:.6g}", t.lambda_star,
                               t.lambda_infinity);
  return t;
}

ScalarOperator habitat_robin_operator(const ProblemSpec& spec, const Grid& grid, int which, const PiecewiseField& c) {
  ScalarOperatorSpec s;
  s.grid = habitat_grid(grid, which);
  if (which == 1) {
    s.potential = [c](double x) { return c.eval1(x); };
    s.left = BoundaryCondition::neumann();
    s.right = BoundaryCondition::robin(spec.gamma1);
  } else {
    s.potential = [c](double x) { return c.eval2(x); };
    s.left = BoundaryCondition::robin(spec.gamma2);
    s.right = BoundaryCondition::dirichlet();
  }
  return assemble_scalar(s);
}

bool PropertyReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

namespace {

double scalar_value(const ScalarOperator& op) { return principal_eigenpair(op, unit_mass(op)).value; }

double weighted_scalar_value(const ScalarOperator& op, const PiecewiseField& m, int which) {
  Vector w(op.size());
  for (Index j = 0; j < op.size(); ++j) w(j) = which == 1 ? m.eval1(op.x(j)) : m.eval2(op.x(j));
  return principal_eigenpair(op, lumped_mass(op, w)).value;
}

PropertyCheck ordering(std::string name, double lhs, double rhs) {
  return PropertyCheck{std::move(name), lhs < rhs, lhs, rhs, rhs - lhs};
}

}  // namespace

PropertyReport scalar_eigen_properties_suite(const ProblemSpec& spec) {
  spec.validate();
  const Grid grid = make_grid(spec.domain);
  const auto zero = PiecewiseField::constant(0.0);
  const auto one = PiecewiseField::constant(1.0);
  PropertyReport report;

  {
    const double base = scalar_value(habitat_robin_operator(spec, grid, 1, zero));
    const double shifted = scalar_value(habitat_robin_operator(spec, grid, 1, one));
    const double deviation = shifted - base - 1.0;
    report.checks.push_back({"unit potential shift", std::abs(deviation) <= 1e-9, base + 1.0, shifted, deviation});
    report.checks.push_back(ordering("potential monotonicity (habitat 1)", base, shifted));
  }
  {
    const double plain = principal_eigenpair(assemble_interface(spec, grid, zero),
                                             unit_mass(assemble_interface(spec, grid, zero)))
                             .value;
    const InterfaceOperator crowded = assemble_interface(spec, grid, spec.a);
    report.checks.push_back(
        ordering("potential monotonicity (membrane)", plain, principal_eigenpair(crowded, unit_mass(crowded)).value));
  }
  {
    const double robin = scalar_value(habitat_robin_operator(spec, grid, 2, zero));
    ScalarOperatorSpec dd{habitat_grid(grid, 2)};
    report.checks.push_back(ordering("robin below dirichlet (habitat 2)", robin, scalar_value(assemble_scalar(dd))));
  }
  const Index n_unit = std::max<Index>(200, spec.domain.n1);
  {
    ScalarOperatorSpec nd{make_scalar_grid({0.0, 1.0}, n_unit)};
    nd.left = BoundaryCondition::neumann();
    ScalarOperatorSpec dd{make_scalar_grid({0.0, 1.0}, n_unit)};
    report.checks.push_back(
        ordering("neumann below dirichlet on (0,1)", scalar_value(assemble_scalar(nd)), scalar_value(assemble_scalar(dd))));
    ScalarOperatorSpec sub{make_scalar_grid({0.1, 0.9}, n_unit)};
    report.checks.push_back(
        ordering("domain monotonicity (0,1) vs (0.1,0.9)", scalar_value(assemble_scalar(dd)), scalar_value(assemble_scalar(sub))));
  }
  {
    const double habitat = weighted_scalar_value(habitat_robin_operator(spec, grid, 1, zero), spec.m, 1);
    report.checks.push_back(ordering("domain monotonicity habitat 1 vs refuge 1", habitat,
                                     refuge_eigenpair(spec, grid, 1).value));
  }
  {
    const InterfaceOperator op = assemble_interface(spec, grid, zero);
    const Vector image = op.apply(Vector::Ones(op.size()));
    const bool supersolution = image.minCoeff() >= 0.0 && image.maxCoeff() > 0.0;
    const double value = principal_eigenpair(op, unit_mass(op)).value;
    report.checks.push_back({"strict supersolution implies positive eigenvalue", supersolution && value > 0.0, 0.0,
                             value, value});
  }
  {
    const InterfaceOperator op = assemble_interface(spec, grid, spec.a);
    const double membrane = principal_eigenpair(op, unit_mass(op)).value;
    const double bound = std::min(scalar_value(habitat_robin_operator(spec, grid, 1, spec.a)),
                                  scalar_value(habitat_robin_operator(spec, grid, 2, spec.a)));
    report.checks.push_back(ordering("membrane bound by scalar robin problems", membrane, bound));
  }
  {
    const double star = weighted_principal_eigenvalue(spec, zero, spec.m).value;
    const double bound = std::min(weighted_scalar_value(habitat_robin_operator(spec, grid, 1, zero), spec.m, 1),
                                  weighted_scalar_value(habitat_robin_operator(spec, grid, 2, zero), spec.m, 2));
    report.checks.push_back(ordering("weighted membrane bound by scalar robin problems", star, bound));
  }
  return report;
}

}  // namespace refugia
