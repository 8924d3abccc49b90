#include "refugia/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace refugia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double masked_max(const Vector& v, const std::vector<bool>& mask) {
  double best = -kInf;
  for (Index i = 0; i < v.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) best = std::max(best, v(i));
  return best;
}

double masked_min(const Vector& v, const std::vector<bool>& mask) {
  double best = kInf;
  for (Index i = 0; i < v.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) best = std::min(best, v(i));
  return best;
}

PropertyCheck at_most(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs <= rhs, lhs, rhs, rhs - lhs};
}

PropertyCheck at_least(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs >= rhs, lhs, rhs, lhs - rhs};
}

std::vector<bool> habitat_mask(const Grid& grid, int which) {
  std::vector<bool> mask(static_cast<std::size_t>(grid.unknowns()), false);
  const Index begin = which == 1 ? 0 : grid.offset2();
  const Index end = which == 1 ? grid.offset2() : grid.unknowns();
  for (Index i = begin; i < end; ++i) mask[static_cast<std::size_t>(i)] = true;
  return mask;
}

struct ExteriorProblem {
  SemilinearSystem sys;
  std::vector<Index> kept;
  std::vector<bool> fixed;
};

ExteriorProblem exterior_problem(const ProblemSpec& spec, const Grid& grid, const Thresholds& t, double lambda,
                                 double k) {
  const double upper = std::min(t.lambda_m2, t.grid_lambda_m2);
  if (!(lambda > t.lambda_star && lambda < upper))
    throw std::invalid_argument(fmt::format("exterior problem needs {:.6g} < lambda < {:.6g}, got {:.6g}",
                                            t.lambda_star, upper, lambda));
  if (!(k >= 0.0)) throw std::invalid_argument("boundary datum must be nonnegative");

  const SemilinearSystem full = interface_system(spec, grid, lambda);
  ExteriorProblem out;
  out.fixed = refuge_node_mask(spec, grid, 1);
  const ReducedSystem reduced = eliminate_unknowns(full.op, out.fixed, Vector::Constant(full.size(), k));
  out.kept = reduced.kept;
  const Index n = static_cast<Index>(out.kept.size());
  out.sys.op = reduced.op;
  out.sys.source = reduced.source;
  out.sys.m.resize(n);
  out.sys.a.resize(n);
  for (Index j = 0; j < n; ++j) {
    out.sys.m(j) = full.m(out.kept[static_cast<std::size_t>(j)]);
    out.sys.a(j) = full.a(out.kept[static_cast<std::size_t>(j)]);
  }
  out.sys.p = full.p;
  out.sys.lambda = lambda;
  return out;
}

Vector restrict(const Vector& u, const std::vector<Index>& kept) {
  Vector out(static_cast<Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) out(static_cast<Index>(j)) = u(kept[j]);
  return out;
}

ExteriorState expand(const ExteriorProblem& prob, const Vector& reduced, double k) {
  ExteriorState s;
  s.k = k;
  s.lambda = prob.sys.lambda;
  s.u = Vector::Constant(static_cast<Index>(prob.fixed.size()), k);
  for (std::size_t j = 0; j < prob.kept.size(); ++j) s.u(prob.kept[j]) = reduced(static_cast<Index>(j));
  s.residual = prob.sys.residual(reduced).cwiseAbs().maxCoeff();
  return s;
}

}  // namespace

std::vector<double> blowup_ladder(const Thresholds& t, int steps) {
  const double top = t.grid_lambda_infinity();
  std::vector<double> out;
  for (int j = 1; j <= steps; ++j) out.push_back(top - (top - t.lambda_star) * std::ldexp(1.0, -j));
  return out;
}

std::vector<bool> away_from_refuge_mask(const ProblemSpec& spec, const Grid& grid, int which, double epsilon) {
  const Interval& refuge = which == 1 ? spec.refuges.refuge1 : spec.refuges.refuge2;
  const Vector x = unknown_coordinates(grid);
  std::vector<bool> mask = habitat_mask(grid, which);
  for (Index i = 0; i < x.size(); ++i) {
    auto&& bit = mask[static_cast<std::size_t>(i)];
    if (bit) bit = refuge.distance(x(i)) >= epsilon;
  }
  return mask;
}

AprioriBound apriori_bound_check(const ProblemSpec& spec, const Grid& grid, double lambda, const Vector& u,
                                 double epsilon) {
  const std::vector<bool> far1 = away_from_refuge_mask(spec, grid, 1, epsilon);
  const std::vector<bool> far2 = away_from_refuge_mask(spec, grid, 2, epsilon);
  std::vector<bool> far(far1.size());
  for (std::size_t i = 0; i < far.size(); ++i) far[i] = far1[i] || far2[i];

  const Vector m = to_unknowns(sample_field(spec.m, grid));
  const Vector a = to_unknowns(sample_field(spec.a, grid));
  const double ratio = lambda * masked_max(m, far) / masked_min(a, far);

  AprioriBound out;
  out.k_constant = std::pow(std::max(ratio, 0.0), 1.0 / (spec.p - 1.0));
  for (int which : {1, 2}) {
    const std::vector<bool> inside = habitat_mask(grid, which);
    const std::vector<bool>& f = which == 1 ? far1 : far2;
    for (Index i = 0; i + 1 < u.size(); ++i) {
      const auto s = static_cast<std::size_t>(i);
      if (!inside[s] || !inside[s + 1] || f[s] == f[s + 1]) continue;
      out.boundary_max = std::max(out.boundary_max, u(f[s] ? i : i + 1));
    }
  }
  out.bound = std::max(out.k_constant, out.boundary_max);
  out.observed1 = masked_max(u, far1);
  out.observed2 = masked_max(u, far2);
  out.passed = std::max(out.observed1, out.observed2) <= 1.05 * out.bound;
  return out;
}

ScalarSteadyState habitat2_comparison(const ProblemSpec& spec, const Grid& grid, double lambda, double trace_bound) {
  ScalarNonlinearSpec s;
  s.op.grid = habitat_grid(grid, 2);
  s.op.left = BoundaryCondition::robin(spec.gamma2);
  s.op.right = BoundaryCondition::dirichlet();
  s.m = [m = spec.m](double x) { return m.eval2(x); };
  s.a = [a = spec.a](double x) { return a.eval2(x); };
  s.refuge = spec.refuges.refuge2;
  s.p = spec.p;
  s.lambda = lambda;
  s.datum = spec.gamma2 * trace_bound;
  return scalar_nonlinear_solve(s);
}

BlowupSweep blowup_sweep(const ProblemSpec& spec, const std::vector<double>& lambdas, double epsilon) {
  const Grid grid = make_grid(spec.domain);
  BlowupSweep sweep;
  sweep.thresholds = compute_thresholds(spec);
  sweep.epsilon = epsilon;
  const double low = sweep.thresholds.lambda_star;
  const double top = sweep.thresholds.grid_lambda_infinity();
  if (!(epsilon > 0.0) || epsilon >= spec.refuges.margin(1, spec.domain))
    throw std::invalid_argument("epsilon must be positive and below the refuge-1 margin");
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (!(lambdas[j] > low && lambdas[j] < top))
      throw std::invalid_argument(fmt::format("lambda = {:.6g} lies outside the window", lambdas[j]));
    if (j > 0 && !(lambdas[j] > lambdas[j - 1])) throw std::invalid_argument("lambdas must be increasing");
  }

  const std::vector<bool> refuge1 = refuge_node_mask(spec, grid, 1);
  const std::vector<bool> habitat2 = habitat_mask(grid, 2);
  std::optional<Vector> previous;
  double previous_lambda = 0.0;
  for (double lambda : lambdas) {
    SteadyState state;
    try {
      if (!previous) {
        const SubSuperPair pair = build_sub_supersolution(spec, grid, lambda);
        state = steady_newton(spec, grid, lambda, monotone_iterate(spec, grid, lambda, pair).state.u);
      } else {
        state = continue_steady(spec, grid, previous_lambda, *previous, lambda);
      }
    } catch (const std::exception& e) {
      sweep.failed_lambda = lambda;
      sweep.failure = e.what();
      break;
    }
    previous = state.u;
    previous_lambda = lambda;

    BlowupRecord r;
    r.lambda = lambda;
    r.refuge1_min_u1 = masked_min(state.u, refuge1);
    r.refuge1_max_u1 = masked_max(state.u, refuge1);
    r.sup_u2 = masked_max(state.u, habitat2);
    r.ratio = r.refuge1_min_u1 / r.sup_u2;
    r.apriori = apriori_bound_check(spec, grid, lambda, state.u, epsilon);
    r.omega_eps_max_u1 = r.apriori.observed1;
    r.newton_steps = state.iterations;
    sweep.uniform_bound = std::max(sweep.uniform_bound, r.apriori.bound);
    sweep.records.push_back(r);
    sweep.states.push_back(state.u);
  }

  if (!sweep.records.empty()) {
    const ScalarSteadyState cmp = habitat2_comparison(spec, grid, top, sweep.uniform_bound);
    sweep.u2_bound = cmp.u.maxCoeff();
  }
  return sweep;
}

PropertyReport check_blowup(const BlowupSweep& sweep, double threshold) {
  PropertyReport report;
  const auto& rec = sweep.records;
  report.checks.push_back({"ladder completed", !sweep.failed_lambda.has_value(),
                           static_cast<double>(rec.size()), 0.0, 0.0});
  if (rec.size() < 4) {
    report.checks.push_back(at_least("ladder length", static_cast<double>(rec.size()), 4.0));
    return report;
  }

  double worst_step = kInf;
  double worst_ratio_step = kInf;
  for (std::size_t j = 1; j < rec.size(); ++j) {
    worst_step = std::min(worst_step, rec[j].refuge1_min_u1 - rec[j - 1].refuge1_min_u1);
    worst_ratio_step = std::min(worst_ratio_step, rec[j].ratio - rec[j - 1].ratio);
  }
  report.checks.push_back({"refuge-1 minimum increasing", worst_step > 0.0, 0.0, worst_step, worst_step});
  report.checks.push_back({"refuge-1 to habitat-2 ratio increasing", worst_ratio_step > 0.0, 0.0, worst_ratio_step,
                           worst_ratio_step});
  report.checks.push_back(
      at_least("refuge-1 minimum growth", rec.back().refuge1_min_u1 / rec.front().refuge1_min_u1, threshold));
  report.checks.push_back(at_least("terminal ratio to sup u2", rec.back().ratio, threshold));

  const std::size_t n = rec.size();
  double slowest = kInf;
  for (std::size_t j = n - 3; j < n; ++j)
    slowest = std::min(slowest, rec[j].refuge1_min_u1 / rec[j - 1].refuge1_min_u1);
  report.checks.push_back(at_least("growth over the last three steps", slowest, 1.5));

  double lo = kInf;
  double hi = 0.0;
  for (std::size_t j = n - 3; j < n; ++j) {
    lo = std::min(lo, rec[j].sup_u2);
    hi = std::max(hi, rec[j].sup_u2);
  }
  report.checks.push_back(at_most("sup u2 variation over the last three steps", (hi - lo) / lo, 0.2));

  double sup_u2 = 0.0;
  double far = 0.0;
  for (const auto& r : rec) {
    sup_u2 = std::max(sup_u2, r.sup_u2);
    far = std::max(far, std::max(r.apriori.observed1, r.apriori.observed2));
  }
  report.checks.push_back(at_most("sup u2 under the comparison bound", sup_u2, sweep.u2_bound * (1.0 + 1e-9)));
  report.checks.push_back(at_most("far-set maximum under the uniform bound", far, 1.05 * sweep.uniform_bound));
  return report;
}

ExteriorState exterior_solve_monotone(const ProblemSpec& spec, const Grid& grid, const Thresholds& t, double lambda,
                                      double k) {
  const ExteriorProblem prob = exterior_problem(spec, grid, t, lambda, k);
  const Vector x = unknown_coordinates(grid);
  NodeLayout layout;
  layout.x = restrict(x, prob.kept);
  layout.chain.resize(prob.kept.size());
  layout.distance.resize(layout.x.size());
  for (std::size_t j = 0; j < prob.kept.size(); ++j) {
    const Index i = prob.kept[j];
    const auto jj = static_cast<Index>(j);
    if (i < grid.offset2()) {
      layout.chain[j] = x(i) < spec.refuges.refuge1.lo ? 0 : 1;
      layout.distance(jj) = kInf;
    } else {
      layout.chain[j] = 2;
      layout.distance(jj) = spec.refuges.refuge2.distance(x(i));
    }
  }
  layout.h = std::max(grid.h1, grid.h2);
  layout.margin = spec.refuges.margin(2, spec.domain);

  const Vector zero = Vector::Zero(prob.sys.size());
  const Supersolution super = build_supersolution(prob.sys, layout, zero);
  const MonotonePair limits = monotone_pair(prob.sys, zero, super.state);
  ExteriorState s = expand(prob, limits.lower, k);
  s.newton_steps = limits.iterations;
  return s;
}

ExteriorState exterior_solve(const ProblemSpec& spec, const Grid& grid, const Thresholds& t, double lambda, double k,
                             const Vector* warm) {
  const ExteriorProblem prob = exterior_problem(spec, grid, t, lambda, k);
  // Zero is unstable off the refuge, so a cold start goes through the monotone limit.
  const Vector start = restrict(warm ? *warm : exterior_solve_monotone(spec, grid, t, lambda, k).u, prob.kept);
  NewtonOptions options;
  options.line_search = false;
  const NewtonResult r = newton_solve(prob.sys, start, options);
  ExteriorState s = expand(prob, r.state, k);
  s.newton_steps = r.steps;
  return s;
}

std::vector<double> k_ladder(int max_exponent) {
  std::vector<double> out;
  for (int e = 0; e <= max_exponent; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

LargeSolutionLadder minimal_large_solution(const ProblemSpec& spec, double lambda, const std::vector<double>& ks,
                                           double epsilon) {
  if (ks.size() < 2) throw std::invalid_argument("the k ladder needs at least two values");
  for (std::size_t j = 1; j < ks.size(); ++j)
    if (!(ks[j] > ks[j - 1])) throw std::invalid_argument("ks must be increasing");

  const Grid grid = make_grid(spec.domain);
  const Thresholds t = compute_thresholds(spec);
  LargeSolutionLadder ladder;
  ladder.lambda = lambda;
  ladder.epsilon = epsilon;
  ladder.ks = ks;
  ladder.compact = away_from_refuge_mask(spec, grid, 1, epsilon);
  const std::vector<bool> habitat2 = habitat_mask(grid, 2);
  for (std::size_t i = 0; i < ladder.compact.size(); ++i)
    ladder.compact[i] = ladder.compact[i] || habitat2[i];

  for (double k : ks) {
    const Vector* warm = ladder.states.empty() ? nullptr : &ladder.states.back().u;
    ExteriorState s = exterior_solve(spec, grid, t, lambda, k, warm);
    const double top = masked_max(s.u, ladder.compact);
    ladder.compact_sup.push_back(top);
    if (ladder.states.empty()) {
      ladder.delta_to_prev.push_back(kInf);
      ladder.step_size.push_back(kInf);
      ladder.order_violation.push_back(-kInf);
    } else {
      const Vector& prev = ladder.states.back().u;
      const Vector diff = s.u - prev;
      ladder.step_size.push_back(masked_max(diff.cwiseAbs(), ladder.compact));
      ladder.delta_to_prev.push_back(ladder.step_size.back() / top);
      ladder.order_violation.push_back((-diff).maxCoeff());
    }
    ladder.states.push_back(std::move(s));
  }
  const auto n = ladder.states.size();
  // Geometric tail with the observed rate; r = 1/2 is Richardson for an error linear in 1/k.
  double r = n > 2 ? ladder.step_size[n - 1] / ladder.step_size[n - 2] : 0.5;
  if (!(r > 0.0 && r < 1.0)) r = 0.5;
  ladder.contraction = r;
  ladder.minimal = ladder.states[n - 1].u + r / (1.0 - r) * (ladder.states[n - 1].u - ladder.states[n - 2].u);
  return ladder;
}

PropertyReport check_large_solution(const LargeSolutionLadder& ladder, double final_change) {
  PropertyReport report;
  const auto& st = ladder.states;
  double violation = -kInf;
  double allowed = 0.0;
  for (std::size_t j = 1; j < st.size(); ++j) {
    violation = std::max(violation, ladder.order_violation[j]);
    allowed = std::max(allowed, 1e-10 * (1.0 + st[j].u.cwiseAbs().maxCoeff()));
  }
  report.checks.push_back(at_most("nodewise nondecreasing in k", violation, allowed));

  double worst = -kInf;
  for (std::size_t j = std::max<std::size_t>(2, st.size() / 2); j < st.size(); ++j)
    worst = std::max(worst, ladder.step_size[j] - ladder.step_size[j - 1]);
  report.checks.push_back(at_most("compact-set steps shrinking", worst, 0.0));
  report.checks.push_back(at_most("final compact-set change", ladder.delta_to_prev.back(), final_change));
  return report;
}

LimitComparison compare_to_large_solution(const BlowupSweep& sweep, const LargeSolutionLadder& ladder) {
  LimitComparison out;
  const double scale = masked_max(ladder.minimal, ladder.compact);
  for (std::size_t j = 0; j < sweep.states.size(); ++j) {
    out.lambdas.push_back(sweep.records[j].lambda);
    out.distance.push_back(masked_max((sweep.states[j] - ladder.minimal).cwiseAbs(), ladder.compact) / scale);
  }
  return out;
}

PropertyReport check_limit_comparison(const LimitComparison& c, double tolerance) {
  PropertyReport report;
  const std::size_t n = c.distance.size();
  if (n < 4) {
    report.checks.push_back(at_least("comparison length", static_cast<double>(n), 4.0));
    return report;
  }
  double worst = -kInf;
  for (std::size_t j = n - 3; j < n; ++j) worst = std::max(worst, c.distance[j] - c.distance[j - 1]);
  report.checks.push_back(at_most("distance to the large solution decreasing", worst, 0.0));
  report.checks.push_back(at_most("terminal distance to the large solution", c.distance.back(), tolerance));
  return report;
}

}  // namespace refugia
