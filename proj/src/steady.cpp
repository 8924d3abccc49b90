#include "refugia/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace refugia {

namespace {

double sup(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

double masked_max(const Vector& v, const std::vector<bool>& mask) {
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < v.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) best = std::max(best, v(i));
  return best;
}

SteadyState make_state(const SemilinearSystem& sys, const Vector& u, SolveMethod method, int iterations) {
  SteadyState s;
  s.lambda = sys.lambda;
  s.u = u;
  s.residual = sup(sys.residual(u));
  s.positive = all_positive(u);
  s.method = method;
  s.iterations = iterations;
  return s;
}

}  // namespace

bool all_positive(const Vector& u) { return u.size() > 0 && u.minCoeff() > 0.0; }

SemilinearSystem interface_system(const ProblemSpec& spec, const Grid& grid, double lambda) {
  SemilinearSystem sys;
  sys.op = assemble_interface(spec, grid, PiecewiseField::constant(0.0));
  sys.source = Vector::Zero(sys.op.size());
  sys.m = to_unknowns(sample_field(spec.m, grid));
  sys.a = to_unknowns(sample_field(spec.a, grid));
  sys.p = spec.p;
  sys.lambda = lambda;
  return sys;
}

NodeLayout interface_layout(const ProblemSpec& spec, const Grid& grid) {
  NodeLayout layout;
  layout.x = unknown_coordinates(grid);
  const Index n = layout.x.size();
  layout.chain.assign(static_cast<std::size_t>(n), 2);
  layout.distance.resize(n);
  for (Index i = 0; i < n; ++i) {
    const bool first = i < grid.offset2();
    if (first) layout.chain[static_cast<std::size_t>(i)] = 1;
    layout.distance(i) = (first ? spec.refuges.refuge1 : spec.refuges.refuge2).distance(layout.x(i));
  }
  layout.h = std::max(grid.h1, grid.h2);
  layout.margin = std::min(spec.refuges.margin(1, spec.domain), spec.refuges.margin(2, spec.domain));
  return layout;
}

SubSuperPair build_sub_supersolution(const ProblemSpec& spec, const Grid& grid, double lambda) {
  const SemilinearSystem sys = interface_system(spec, grid, lambda);
  const Subsolution sub = build_subsolution(sys);
  const Supersolution super = build_supersolution(sys, interface_layout(spec, grid), sub.state);
  return SubSuperPair{sub.state, super.state, sub.epsilon, super.big_m, super.delta, sub.sigma, super.sigma};
}

MonotoneReport monotone_iterate(const ProblemSpec& spec, const Grid& grid, double lambda, const SubSuperPair& pair) {
  const SemilinearSystem sys = interface_system(spec, grid, lambda);
  MonotoneOptions options;
  options.tolerance = 1e-11;
  const MonotonePair limits = monotone_pair(sys, pair.sub, pair.super, options);
  MonotoneReport out;
  out.state = make_state(sys, limits.upper, SolveMethod::monotone, limits.iterations);
  out.agreement = sup(limits.upper - limits.lower);
  out.shift_doubled = limits.shift_doubled;
  return out;
}

SteadyState steady_newton(const ProblemSpec& spec, const Grid& grid, double lambda, const Vector& initial,
                          const NewtonOptions& options) {
  const SemilinearSystem sys = interface_system(spec, grid, lambda);
  const NewtonResult r = newton_solve(sys, initial, options);
  return make_state(sys, r.state, SolveMethod::newton, r.steps);
}

namespace {

/// u + (to - from) du/dlambda, with du/dlambda = J^-1 (m u) at (from, u).
Vector tangent_predictor(const SemilinearSystem& at_from, const Vector& u, double to_lambda) {
  BandedMatrix<double> jac = at_from.op.matrix;
  jac.add_to_diagonal(at_from.jacobian_shift(u));
  try {
    const Vector slope = BandedLU<double>(jac).solve(at_from.m.cwiseProduct(u));
    const Vector guess = u + (to_lambda - at_from.lambda) * slope;
    if (guess.allFinite()) return guess;
  } catch (const SingularMatrixError&) {
  }
  return u;
}

std::optional<SteadyState> try_newton(const ProblemSpec& spec, const Grid& grid, double lambda, const Vector& start,
                                      bool line_search) {
  NewtonOptions options;
  options.line_search = line_search;
  try {
    SteadyState s = steady_newton(spec, grid, lambda, start, options);
    if (s.positive) return s;
  } catch (const NewtonError&) {
  }
  return std::nullopt;
}

}  // namespace

SteadyState continue_steady(const ProblemSpec& spec, const Grid& grid, double from_lambda, const Vector& from_u,
                            double to_lambda, int max_halvings) {
  const Vector guess = tangent_predictor(interface_system(spec, grid, from_lambda), from_u, to_lambda);
  for (bool line_search : {false, true})
    if (auto s = try_newton(spec, grid, to_lambda, guess, line_search)) return *s;
  if (max_halvings == 0) throw NewtonError(to_lambda, "continuation failed to reach a positive state");
  const double middle = 0.5 * (from_lambda + to_lambda);
  const SteadyState half = continue_steady(spec, grid, from_lambda, from_u, middle, max_halvings - 1);
  return continue_steady(spec, grid, middle, half.u, to_lambda, max_halvings - 1);
}

std::string to_string(WindowKind k) {
  switch (k) {
    case WindowKind::positive: return "positive";
    case WindowKind::collapse: return "collapse";
    case WindowKind::blowup: return "blowup";
    case WindowKind::undecided: return "undecided";
  }
  return "unknown";
}

double window_top(const Thresholds& t) { return std::min(t.lambda_infinity, t.grid_lambda_infinity()); }

std::vector<double> default_branch_grid(const Thresholds& t, int points, int probes) {
  const double width = window_top(t) - t.lambda_star;
  std::vector<double> out;
  for (int k = 1; k <= points; ++k) out.push_back(t.lambda_star + width * k / (points + 1));
  for (int k = 5; k < 5 + probes; ++k) out.push_back(t.lambda_star + width * std::ldexp(1.0, -k));
  std::sort(out.begin(), out.end());
  return out;
}

WindowPoint classify_lambda(const ProblemSpec& spec, const Grid& grid, double lambda) {
  const SemilinearSystem sys = interface_system(spec, grid, lambda);
  WindowPoint out;
  out.lambda = lambda;
  std::optional<Subsolution> sub;
  std::optional<Supersolution> super;
  try {
    sub = build_subsolution(sys);
    out.sub_built = true;
  } catch (const NoWindow&) {
  }
  try {
    super = build_supersolution(sys, interface_layout(spec, grid), sub ? sub->state : Vector::Zero(sys.size()));
    out.super_built = true;
  } catch (const NoWindow&) {
  }

  if (sub && super) {
    const MonotonePair limits = monotone_pair(sys, sub->state, super->state);
    out.kind = all_positive(limits.upper) ? WindowKind::positive : WindowKind::undecided;
    out.sup_u = sup(limits.upper);
    out.iterations = limits.iterations;
  } else if (super) {
    const MonotoneSequence seq = decreasing_sequence(sys, super->state);
    out.sup_u = sup(seq.state);
    out.iterations = seq.iterations;
    if (seq.outcome == SequenceOutcome::collapsed) out.kind = WindowKind::collapse;
    if (seq.outcome == SequenceOutcome::converged && all_positive(seq.state)) out.kind = WindowKind::positive;
  } else if (sub) {
    const MonotoneSequence seq = increasing_sequence(sys, sub->state);
    out.sup_u = sup(seq.state);
    out.iterations = seq.iterations;
    if (seq.outcome == SequenceOutcome::blew_up) out.kind = WindowKind::blowup;
    if (seq.outcome == SequenceOutcome::converged && all_positive(seq.state)) out.kind = WindowKind::positive;
  }
  return out;
}

SteadyBranch trace_branch(const ProblemSpec& spec, const std::vector<double>& lambdas) {
  const Grid grid = make_grid(spec.domain);
  SteadyBranch branch;
  branch.thresholds = compute_thresholds(spec);
  const double low = branch.thresholds.lambda_star;
  const double high = window_top(branch.thresholds);
  const std::vector<bool> refuge1 = refuge_node_mask(spec, grid, 1);

  std::vector<double> sorted = lambdas;
  std::sort(sorted.begin(), sorted.end());
  std::optional<std::pair<double, Vector>> previous;
  for (double lambda : sorted) {
    if (lambda <= low || lambda >= high) {
      branch.probes.push_back(classify_lambda(spec, grid, lambda));
      continue;
    }
    const SubSuperPair pair = build_sub_supersolution(spec, grid, lambda);
    const MonotoneReport mono = monotone_iterate(spec, grid, lambda, pair);
    const SteadyState newton = previous ? continue_steady(spec, grid, previous->first, previous->second, lambda)
                                        : steady_newton(spec, grid, lambda, mono.state.u);
    previous = {lambda, newton.u};

    BranchPoint pt;
    pt.lambda = lambda;
    pt.state = newton;
    const NodalPair nodal = to_nodal(grid, newton.u);
    pt.sup_u = sup(newton.u);
    pt.sup_u1 = nodal.u1.maxCoeff();
    pt.sup_u2 = nodal.u2.maxCoeff();
    pt.u1_at_gamma = nodal.u1(grid.n1());
    pt.u2_at_gamma = nodal.u2(0);
    pt.refuge1_max = masked_max(newton.u, refuge1);
    pt.cross_agreement = sup(newton.u - mono.state.u) / std::max(1.0, pt.sup_u);
    branch.points.push_back(std::move(pt));
  }
  return branch;
}

WindowScan window_scan(const ProblemSpec& spec, int points, double margin) {
  const Grid grid = make_grid(spec.domain);
  WindowScan scan;
  scan.thresholds = compute_thresholds(spec);
  const double low = scan.thresholds.lambda_star;
  const double high = scan.thresholds.lambda_infinity;
  const double width = high - low;
  const double start = low - margin * width;
  scan.cell = (1.0 + 2.0 * margin) * width / (points - 1);
  for (int j = 0; j < points; ++j) {
    const WindowPoint pt = classify_lambda(spec, grid, start + j * scan.cell);
    const bool inside = pt.lambda > low && pt.lambda < high;
    const bool near_end = std::abs(pt.lambda - low) <= scan.cell || std::abs(pt.lambda - high) <= scan.cell;
    const WindowKind expected =
        inside ? WindowKind::positive : (pt.lambda <= low ? WindowKind::collapse : WindowKind::blowup);
    if (pt.kind != expected && !near_end)
      scan.mismatches.push_back(fmt::format("lambda = {:.6g}: expected {}, found {}", pt.lambda, to_string(expected),
                                            to_string(pt.kind)));
    scan.points.push_back(pt);
  }
  scan.matches_window = scan.mismatches.empty();
  return scan;
}

PropertyReport check_branch(const SteadyBranch& branch, double monotone_slack, double vanish_ratio,
                            double agreement) {
  PropertyReport report;
  const auto& pts = branch.points;
  if (pts.size() < 3) {
    report.checks.push_back({"branch has at least three points", false, static_cast<double>(pts.size()), 3.0, 0.0});
    return report;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < pts.size(); ++j)
    worst = std::min(worst, (pts[j].state.u - pts[j - 1].state.u).minCoeff());
  report.checks.push_back({"nodewise nondecreasing in lambda", worst >= -monotone_slack, -monotone_slack, worst,
                           worst + monotone_slack});

  const double middle = 0.5 * (branch.thresholds.lambda_star + window_top(branch.thresholds));
  const auto mid = std::min_element(pts.begin(), pts.end(), [middle](const BranchPoint& a, const BranchPoint& b) {
    return std::abs(a.lambda - middle) < std::abs(b.lambda - middle);
  });
  const double ratio = pts.front().sup_u / mid->sup_u;
  report.checks.push_back({"vanishes toward lambda_star", ratio <= vanish_ratio, ratio, vanish_ratio,
                           vanish_ratio - ratio});

  double cross = 0.0;
  for (const auto& p : pts) cross = std::max(cross, p.cross_agreement);
  report.checks.push_back({"newton and monotone agree", cross <= agreement, cross, agreement, agreement - cross});
  return report;
}

SemilinearSystem scalar_system(const ScalarNonlinearSpec& spec, const ScalarOperator& op) {
  SemilinearSystem sys;
  sys.op = op;
  const Index n = op.size();
  sys.source = Vector::Zero(n);
  if (spec.op.left.kind == BoundaryKind::robin) sys.source(0) += 2.0 * spec.datum / op.h;
  if (spec.op.right.kind == BoundaryKind::robin) sys.source(n - 1) += 2.0 * spec.datum / op.h;
  sys.m.resize(n);
  sys.a.resize(n);
  for (Index i = 0; i < n; ++i) {
    sys.m(i) = spec.m(op.x(i));
    sys.a(i) = spec.a ? spec.a(op.x(i)) : 0.0;
  }
  sys.p = spec.p;
  sys.lambda = spec.lambda;
  return sys;
}

ScalarSteadyState scalar_nonlinear_solve(const ScalarNonlinearSpec& spec) {
  if (!(spec.datum >= 0.0)) throw std::invalid_argument("Robin datum must be nonnegative");
  const ScalarOperator op = assemble_scalar(spec.op);
  const SemilinearSystem sys = scalar_system(spec, op);

  NodeLayout layout;
  layout.x = op.x;
  layout.chain.assign(static_cast<std::size_t>(op.size()), 0);
  layout.distance = Vector::Constant(op.size(), std::numeric_limits<double>::infinity());
  layout.h = op.h;
  if (spec.refuge) {
    for (Index i = 0; i < op.size(); ++i) layout.distance(i) = spec.refuge->distance(op.x(i));
    const Vector& ends = spec.op.grid.x;
    layout.margin = std::min(spec.refuge->lo - ends(0), ends(ends.size() - 1) - spec.refuge->hi);
  }

  ScalarSteadyState out;
  out.x = op.x;
  Subsolution sub;
  try {
    sub = build_subsolution(sys);
  } catch (const NoWindow&) {
    out.u = Vector::Zero(op.size());
    return out;
  }
  const Supersolution super = build_supersolution(sys, layout, sub.state);
  const MonotonePair limits = monotone_pair(sys, sub.state, super.state);
  const NewtonResult polished = newton_solve(sys, limits.upper);
  out.u = polished.state;
  out.residual = polished.residual;
  out.positive = all_positive(out.u);
  return out;
}

}  // namespace refugia
