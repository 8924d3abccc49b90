#include "refugia/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace refugia {

namespace {

Vector signed_power(const Vector& u, double p) {
  return u.unaryExpr([p](double v) { return std::copysign(std::pow(std::abs(v), p), v); });
}

/// lambda m w - a |w|^(p-1) w + K w
Vector monotone_rhs(const SemilinearSystem& sys, const Vector& w, const Vector& shift) {
  return sys.source + sys.lambda * sys.m.cwiseProduct(w) - sys.a.cwiseProduct(signed_power(w, sys.p)) +
         shift.cwiseProduct(w);
}

BandedLU<double> shifted_factor(const SemilinearSystem& sys, const Vector& shift) {
  BandedMatrix<double> b = sys.op.matrix;
  b.add_to_diagonal(shift);
  return BandedLU<double>(b);
}

double sup(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

Vector SemilinearSystem::residual(const Vector& u) const {
  return op.matrix * u - source - lambda * m.cwiseProduct(u) + a.cwiseProduct(signed_power(u, p));
}

double SemilinearSystem::scale(const Vector& u) const {
  return sup(op.matrix.abs_times(u.cwiseAbs())) + sup(source) + std::abs(lambda) * sup(m.cwiseProduct(u)) +
         sup(a.cwiseProduct(signed_power(u.cwiseAbs(), p)));
}

Vector SemilinearSystem::jacobian_shift(const Vector& u) const {
  return -lambda * m + p * a.cwiseProduct(u.cwiseAbs().array().pow(p - 1.0).matrix());
}

NewtonError::NewtonError(double lambda, const std::string& what)
    : std::runtime_error(fmt::format("Newton at lambda = {:.10g}: {}", lambda, what)), lambda_(lambda) {}

NewtonResult newton_solve(const SemilinearSystem& sys, const Vector& initial, const NewtonOptions& options) {
  if (initial.size() != sys.size()) throw std::invalid_argument("initial state does not match the system");
  NewtonResult out;
  Vector u = initial;
  Vector f = sys.residual(u);
  for (int step = 0;; ++step) {
    out.history.push_back(sup(f));
    out.scale = sys.scale(u);
    if (sup(f) <= options.relative_tolerance * out.scale) {
      out.state = u;
      out.steps = step;
      out.residual = sup(f);
      return out;
    }
    if (step == options.max_steps) throw NewtonError(sys.lambda, fmt::format("no convergence in {} steps", step));

    BandedMatrix<double> jac = sys.op.matrix;
    jac.add_to_diagonal(sys.jacobian_shift(u));
    Vector delta;
    try {
      delta = BandedLU<double>(jac).solve(-f);
    } catch (const SingularMatrixError& e) {
      throw NewtonError(sys.lambda, fmt::format("singular Jacobian (pivot {})", e.pivot()));
    }
    if (!delta.allFinite()) throw NewtonError(sys.lambda, "non-finite Newton step");
    if (sup(delta) <= options.relative_tolerance * (1.0 + sup(u))) {
      u += delta;
      f = sys.residual(u);
      out.state = u;
      out.steps = step + 1;
      out.residual = sup(f);
      return out;
    }

    if (!options.line_search) {
      u += delta;
      f = sys.residual(u);
      if (!f.allFinite()) throw NewtonError(sys.lambda, "non-finite residual");
      continue;
    }
    const double f0 = f.norm();
    double t = 1.0;
    for (;;) {
      const Vector trial = u + t * delta;
      const Vector ft = sys.residual(trial);
      if (ft.allFinite() && ft.norm() <= (1.0 - 1e-4 * t) * f0) {
        u = trial;
        f = ft;
        break;
      }
      t *= 0.5;
      if (t < 1e-12) throw NewtonError(sys.lambda, "line search failed");
    }
  }
}

Vector monotone_shift(const SemilinearSystem& sys, const Vector& bound) {
  const Vector slope = sys.p * sys.a.cwiseProduct(bound.cwiseAbs().array().pow(sys.p - 1.0).matrix());
  return (slope - sys.lambda * sys.m).cwiseMax(0.0);
}

MonotonePair monotone_pair(const SemilinearSystem& sys, const Vector& sub, const Vector& super,
                           const MonotoneOptions& options) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    const double factor = attempt == 0 ? 1.0 : 2.0;
    Vector lo = sub;
    Vector hi = super;
    bool crossed = false;
    for (int it = 1; it <= options.max_iterations; ++it) {
      // Iterates stay below hi, so the shift taken at hi keeps both maps monotone.
      const Vector shift = factor * monotone_shift(sys, hi);
      const BandedLU<double> lu = shifted_factor(sys, shift);
      lo = lu.solve(monotone_rhs(sys, lo, shift));
      hi = lu.solve(monotone_rhs(sys, hi, shift));
      const double hi_norm = sup(hi);
      if ((lo - hi).maxCoeff() > 1e-12 * (1.0 + hi_norm)) {
        crossed = true;
        break;
      }
      if (sup(hi - lo) <= options.tolerance * (1.0 + hi_norm))
        return MonotonePair{lo, hi, it, attempt == 1};
    }
    if (!crossed)
      throw std::runtime_error(
          fmt::format("monotone iteration did not meet in {} steps at lambda = {:.10g}", options.max_iterations,
                      sys.lambda));
  }
  throw OrderingLost(fmt::format("ordering lost at lambda = {:.10g} after doubling the shift", sys.lambda));
}

std::string to_string(SequenceOutcome o) {
  switch (o) {
    case SequenceOutcome::converged: return "converged";
    case SequenceOutcome::collapsed: return "collapsed";
    case SequenceOutcome::blew_up: return "blew_up";
    case SequenceOutcome::stalled: return "stalled";
  }
  return "unknown";
}

namespace {

/// Shared stopping rules of the single sequences.
std::optional<SequenceOutcome> classify_step(const Vector& previous, const Vector& next, double start_norm,
                                             const MonotoneOptions& options) {
  const double norm = sup(next);
  if (!next.allFinite() || norm > options.blowup_norm) return SequenceOutcome::blew_up;
  if (norm <= options.collapse_ratio * start_norm) return SequenceOutcome::collapsed;
  if (sup(next - previous) <= 1e-3 * options.tolerance * (1.0 + norm)) return SequenceOutcome::converged;
  return std::nullopt;
}

}  // namespace

MonotoneSequence decreasing_sequence(const SemilinearSystem& sys, const Vector& super, const MonotoneOptions& options) {
  MonotoneSequence out{super, 0, SequenceOutcome::stalled};
  const double start = sup(super);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vector shift = monotone_shift(sys, out.state);
    Vector next = shifted_factor(sys, shift).solve(monotone_rhs(sys, out.state, shift));
    const auto outcome = classify_step(out.state, next, start, options);
    out.state = std::move(next);
    out.iterations = it;
    if (outcome) {
      out.outcome = *outcome;
      return out;
    }
  }
  return out;
}

MonotoneSequence increasing_sequence(const SemilinearSystem& sys, const Vector& sub, const MonotoneOptions& options) {
  MonotoneSequence out{sub, 0, SequenceOutcome::stalled};
  const double start = sup(sub);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vector shift = monotone_shift(sys, out.state);
    Vector next = shifted_factor(sys, shift).solve(monotone_rhs(sys, out.state, shift));
    const auto outcome = classify_step(out.state, next, start, options);
    out.state = std::move(next);
    out.iterations = it;
    if (outcome) {
      out.outcome = *outcome;
      return out;
    }
  }
  return out;
}

double subsolution_defect(const SemilinearSystem& sys, const Vector& u) {
  return std::max(0.0, sys.residual(u).maxCoeff());
}

double supersolution_defect(const SemilinearSystem& sys, const Vector& u) {
  return std::max(0.0, -sys.residual(u).minCoeff());
}

namespace {

LinearOperator shifted_operator(const SemilinearSystem& sys) {
  LinearOperator op = sys.op;
  op.matrix.add_to_diagonal(-sys.lambda * sys.m);
  return op;
}

}  // namespace

Subsolution build_subsolution(const SemilinearSystem& sys) {
  const LinearOperator op = shifted_operator(sys);
  const EigenPair e = principal_eigenpair(op, unit_mass(op));
  Subsolution out;
  out.sigma = e.value;
  const bool source_helps = sys.source.minCoeff() >= 0.0 && sys.source.maxCoeff() > 0.0;
  if (!(e.value < 0.0)) {
    if (!source_helps) throw NoWindow(fmt::format("no window: principal eigenvalue {:.6g} is not negative", e.value));
    out.state = Vector::Zero(sys.size());
    return out;
  }
  const Vector phi_pow = e.vector.array().pow(sys.p - 1.0).matrix();
  double eps = 1e-2;
  for (int k = 0; k < 400; ++k, eps *= 0.5) {
    if ((sys.a.cwiseProduct(phi_pow) * std::pow(eps, sys.p - 1.0)).maxCoeff() <= -e.value) {
      out.epsilon = eps;
      out.state = eps * e.vector;
      return out;
    }
  }
  throw std::runtime_error("subsolution scaling cap exceeded");
}

Supersolution build_supersolution(const SemilinearSystem& sys, const NodeLayout& layout, const Vector& below) {
  const Index n = sys.size();
  Supersolution out;
  out.profile = Vector::Ones(n);
  out.sigma = std::numeric_limits<double>::quiet_NaN();

  std::vector<int> chains;
  for (Index i = 0; i < n; ++i)
    if (sys.a(i) == 0.0 && std::find(chains.begin(), chains.end(), layout.chain[static_cast<std::size_t>(i)]) == chains.end())
      chains.push_back(layout.chain[static_cast<std::size_t>(i)]);

  if (!chains.empty()) {
    const LinearOperator op = shifted_operator(sys);
    Vector phi = Vector::Zero(n);
    double delta = 0.1 * layout.margin;
    for (;; delta *= 0.5) {
      if (delta < 2.0 * layout.h)
        throw NoWindow(fmt::format("no window: no refuge enlargement keeps a positive eigenvalue at lambda = {:.10g}",
                                   sys.lambda));
      double sigma = std::numeric_limits<double>::infinity();
      phi.setZero();
      for (int c : chains) {
        std::vector<bool> fixed(static_cast<std::size_t>(n), true);
        for (Index i = 0; i < n; ++i)
          if (layout.chain[static_cast<std::size_t>(i)] == c && layout.distance(i) <= delta)
            fixed[static_cast<std::size_t>(i)] = false;
        const ReducedSystem reduced = eliminate_unknowns(op, fixed, Vector::Zero(n));
        const EigenPair e = principal_eigenpair(reduced.op, unit_mass(reduced.op));
        sigma = std::min(sigma, e.value);
        for (std::size_t r = 0; r < reduced.kept.size(); ++r) phi(reduced.kept[r]) = e.vector(static_cast<Index>(r));
      }
      if (sigma > 0.0) {
        out.sigma = sigma;
        break;
      }
    }
    out.delta = delta;

    // Keep phi within delta/2 and ramp to the floor over another delta/2.
    constexpr double floor = 0.1;
    const double splice = 0.5 * delta;
    for (Index i = 0; i < n; ++i) {
      const int c = layout.chain[static_cast<std::size_t>(i)];
      if (layout.distance(i) <= splice) {
        out.profile(i) = phi(i);
        continue;
      }
      double anchor = floor;
      double best = std::numeric_limits<double>::infinity();
      for (int dir : {-1, 1}) {
        for (Index j = i + dir; j >= 0 && j < n && layout.chain[static_cast<std::size_t>(j)] == c; j += dir) {
          if (layout.distance(j) <= splice) {
            if (std::abs(layout.x(j) - layout.x(i)) < best) {
              best = std::abs(layout.x(j) - layout.x(i));
              anchor = phi(j);
            }
            break;
          }
        }
      }
      const double t = std::min(1.0, (layout.distance(i) - splice) / splice);
      out.profile(i) = floor + (anchor - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    }
  }

  double big_m = 1.0;
  for (int k = 0; k < 400; ++k, big_m *= 2.0) {
    const Vector candidate = big_m * out.profile;
    if ((candidate - below).minCoeff() < 0.0) continue;
    if (supersolution_defect(sys, candidate) <= 1e-12 * sys.scale(candidate)) {
      out.big_m = big_m;
      out.state = candidate;
      return out;
    }
  }
  throw std::runtime_error(fmt::format("supersolution scaling cap exceeded at lambda = {:.10g}", sys.lambda));
}

}  // namespace refugia
