#include "refugia/assembly.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace refugia {

namespace {

/// Writes the rows of one node chain starting at unknown `offset`.
/// Returns the number of unknowns (Dirichlet ends excluded).
Index fill_chain(BandedMatrix<double>& a, Vector& weights, Index offset, const Vector& x, double h,
                 const std::function<double(double)>& potential, BoundaryCondition left, BoundaryCondition right) {
  const Index last = x.size() - 1;
  const Index first_node = left.kind == BoundaryKind::dirichlet ? 1 : 0;
  const Index last_node = right.kind == BoundaryKind::dirichlet ? last - 1 : last;
  const double inv_h2 = 1.0 / (h * h);
  for (Index node = first_node; node <= last_node; ++node) {
    const Index row = offset + node - first_node;
    const double c = potential(x(node));
    if (node == 0) {
      a.coeffRef(row, row) = 2.0 * inv_h2 + (left.kind == BoundaryKind::robin ? 2.0 * left.g / h : 0.0) + c;
      a.coeffRef(row, row + 1) = -2.0 * inv_h2;
      weights(row) = 0.5 * h;
    } else if (node == last) {
      a.coeffRef(row, row) = 2.0 * inv_h2 + (right.kind == BoundaryKind::robin ? 2.0 * right.g / h : 0.0) + c;
      a.coeffRef(row, row - 1) = -2.0 * inv_h2;
      weights(row) = 0.5 * h;
    } else {
      a.coeffRef(row, row) = 2.0 * inv_h2 + c;
      if (node - 1 >= first_node) a.coeffRef(row, row - 1) = -inv_h2;
      if (node + 1 <= last_node) a.coeffRef(row, row + 1) = -inv_h2;
      weights(row) = h;
    }
  }
  return last_node - first_node + 1;
}

}  // namespace

InterfaceOperator assemble_interface(const ProblemSpec& spec, const PiecewiseField& c) {
  return assemble_interface(spec, make_grid(spec.domain), c);
}

InterfaceOperator assemble_interface(const ProblemSpec& spec, const Grid& grid, const PiecewiseField& c) {
  InterfaceOperator op;
  op.n1_unknowns = grid.x1.size();
  op.n2_unknowns = grid.x2.size() - 1;
  op.gamma1 = spec.gamma1;
  op.gamma2 = spec.gamma2;
  op.potential_label = c.label();
  const Index n = op.n1_unknowns + op.n2_unknowns;
  op.matrix = BandedMatrix<double>(n, 1, 1);
  op.weights = Vector::Zero(n);

  fill_chain(op.matrix, op.weights, 0, grid.x1, grid.h1, [&c](double x) { return c.eval1(x); },
             BoundaryCondition::neumann(), BoundaryCondition::robin(spec.gamma1));
  fill_chain(op.matrix, op.weights, op.n1_unknowns, grid.x2, grid.h2, [&c](double x) { return c.eval2(x); },
             BoundaryCondition::robin(spec.gamma2), BoundaryCondition::dirichlet());

  op.matrix.coeffRef(op.trace1(), op.trace2()) = -2.0 * spec.gamma1 / grid.h1;
  op.matrix.coeffRef(op.trace2(), op.trace1()) = -2.0 * spec.gamma2 / grid.h2;

  op.symmetrizer = op.weights;
  op.symmetrizer.head(op.n1_unknowns) *= spec.gamma2;
  op.symmetrizer.tail(op.n2_unknowns) *= spec.gamma1;
  return op;
}

MassMatrix lumped_mass(const LinearOperator& op, const Vector& m_at_unknowns) {
  if (m_at_unknowns.size() != op.size()) throw std::invalid_argument("weight does not match the operator");
  return MassMatrix{m_at_unknowns.cwiseProduct(op.weights)};
}

MassMatrix interface_mass(const ProblemSpec& spec, const Grid& grid, const PiecewiseField& m) {
  const Vector values = to_unknowns(sample_field(m, grid));
  const InterfaceOperator op = assemble_interface(spec, grid, PiecewiseField::constant(0.0));
  return lumped_mass(op, values);
}

ScalarGrid make_scalar_grid(Interval span, Index intervals) {
  if (intervals < 2 || !(span.length() > 0.0)) throw std::invalid_argument("empty subdomain selection");
  ScalarGrid g;
  g.h = span.length() / static_cast<double>(intervals);
  g.x.resize(intervals + 1);
  for (Index j = 0; j <= intervals; ++j) g.x(j) = span.lo + static_cast<double>(j) * g.h;
  g.x(0) = span.lo;
  g.x(intervals) = span.hi;
  return g;
}

ScalarGrid habitat_grid(const Grid& grid, int which) {
  return which == 1 ? ScalarGrid{grid.x1, grid.h1} : ScalarGrid{grid.x2, grid.h2};
}

ScalarGrid refuge_grid(const ProblemSpec& spec, const Grid& grid, int which) {
  const Interval r = which == 1 ? spec.refuges.refuge1 : spec.refuges.refuge2;
  const double h = which == 1 ? grid.h1 : grid.h2;
  const auto intervals = std::max<Index>(8, static_cast<Index>(std::llround(r.length() / h)));
  return make_scalar_grid(r, intervals);
}

ScalarOperator assemble_scalar(const ScalarOperatorSpec& spec) {
  const Index intervals = spec.grid.intervals();
  if (intervals < 2) throw std::invalid_argument("empty subdomain selection");
  const Index first = spec.left.kind == BoundaryKind::dirichlet ? 1 : 0;
  const Index last = spec.right.kind == BoundaryKind::dirichlet ? intervals - 1 : intervals;
  const Index n = last - first + 1;
  if (n < 1) throw std::invalid_argument("empty subdomain selection");

  ScalarOperator op;
  op.matrix = BandedMatrix<double>(n, 1, 1);
  op.weights = Vector::Zero(n);
  fill_chain(op.matrix, op.weights, 0, spec.grid.x, spec.grid.h, spec.potential, spec.left, spec.right);
  op.symmetrizer = op.weights;
  op.x = spec.grid.x.segment(first, n);
  op.h = spec.grid.h;
  return op;
}

ReducedSystem eliminate_unknowns(const LinearOperator& op, const std::vector<bool>& fixed, const Vector& fixed_values) {
  const Index n = op.size();
  if (static_cast<Index>(fixed.size()) != n || fixed_values.size() != n)
    throw std::invalid_argument("mask does not match the operator");
  std::vector<Index> new_index(static_cast<std::size_t>(n), -1);
  ReducedSystem out;
  for (Index i = 0; i < n; ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) {
      new_index[static_cast<std::size_t>(i)] = static_cast<Index>(out.kept.size());
      out.kept.push_back(i);
    }
  }
  const auto m = static_cast<Index>(out.kept.size());
  if (m == 0) throw std::invalid_argument("empty subdomain selection");
  const BandedMatrix<double>& a = op.matrix;
  out.op.matrix = BandedMatrix<double>(m, a.lower(), a.upper());
  out.op.weights.resize(m);
  out.op.symmetrizer.resize(m);
  out.source = Vector::Zero(m);
  for (Index r = 0; r < m; ++r) {
    const Index p = out.kept[static_cast<std::size_t>(r)];
    out.op.weights(r) = op.weights(p);
    out.op.symmetrizer(r) = op.symmetrizer(p);
    for (Index q = std::max<Index>(0, p - a.lower()); q <= std::min<Index>(n - 1, p + a.upper()); ++q) {
      const double v = a(p, q);
      if (v == 0.0) continue;
      if (fixed[static_cast<std::size_t>(q)]) {
        out.source(r) -= v * fixed_values(q);
      } else {
        out.op.matrix.coeffRef(r, new_index[static_cast<std::size_t>(q)]) = v;
      }
    }
  }
  return out;
}

Vector solve_linear(const BandedMatrix<double>& a, const Vector& f) {
  if (f.size() != a.rows()) throw std::invalid_argument("right-hand side does not match the matrix");
  const BandedLU<double> lu(a);
  const Vector u = lu.solve(f);
  const double residual = (a * u - f).cwiseAbs().maxCoeff();
  const double scale = a.norm_inf() * u.cwiseAbs().maxCoeff() + f.cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10 * scale))
    throw std::runtime_error(fmt::format("linear solve residual {:.3e} exceeds tolerance", residual));
  return u;
}

Vector solve_linear(const LinearOperator& a, const Vector& f) { return solve_linear(a.matrix, f); }

double bilinear_form(const NodalPair& u, const NodalPair& v, const ProblemSpec& spec, const Grid& grid,
                     const PiecewiseField& c) {
  auto habitat = [](const Vector& uu, const Vector& vv, const Vector& x, double h, auto&& cfun) {
    double s = 0.0;
    const Index last = x.size() - 1;
    for (Index j = 0; j < last; ++j) s += (uu(j + 1) - uu(j)) * (vv(j + 1) - vv(j)) / h;
    for (Index j = 0; j <= last; ++j) {
      const double w = (j == 0 || j == last) ? 0.5 * h : h;
      s += w * cfun(x(j)) * uu(j) * vv(j);
    }
    return s;
  };
  const Index n1 = grid.x1.size() - 1;
  const double part1 = habitat(u.u1, v.u1, grid.x1, grid.h1, [&c](double x) { return c.eval1(x); });
  const double part2 = habitat(u.u2, v.u2, grid.x2, grid.h2, [&c](double x) { return c.eval2(x); });
  const double membrane = (u.u2(0) - u.u1(n1)) * (spec.gamma2 * v.u2(0) - spec.gamma1 * v.u1(n1));
  return part1 + part2 + membrane;
}

void write_triplets(std::ostream& out, const BandedMatrix<double>& a) {
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = std::max<Index>(0, i - a.lower()); j <= std::min<Index>(a.rows() - 1, i + a.upper()); ++j)
      if (a(i, j) != 0.0) out << fmt::format("{} {} {:.17g}\n", i, j, a(i, j));
}

}  // namespace refugia
