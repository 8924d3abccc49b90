#pragma once
/** @file assembly.hpp
 *  @brief Finite-difference operators for -u'' + c u, lumped masses and linear solves.
 *
 *  Rows are in strong form.  Reflecting, Robin and membrane ends use ghost-node
 *  elimination, so every closure is second order.  Unknowns are ordered along
 *  habitat 1 and then habitat 2, which keeps the two membrane couplings inside a
 *  tridiagonal band.
 */

#include "refugia/banded.hpp"
#include "refugia/domain.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace refugia {

enum class BoundaryKind { neumann, robin, dirichlet };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::neumann;
  double g = 0.0;  ///< Robin coefficient in du/dn + g u = 0

  static BoundaryCondition neumann() { return {BoundaryKind::neumann, 0.0}; }
  static BoundaryCondition robin(double g) { return {BoundaryKind::robin, g}; }
  static BoundaryCondition dirichlet() { return {BoundaryKind::dirichlet, 0.0}; }
};

/// Strong-form operator plus the diagonal data needed by eigen and energy computations.
struct LinearOperator {
  BandedMatrix<double> matrix;
  Vector weights;      ///< trapezoid quadrature weight of each unknown
  Vector symmetrizer;  ///< positive row scaling that makes `matrix` symmetric

  Index size() const noexcept { return matrix.rows(); }
  Vector apply(const Vector& u) const { return matrix * u; }
};

struct InterfaceOperator : LinearOperator {
  Index n1_unknowns = 0;
  Index n2_unknowns = 0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::string potential_label;

  Index trace1() const noexcept { return n1_unknowns - 1; }
  Index trace2() const noexcept { return n1_unknowns; }
  /// Entry of the habitat-1 membrane row acting on the habitat-2 trace.
  double coupling12() const { return matrix(trace1(), trace2()); }
  /// Entry of the habitat-2 membrane row acting on the habitat-1 trace.
  double coupling21() const { return matrix(trace2(), trace1()); }
};

/// Diagonal m(x_j) * quadrature weight, one entry per unknown.
struct MassMatrix {
  Vector diag;
};

InterfaceOperator assemble_interface(const ProblemSpec& spec, const PiecewiseField& c);
InterfaceOperator assemble_interface(const ProblemSpec& spec, const Grid& grid, const PiecewiseField& c);

MassMatrix lumped_mass(const LinearOperator& op, const Vector& m_at_unknowns);
MassMatrix interface_mass(const ProblemSpec& spec, const Grid& grid, const PiecewiseField& m);

/// Uniform nodes on one interval, ends included.
struct ScalarGrid {
  Vector x;
  double h = 0.0;
  Index intervals() const noexcept { return x.size() - 1; }
};

ScalarGrid make_scalar_grid(Interval span, Index intervals);
/// Habitat 1 or 2 of a two-habitat grid.
ScalarGrid habitat_grid(const Grid& grid, int which);
/// Own grid on refuge i with spacing close to the habitat spacing.
ScalarGrid refuge_grid(const ProblemSpec& spec, const Grid& grid, int which);

struct ScalarOperatorSpec {
  ScalarGrid grid;
  std::function<double(double)> potential = [](double) { return 0.0; };
  BoundaryCondition left = BoundaryCondition::dirichlet();
  BoundaryCondition right = BoundaryCondition::dirichlet();
};

struct ScalarOperator : LinearOperator {
  Vector x;  ///< coordinates of the unknowns
  double h = 0.0;
};

/// Throws std::invalid_argument when the selection leaves no unknowns.
ScalarOperator assemble_scalar(const ScalarOperatorSpec& spec);

/// Operator restricted to the free unknowns; fixed unknowns move to the right-hand side.
struct ReducedSystem {
  LinearOperator op;
  Vector source;              ///< -A(free, fixed) * fixed_values
  std::vector<Index> kept;    ///< original index of each free unknown
};

ReducedSystem eliminate_unknowns(const LinearOperator& op, const std::vector<bool>& fixed, const Vector& fixed_values);

/// Throws SingularMatrixError, or std::runtime_error when the residual check fails.
Vector solve_linear(const LinearOperator& a, const Vector& f);
Vector solve_linear(const BandedMatrix<double>& a, const Vector& f);

/// Trapezoid energy sum_i int (u_i' v_i' + c u_i v_i) + (u2 - u1)(gamma2 v2 - gamma1 v1) at the membrane.
double bilinear_form(const NodalPair& u, const NodalPair& v, const ProblemSpec& spec, const Grid& grid,
                     const PiecewiseField& c);

/// One "row col value" line per stored nonzero, zero-based indices.
void write_triplets(std::ostream& out, const BandedMatrix<double>& a);

}  // namespace refugia
