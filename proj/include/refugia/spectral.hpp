#pragma once
/** @file spectral.hpp
 *  @brief Principal eigenpairs, the eigenvalue map Sigma(lambda) and the window thresholds.
 */

#include "refugia/assembly.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace refugia {

struct EigenOptions {
  int max_iterations = 10000;
  double tolerance = 1e-11;  ///< on successive eigenvalue estimates, relative to 1 + |value|
};

struct EigenPair {
  double value = 0.0;
  Vector vector;          ///< sup-norm 1, nonnegative
  double residual = 0.0;  ///< || W A phi - value M phi ||_inf in quadrature-weighted form
  int iterations = 0;
  double lower_bound = 0.0;  ///< Collatz-Wielandt bracket of the eigenvalue at exit
  double upper_bound = 0.0;
  Index underflowed = 0;  ///< entries that underflowed to exactly zero
};

/// Principal eigenpair of A phi = value D phi with D = diag(M) / weights, by shifted
/// inverse iteration.  The shift starts one unit below the Gershgorin bound of D^-1 A
/// (or at `shift_hint`) and then tracks the Collatz-Wielandt lower bound, so the shifted
/// matrix stays a nonsingular M-matrix.
EigenPair principal_eigenpair(const LinearOperator& a, const MassMatrix& m, std::optional<double> shift_hint = {},
                              const EigenOptions& options = {});
EigenPair principal_eigenpair_from(const LinearOperator& a, const MassMatrix& m, const Vector& start,
                                   std::optional<double> shift_hint = {}, const EigenOptions& options = {});

/// Lower Gershgorin bound of D^-1 A.
double gershgorin_lower_bound(const LinearOperator& a, const MassMatrix& m);

/// Unit lumped mass (m = 1) of an operator.
MassMatrix unit_mass(const LinearOperator& a);

/// Principal eigenvalue of the interface operator with potential c - lambda m.
double sigma_of_lambda(const ProblemSpec& spec, const PiecewiseField& c, const PiecewiseField& m, double lambda);

/// Evaluates Sigma(lambda) repeatedly on one grid without reassembling.
class SigmaMap {
 public:
  SigmaMap(const ProblemSpec& spec, const Grid& grid, const PiecewiseField& c, const PiecewiseField& m);
  double operator()(double lambda) const { return eigenpair(lambda).value; }
  EigenPair eigenpair(double lambda) const;
  const InterfaceOperator& base() const noexcept { return base_; }
  const Vector& weight() const noexcept { return m_; }

 private:
  InterfaceOperator base_;
  Vector m_;
};

struct WeightedEigenvalue {
  double value = 0.0;
  double sigma_at_root = 0.0;
  int evaluations = 0;
  int sign_changes = 0;  ///< along the expanding bracket sequence (expected: 1)
};

/// Root of a decreasing map by bracket expansion from [0, 1] and a safeguarded secant.
WeightedEigenvalue find_weight_root(const std::function<double(double)>& sigma, double tolerance = 1e-9,
                                    int max_expansions = 200);

/// Root of Sigma(lambda) = 0 for the interface operator.
WeightedEigenvalue weighted_principal_eigenvalue(const ProblemSpec& spec, const PiecewiseField& c,
                                                 const PiecewiseField& m);

struct Thresholds {
  double lambda_star = 0.0;
  double lambda_m1 = 0.0;
  double lambda_m2 = 0.0;
  double lambda_infinity = 0.0;
  /// Refuge eigenvalues on the habitat grid: the node set where crowding vanishes,
  /// with zero values at the neighbouring nodes.  These bound the discrete window.
  double grid_lambda_m1 = 0.0;
  double grid_lambda_m2 = 0.0;
  bool window_nonempty = false;
  std::string diagnostic;

  double grid_lambda_infinity() const noexcept { return std::min(grid_lambda_m1, grid_lambda_m2); }
};

Thresholds compute_thresholds(const ProblemSpec& spec);

/// Weighted Dirichlet eigenpair on refuge i, on its own grid.
EigenPair refuge_eigenpair(const ProblemSpec& spec, const Grid& grid, int which);

/// Unknown-index mask of the habitat-grid nodes lying in the closed refuge i.
std::vector<bool> refuge_node_mask(const ProblemSpec& spec, const Grid& grid, int which);

/// Weighted eigenpair on the habitat-grid nodes of refuge i (zero at every other node).
EigenPair grid_refuge_eigenpair(const ProblemSpec& spec, const Grid& grid, int which);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs for orderings lhs < rhs, or the deviation for identities
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool all_passed() const;
};

/// Orderings of principal eigenvalues: potential monotonicity and the unit shift,
/// Robin below Dirichlet, domain monotonicity, positivity from a strict supersolution,
/// and the membrane bound by the two scalar Robin problems.
PropertyReport scalar_eigen_properties_suite(const ProblemSpec& spec);

/// Scalar operator on habitat i: reflecting/Robin(gamma1) on habitat 1,
/// Robin(gamma2)/zero wall on habitat 2.
ScalarOperator habitat_robin_operator(const ProblemSpec& spec, const Grid& grid, int which,
                                      const PiecewiseField& c);

}  // namespace refugia
