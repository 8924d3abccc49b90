#pragma once
/** @file blowup.hpp
 *  @brief Behaviour of the steady state as lambda approaches the top of the window:
 *  bounds away from the refuges, blow-up on refuge 1, the exterior problem with large
 *  boundary data and its limit.
 */

#include "refugia/steady.hpp"

#include <optional>
#include <string>
#include <vector>

namespace refugia {

/// lambda_j = top - (top - lambda_star) 2^-j, j = 1..steps, with top the grid refuge value.
std::vector<double> blowup_ladder(const Thresholds& t, int steps);

/// Nodes of habitat i at distance >= epsilon from refuge i (the set away from the refuges).
std::vector<bool> away_from_refuge_mask(const ProblemSpec& spec, const Grid& grid, int which, double epsilon);

struct AprioriBound {
  double k_constant = 0.0;    ///< (lambda max m / min a)^(1/(p-1)) over the far set
  double boundary_max = 0.0;  ///< largest value on far-set nodes adjacent to the excluded nodes
  double bound = 0.0;         ///< max of the two
  double observed1 = 0.0;     ///< max of u1 on the far set of habitat 1
  double observed2 = 0.0;
  bool passed = false;        ///< both observed maxima <= 1.05 bound
};

/// Constant-supersolution bound on the far sets, raised to the values the state takes
/// where the far sets meet the refuge neighbourhoods.
AprioriBound apriori_bound_check(const ProblemSpec& spec, const Grid& grid, double lambda, const Vector& u,
                                 double epsilon);

struct BlowupRecord {
  double lambda = 0.0;
  double refuge1_min_u1 = 0.0;
  double refuge1_max_u1 = 0.0;
  double sup_u2 = 0.0;
  double omega_eps_max_u1 = 0.0;
  double ratio = 0.0;  ///< refuge1_min_u1 / sup_u2
  AprioriBound apriori;
  int newton_steps = 0;
};

struct BlowupSweep {
  Thresholds thresholds;
  double epsilon = 0.0;
  std::vector<BlowupRecord> records;
  std::vector<Vector> states;  ///< unknown order, one per record
  double uniform_bound = 0.0;  ///< largest apriori bound over the ladder
  double u2_bound = 0.0;       ///< sup of the habitat-2 comparison solution
  std::optional<double> failed_lambda;
  std::string failure;
};

/// Newton continuation along `lambdas` (increasing, inside the window), started from the
/// monotone limit at the first value.  A solver failure ends the sweep early.
BlowupSweep blowup_sweep(const ProblemSpec& spec, const std::vector<double>& lambdas, double epsilon);

/// Solution on habitat 2 with the Robin datum gamma2 * trace_bound at the membrane; it
/// dominates u2 whenever u1 <= trace_bound at the membrane.
ScalarSteadyState habitat2_comparison(const ProblemSpec& spec, const Grid& grid, double lambda, double trace_bound);

/// Growth, ratio and boundedness checks.  `threshold` is the required growth of the
/// refuge minimum and the terminal ratio to sup u2.
PropertyReport check_blowup(const BlowupSweep& sweep, double threshold);

struct ExteriorState {
  double k = 0.0;
  double lambda = 0.0;
  Vector u;  ///< unknown order; refuge-1 nodes hold k
  int newton_steps = 0;
  double residual = 0.0;
};

/// Logistic system off the closed refuge 1 with u1 = k on its nodes.  Throws
/// std::invalid_argument unless lambda_star < lambda < lambda_m2 and k >= 0.
/// `warm` (unknown order) seeds Newton; a solution for a smaller k is a good choice.
ExteriorState exterior_solve(const ProblemSpec& spec, const Grid& grid, const Thresholds& t, double lambda, double k,
                             const Vector* warm = nullptr);

/// Same problem by monotone iteration from zero; slow for large k, used as a cross-check.
ExteriorState exterior_solve_monotone(const ProblemSpec& spec, const Grid& grid, const Thresholds& t, double lambda,
                                      double k);

struct LargeSolutionLadder {
  double lambda = 0.0;
  double epsilon = 0.0;
  std::vector<double> ks;
  std::vector<ExteriorState> states;
  std::vector<bool> compact;            ///< unknown mask of the evaluation set
  std::vector<double> compact_sup;      ///< max over the compact set, per k
  std::vector<double> delta_to_prev;    ///< max |u_k - u_prev| / compact_sup on the compact set
  std::vector<double> step_size;        ///< max |u_k - u_prev| on the compact set
  std::vector<double> order_violation;  ///< largest u_prev - u_k over all nodes (<= 0 when ordered)
  double contraction = 0.0;             ///< ratio of the last two step sizes
  Vector minimal;                       ///< u_last + r / (1 - r) (u_last - u_prev), r = contraction
};

/// Geometric data 1, 2, 4, ..., 2^max_exponent.
std::vector<double> k_ladder(int max_exponent);

/// Exterior solves along `ks` with warm starts, compact set at distance >= epsilon from refuge 1.
LargeSolutionLadder minimal_large_solution(const ProblemSpec& spec, double lambda, const std::vector<double>& ks,
                                           double epsilon);

/// Ordering, shrinking steps over the second half of the ladder and the final relative change.
PropertyReport check_large_solution(const LargeSolutionLadder& ladder, double final_change = 1e-2);

struct LimitComparison {
  std::vector<double> lambdas;
  std::vector<double> distance;  ///< max over the compact set of |u_lambda - minimal| / max minimal
};

LimitComparison compare_to_large_solution(const BlowupSweep& sweep, const LargeSolutionLadder& ladder);

/// Distance decreasing over the last four values and the final one within `tolerance`.
PropertyReport check_limit_comparison(const LimitComparison& c, double tolerance = 5e-2);

}  // namespace refugia
