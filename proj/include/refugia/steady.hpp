#pragma once
/** @file steady.hpp
 *  @brief Positive steady states of the two-habitat logistic system, the branch over the
 *  existence window and the window scan.
 */

#include "refugia/semilinear.hpp"

#include <optional>
#include <string>
#include <vector>

namespace refugia {

enum class SolveMethod { monotone, newton };

struct SteadyState {
  double lambda = 0.0;
  Vector u;  ///< unknown order
  double residual = 0.0;  ///< ||F(u)||_inf
  bool positive = false;
  SolveMethod method = SolveMethod::newton;
  int iterations = 0;
};

/// Logistic system on the full two-habitat grid at one lambda.
SemilinearSystem interface_system(const ProblemSpec& spec, const Grid& grid, double lambda);
NodeLayout interface_layout(const ProblemSpec& spec, const Grid& grid);

struct SubSuperPair {
  Vector sub;
  Vector super;
  double epsilon = 0.0;
  double big_m = 0.0;
  double delta = 0.0;
  double sigma_sub = 0.0;    ///< principal eigenvalue of A - lambda m (negative inside the window)
  double sigma_delta = 0.0;  ///< eigenvalue on the enlarged refuges (positive)
};

/// Throws NoWindow outside the discrete window.
SubSuperPair build_sub_supersolution(const ProblemSpec& spec, const Grid& grid, double lambda);

struct MonotoneReport {
  SteadyState state;
  double agreement = 0.0;  ///< ||upper - lower||_inf at exit
  bool shift_doubled = false;
};

MonotoneReport monotone_iterate(const ProblemSpec& spec, const Grid& grid, double lambda, const SubSuperPair& pair);

SteadyState steady_newton(const ProblemSpec& spec, const Grid& grid, double lambda, const Vector& initial,
                          const NewtonOptions& options = {});

/// Newton continuation from (from_lambda, from_u) to `to_lambda`.  A failed or
/// non-positive solve is retried through the midpoint, at most `max_halvings` levels deep.
SteadyState continue_steady(const ProblemSpec& spec, const Grid& grid, double from_lambda, const Vector& from_u,
                            double to_lambda, int max_halvings = 12);

/// Positive when every unknown exceeds zero.
bool all_positive(const Vector& u);

struct BranchPoint {
  double lambda = 0.0;
  SteadyState state;
  double sup_u = 0.0;
  double sup_u1 = 0.0;
  double sup_u2 = 0.0;
  double u1_at_gamma = 0.0;
  double u2_at_gamma = 0.0;
  double refuge1_max = 0.0;
  double cross_agreement = 0.0;  ///< ||newton - monotone||_inf / max(1, ||u||_inf)
};

enum class WindowKind { positive, collapse, blowup, undecided };
std::string to_string(WindowKind k);

struct WindowPoint {
  double lambda = 0.0;
  WindowKind kind = WindowKind::undecided;
  bool sub_built = false;
  bool super_built = false;
  double sup_u = 0.0;
  int iterations = 0;
};

struct SteadyBranch {
  std::vector<BranchPoint> points;  ///< interior of the window, increasing lambda
  std::vector<WindowPoint> probes;  ///< lambda at or beyond the thresholds
  Thresholds thresholds;
};

/// Upper end of the discrete window: the smaller of the continuum and grid refuge values.
double window_top(const Thresholds& t);

/// `points` uniform interior values plus `probes` values lambda_star + W 2^-k, k = 5..4+probes.
std::vector<double> default_branch_grid(const Thresholds& t, int points, int probes);

/// Newton continuation over the interior values; each point is cross-checked by monotone
/// iteration.  Values outside the window are classified instead.
SteadyBranch trace_branch(const ProblemSpec& spec, const std::vector<double>& lambdas);

/// Dynamics of the monotone sequences at one lambda.
WindowPoint classify_lambda(const ProblemSpec& spec, const Grid& grid, double lambda);

struct WindowScan {
  std::vector<WindowPoint> points;
  Thresholds thresholds;
  double cell = 0.0;
  /// True when positivity holds exactly inside (lambda_star, lambda_infinity) up to one cell at each end.
  bool matches_window = false;
  std::vector<std::string> mismatches;
};

WindowScan window_scan(const ProblemSpec& spec, int points = 16, double margin = 0.1);

/// Branch properties: nodewise monotonicity, vanishing at lambda_star, method agreement.
PropertyReport check_branch(const SteadyBranch& branch, double monotone_slack = 1e-9, double vanish_ratio = 1e-2,
                            double agreement = 1e-8);

/// Scalar problem -u'' + c u = lambda m u - a u^p on one interval, with the Robin datum
/// `datum` on every Robin end (du/dn + g u = datum) and zero at Dirichlet ends.
struct ScalarNonlinearSpec {
  ScalarOperatorSpec op;
  std::function<double(double)> m = [](double) { return 1.0; };
  std::function<double(double)> a;
  std::optional<Interval> refuge;  ///< where a vanishes
  double p = 2.0;
  double lambda = 0.0;
  double datum = 0.0;
};

struct ScalarSteadyState {
  Vector x;
  Vector u;
  double residual = 0.0;
  bool positive = false;
};

/// Monotone iteration between the subsolution (or zero) and the spliced supersolution,
/// polished by Newton.  Returns the zero state when no positive solution exists below
/// the window; throws NoWindow above it.
ScalarSteadyState scalar_nonlinear_solve(const ScalarNonlinearSpec& spec);

SemilinearSystem scalar_system(const ScalarNonlinearSpec& spec, const ScalarOperator& op);

}  // namespace refugia
