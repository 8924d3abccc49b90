#pragma once
/** @file alpha_limit.hpp
 *  @brief Weighted eigenpairs of -u'' + alpha a u as alpha grows, and their refuge concentration.
 */

#include "refugia/spectral.hpp"

#include <string>
#include <vector>

namespace refugia {

enum class Trichotomy { both, refuge1, refuge2 };

std::string to_string(Trichotomy t);

struct AlphaRecord {
  double alpha = 0.0;
  double lambda = 0.0;
  Vector phi;                      ///< unknown order, normalized by sum w m phi^2 = 1
  double normalization = 0.0;      ///< sum w m phi^2 after normalization
  double gradient_norm_sq = 0.0;   ///< sum over habitats of int |phi'|^2
  double jump_sq = 0.0;            ///< (phi2 - phi1)^2 at the membrane
  double crowding_integral = 0.0;  ///< int a phi^2, both habitats
  double mass_refuge1 = 0.0;       ///< int_{refuge i} m phi^2
  double mass_refuge2 = 0.0;
};

struct LimitProfile {
  double lambda_limit = 0.0;
  Vector phi_limit;
  Trichotomy branch = Trichotomy::refuge1;
  double mass_outside = 0.0;  ///< weighted mass outside the selected refuge(s)
};

struct AlphaSweep {
  std::vector<double> alphas;
  std::vector<AlphaRecord> records;
  Thresholds thresholds;
  LimitProfile limit;
};

/// 0 followed by lambda_star * ratio^k for k = 0..steps.
std::vector<double> alpha_ladder(double lambda_star, int steps, double ratio);

/// Throws std::invalid_argument unless alphas are nonnegative and strictly increasing;
/// eigensolver failures are rethrown tagged with the offending alpha.
AlphaSweep run_alpha_sweep(const ProblemSpec& spec, const std::vector<double>& alphas,
                           double trichotomy_tolerance = 1e-6);

AlphaRecord alpha_record(const ProblemSpec& spec, const Grid& grid, double alpha);

/// Tag from the refuge eigenvalues; `tolerance` is relative to lambda_infinity.
Trichotomy classify_trichotomy(const Thresholds& thresholds, double tolerance = 1e-6);

/// Energy bounds of one record, each with 5% slack.
PropertyReport check_alpha_bounds(const AlphaRecord& record, const ProblemSpec& spec);

/// min_i (unweighted Dirichlet refuge eigenvalue / min of m on habitat i).
double alpha_upper_bound(const ProblemSpec& spec);

/// Every property of a finished sweep: monotone increase, the upper bound, the
/// energy bounds, the gap to lambda_infinity and the mass outside the selected refuges.
PropertyReport check_alpha_sweep(const AlphaSweep& sweep, const ProblemSpec& spec, double gap_tolerance = 0.02,
                                 double mass_tolerance = 0.02);

}  // namespace refugia
