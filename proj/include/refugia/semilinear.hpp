#pragma once
/** @file semilinear.hpp
 *  @brief Discrete logistic systems A u - s = lambda m u - a |u|^(p-1) u: residuals,
 *  damped Newton, monotone iteration and sub/supersolution builders.
 */

#include "refugia/spectral.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace refugia {

/// F(u) = A u - source - lambda m u + a |u|^(p-1) u, row by row in strong form.
struct SemilinearSystem {
  LinearOperator op;
  Vector source;  ///< boundary data moved to the right-hand side (zero when homogeneous)
  Vector m;
  Vector a;
  double p = 2.0;
  double lambda = 0.0;

  Index size() const noexcept { return op.size(); }
  Vector residual(const Vector& u) const;
  /// Magnitude of the terms entering F(u); rounding in F is a small multiple of eps times this.
  double scale(const Vector& u) const;
  /// Diagonal of dF/du - A.
  Vector jacobian_shift(const Vector& u) const;
};

/// Raised by Newton; carries the parameter value.
class NewtonError : public std::runtime_error {
 public:
  NewtonError(double lambda, const std::string& what);
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

struct NewtonOptions {
  int max_steps = 100;
  double relative_tolerance = 1e-14;  ///< on ||F||_inf / scale(u), and on the step relative to 1 + ||u||_inf
  /// Full steps when false; for convex F started from a subsolution the iterates then
  /// decrease monotonically after the first step.
  bool line_search = true;
};

struct NewtonResult {
  Vector state;
  int steps = 0;
  double residual = 0.0;  ///< ||F||_inf
  double scale = 0.0;
  std::vector<double> history;  ///< ||F||_inf before each step and at exit
};

NewtonResult newton_solve(const SemilinearSystem& sys, const Vector& initial, const NewtonOptions& options = {});

struct MonotoneOptions {
  double tolerance = 1e-9;       ///< agreement of the two sequences, relative to 1 + ||upper||_inf
  int max_iterations = 400000;
  double blowup_norm = 1e12;
  double collapse_ratio = 1e-8;  ///< collapse when ||w|| falls below this fraction of the start
};

class OrderingLost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MonotonePair {
  Vector lower;  ///< increasing sequence from the subsolution
  Vector upper;  ///< decreasing sequence from the supersolution
  int iterations = 0;
  bool shift_doubled = false;
};

/// Nodewise shift max(0, p a bound^(p-1) - lambda m): the smallest diagonal making
/// u -> lambda m u - a u^p + K u nondecreasing on [0, bound].
Vector monotone_shift(const SemilinearSystem& sys, const Vector& bound);

/// Runs both sequences until they agree; retries once with a doubled shift when they cross.
MonotonePair monotone_pair(const SemilinearSystem& sys, const Vector& sub, const Vector& super,
                           const MonotoneOptions& options = {});

enum class SequenceOutcome { converged, collapsed, blew_up, stalled };
std::string to_string(SequenceOutcome o);

struct MonotoneSequence {
  Vector state;
  int iterations = 0;
  SequenceOutcome outcome = SequenceOutcome::stalled;
};

/// Single decreasing sequence from a supersolution; the shift follows the iterate.
MonotoneSequence decreasing_sequence(const SemilinearSystem& sys, const Vector& super,
                                     const MonotoneOptions& options = {});
/// Single increasing sequence from a subsolution; the shift follows the iterate.
MonotoneSequence increasing_sequence(const SemilinearSystem& sys, const Vector& sub,
                                     const MonotoneOptions& options = {});

class NoWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Layout of the unknowns used by the supersolution splice.
struct NodeLayout {
  Vector x;
  std::vector<int> chain;  ///< connected piece each unknown belongs to
  Vector distance;         ///< distance to the zero-crowding set of its piece (infinite if none)
  double h = 0.0;          ///< largest spacing
  double margin = 0.0;     ///< room available around the zero-crowding sets
};

struct Subsolution {
  Vector state;
  double epsilon = 0.0;
  double sigma = 0.0;  ///< principal eigenvalue of A - lambda m
};

/// epsilon * Phi0 with epsilon halved from 1e-2 until the nodewise inequality holds.
/// Throws NoWindow when A - lambda m has a nonnegative principal eigenvalue and the
/// source vanishes; returns zero when the source alone makes zero a subsolution.
Subsolution build_subsolution(const SemilinearSystem& sys);

struct Supersolution {
  Vector state;
  Vector profile;  ///< Psi, sup-norm 1
  double big_m = 0.0;
  double delta = 0.0;
  double sigma = 0.0;  ///< eigenvalue on the enlarged zero-crowding set
};

/// M * Psi: Psi is the Dirichlet eigenvector of A - lambda m on the nodes within delta of the
/// zero-crowding set, kept on the nodes within delta/2 and blended by a cosine ramp to a
/// floor of 10% of its maximum elsewhere; delta halves from 10% of the margin until the
/// eigenvalue is positive, and M doubles until F(M Psi) >= 0 and M Psi >= `below`.
Supersolution build_supersolution(const SemilinearSystem& sys, const NodeLayout& layout,
                                  const Vector& below);

/// Largest violation of F(u) <= 0 (positive entries of F) and of F(u) >= 0.
double subsolution_defect(const SemilinearSystem& sys, const Vector& u);
double supersolution_defect(const SemilinearSystem& sys, const Vector& u);

}  // namespace refugia
