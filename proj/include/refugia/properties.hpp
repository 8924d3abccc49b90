#pragma once
/** @file properties.hpp
 *  @brief Randomized checks of the interface eigenproblem and the linear solve.
 *
 *  Every function draws its instances from a std::mt19937_64 seeded with `seed`, so a
 *  fixed seed reproduces the same instances.
 */

#include "refugia/spectral.hpp"

#include <cstdint>

namespace refugia {

/// Nonnegative smooth potential: base + amp sin(freq x + phase) per habitat, amp <= base.
PiecewiseField random_potential(std::uint64_t seed, double max_base);

/// Lambda_1[c + s] - Lambda_1[c] = s for `count` random (c, s) pairs, to 1e-9.
PropertyReport shift_identity_checks(const ProblemSpec& spec, std::uint64_t seed, int count);

/// First differences of Sigma on `samples` uniform lambda in [0, 1.5 lambda_infinity] are
/// negative and second differences at most `slack`.
PropertyReport sigma_shape_checks(const ProblemSpec& spec, int samples, double slack = 1e-10);

/// (A + c) u = f with random f >= 0, f != 0 and c >= 0, c != 0 gives u > 0 at every unknown.
PropertyReport maximum_principle_checks(const ProblemSpec& spec, std::uint64_t seed, int count);

/// Inverse iteration from `starts` random positive vectors reaches one eigenvalue and
/// one eigenvector (a numerical proxy for simplicity).
PropertyReport simplicity_checks(const ProblemSpec& spec, std::uint64_t seed, int starts);

}  // namespace refugia
