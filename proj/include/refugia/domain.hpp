#pragma once
/** @file domain.hpp
 *  @brief Two-habitat interval geometry, coefficient fields and problem parameters.
 *
 *  Habitat 1 is (x_left, x_gamma) with a reflecting wall at x_left; habitat 2 is
 *  (x_gamma, x_right) with a lethal (zero) wall at x_right.  The membrane at x_gamma
 *  carries one unknown per side.
 */

#include <Eigen/Core>

#include <functional>
#include <string>

namespace refugia {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Closed interval [lo, hi].  Membership and distance snap points within a
/// round-off tolerance of an end onto it, so grid nodes that should sit on a
/// refuge end are treated as inside.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static double snap_tolerance(double x) noexcept { return 1e-12 * (1.0 + (x < 0 ? -x : x)); }

  double length() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return distance(x) == 0.0; }
  /// Distance from x to the interval (zero inside).
  double distance(double x) const noexcept {
    double d = 0.0;
    if (x < lo) d = lo - x;
    if (x > hi) d = x - hi;
    return d <= snap_tolerance(x) ? 0.0 : d;
  }
};

struct Domain1D {
  double x_left = 0.0;
  double x_gamma = 1.0;
  double x_right = 2.0;
  int n1 = 1000;  ///< intervals on habitat 1
  int n2 = 1000;  ///< intervals on habitat 2

  Interval habitat1() const noexcept { return {x_left, x_gamma}; }
  Interval habitat2() const noexcept { return {x_gamma, x_right}; }
  /// Throws std::invalid_argument on bad ordering or fewer than 8 intervals.
  void validate() const;
};

/// One unlimited-resource interval per habitat.
struct RefugeSpec {
  Interval refuge1{0.2, 0.6};
  Interval refuge2{1.4, 1.6};

  void validate(const Domain1D& domain) const;
  /// Distance from refuge i (1 or 2) to the nearest end of its habitat.
  double margin(int which, const Domain1D& domain) const;
};

/// A coefficient given separately on each habitat.
class PiecewiseField {
 public:
  using Function = std::function<double(double)>;

  PiecewiseField();
  PiecewiseField(Function on1, Function on2, std::string label = "custom");

  static PiecewiseField constant(double value);
  static PiecewiseField constant(double on1, double on2);

  double eval1(double x) const { return on1_(x); }
  double eval2(double x) const { return on2_(x); }
  const std::string& label() const noexcept { return label_; }

 private:
  Function on1_;
  Function on2_;
  std::string label_;
};

PiecewiseField operator+(const PiecewiseField& f, const PiecewiseField& g);
PiecewiseField operator-(const PiecewiseField& f, const PiecewiseField& g);
PiecewiseField operator*(double s, const PiecewiseField& f);
PiecewiseField operator+(const PiecewiseField& f, double s);

/// Affine weight m(x) = base + slope * (x - origin) on both habitats.
PiecewiseField affine_field(double base, double slope, double origin);

/// Crowding profiles.  Each vanishes exactly on the closed refuges and equals
/// `amplitude` at distance >= width from them.
PiecewiseField crowding_ramp(const RefugeSpec& refuges, double amplitude, double width, double exponent);
PiecewiseField crowding_bump(const RefugeSpec& refuges, double amplitude, double width);
/// Indicator complement of the refuges; discontinuous, meant for stress tests.
PiecewiseField crowding_step(const RefugeSpec& refuges, double amplitude);

struct ProblemSpec {
  Domain1D domain;
  RefugeSpec refuges;
  PiecewiseField m = PiecewiseField::constant(1.0);
  PiecewiseField a;
  double p = 2.0;
  double gamma1 = 1.0;
  double gamma2 = 3.0;
  /// True when the crowding field is discontinuous at the refuge edges.
  bool crowding_flagged = false;

  void validate() const;
};

/// Uniform nodes on each habitat; x_gamma is shared by both coordinate arrays.
struct Grid {
  Vector x1;  ///< n1 + 1 nodes, x_left .. x_gamma
  Vector x2;  ///< n2 + 1 nodes, x_gamma .. x_right (last node is the zero wall)
  double h1 = 0.0;
  double h2 = 0.0;

  Index n1() const noexcept { return x1.size() - 1; }
  Index n2() const noexcept { return x2.size() - 1; }
  /// Distinct coordinates (the membrane counted once).
  Index coordinate_count() const noexcept { return x1.size() + x2.size() - 1; }
  /// Unknowns: every habitat-1 node plus habitat-2 nodes except the zero wall.
  Index unknowns() const noexcept { return x1.size() + x2.size() - 1; }
  Index offset2() const noexcept { return x1.size(); }
};

Grid make_grid(const Domain1D& domain);

/// Nodal values on both habitats (habitat 2 includes the zero-wall node).
struct NodalPair {
  Vector u1;
  Vector u2;
};

NodalPair sample_field(const PiecewiseField& field, const Grid& grid);

/// Values at the unknowns in solver order [habitat 1 nodes, habitat 2 nodes without the wall].
Vector to_unknowns(const NodalPair& nodal);
/// Inverse of to_unknowns; the wall value is set to zero.
NodalPair to_nodal(const Grid& grid, const Vector& unknowns);
/// Coordinates of the unknowns in solver order.
Vector unknown_coordinates(const Grid& grid);

}  // namespace refugia
