#include "refugia/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace refugia {

void Domain1D::validate() const {
  if (!(x_left < x_gamma && x_gamma < x_right))
    throw std::invalid_argument("domain requires x_left < x_gamma < x_right");
  if (n1 < 8 || n2 < 8) throw std::invalid_argument("each habitat needs at least 8 intervals");
}

void RefugeSpec::validate(const Domain1D& domain) const {
  if (!(refuge1.length() > 0.0) || !(refuge2.length() > 0.0))
    throw std::invalid_argument("refuges must have positive length");
  if (!(refuge1.lo > domain.x_left && refuge1.hi < domain.x_gamma))
    throw std::invalid_argument("refuge1 must lie strictly inside habitat 1");
  if (!(refuge2.lo > domain.x_gamma && refuge2.hi < domain.x_right))
    throw std::invalid_argument("refuge2 must lie strictly inside habitat 2");
}

double RefugeSpec::margin(int which, const Domain1D& domain) const {
  if (which == 1) return std::min(refuge1.lo - domain.x_left, domain.x_gamma - refuge1.hi);
  return std::min(refuge2.lo - domain.x_gamma, domain.x_right - refuge2.hi);
}

PiecewiseField::PiecewiseField() : PiecewiseField(PiecewiseField::constant(0.0)) {}

PiecewiseField::PiecewiseField(Function on1, Function on2, std::string label)
    : on1_(std::move(on1)), on2_(std::move(on2)), label_(std::move(label)) {}

PiecewiseField PiecewiseField::constant(double value) { return constant(value, value); }

PiecewiseField PiecewiseField::constant(double on1, double on2) {
  return PiecewiseField([on1](double) { return on1; }, [on2](double) { return on2; }, "constant");
}

PiecewiseField operator+(const PiecewiseField& f, const PiecewiseField& g) {
  return PiecewiseField([f, g](double x) { return f.eval1(x) + g.eval1(x); },
                        [f, g](double x) { return f.eval2(x) + g.eval2(x); }, f.label() + "+" + g.label());
}

PiecewiseField operator-(const PiecewiseField& f, const PiecewiseField& g) {
  return PiecewiseField([f, g](double x) { return f.eval1(x) - g.eval1(x); },
                        [f, g](double x) { return f.eval2(x) - g.eval2(x); }, f.label() + "-" + g.label());
}

PiecewiseField operator*(double s, const PiecewiseField& f) {
  return PiecewiseField([s, f](double x) { return s * f.eval1(x); }, [s, f](double x) { return s * f.eval2(x); },
                        f.label());
}

PiecewiseField operator+(const PiecewiseField& f, double s) { return f + PiecewiseField::constant(s); }

PiecewiseField affine_field(double base, double slope, double origin) {
  auto g = [=](double x) { return base + slope * (x - origin); };
  return PiecewiseField(g, g, "affine");
}

namespace {

template <typename Profile>
PiecewiseField distance_profile(const RefugeSpec& refuges, Profile profile, std::string label) {
  const Interval r1 = refuges.refuge1;
  const Interval r2 = refuges.refuge2;
  return PiecewiseField([r1, profile](double x) { return profile(r1.distance(x)); },
                        [r2, profile](double x) { return profile(r2.distance(x)); }, std::move(label));
}

}  // namespace

PiecewiseField crowding_ramp(const RefugeSpec& refuges, double amplitude, double width, double exponent) {
  return distance_profile(
      refuges,
      [=](double d) { return d <= 0.0 ? 0.0 : amplitude * std::pow(std::min(1.0, d / width), exponent); },
      "ramp");
}

PiecewiseField crowding_bump(const RefugeSpec& refuges, double amplitude, double width) {
  return distance_profile(
      refuges,
      [=](double d) {
        const double s = std::min(1.0, d / width);
        return amplitude * s * s;
      },
      "bump");
}

PiecewiseField crowding_step(const RefugeSpec& refuges, double amplitude) {
  return distance_profile(refuges, [=](double d) { return d > 0.0 ? amplitude : 0.0; }, "step");
}

void ProblemSpec::validate() const {
  domain.validate();
  refuges.validate(domain);
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  if (!(gamma1 > 0.0 && gamma2 >= gamma1))
    throw std::invalid_argument("permeabilities require 0 < gamma1 <= gamma2");
}

Grid make_grid(const Domain1D& domain) {
  domain.validate();
  Grid g;
  g.h1 = (domain.x_gamma - domain.x_left) / domain.n1;
  g.h2 = (domain.x_right - domain.x_gamma) / domain.n2;
  g.x1.resize(domain.n1 + 1);
  g.x2.resize(domain.n2 + 1);
  for (int j = 0; j <= domain.n1; ++j) g.x1(j) = domain.x_left + j * g.h1;
  for (int j = 0; j <= domain.n2; ++j) g.x2(j) = domain.x_gamma + j * g.h2;
  g.x1(0) = domain.x_left;
  g.x1(domain.n1) = domain.x_gamma;
  g.x2(0) = domain.x_gamma;
  g.x2(domain.n2) = domain.x_right;
  return g;
}

NodalPair sample_field(const PiecewiseField& field, const Grid& grid) {
  NodalPair out{Vector(grid.x1.size()), Vector(grid.x2.size())};
  for (Index j = 0; j < grid.x1.size(); ++j) out.u1(j) = field.eval1(grid.x1(j));
  for (Index j = 0; j < grid.x2.size(); ++j) out.u2(j) = field.eval2(grid.x2(j));
  return out;
}

Vector to_unknowns(const NodalPair& nodal) {
  const Index n1 = nodal.u1.size();
  const Index n2 = nodal.u2.size() - 1;
  Vector v(n1 + n2);
  v.head(n1) = nodal.u1;
  v.tail(n2) = nodal.u2.head(n2);
  return v;
}

NodalPair to_nodal(const Grid& grid, const Vector& unknowns) {
  const Index n1 = grid.x1.size();
  const Index n2 = grid.x2.size() - 1;
  if (unknowns.size() != n1 + n2) throw std::invalid_argument("unknown vector does not match the grid");
  NodalPair out{unknowns.head(n1), Vector::Zero(n2 + 1)};
  out.u2.head(n2) = unknowns.tail(n2);
  return out;
}

Vector unknown_coordinates(const Grid& grid) {
  return to_unknowns(NodalPair{grid.x1, grid.x2});
}

}  // namespace refugia
