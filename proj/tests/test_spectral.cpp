#include "refugia/assembly.hpp"
#include "refugia/properties.hpp"
#include "refugia/spectral.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace refugia;

namespace {

constexpr double pi = std::numbers::pi;

double scalar_eigenvalue(Interval span, Index n, BoundaryCondition left, BoundaryCondition right) {
  ScalarOperatorSpec s;
  s.grid = make_scalar_grid(span, n);
  s.left = left;
  s.right = right;
  const ScalarOperator op = assemble_scalar(s);
  return principal_eigenpair(op, unit_mass(op)).value;
}

ProblemSpec unit_membrane(int n, double g1, double g2) {
  ProblemSpec s = test::coarse_spec(n);
  s.domain = {0.0, 1.0, 2.0, n, n};
  s.gamma1 = g1;
  s.gamma2 = g2;
  return s;
}

}  // namespace

TEST_CASE("scalar eigenvalues match the closed forms") {
  const auto d = BoundaryCondition::dirichlet();
  const auto nm = BoundaryCondition::neumann();
  CHECK(scalar_eigenvalue({0, 1}, 2000, d, d) == doctest::Approx(pi * pi).epsilon(5e-5));
  CHECK(scalar_eigenvalue({0, 1}, 2000, nm, d) == doctest::Approx(pi * pi / 4).epsilon(5e-5));
  CHECK(scalar_eigenvalue({0.2, 0.6}, 800, d, d) == doctest::Approx(pi * pi / 0.16).epsilon(5e-5));
  // Reflecting-Robin: k tan k = g.
  const double g = 1.5;
  const double k = test::first_root([&](double t) { return t * std::sin(t) - g * std::cos(t); }, 1e-9, pi / 2);
  CHECK(scalar_eigenvalue({0, 1}, 2000, nm, BoundaryCondition::robin(g)) == doctest::Approx(k * k).epsilon(5e-5));
}

TEST_CASE("refuge eigenvalues with unit weight are pi^2 over the squared length") {
  const ProblemSpec spec = make_problem(Config{});
  const Grid grid = make_grid(spec.domain);
  CHECK(refuge_eigenpair(spec, grid, 1).value == doctest::Approx(pi * pi / 0.16).epsilon(5e-5));
  CHECK(refuge_eigenpair(spec, grid, 2).value == doctest::Approx(pi * pi / 0.04).epsilon(5e-5));
  const Thresholds t = compute_thresholds(spec);
  CHECK(t.lambda_m1 == doctest::Approx(pi * pi / 0.16).epsilon(5e-5));
  CHECK(t.lambda_m2 == doctest::Approx(pi * pi / 0.04).epsilon(5e-5));
  CHECK(t.lambda_infinity == doctest::Approx(t.lambda_m1));
  CHECK(t.window_nonempty);
  CHECK(t.lambda_star > 0.0);
  CHECK(t.lambda_star < t.lambda_infinity);
  CHECK(t.grid_lambda_m1 < t.lambda_m1);
  CHECK(t.grid_lambda_m1 > 0.99 * t.lambda_m1);
}

TEST_CASE("membrane eigenvalue matches the root of the matching determinant") {
  for (auto [g1, g2] : {std::pair{1.0, 1.0}, std::pair{1.0, 3.0}}) {
    const double k = test::first_root([&](double t) { return test::matching_determinant(t, g1, g2); }, 1e-6, 3.0);
    const ProblemSpec spec = unit_membrane(2000, g1, g2);
    const Grid grid = make_grid(spec.domain);
    const InterfaceOperator op = assemble_interface(spec, grid, PiecewiseField::constant(0.0));
    const EigenPair e = principal_eigenpair(op, interface_mass(spec, grid, PiecewiseField::constant(1.0)));
    CHECK(e.value == doctest::Approx(k * k).epsilon(5e-5));
    CHECK(e.vector.minCoeff() > 0.0);
    CHECK(e.vector.maxCoeff() == doctest::Approx(1.0));
    CHECK(e.lower_bound <= e.value);
    CHECK(e.value <= e.upper_bound);
  }
}

TEST_CASE("banded eigenpair agrees with a dense generalized solver on random specs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ProblemSpec spec = test::coarse_spec();
    const double xg = 0.5 + u(rng);
    spec.domain = {0.0, xg, xg + 0.5 + u(rng), 8 + static_cast<int>(192 * u(rng)), 8 + static_cast<int>(192 * u(rng))};
    spec.gamma1 = 0.2 + 2.0 * u(rng);
    spec.gamma2 = spec.gamma1 * (1.0 + 3.0 * u(rng));
    const PiecewiseField c = random_potential(rng(), 15.0);
    const double m0 = 0.5 + u(rng);
    const double m1 = 0.4 * u(rng);
    const PiecewiseField m([=](double x) { return m0 + m1 * std::cos(4 * x); }, [=](double x) { return m0 + m1 * x; });
    const Grid grid = make_grid(spec.domain);

    const EigenPair banded =
        principal_eigenpair(assemble_interface(spec, grid, c), interface_mass(spec, grid, m));
    const test::DenseEigen dense =
        test::dense_principal(test::energy_matrix(spec, grid, c), test::energy_mass(spec, grid, m));
    CAPTURE(trial);
    CHECK(std::abs(banded.value - dense.value) <= 1e-8 * std::abs(dense.value));
    CHECK((banded.vector - dense.vector).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("shifting the potential shifts the unit-weight eigenvalue") {
  const ProblemSpec spec = test::coarse_spec(400);
  CHECK(shift_identity_checks(spec, 5, 5).all_passed());
  const Grid grid = make_grid(spec.domain);
  const PiecewiseField c = random_potential(9, 5.0);
  auto unit = [&](const PiecewiseField& f) {
    const InterfaceOperator op = assemble_interface(spec, grid, f);
    return principal_eigenpair(op, interface_mass(spec, grid, PiecewiseField::constant(1.0))).value;
  };
  CHECK(unit(c + 2.5) - unit(c) == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("Sigma is decreasing and concave, with its root at lambda_star") {
  const ProblemSpec spec = test::coarse_spec(400);
  CHECK(sigma_shape_checks(spec, 20).all_passed());
  const Thresholds t = compute_thresholds(spec);
  const Grid grid = make_grid(spec.domain);
  const SigmaMap sigma(spec, grid, PiecewiseField::constant(0.0), spec.m);
  CHECK(std::abs(sigma(t.lambda_star)) <= 1e-7);
  CHECK(sigma(0.5 * t.lambda_star) > 0.0);
  CHECK(sigma(2.0 * t.lambda_star) < 0.0);
  CHECK(sigma(0.0) > sigma(1.0));
}

TEST_CASE("weight root finder brackets and locates a decreasing root") {
  const WeightedEigenvalue r = find_weight_root([](double l) { return 3.0 - l; });
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.sign_changes == 1);
  const WeightedEigenvalue far = find_weight_root([](double l) { return 1000.0 - 2.0 * l; });
  CHECK(far.value == doctest::Approx(500.0).epsilon(1e-9));
}

TEST_CASE("Gershgorin bound lies below the principal eigenvalue") {
  const ProblemSpec spec = test::coarse_spec(300);
  const Grid grid = make_grid(spec.domain);
  const InterfaceOperator op = assemble_interface(spec, grid, spec.a);
  const MassMatrix m = interface_mass(spec, grid, spec.m);
  CHECK(gershgorin_lower_bound(op, m) <= principal_eigenpair(op, m).value);
}

TEST_CASE("ordering suite, maximum principle and simplicity on the default geometry") {
  const ProblemSpec spec = test::coarse_spec(400);
  const PropertyReport suite = scalar_eigen_properties_suite(spec);
  CHECK(suite.checks.size() >= 4);
  for (const auto& c : suite.checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
  }
  CHECK(maximum_principle_checks(spec, 1, 20).all_passed());
  CHECK(simplicity_checks(spec, 3, 5).all_passed());
}

TEST_CASE("random potentials are reproducible and nonnegative") {
  const PiecewiseField a = random_potential(42, 3.0);
  const PiecewiseField b = random_potential(42, 3.0);
  for (double x : {0.0, 0.3, 0.9}) {
    CHECK(a.eval1(x) == b.eval1(x));
    CHECK(a.eval1(x) >= 0.0);
    CHECK(a.eval2(x + 1.0) >= 0.0);
  }
}
