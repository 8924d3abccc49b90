#include "refugia/alpha_limit.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace refugia;

TEST_CASE("alpha ladder starts at zero and grows geometrically from lambda_star") {
  const auto a = alpha_ladder(0.5, 3, 4.0);
  REQUIRE(a.size() == 5);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == doctest::Approx(0.5));
  CHECK(a[4] == doctest::Approx(32.0));
}

TEST_CASE("trichotomy tag follows the refuge eigenvalues") {
  Thresholds t;
  t.lambda_m1 = 10.0;
  t.lambda_m2 = 20.0;
  t.lambda_infinity = 10.0;
  CHECK(classify_trichotomy(t) == Trichotomy::refuge1);
  t.lambda_m1 = 30.0;
  t.lambda_infinity = 20.0;
  CHECK(classify_trichotomy(t) == Trichotomy::refuge2);
  t.lambda_m1 = 20.0 * (1.0 + 1e-8);
  CHECK(classify_trichotomy(t) == Trichotomy::both);
  CHECK(to_string(Trichotomy::both) != to_string(Trichotomy::refuge1));
}

TEST_CASE("preset geometries carry the expected tags") {
  for (auto [preset, expected] : {std::pair{"default", Trichotomy::refuge1}, std::pair{"both", Trichotomy::both},
                                  std::pair{"refuge2", Trichotomy::refuge2}}) {
    Config c = Config::preset(preset);
    c.set("n1", "400");
    c.set("n2", "400");
    CAPTURE(preset);
    CHECK(classify_trichotomy(compute_thresholds(make_problem(c))) == expected);
  }
}

TEST_CASE("upper bound is the smallest unweighted refuge eigenvalue over min m") {
  const ProblemSpec spec = test::coarse_spec(400);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(alpha_upper_bound(spec) == doctest::Approx(pi2 / 0.16).epsilon(5e-4));
  ProblemSpec heavy = spec;
  heavy.m = PiecewiseField::constant(2.0);
  CHECK(alpha_upper_bound(heavy) == doctest::Approx(0.5 * alpha_upper_bound(spec)).epsilon(1e-9));
}

TEST_CASE("eigenvalue increases with alpha and each record satisfies the energy bounds") {
  const ProblemSpec spec = test::coarse_spec(400);
  const Thresholds t = compute_thresholds(spec);
  const AlphaSweep sweep = run_alpha_sweep(spec, alpha_ladder(t.lambda_star, 5, 4.0));
  REQUIRE(sweep.records.size() == 7);
  CHECK(sweep.records.front().lambda == doctest::Approx(t.lambda_star).epsilon(1e-6));
  for (std::size_t i = 1; i < sweep.records.size(); ++i) CHECK(sweep.records[i].lambda > sweep.records[i - 1].lambda);
  for (const auto& r : sweep.records) {
    CHECK(r.normalization == doctest::Approx(1.0));
    CHECK(check_alpha_bounds(r, spec).all_passed());
    CHECK(r.lambda < alpha_upper_bound(spec));
  }
  CHECK(sweep.limit.branch == Trichotomy::refuge1);
}

TEST_CASE("symmetric permeabilities give the unit factor in the energy bounds") {
  ProblemSpec spec = test::coarse_spec(300);
  spec.gamma2 = spec.gamma1;
  const AlphaRecord r = alpha_record(spec, make_grid(spec.domain), 50.0);
  CHECK(check_alpha_bounds(r, spec).all_passed());
  CHECK(r.gradient_norm_sq <= 1.05 * r.lambda);
}

TEST_CASE("alpha sweep rejects unordered or negative ladders") {
  const ProblemSpec spec = test::coarse_spec(100);
  CHECK_THROWS_AS(run_alpha_sweep(spec, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(run_alpha_sweep(spec, {-1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(run_alpha_sweep(spec, {}), std::invalid_argument);
}
