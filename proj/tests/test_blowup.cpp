#include "refugia/blowup.hpp"
#include "refugia/steady.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace refugia;

namespace {

struct Fixture {
  ProblemSpec spec = test::coarse_spec(200, {{"p", "3"}});
  Grid grid = make_grid(spec.domain);
  Thresholds t = compute_thresholds(spec);
};

}  // namespace

TEST_CASE("blow-up ladder halves the distance to the grid refuge eigenvalue") {
  Thresholds t;
  t.lambda_star = 1.0;
  t.grid_lambda_m1 = 9.0;
  t.grid_lambda_m2 = 20.0;
  const auto l = blowup_ladder(t, 3);
  REQUIRE(l.size() == 3);
  CHECK(l[0] == doctest::Approx(5.0));
  CHECK(l[1] == doctest::Approx(7.0));
  CHECK(l[2] == doctest::Approx(8.0));
}

TEST_CASE("k ladder is geometric from one") {
  const auto k = k_ladder(3);
  REQUIRE(k.size() == 4);
  CHECK(k[0] == 1.0);
  CHECK(k[3] == 8.0);
}

TEST_CASE("far-set mask keeps nodes at least epsilon from the refuge") {
  const Fixture f;
  const auto mask = away_from_refuge_mask(f.spec, f.grid, 1, 0.05);
  const Vector x = unknown_coordinates(f.grid);
  const Index n1 = f.grid.x1.size();
  for (Index i = 0; i < n1; ++i) {
    const double d = f.spec.refuges.refuge1.distance(x(i));
    CHECK(mask[static_cast<std::size_t>(i)] == (d >= 0.05 - 1e-12));
  }
  for (Index i = n1; i < x.size(); ++i) CHECK_FALSE(mask[static_cast<std::size_t>(i)]);
}

TEST_CASE("short blow-up sweep grows on refuge 1 and stays bounded elsewhere") {
  const Fixture f;
  const BlowupSweep s = blowup_sweep(f.spec, blowup_ladder(f.t, 6), 0.05);
  REQUIRE_FALSE(s.failed_lambda.has_value());
  REQUIRE(s.records.size() == 6);
  for (std::size_t i = 1; i < s.records.size(); ++i) {
    CHECK(s.records[i].refuge1_min_u1 > s.records[i - 1].refuge1_min_u1);
    CHECK(s.records[i].ratio > s.records[i - 1].ratio);
  }
  for (const auto& r : s.records) {
    CHECK(r.apriori.passed);
    CHECK(r.sup_u2 <= s.u2_bound * (1.0 + 1e-9));
  }
  CHECK_THROWS_AS(blowup_sweep(f.spec, {f.t.lambda_star * 0.5}, 0.05), std::invalid_argument);
}

TEST_CASE("exterior solutions hold k on refuge 1 and increase with k") {
  const Fixture f;
  const double lambda = f.t.grid_lambda_infinity();
  const ExteriorState e1 = exterior_solve(f.spec, f.grid, f.t, lambda, 1.0);
  const ExteriorState e4 = exterior_solve(f.spec, f.grid, f.t, lambda, 4.0, &e1.u);
  const auto refuge = refuge_node_mask(f.spec, f.grid, 1);
  for (Index i = 0; i < e1.u.size(); ++i)
    if (refuge[static_cast<std::size_t>(i)]) {
      CHECK(e1.u(i) == 1.0);
      CHECK(e4.u(i) == 4.0);
    }
  CHECK((e4.u - e1.u).minCoeff() >= -1e-10);
  CHECK(e1.u.minCoeff() >= 0.0);

  const ExteriorState slow = exterior_solve_monotone(f.spec, f.grid, f.t, lambda, 1.0);
  CHECK((slow.u - e1.u).cwiseAbs().maxCoeff() <= 1e-7 * (1.0 + e1.u.maxCoeff()));

  CHECK_THROWS_AS(exterior_solve(f.spec, f.grid, f.t, 0.5 * f.t.lambda_star, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(exterior_solve(f.spec, f.grid, f.t, lambda, -1.0), std::invalid_argument);
}

TEST_CASE("large-solution ladder is ordered and its steps contract") {
  const Fixture f;
  const LargeSolutionLadder l = minimal_large_solution(f.spec, f.t.grid_lambda_infinity(), k_ladder(8), 0.05);
  REQUIRE(l.states.size() == 9);
  for (std::size_t j = 1; j < l.states.size(); ++j) CHECK(l.order_violation[j] <= 1e-9);
  CHECK(l.contraction > 0.0);
  CHECK(l.contraction < 1.0);
  CHECK((l.minimal - l.states.back().u).minCoeff() >= -1e-12);
}
