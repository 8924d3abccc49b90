#include "refugia/config.hpp"
#include "refugia/domain.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace refugia;

TEST_CASE("interval distance snaps round-off onto the ends") {
  const Interval r{0.2, 0.6};
  CHECK(r.contains(0.2));
  CHECK(r.contains(0.6 + 1e-15));
  CHECK_FALSE(r.contains(0.61));
  CHECK(r.distance(0.1) == doctest::Approx(0.1));
  CHECK(r.distance(0.7) == doctest::Approx(0.1));
}

TEST_CASE("grid shares the membrane coordinate and drops the zero wall from the unknowns") {
  const Domain1D d{0.0, 1.0, 2.0, 10, 20};
  const Grid g = make_grid(d);
  CHECK(g.x1.size() == 11);
  CHECK(g.x2.size() == 21);
  CHECK(g.x1(10) == 1.0);
  CHECK(g.x2(0) == 1.0);
  CHECK(g.h1 == doctest::Approx(0.1));
  CHECK(g.h2 == doctest::Approx(0.05));
  CHECK(g.unknowns() == 31);

  NodalPair nodal{Vector::LinSpaced(11, 0, 10), Vector::Constant(21, 7.0)};
  const Vector u = to_unknowns(nodal);
  CHECK(u.size() == 31);
  const NodalPair back = to_nodal(g, u);
  CHECK(back.u1 == nodal.u1);
  CHECK(back.u2(0) == 7.0);
  CHECK(back.u2(20) == 0.0);
  CHECK_THROWS_AS(to_nodal(g, Vector::Zero(5)), std::invalid_argument);
}

TEST_CASE("crowding profiles vanish exactly on the closed refuges and reach the amplitude") {
  const RefugeSpec r;
  for (const auto& a : {crowding_ramp(r, 100, 0.05, 0.5), crowding_bump(r, 100, 0.05), crowding_step(r, 100)}) {
    CHECK(a.eval1(0.2) == 0.0);
    CHECK(a.eval1(0.4) == 0.0);
    CHECK(a.eval1(0.6) == 0.0);
    CHECK(a.eval2(1.5) == 0.0);
    CHECK(a.eval1(0.9) == doctest::Approx(100));
    CHECK(a.eval2(1.9) == doctest::Approx(100));
    CHECK(a.eval1(0.62) > 0.0);
  }
  const auto ramp = crowding_ramp(r, 100, 0.05, 0.5);
  CHECK(ramp.eval1(0.6 + 0.0125) == doctest::Approx(50.0));
}

TEST_CASE("spec validation rejects bad geometry and parameters") {
  ProblemSpec s = test::coarse_spec();
  CHECK_NOTHROW(s.validate());
  ProblemSpec bad = s;
  bad.gamma1 = 4.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.p = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.refuges.refuge1 = {0.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.domain.n2 = 4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config parsing applies the preset first and later keys on top") {
  std::istringstream in("# comment\np = 4\npreset = blowup\n n1 = 300 # trailing\n");
  const Config c = Config::parse(in);
  CHECK(c.get("p") == "4");
  CHECK(c.get("preset") == "blowup");
  CHECK(c.integer("n1") == 300);

  Config d;
  d.apply_override("preset=both");
  CHECK(d.get("refuge1_lo") == "0.3");
  d.apply_override("preset=blowup");
  CHECK(d.get("p") == "3");
  CHECK(d.get("refuge1_lo") == "0.3");
}

TEST_CASE("config errors are reported as ConfigError") {
  Config c;
  CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("p", ""), ConfigError);
  CHECK_THROWS_AS(c.apply_override("p"), ConfigError);
  CHECK_THROWS_AS(c.apply_override("preset=nowhere"), ConfigError);
  c.set("p", "two");
  CHECK_THROWS_AS(c.number("p"), ConfigError);
  CHECK_THROWS_AS(make_problem(c), ConfigError);
  std::istringstream in("p 2\n");
  CHECK_THROWS_AS(Config::parse(in), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.conf"), ConfigError);
  Config e;
  e.set("epsilon", "0");
  CHECK_THROWS_AS(make_settings(e), ConfigError);
}

TEST_CASE("canonical form is sorted and stable") {
  Config a;
  Config b;
  b.set("p", "2");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.canonical().rfind("a=ramp\n", 0) == 0);
}
