#include "refugia/experiments.hpp"
#include "refugia/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace refugia;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("refugia_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cells print round-trip doubles, integers, booleans and quoted strings") {
  CHECK(Cell(0.1).text() == "0.10000000000000001");
  CHECK(std::stod(Cell(1.0 / 3.0).text()) == 1.0 / 3.0);
  CHECK(Cell(42).text() == "42");
  CHECK(Cell(std::size_t{7}).text() == "7");
  CHECK(Cell(true).text() == "true");
  CHECK(Cell("plain").text() == "plain");
  CHECK(Cell("a,b").text() == "\"a,b\"");
  CHECK(Cell("say \"hi\"").text() == "\"say \"\"hi\"\"\"");
}

TEST_CASE("tables write a header and reject ragged rows") {
  CsvTable t({"x", "y"});
  t.add_row({1, 2.5});
  t.add_row({"k", false});
  CHECK(t.rows() == 2);
  CHECK(t.str() == "x,y\n1,2.5\nk,false\n");
  CHECK_THROWS_AS(t.add_row({1}), std::invalid_argument);
  CHECK_THROWS_AS(CsvTable({}), std::invalid_argument);
}

TEST_CASE("SHA-256 matches the published test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("SVG output is a single document with one polyline per series") {
  const std::string svg = render_svg({"t<1>", "x", "y", true, true},
                                     {{"a", {1, 10, 100}, {1, 2, 3}}, {"b", {1, 10}, {0.0, 5.0}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("t&lt;1&gt;") != std::string::npos);
  std::size_t count = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
  CHECK(count == 2);
}

TEST_CASE("artifact writer records hashes and writes a manifest") {
  const auto dir = scratch("writer");
  ArtifactWriter w(dir);
  w.write_text("a.txt", "abc");
  CsvTable t({"v"});
  t.add_row({1});
  w.write_csv("sub/t.csv", t);
  w.write_manifest();
  CHECK(slurp(dir / "a.txt") == "abc");
  CHECK(slurp(dir / "sub/t.csv") == "v\n1\n");
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest == sha256_hex("abc") + " a.txt\n" + sha256_hex("v\n1\n") + " sub/t.csv\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiments reject unknown names and write identical bytes on repeat") {
  const Config config = [] {
    Config c;
    c.set("n1", "200");
    c.set("n2", "200");
    return c;
  }();
  const auto dir = scratch("experiments");
  ArtifactWriter w(dir);
  CHECK_THROWS_AS(run_experiment("nonsense", config, {}, w), ConfigError);

  const ExperimentResult a = run_experiment("eigen-properties", config, {3, false}, w, "first");
  const ExperimentResult b = run_experiment("eigen-properties", config, {3, false}, w, "second");
  CHECK(a.report.all_passed());
  CHECK(slurp(dir / "first/checks.csv") == slurp(dir / "second/checks.csv"));
  const ExperimentResult c = run_experiment("eigen-properties", config, {4, false}, w, "third");
  CHECK(slurp(dir / "first/checks.csv") != slurp(dir / "third/checks.csv"));

  run_experiment("thresholds", config, {}, w, "t");
  const std::string thresholds = slurp(dir / "t/thresholds.csv");
  CHECK(thresholds.rfind("quantity,value\nlambda_star,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("preset geometry copies only the refuge keys") {
  Config c;
  c.set("p", "3");
  const Config g = with_preset_geometry(c, "refuge2");
  CHECK(g.get("p") == "3");
  CHECK(g.get("refuge2_lo") == "1.2");
  CHECK(g.get("refuge1_lo") == "0.4");
}
