#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wnlab/cli_reports.hpp"

using namespace wnlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("wnlab-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing and fallbacks") {
  const auto cfg = RunConfig::parse(
      "# comment\n"
      "seed = 7\n"
      "[general]\n"
      "algebra = su2  ; trailing\n"
      "n_max = 3\n"
      "[commutant]\n"
      "n_max = 5\n"
      "[tolerances]\n"
      "cocycle = 1e-9\n");
  CHECK(cfg.seed == 7);
  CHECK(cfg.get_int("commutant", "n_max", 0) == 5);
  CHECK(cfg.get_int("energy-rep", "n_max", 0) == 3);
  CHECK(cfg.get_int("kernels", "i_geo", 0) == 1);
  CHECK(cfg.get_int("commutant", "n_grid", 0) == 9);
  CHECK(cfg.tol("cocycle", 1.0) == doctest::Approx(1e-9));
  CHECK(cfg.tol("other", 0.5) == 0.5);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(RunConfig::parse("[fock]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[fock\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("n_max\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("seed = x\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/wnlab.ini"), ConfigError);
  for (const char* text : {"n_max = 1\n", "[energy-rep]\nn_grid = 5\n", "algebra = so5\n",
                           "[tolerances]\nx = 0\n", "[commutant]\ndirections = some\n",
                           "report_format = xml\n", "[one-particle]\ni_geo = 0\n"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(RunConfig::parse(text).validate(), ConfigError);
  }
}

TEST_CASE("config hash covers results, not paths") {
  const auto a = RunConfig::defaults();
  auto b = RunConfig::parse("report_dir = elsewhere\ncache_dir = none\n");
  CHECK(a.hash() == b.hash());
  b.seed = 3;
  CHECK(a.hash() != b.hash());
  auto c = RunConfig::parse("[commutant]\nmax_k = 1\n");
  CHECK(a.hash() != c.hash());
  auto d = a;
  d.negative_control = true;
  CHECK(a.hash() != d.hash());
  CHECK(run_id(a, "fock") == "fock-" + hex64(a.hash()));
}

TEST_CASE("reports are byte-identical across runs and render") {
  const auto dir = scratch("reports");
  auto cfg = RunConfig::parse("report_dir = " + dir.string() + "\n");
  std::vector<SuiteResult> r1 = {run_suite("algebra", cfg), run_suite("one-particle", cfg)};
  const std::string id = write_reports(cfg, "pair", r1);
  const std::string j1 = slurp(dir / (id + ".json")), c1 = slurp(dir / (id + ".csv"));
  std::vector<SuiteResult> r2 = {run_suite("algebra", cfg), run_suite("one-particle", cfg)};
  write_reports(cfg, "pair", r2);
  CHECK(j1 == slurp(dir / (id + ".json")));
  CHECK(c1 == slurp(dir / (id + ".csv")));
  CHECK(!c1.empty());

  const std::string table = render_report(dir.string(), id);
  CHECK(table.find("0 FAIL row(s)") != std::string::npos);
  CHECK_THROWS_AS(render_report(dir.string(), "missing"), std::runtime_error);
  CHECK_THROWS_AS(run_suite("nosuch", cfg), std::invalid_argument);
}

TEST_CASE("negative control produces failing rows") {
  const auto dir = scratch("negative");
  auto cfg = RunConfig::parse("report_dir = " + dir.string() + "\n");
  cfg.negative_control = true;
  for (const std::string s : {"algebra", "one-particle", "fock", "kernels", "energy-rep"}) {
    CAPTURE(s);
    CHECK_FALSE(run_suite(s, cfg).pass());
  }
  const std::string id = write_reports(cfg, "algebra", {run_suite("algebra", cfg)});
  CHECK(render_report(dir.string(), id).find("0 FAIL row(s)") == std::string::npos);
}

TEST_CASE("different seeds change sampled values but not verdicts") {
  auto a = RunConfig::defaults();
  auto b = a;
  b.seed = a.seed + 1;
  const auto ra = run_suite("one-particle", a), rb = run_suite("one-particle", b);
  CHECK(ra.pass());
  CHECK(rb.pass());
  CHECK(ra.rows[1].value != rb.rows[1].value);
}
