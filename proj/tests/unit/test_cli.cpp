#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "curvkit/config.hpp"
#include "curvkit/report.hpp"
#include "curvkit/suites.hpp"

using namespace curvkit;

namespace {

ConfigError config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no ConfigError for: " << text);
  return ConfigError(0, 0, "");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const SuiteConfig c = parse_config_text(
      "# resolution\n"
      "suite = kleinian\n"
      "fast = true\n"
      "  seed = 17   # trailing comment\n"
      "expansion.radii = 0.1, 0.2,0.4\n"
      "kleinian.generators = translation:0:4.5, rotation:0:1:0.3\n"
      "checks = delta/cyclic\n"
      "tol_abs.delta/cyclic = 0.01\n"
      "tol_rel.gbc4/S4 = 1e-6\n");
  CHECK(c.suite == "kleinian");
  CHECK(c.fast);
  CHECK(c.seed == 17);
  CHECK(c.expansion_radii == std::vector<double>{0.1, 0.2, 0.4});
  CHECK(c.kleinian_generators.size() == 2);
  CHECK(c.checks == std::vector<std::string>{"delta/cyclic"});
  CHECK(c.tolerances.at("delta/cyclic").abs == 0.01);
  CHECK_FALSE(c.tolerances.at("delta/cyclic").rel.has_value());
  CHECK(c.tolerances.at("gbc4/S4").rel == 1e-6);

  const SuiteConfig d = parse_config_text("");
  CHECK(d.suite == "all");
  CHECK(d.tensors_points == 100);
  CHECK_FALSE(config_keys().empty());
}

TEST_CASE("config errors carry positions") {
  const ConfigError unknown = config_error("seed = 3\n  gridd = 4\n");
  CHECK(unknown.line() == 2);
  CHECK(unknown.column() == 3);
  CHECK(std::string(unknown.what()).find("gridd") != std::string::npos);

  const ConfigError dup = config_error("seed = 3\nseed = 4\n");
  CHECK(dup.line() == 2);
  CHECK(dup.column() == 1);

  const ConfigError bad = config_error("threads = many\n");
  CHECK(bad.line() == 1);
  CHECK(bad.column() == 11);

  CHECK(config_error("fast = maybe\n").line() == 1);
  CHECK(config_error("suite\n").column() == 1);
  CHECK(config_error("seed =\n").line() == 1);
  CHECK(config_error("tol_abs.no/such = 1\n").column() == 9);
  CHECK(config_error("tol_rel.gbc4/S4 = -1\n").line() == 1);
  CHECK(config_error("kleinian.generators = spin:0:1\n").line() == 1);
  CHECK(config_error("tensors.points = 2.5\n").line() == 1);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/curvkit.cfg"), Error);
}

TEST_CASE("check records") {
  const CheckRecord r = make_check("x", "anchor", 1.05, 1.0, 0.0, 0.1);
  CHECK(r.abs_err == doctest::Approx(0.05));
  CHECK(r.rel_err == doctest::Approx(0.05));
  CHECK(r.pass);
  CheckRecord t = r;
  apply_tolerance(t, 0.01, 0.01);
  CHECK_FALSE(t.pass);
  apply_tolerance(t, 0.06, 0.0);
  CHECK(t.pass);
  CHECK_FALSE(make_check("y", "a", std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0, 1.0).pass);
  const CheckRecord f = failed_check("z", "a", "boom");
  CHECK_FALSE(f.pass);
  CHECK(f.note == "boom");
}

TEST_CASE("suite registry") {
  const auto names = suite_names();
  for (const char* s : {"tensors", "conformal", "gbc", "expansion", "oneill", "stereographic", "sobolev", "yamabe_descent",
                        "kleinian"})
    CHECK(std::find(names.begin(), names.end(), s) != names.end());
  const auto groups = all_check_groups();
  const auto ids = known_check_ids();
  CHECK(groups.size() >= names.size());
  CHECK(std::find(ids.begin(), ids.end(), "hyperbolic/identity216") != ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "delta/cyclic") != ids.end());

  // The fast variant only ever coarsens.
  const SuiteConfig base;
  const SuiteConfig fast = fast_variant(base);
  CHECK(fast.tensors_points <= base.tensors_points);
  CHECK(fast.kleinian_points <= base.kleinian_points);
  CHECK(fast.expansion_radial_nodes == base.expansion_radial_nodes);
}

TEST_CASE("run a suite with overrides") {
  SuiteConfig c;
  c.checks = {"delta/cyclic"};
  SuiteReport r = run_suite("kleinian", c);
  REQUIRE(r.checks.size() == 3);
  for (const auto& ch : r.checks) CHECK_MESSAGE(ch.pass, ch.id);

  c.tolerances["delta/cyclic"].abs = 0.0;
  r = run_suite("kleinian", c);
  const auto it = std::find_if(r.checks.begin(), r.checks.end(), [](const CheckRecord& x) { return x.id == "delta/cyclic"; });
  REQUIRE(it != r.checks.end());
  CHECK(it->tol_abs == 0.0);
  CHECK(it->computed > 0.0);
  CHECK_FALSE(it->pass);
  CHECK(r.failed() == 1);

  CHECK_THROWS(run_suite("nope", c));
}

TEST_CASE("report serialisation") {
  VerificationReport v;
  SuiteReport s;
  s.name = "demo";
  s.checks.push_back(make_check("a/b", "model check", 0.1 + 0.2, 0.3, 1e-12, 0.0));
  s.checks.push_back(make_check("a/c", "another", 1.0 / 3.0, 0.25, 1e-3, 1e-3));
  s.checks.push_back(failed_check("a/d", "broken", "threw"));
  v.suites.push_back(s);
  v.environment.threads = 2;
  v.environment.seeds["seed"] = 5;
  v.environment.seconds["demo"] = 0.125;
  CHECK_FALSE(v.all_pass());
  CHECK(v.check_count() == 3);

  const std::string text = report_json(v);
  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.at("schema") == kReportSchema);
  CHECK(j.at("suites").at(0).at("checks").at(0).at("anchor") == "model check");

  const VerificationReport back = parse_report_json(text);
  REQUIRE(back.suites.size() == 1);
  REQUIRE(back.suites[0].checks.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const CheckRecord &a = v.suites[0].checks[i], &b = back.suites[0].checks[i];
    CHECK(a.id == b.id);
    CHECK(a.anchor == b.anchor);
    CHECK((a.computed == b.computed || (std::isnan(a.computed) && std::isnan(b.computed))));
    CHECK(a.expected == b.expected);
    CHECK(a.pass == b.pass);
    CHECK(a.note == b.note);
  }
  CHECK(back.environment.seeds.at("seed") == 5);
  CHECK(report_json(back) == text);
  CHECK_THROWS(parse_report_json("{\"schema\": \"other/9\"}"));

  const std::string csv = report_csv(v);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("0.30000000000000004") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "curvkit_report_test";
  std::filesystem::create_directories(dir);
  emit_report(v, ReportFormat::json, (dir / "r.json").string());
  emit_report(v, ReportFormat::csv, (dir / "r.csv").string());
  CHECK(slurp(dir / "r.json") == text);
  CHECK(slurp(dir / "r.csv") == csv);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(emit_report(v, ReportFormat::json, "/nonexistent/dir/r.json"), Error);
}
