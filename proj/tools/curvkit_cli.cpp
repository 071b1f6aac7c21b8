// curvkit command line: verification suites, critical exponents, volume tables.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvkit/catalog.hpp"
#include "curvkit/config.hpp"
#include "curvkit/error.hpp"
#include "curvkit/geodesy.hpp"
#include "curvkit/kleinian.hpp"
#include "curvkit/parallel.hpp"
#include "curvkit/report.hpp"
#include "curvkit/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

using namespace curvkit;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw InvalidArgument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int verify(const std::string& suite, const std::string& config_path, bool fast, int threads, const std::string& out,
           const std::string& format) {
  SuiteConfig config;
  try {
    if (!config_path.empty()) config = parse_config_file(config_path);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  if (suite != "all") {
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
      std::cerr << "unknown suite '" << suite << "'\n";
      return kExitConfig;
    }
  }
  if (fast || config.fast) config = fast_variant(config);
  if (threads > 0) config.threads = threads;
  if (!out.empty()) config.output = out;
  if (!format.empty()) config.format = format;
  const VerificationReport report = run_suites(suite, config);
  try {
    emit_report(report, config.format == "csv" ? ReportFormat::csv : ReportFormat::json, config.output);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitFail;
  }
  for (const auto& s : report.suites)
    for (const auto& c : s.checks)
      if (!c.pass) std::cerr << "FAIL " << c.id << ": computed " << c.computed << ", expected " << c.expected
                             << (c.note.empty() ? "" : " (" + c.note + ")") << "\n";
  return report.all_pass() ? kExitPass : kExitFail;
}

int kleinian_estimate(const std::string& config_path, const std::string& points_path) {
  SuiteConfig config;
  GroupSpec spec;
  try {
    config = parse_config_file(config_path);
    spec = kleinian_spec(config);
    validate_spec(spec);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  if (config.threads > 0) set_thread_cap(config.threads);
  nlohmann::json out;
  try {
    const OrbitSample orbit = orbit_enumerate(spec);
    out["orbit_points"] = orbit.size();
    out["truncated"] = orbit.truncated;
    for (auto [name, method] : {std::pair{"growth_fit", ExponentMethod::growth_fit},
                                std::pair{"series_knee", ExponentMethod::series_knee}}) {
      const ExponentEstimate e = critical_exponent_estimate(orbit, method);
      out[name] = {{"value", e.value}, {"uncertainty", e.uncertainty}};
    }
    const LimitSetSample ls = limit_set_sample(spec, config.kleinian_word_length, config.kleinian_points, config.seed);
    out["elementary"] = is_elementary(ls.points);
    out["skipped_words"] = ls.skipped;
    if (!is_elementary(ls.points)) {
      const DimensionEstimate d = box_dimension(ls.points, automatic_ladder(ls.points));
      out["box_dimension"] = {{"value", d.value}, {"fit_error", d.fit_error}, {"scales", d.scales}, {"counts", d.counts}};
    }
    if (!points_path.empty()) {
      std::ofstream f(points_path);
      if (!f) throw Error("cannot open " + points_path);
      f.precision(17);
      for (int i = 0; i < config.kleinian_dim; ++i) f << (i ? "," : "") << "x" << i;
      f << "\n";
      for (const auto& p : ls.points) {
        for (Eigen::Index i = 0; i < p.size(); ++i) f << (i ? "," : "") << p[i];
        f << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitFail;
  }
  std::cout << out.dump(2) << "\n";
  return kExitPass;
}

int expansion_table(const std::string& metric, const std::string& radii_text, int radial, int angular) {
  MetricChart chart;
  std::vector<double> radii;
  try {
    chart = named_metric(metric);
    radii = parse_list(radii_text);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  VolumeOptions opt;
  opt.radial_nodes = radial;
  opt.angular_nodes = angular;
  const std::vector<double> x(chart.dim(), 0.0);
  try {
    const auto rows = expansion_compare(chart, x, radii, opt);
    std::printf("r,ball_volume,gray_expansion,diff_over_r6,ratio\n");
    for (const auto& row : rows) std::printf("%.17g,%.17g,%.17g,%.17g,%.17g\n", row.r, row.ball, row.gray, row.raw_ratio, row.ratio);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitFail;
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvkit: curvature and conformal geometry verification"};
  app.require_subcommand(1);

  std::string suite, config_path, out, format;
  bool fast = false;
  int threads = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites and emit a report");
  verify_cmd->add_option("suite", suite, "Suite name or 'all'")->required();
  verify_cmd->add_option("--config", config_path, "Configuration file ('-' for stdin)");
  verify_cmd->add_flag("--fast", fast, "Reduced resolutions");
  verify_cmd->add_option("--threads", threads, "Worker cap (default: CURVKIT_THREADS or all cores)")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--out", out, "Report path (stdout by default)");
  verify_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* kleinian_cmd = app.add_subcommand("kleinian", "Kleinian group tools");
  kleinian_cmd->require_subcommand(1);
  std::string kconfig, points;
  auto* estimate_cmd = kleinian_cmd->add_subcommand("estimate", "Critical exponent and limit set dimension");
  estimate_cmd->add_option("--config", kconfig, "Configuration file")->required();
  estimate_cmd->add_option("--points", points, "Write the limit-set sample as CSV");

  auto* expansion_cmd = app.add_subcommand("expansion", "Geodesic ball volumes");
  expansion_cmd->require_subcommand(1);
  std::string metric, radii;
  int radial = 12, angular = 12;
  auto* table_cmd = expansion_cmd->add_subcommand("table", "Ball volume against the curvature expansion");
  table_cmd->add_option("--metric", metric, "Metric name, e.g. S4, H4")->required();
  table_cmd->add_option("--radii", radii, "Comma separated radii")->required();
  table_cmd->add_option("--radial-nodes", radial)->check(CLI::PositiveNumber);
  table_cmd->add_option("--angular-nodes", angular)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  if (*verify_cmd) return verify(suite, config_path, fast, threads, out, format);
  if (*estimate_cmd) return kleinian_estimate(kconfig, points);
  if (*table_cmd) return expansion_table(metric, radii, radial, angular);
  return kExitConfig;
}
