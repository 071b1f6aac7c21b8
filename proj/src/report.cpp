#include "curvkit/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "curvkit/error.hpp"

namespace curvkit {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CheckRecord make_check(std::string id, std::string anchor, double computed, double expected, double tol_abs,
                       double tol_rel) {
  CheckRecord r;
  r.id = std::move(id);
  r.anchor = std::move(anchor);
  r.computed = computed;
  r.expected = expected;
  r.abs_err = std::abs(computed - expected);
  r.rel_err = expected != 0.0 ? r.abs_err / std::abs(expected) : (r.abs_err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  apply_tolerance(r, tol_abs, tol_rel);
  return r;
}

CheckRecord failed_check(std::string id, std::string anchor, const std::string& message) {
  CheckRecord r;
  r.id = std::move(id);
  r.anchor = std::move(anchor);
  r.computed = r.abs_err = r.rel_err = std::numeric_limits<double>::quiet_NaN();
  r.note = message;
  r.pass = false;
  return r;
}

void apply_tolerance(CheckRecord& r, double tol_abs, double tol_rel) {
  r.tol_abs = tol_abs;
  r.tol_rel = tol_rel;
  r.pass = r.note.empty() && (r.abs_err <= tol_abs || r.rel_err <= tol_rel);
}

int SuiteReport::passed() const {
  int n = 0;
  for (const auto& c : checks) n += c.pass;
  return n;
}

int SuiteReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

bool VerificationReport::all_pass() const {
  for (const auto& s : suites)
    if (s.failed() > 0) return false;
  return true;
}

std::size_t VerificationReport::check_count() const {
  std::size_t n = 0;
  for (const auto& s : suites) n += s.checks.size();
  return n;
}

std::string report_json(const VerificationReport& report) {
  json root;
  root["schema"] = report.schema;
  root["suites"] = json::array();
  for (const auto& s : report.suites) {
    json js;
    js["name"] = s.name;
    js["fast"] = s.fast;
    js["passed"] = s.passed();
    js["failed"] = s.failed();
    js["checks"] = json::array();
    for (const auto& c : s.checks) {
      json jc;
      jc["id"] = c.id;
      jc["anchor"] = c.anchor;
      jc["computed"] = number(c.computed);
      jc["expected"] = number(c.expected);
      jc["abs_err"] = number(c.abs_err);
      jc["rel_err"] = number(c.rel_err);
      jc["tolerance"] = {{"abs", number(c.tol_abs)}, {"rel", number(c.tol_rel)}};
      jc["pass"] = c.pass;
      if (!c.note.empty()) jc["note"] = c.note;
      js["checks"].push_back(std::move(jc));
    }
    root["suites"].push_back(std::move(js));
  }
  json env;
  env["version"] = report.environment.version;
  env["threads"] = report.environment.threads;
  env["seeds"] = report.environment.seeds;
  env["seconds"] = report.environment.seconds;
  root["environment"] = env;
  root["all_pass"] = report.all_pass();
  return root.dump(2) + "\n";
}

std::string report_csv(const VerificationReport& report) {
  std::ostringstream os;
  os << "suite,id,anchor,computed,expected,abs_err,rel_err,tol_abs,tol_rel,pass,note\n";
  for (const auto& s : report.suites)
    for (const auto& c : s.checks)
      os << csv_field(s.name) << ',' << csv_field(c.id) << ',' << csv_field(c.anchor) << ',' << g17(c.computed) << ','
         << g17(c.expected) << ',' << g17(c.abs_err) << ',' << g17(c.rel_err) << ',' << g17(c.tol_abs) << ','
         << g17(c.tol_rel) << ',' << (c.pass ? "true" : "false") << ',' << csv_field(c.note) << '\n';
  return os.str();
}

VerificationReport parse_report_json(const std::string& text) {
  VerificationReport r;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("report: malformed JSON: ") + e.what());
  }
  r.schema = root.at("schema").get<std::string>();
  if (r.schema != kReportSchema) throw Error("report: unsupported schema " + r.schema);
  for (const auto& js : root.at("suites")) {
    SuiteReport s;
    s.name = js.at("name").get<std::string>();
    s.fast = js.at("fast").get<bool>();
    for (const auto& jc : js.at("checks")) {
      CheckRecord c;
      c.id = jc.at("id").get<std::string>();
      c.anchor = jc.at("anchor").get<std::string>();
      c.computed = read_number(jc.at("computed"));
      c.expected = read_number(jc.at("expected"));
      c.abs_err = read_number(jc.at("abs_err"));
      c.rel_err = read_number(jc.at("rel_err"));
      c.tol_abs = read_number(jc.at("tolerance").at("abs"));
      c.tol_rel = read_number(jc.at("tolerance").at("rel"));
      c.pass = jc.at("pass").get<bool>();
      if (jc.contains("note")) c.note = jc.at("note").get<std::string>();
      s.checks.push_back(std::move(c));
    }
    r.suites.push_back(std::move(s));
  }
  const json& env = root.at("environment");
  r.environment.version = env.at("version").get<std::string>();
  r.environment.threads = env.at("threads").get<int>();
  r.environment.seeds = env.at("seeds").get<std::map<std::string, std::uint64_t>>();
  r.environment.seconds = env.at("seconds").get<std::map<std::string, double>>();
  return r;
}

void emit_report(const VerificationReport& report, ReportFormat format, const std::string& path) {
  const std::string text = format == ReportFormat::json ? report_json(report) : report_csv(report);
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("report: cannot open " + path + " for writing");
  out << text;
  if (!out.flush()) throw Error("report: write to " + path + " failed");
}

}  // namespace curvkit
