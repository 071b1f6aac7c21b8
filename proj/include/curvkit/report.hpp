#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace curvkit {

inline constexpr const char* kReportSchema = "curvkit-report/1";
inline constexpr const char* kVersion = "0.1.0";

// One verified quantity. pass == (abs_err <= tol_abs || rel_err <= tol_rel).
struct CheckRecord {
  std::string id;
  std::string anchor;
  double computed = 0.0;
  double expected = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tol_abs = 0.0;
  double tol_rel = 0.0;
  bool pass = false;
  std::string note;  // error message when the check could not run
};

// Fills the errors and the verdict.
CheckRecord make_check(std::string id, std::string anchor, double computed, double expected, double tol_abs,
                       double tol_rel);
// Failed record for a check whose computation threw.
CheckRecord failed_check(std::string id, std::string anchor, const std::string& message);
// Recomputes the verdict after a tolerance change.
void apply_tolerance(CheckRecord& r, double tol_abs, double tol_rel);

struct SuiteReport {
  std::string name;
  bool fast = false;
  std::vector<CheckRecord> checks;
  int passed() const;
  int failed() const;
};

struct Environment {
  std::string version = kVersion;
  int threads = 1;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, double> seconds;  // wall time per suite
};

struct VerificationReport {
  std::string schema = kReportSchema;
  std::vector<SuiteReport> suites;
  Environment environment;
  bool all_pass() const;
  std::size_t check_count() const;
};

enum class ReportFormat { json, csv };

std::string report_json(const VerificationReport& report);
// Header plus one row per check; floats with 17 significant digits.
std::string report_csv(const VerificationReport& report);
VerificationReport parse_report_json(const std::string& text);
// Throws Error on I/O failure.
void emit_report(const VerificationReport& report, ReportFormat format, const std::string& path);

}  // namespace curvkit
