// Runs each acceptance criterion at default resolution on one thread and
// prints one line per criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "curvkit/parallel.hpp"
#include "curvkit/suites.hpp"

using namespace curvkit;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::string suite;
  std::vector<std::string> groups;
  double budget_seconds;
};

const std::vector<Criterion> kCriteria = {
    {1, "GBC-4D on the round S4", "gbc", {"gbc4/S4"}, 60},
    {2, "GBC-4D on S2xS2", "gbc", {"gbc4/S2xS2"}, 120},
    {3, "GBC-6D on the round S6", "gbc", {"gbc6/S6"}, 600},
    {4, "hyperbolic identity on H4", "tensors", {"hyperbolic/identity216"}, 5},
    {5, "conformal scalar curvature law", "conformal", {"conformal/ncsc"}, 60},
    {6, "O'Neill formula and epsilon slope", "oneill", {"oneill"}, 30},
    {7, "stereographic image of S4 minus S1", "stereographic", {"stereographic/subsphere"}, 10},
    {8, "Gray volume expansion on S4 and H4", "expansion", {"gray/S4", "gray/H4"}, 300},
    {9, "sharp Sobolev inequality on S4", "sobolev", {"sobolev"}, 120},
    {10, "Yamabe descent on S4", "yamabe_descent", {"yamabe/S4"}, 300},
    {11, "critical exponent vs limit set dimension", "kleinian", {"delta/schottky"}, 600},
    {12, "cyclic group sanity", "kleinian", {"delta/cyclic"}, 30},
    {13, "tensor property suites", "tensors",
     {"tensors/catalog", "tensors/chart_independence", "tensors/homothety", "tensors/weyl"}, 300},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));
  set_thread_cap(1);
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
    SuiteConfig config;
    config.threads = 1;
    config.checks = c.groups;
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteReport report = run_suite(c.suite, config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool checks_ok = !report.checks.empty() && report.failed() == 0;
    const bool ok = checks_ok && seconds <= c.budget_seconds;
    if (!ok) ++failures;
    std::printf("%s  %2d  %-42s %3d/%-3zu checks  %8.2f s / %4.0f s\n", ok ? "PASS" : "FAIL", c.number, c.title.c_str(),
                report.passed(), report.checks.size(), seconds, c.budget_seconds);
    for (const CheckRecord& r : report.checks)
      if (!r.pass)
        std::printf("        %s: computed %.17g expected %.17g abs %.3g rel %.3g %s\n", r.id.c_str(), r.computed,
                    r.expected, r.abs_err, r.rel_err, r.note.c_str());
    std::fflush(stdout);
  }
  return failures;
}
