#pragma once

#include <string>
#include <vector>

#include "curvkit/config.hpp"
#include "curvkit/kleinian.hpp"
#include "curvkit/report.hpp"

namespace curvkit {

std::vector<std::string> suite_names();
// Check groups of one suite, or of every suite.
std::vector<std::string> check_groups(const std::string& suite);
std::vector<std::string> all_check_groups();
// Every record id a suite can emit.
std::vector<std::string> known_check_ids();

// "translation:<axis>:<length>" or "rotation:<i>:<j>:<angle>" in H^dim.
LorentzIsometry parse_generator(const std::string& text, int dim);
// The configured group: generators, max_length, free flag set.
GroupSpec kleinian_spec(const SuiteConfig& config);

// Resolutions used under --fast: coarser grids and fewer samples where the
// checks tolerate them.
SuiteConfig fast_variant(const SuiteConfig& config);

// Runs the suite's check groups (filtered by config.checks). A group that
// throws yields failed records for its ids; the suite continues.
SuiteReport run_suite(const std::string& name, const SuiteConfig& config);
// "all" or one suite name; records wall time per suite and the seeds.
VerificationReport run_suites(const std::string& which, const SuiteConfig& config);

}  // namespace curvkit
