// SPDX-License-Identifier: MIT
/**
 * @file acceptance.hpp
 * @brief Self-verification suite: one entry per property or oracle check,
 * each reporting a measured value against a fixed budget.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace degenkernel {

struct CriterionInfo {
  int id;
  std::string key;    // filter token, e.g. "ck"
  std::string title;
};

struct CriterionResult {
  CriterionInfo info;
  bool pass = false;
  double measured = 0.0;  // worst value of the primary metric
  double budget = 0.0;
  std::string detail;     // secondary metrics; deterministic (no timings)
  double seconds = 0.0;   // wall time, reported only on request
};

struct AcceptanceOptions {
  /// Comma-separated ids or key substrings; empty runs everything.
  std::string filter;
  bool parallel = true;
  long mc_paths = 200000;
  double mc_dt = 1e-4;
  std::uint64_t seed = 1;
};

const std::vector<CriterionInfo>& acceptance_criteria();

bool criterion_selected(const CriterionInfo& c, const std::string& filter);

/// Runs the selected criteria in id order. Never throws for a numeric
/// failure; an exception inside a criterion marks it failed.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// One line per criterion, then a summary line. Timings appear only when
/// `with_timings` is set, so the default text is reproducible.
std::string acceptance_text(const std::vector<CriterionResult>& results, bool with_timings = false);
std::string acceptance_json(const std::vector<CriterionResult>& results, bool with_timings = false);

}  // namespace degenkernel
