#pragma once

#include <string>
#include <vector>

#include "mmflow/config.hpp"
#include "mmflow/report.hpp"

namespace mmflow {

/// One acceptance criterion: its checks and a one-line summary.
struct CriterionResult {
  int id = 0;
  std::string title;
  std::string summary;
  VerificationReport report;

  bool pass() const { return report.all_pass(); }
};

/// Runs the acceptance criteria listed in `which` (1..9; empty means all).
std::vector<CriterionResult> run_acceptance(const Config& config = {}, const std::vector<int>& which = {});

/// Merges criterion reports into one, check ids prefixed with "c<id>.".
VerificationReport merge_criteria(const std::vector<CriterionResult>& results);

}  // namespace mmflow
