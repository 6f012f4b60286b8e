#pragma once

#include <map>
#include <string>
#include <vector>

namespace mmflow {

/// One verified inequality: pass iff value <= bound + tolerance.
struct Check {
  std::string id;
  std::string anchor;  // which statement the check exercises
  double value = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string suite;
  std::vector<Check> checks;
  std::map<std::string, std::string> environment;
  double wall_time = 0.0;

  /// Adds a check and returns its verdict.
  bool add(std::string id, std::string anchor, double value, double bound, double tolerance);
  /// Informational record: stored with pass = true and infinite bound.
  void note(std::string id, std::string anchor, double value);
  void merge(const VerificationReport& other, const std::string& prefix = "");
  bool all_pass() const;
  /// Sorts checks by id (stable), for deterministic output.
  void sort();
};

/// 17 significant digits, so the value reads back bit-exactly.
std::string format_double(double v);

}  // namespace mmflow
