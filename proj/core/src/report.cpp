#include "mmflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mmflow {

bool VerificationReport::add(std::string id, std::string anchor, double value, double bound,
                             double tolerance) {
  Check c{std::move(id), std::move(anchor), value, bound, tolerance, false};
  c.pass = std::isfinite(value) ? value <= bound + tolerance : (value < 0.0 && !std::isnan(value));
  checks.push_back(c);
  return c.pass;
}

void VerificationReport::note(std::string id, std::string anchor, double value) {
  checks.push_back({std::move(id), std::move(anchor), value,
                    std::numeric_limits<double>::infinity(), 0.0, true});
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix) {
  for (Check c : other.checks) {
    c.id = prefix + c.id;
    checks.push_back(std::move(c));
  }
  for (const auto& [k, v] : other.environment) environment.emplace(prefix + k, v);
  wall_time += other.wall_time;
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void VerificationReport::sort() {
  std::stable_sort(checks.begin(), checks.end(),
                   [](const Check& a, const Check& b) { return a.id < b.id; });
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace mmflow
