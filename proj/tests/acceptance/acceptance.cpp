// Runs acceptance criteria 1-9 and prints one verdict line per criterion.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "mmflow/suite.hpp"

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  bool ok = true;
  for (const mmflow::CriterionResult& c : mmflow::run_acceptance({}, which)) {
    std::printf("criterion %d %s: %s (%s) [%.2fs]\n", c.id, c.pass() ? "PASS" : "FAIL", c.title.c_str(),
                c.summary.c_str(), c.report.wall_time);
    if (!c.pass()) {
      for (const mmflow::Check& k : c.report.checks)
        if (!k.pass)
          std::printf("    failed %s: value %.6g, bound %.6g, tolerance %.3g\n", k.id.c_str(), k.value, k.bound,
                      k.tolerance);
    }
    ok = ok && c.pass();
  }
  return ok ? 0 : 1;
}
