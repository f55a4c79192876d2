// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria at full level
//   acceptance 3 7        run the listed criteria
//   acceptance --quick    reduced trial counts

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "scatterlab/validation.hpp"

int main(int argc, char** argv) {
  using namespace scatterlab::validation;
  Level level = Level::Full;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--quick") {
      level = Level::Quick;
    } else {
      ids.push_back(std::atoi(arg.c_str()));
    }
  }
  if (ids.empty()) {
    for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
  }
  int failed = 0;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, level);
    std::printf("%s\n", format(r).c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
