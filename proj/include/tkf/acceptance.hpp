#pragma once

#include <string>
#include <vector>

namespace tkf {

// One end-to-end validation criterion: pass/fail with a human-readable
// detail line containing the measured quantities and the pinned tolerance.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int threads = 0;          // 0 = hardware concurrency
  std::string cli_path;     // path to the tkf91 binary for the CLI criterion
  std::string work_dir;     // scratch dir for CLI output files
};

// Runs every validation criterion in order; never throws on a criterion
// failure (failures are reported in the result rows).
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

}  // namespace tkf
