#ifndef TWOSTEP_EXTERNAL_PLANNER_H_
#define TWOSTEP_EXTERNAL_PLANNER_H_

#include <filesystem>
#include <string>
#include <vector>

#include "twostep/planner.h"

namespace twostep {

struct ExternalPlannerConfig {
  std::filesystem::path binary;
  // Inserted between the binary and the input files, e.g.
  // {"--alias", "lama-first"}.
  std::vector<std::string> alias_args;
  // Base name of the plan file(s). Anytime planners write `sas_plan.1`,
  // `sas_plan.2`, ...; the highest-numbered file wins.
  std::string plan_file = "sas_plan";
  // Directory the planner runs in. A fresh temporary directory when empty.
  std::filesystem::path work_dir;
};

// Runs `<binary> [alias_args] <domain> <problem>` in its own process group
// and kills the group when the (wall-clock) budget expires. The plan is
// re-validated against an internal grounding before kSolved is reported.
//
// Throws ExternalUnavailable when the binary cannot be run,
// ExternalParseError for malformed plan files and ExternalInvalidPlan when
// the plan does not reach the goal.
SolveOutcome SolveExternal(const std::filesystem::path& domain_file,
                           const std::filesystem::path& problem_file,
                           const TimeBudget& budget,
                           const ExternalPlannerConfig& config);

// Latest plan file in `dir` for base name `plan_file`, if any.
std::filesystem::path FindLatestPlanFile(const std::filesystem::path& dir,
                                         const std::string& plan_file);

}  // namespace twostep

#endif  // TWOSTEP_EXTERNAL_PLANNER_H_
