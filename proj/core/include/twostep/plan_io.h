#ifndef TWOSTEP_PLAN_IO_H_
#define TWOSTEP_PLAN_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "twostep/executor.h"
#include "twostep/grounding.h"

namespace twostep {

struct ActionCall {
  std::string name;
  std::vector<std::string> args;

  friend bool operator==(const ActionCall&, const ActionCall&) = default;
};

// One action per line as `(name arg1 arg2 ...)`. Bare `name arg1 ...` lines
// are accepted too. Blank lines and `;` comments (e.g. `; cost = 6`) are
// skipped. Throws PlanParseError.
std::vector<ActionCall> ParsePlanText(std::string_view text);

// Throws PlanParseError for calls that name no ground action of `task`.
Plan ResolvePlan(const GroundedTask& task, const std::vector<ActionCall>& calls);

Plan ReadPlanFile(const GroundedTask& task, const std::filesystem::path& path);

// Inverse of ParsePlanText, followed by `; cost = N (unit cost)`.
std::string FormatPlan(const GroundedTask& task, const Plan& plan);

}  // namespace twostep

#endif  // TWOSTEP_PLAN_IO_H_
