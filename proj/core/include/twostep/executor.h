#ifndef TWOSTEP_EXECUTOR_H_
#define TWOSTEP_EXECUTOR_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "twostep/classifier.h"
#include "twostep/grounding.h"
#include "twostep/pddl.h"
#include "twostep/state.h"

namespace twostep {

// Sequence of indices into GroundedTask::actions.
struct Plan {
  std::vector<std::size_t> steps;

  std::size_t cost() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct ValidationReport {
  bool valid = false;
  std::optional<std::size_t> failing_step;
  std::optional<Literal> missing_precondition;
  State final_state;
  bool goal_satisfied = false;
};

bool Applicable(const State& state, const GroundAction& action);

// First precondition literal of `action` violated in `state`, if any.
std::optional<Literal> ViolatedPrecondition(const GroundedTask& task,
                                            const State& state,
                                            const GroundAction& action);

// (state - del) | add. Throws NotApplicable naming the violated literal.
State Apply(const GroundedTask& task, const State& state, const GroundAction& action);

// Replays `plan` from `init` and stops at the first inapplicable step. Goal
// satisfaction is checked against `goal` (task.goal by default).
ValidationReport ValidatePlan(const GroundedTask& task, const State& init,
                              const Plan& plan);
ValidationReport ValidatePlan(const GroundedTask& task, const State& init,
                              const Plan& plan, const GroundGoal& goal);

// s_0 .. s_T. Throws NotApplicable at the offending step.
std::vector<State> TraceStates(const GroundedTask& task, const State& init,
                               const Plan& plan);

// Environment atoms of `helper_final` plus the agent-specific atoms of
// `original_init`. Throws ClassifierIncomplete for unclassified predicates.
State EditInitialState(const GroundedTask& task, const State& original_init,
                       const State& helper_final,
                       const PredicateClassifier& classifier);

// Same edit at the problem level; the goal and objects are unchanged.
ProblemDef EditInitialState(const ProblemDef& problem, const GroundedTask& task,
                            const State& helper_final,
                            const PredicateClassifier& classifier);

}  // namespace twostep

#endif  // TWOSTEP_EXECUTOR_H_
