#ifndef TWOSTEP_PARALLEL_EXEC_H_
#define TWOSTEP_PARALLEL_EXEC_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twostep/classifier.h"
#include "twostep/executor.h"
#include "twostep/grounding.h"
#include "twostep/state.h"

namespace twostep {

// One plan per agent; plans[0] belongs to the main agent.
struct JointPlan {
  std::vector<Plan> plans;
  std::vector<std::string> agent_ids;

  std::size_t size() const { return plans.size(); }
  std::size_t TotalCost() const;
  std::size_t MaxCost() const;
};

// The scheduler's view of a joint plan: every agent's actions resolved into
// one shared atom space.
//
// Shared mode uses the task's atoms as they are; this fits plans over a
// lifted multi-agent task, where agents already own distinct atoms.
//
// Separate mode starts from a single-agent task and gives each agent a
// private copy of the agent-specific atoms (agent k's copy of atom a is
// U + k*U + a, U the universe size). Environment atoms stay shared.
class JointProblem {
 public:
  static JointProblem Shared(const GroundedTask& task, const State& init,
                             const JointPlan& plan);
  static JointProblem Separate(const GroundedTask& task, const State& init,
                               const JointPlan& plan,
                               const PredicateClassifier& classifier);

  std::size_t agents() const { return actions_.size(); }
  const std::vector<GroundAction>& actions(std::size_t agent) const {
    return actions_[agent];
  }
  const State& init() const { return init_; }
  const std::vector<std::string>& agent_ids() const { return agent_ids_; }

  // Task-space view of a joint state from `agent`'s perspective:
  // environment atoms plus that agent's own agent-specific atoms.
  State Project(const State& joint, std::size_t agent) const;

 private:
  std::vector<std::vector<GroundAction>> actions_;
  std::vector<std::string> agent_ids_;
  State init_;
  bool separate_ = false;
  std::size_t universe_ = 0;
  std::vector<bool> agent_specific_;
};

// (agent, position in that agent's plan)
struct ScheduledAction {
  std::size_t agent = 0;
  std::size_t step = 0;

  friend bool operator==(const ScheduledAction&, const ScheduledAction&) = default;
};

struct ScheduleResult {
  // nullopt when no interleaving finishes every plan.
  std::optional<std::size_t> length;
  std::vector<std::vector<ScheduledAction>> schedule;
  std::size_t memo_hits = 0;
  std::size_t states_visited = 0;

  bool feasible() const { return length.has_value(); }
};

// Each action applicable in `state`, and no action deletes what another
// needs or adds, nor adds what another forbids or deletes.
bool JointApplicable(const State& state, std::span<const GroundAction* const> actions);

// All deletes first, then all adds.
State ApplyJoint(const State& state, std::span<const GroundAction* const> actions);

struct ExecOptions {
  bool memoize = true;
};

// Minimal timestep count when each step advances either every unfinished
// agent at once or a single agent. Memoized on (indices, state); ties prefer
// the joint move. Exact for two agents, an upper bound beyond.
ScheduleResult ExecLength(const JointProblem& problem, const ExecOptions& options = {});
ScheduleResult ExecLength(const GroundedTask& task, const State& init,
                          const JointPlan& plan, const ExecOptions& options = {});

inline constexpr std::size_t kBruteForceStateCap = 2'000'000;

// Breadth-first search over every nonempty subset of unfinished agents per
// timestep. Throws CapExceeded past `state_cap` visited nodes.
ScheduleResult BruteForceExecLength(const JointProblem& problem,
                                    std::size_t state_cap = kBruteForceStateCap);

struct ReplayReport {
  bool ok = false;
  // Timestep (1-based) that failed, when !ok.
  std::optional<std::size_t> failing_step;
  State final_state;
};

// Replays a schedule from the problem's init. Fails on joint inapplicability,
// out-of-order steps, or plans left unfinished.
ReplayReport ReplaySchedule(const JointProblem& problem,
                            const std::vector<std::vector<ScheduledAction>>& schedule);

// Plans one after the other, one step per timestep, agents in `order`
// (0 .. N-1 when empty).
std::vector<std::vector<ScheduledAction>> SequentialSchedule(
    const JointProblem& problem, const std::vector<std::size_t>& order = {});

// One line per timestep:
// {"t": 1, "actions": [{"agent": 0, "action": "(pickup b1)"}]}
std::string ScheduleToJsonLines(const JointProblem& problem,
                                const std::vector<std::vector<ScheduledAction>>& schedule);

}  // namespace twostep

#endif  // TWOSTEP_PARALLEL_EXEC_H_
