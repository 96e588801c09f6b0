#ifndef TWOSTEP_PLANNER_H_
#define TWOSTEP_PLANNER_H_

#include <cstddef>
#include <optional>
#include <string_view>

#include "twostep/executor.h"
#include "twostep/grounding.h"

namespace twostep {

enum class ClockMode {
  // Elapsed time is wall-clock time.
  kWall,
  // Elapsed time is expansions * seconds_per_expansion. Makes timeouts and
  // reported times reproducible across machines and runs.
  kVirtual,
};

struct TimeBudget {
  double seconds = 1000.0;
  ClockMode clock = ClockMode::kWall;
  double seconds_per_expansion = 1e-5;

  // Per-agent share for an n-agent run.
  TimeBudget Split(std::size_t n) const {
    TimeBudget share = *this;
    share.seconds = seconds / static_cast<double>(n == 0 ? 1 : n);
    return share;
  }
};

enum class SolveStatus { kSolved, kUnsolvable, kTimeout };

std::string_view ToString(SolveStatus status);

struct SolveOutcome {
  SolveStatus status = SolveStatus::kUnsolvable;
  std::optional<Plan> plan;
  double elapsed = 0.0;
  std::size_t nodes_expanded = 0;

  bool solved() const { return status == SolveStatus::kSolved; }
};

// Greedy best-first search with the additive delete-relaxation heuristic.
// Successors are queued with their parent's value and evaluated when popped;
// ties break first-in first-out. The first plan found is returned.
SolveOutcome Solve(const GroundedTask& task, const TimeBudget& budget);
SolveOutcome Solve(const GroundedTask& task, const State& init,
                   const GroundGoal& goal, const TimeBudget& budget);

inline constexpr std::size_t kOptimalNodeCap = 10'000'000;

// Breadth-first search; plans have minimal length. Reports kTimeout when the
// budget or the expansion cap runs out.
SolveOutcome SolveOptimal(const GroundedTask& task, const TimeBudget& budget,
                          std::size_t node_cap = kOptimalNodeCap);
SolveOutcome SolveOptimal(const GroundedTask& task, const State& init,
                          const GroundGoal& goal, const TimeBudget& budget,
                          std::size_t node_cap = kOptimalNodeCap);

// h_add of `state` towards `goal`; nullopt when the goal is unreachable even
// under the delete relaxation.
class AdditiveHeuristic {
 public:
  explicit AdditiveHeuristic(const GroundedTask& task);
  std::optional<double> Evaluate(const State& state, const GroundGoal& goal);

 private:
  const GroundedTask& task_;
  std::vector<std::vector<std::size_t>> consumers_;
  std::vector<double> atom_cost_;
  std::vector<double> action_cost_;
  std::vector<std::size_t> missing_;
};

}  // namespace twostep

#endif  // TWOSTEP_PLANNER_H_
