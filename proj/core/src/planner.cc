#include "twostep/planner.h"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <queue>
#include <unordered_map>

namespace twostep {

std::string_view ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kSolved:
      return "solved";
    case SolveStatus::kUnsolvable:
      return "unsolvable";
    case SolveStatus::kTimeout:
      return "timeout";
  }
  return "unknown";
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  explicit Stopwatch(const TimeBudget& budget)
      : budget_(budget), start_(std::chrono::steady_clock::now()) {}

  double Elapsed(std::size_t expansions) const {
    if (budget_.clock == ClockMode::kVirtual) {
      return static_cast<double>(expansions) * budget_.seconds_per_expansion;
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  bool Expired(std::size_t expansions) const {
    if (budget_.clock == ClockMode::kVirtual) {
      return Elapsed(expansions) >= budget_.seconds;
    }
    // Reading the clock is cheap next to an expansion, but not free.
    if (expansions % 32 != 0) return false;
    return Elapsed(expansions) >= budget_.seconds;
  }

 private:
  TimeBudget budget_;
  std::chrono::steady_clock::time_point start_;
};

// Buckets every action under its smallest positive precondition so a state
// only visits actions whose first precondition holds.
class SuccessorGenerator {
 public:
  explicit SuccessorGenerator(const GroundedTask& task) : task_(task) {
    by_first_.resize(task.atoms.size());
    for (std::size_t i = 0; i < task.actions.size(); ++i) {
      const auto& pre = task.actions[i].pre_pos;
      if (pre.empty()) {
        unconditional_.push_back(i);
      } else {
        by_first_[pre.front()].push_back(i);
      }
    }
  }

  template <typename Fn>
  void ForEachApplicable(const State& state, Fn&& fn) const {
    scratch_.clear();
    for (std::size_t i : unconditional_) scratch_.push_back(i);
    for (AtomId a : state.atoms()) {
      for (std::size_t i : by_first_[a]) scratch_.push_back(i);
    }
    // Fixed action order keeps search deterministic.
    std::sort(scratch_.begin(), scratch_.end());
    for (std::size_t i : scratch_) {
      if (Applicable(state, task_.actions[i])) fn(i);
    }
  }

 private:
  const GroundedTask& task_;
  std::vector<std::vector<std::size_t>> by_first_;
  std::vector<std::size_t> unconditional_;
  mutable std::vector<std::size_t> scratch_;
};

struct Node {
  const State* state;
  std::size_t parent;
  std::size_t action;
};

constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

Plan ExtractPlan(const std::vector<Node>& nodes, std::size_t id) {
  Plan plan;
  while (nodes[id].parent != kNoParent) {
    plan.steps.push_back(nodes[id].action);
    id = nodes[id].parent;
  }
  std::reverse(plan.steps.begin(), plan.steps.end());
  return plan;
}

}  // namespace

AdditiveHeuristic::AdditiveHeuristic(const GroundedTask& task)
    : task_(task),
      consumers_(task.atoms.size()),
      atom_cost_(task.atoms.size()),
      action_cost_(task.actions.size()),
      missing_(task.actions.size()) {
  for (std::size_t i = 0; i < task.actions.size(); ++i) {
    for (AtomId a : task.actions[i].pre_pos) consumers_[a].push_back(i);
  }
}

std::optional<double> AdditiveHeuristic::Evaluate(const State& state,
                                                  const GroundGoal& goal) {
  using Entry = std::pair<double, AtomId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::fill(atom_cost_.begin(), atom_cost_.end(), kInfinity);
  std::fill(action_cost_.begin(), action_cost_.end(), 0.0);

  auto fire = [&](std::size_t action) {
    const double cost = action_cost_[action] + 1.0;
    for (AtomId a : task_.actions[action].add) {
      if (cost < atom_cost_[a]) {
        atom_cost_[a] = cost;
        queue.emplace(cost, a);
      }
    }
  };

  for (AtomId a : state.atoms()) {
    atom_cost_[a] = 0.0;
    queue.emplace(0.0, a);
  }
  for (std::size_t i = 0; i < task_.actions.size(); ++i) {
    missing_[i] = task_.actions[i].pre_pos.size();
    if (missing_[i] == 0) fire(i);
  }
  std::size_t goals_left = goal.pos.size();
  while (!queue.empty() && goals_left > 0) {
    auto [cost, atom] = queue.top();
    queue.pop();
    if (cost > atom_cost_[atom]) continue;
    if (std::binary_search(goal.pos.begin(), goal.pos.end(), atom)) --goals_left;
    for (std::size_t action : consumers_[atom]) {
      action_cost_[action] += cost;
      if (--missing_[action] == 0) fire(action);
    }
  }

  double h = 0.0;
  for (AtomId a : goal.pos) {
    if (atom_cost_[a] == kInfinity) return std::nullopt;
    h += atom_cost_[a];
  }
  // The relaxation ignores deletes, so violated negative goals would count
  // zero. Charge one step each to keep such states distinguishable.
  for (AtomId a : goal.neg) {
    if (state.Contains(a)) h += 1.0;
  }
  return h;
}

SolveOutcome Solve(const GroundedTask& task, const TimeBudget& budget) {
  return Solve(task, task.init, task.goal, budget);
}

SolveOutcome Solve(const GroundedTask& task, const State& init,
                   const GroundGoal& goal, const TimeBudget& budget) {
  Stopwatch watch(budget);
  SolveOutcome outcome;
  if (goal.SatisfiedBy(init)) {
    outcome.status = SolveStatus::kSolved;
    outcome.plan = Plan{};
    outcome.elapsed = watch.Elapsed(0);
    return outcome;
  }

  AdditiveHeuristic heuristic(task);
  SuccessorGenerator successors(task);
  std::unordered_map<State, std::size_t> index;
  std::vector<Node> nodes;
  std::vector<bool> closed;

  // (h, insertion order, node)
  using Entry = std::tuple<double, std::size_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::size_t sequence = 0;

  auto h0 = heuristic.Evaluate(init, goal);
  if (!h0) {
    outcome.status = SolveStatus::kUnsolvable;
    outcome.elapsed = watch.Elapsed(0);
    return outcome;
  }
  auto [root, inserted] = index.emplace(init, 0);
  nodes.push_back({&root->first, kNoParent, 0});
  closed.push_back(false);
  open.emplace(*h0, sequence++, 0);

  std::size_t expansions = 0;
  while (!open.empty()) {
    if (watch.Expired(expansions)) {
      outcome.status = SolveStatus::kTimeout;
      outcome.nodes_expanded = expansions;
      outcome.elapsed = watch.Elapsed(expansions);
      return outcome;
    }
    const std::size_t id = std::get<2>(open.top());
    open.pop();
    if (closed[id]) continue;
    closed[id] = true;

    double h = 0.0;
    if (id != 0) {
      auto value = heuristic.Evaluate(*nodes[id].state, goal);
      if (!value) continue;  // dead end
      h = *value;
    } else {
      h = *h0;
    }
    ++expansions;

    std::optional<std::size_t> found;
    const State current = *nodes[id].state;
    successors.ForEachApplicable(current, [&](std::size_t action) {
      if (found) return;
      const GroundAction& a = task.actions[action];
      State next = current.Apply(a.del, a.add);
      auto [it, fresh] = index.emplace(std::move(next), nodes.size());
      if (!fresh) return;
      nodes.push_back({&it->first, id, action});
      closed.push_back(false);
      if (goal.SatisfiedBy(it->first)) {
        found = nodes.size() - 1;
        return;
      }
      open.emplace(h, sequence++, nodes.size() - 1);
    });
    if (found) {
      outcome.status = SolveStatus::kSolved;
      outcome.plan = ExtractPlan(nodes, *found);
      outcome.nodes_expanded = expansions;
      outcome.elapsed = watch.Elapsed(expansions);
      return outcome;
    }
  }
  outcome.status = SolveStatus::kUnsolvable;
  outcome.nodes_expanded = expansions;
  outcome.elapsed = watch.Elapsed(expansions);
  return outcome;
}

SolveOutcome SolveOptimal(const GroundedTask& task, const TimeBudget& budget,
                          std::size_t node_cap) {
  return SolveOptimal(task, task.init, task.goal, budget, node_cap);
}

SolveOutcome SolveOptimal(const GroundedTask& task, const State& init,
                          const GroundGoal& goal, const TimeBudget& budget,
                          std::size_t node_cap) {
  Stopwatch watch(budget);
  SolveOutcome outcome;
  if (goal.SatisfiedBy(init)) {
    outcome.status = SolveStatus::kSolved;
    outcome.plan = Plan{};
    outcome.elapsed = watch.Elapsed(0);
    return outcome;
  }
  SuccessorGenerator successors(task);
  std::unordered_map<State, std::size_t> index;
  std::vector<Node> nodes;
  std::deque<std::size_t> queue;

  auto [root, inserted] = index.emplace(init, 0);
  nodes.push_back({&root->first, kNoParent, 0});
  queue.push_back(0);

  std::size_t expansions = 0;
  while (!queue.empty()) {
    if (expansions >= node_cap || watch.Expired(expansions)) {
      outcome.status = SolveStatus::kTimeout;
      outcome.nodes_expanded = expansions;
      outcome.elapsed = watch.Elapsed(expansions);
      return outcome;
    }
    const std::size_t id = queue.front();
    queue.pop_front();
    ++expansions;
    std::optional<std::size_t> found;
    const State current = *nodes[id].state;
    successors.ForEachApplicable(current, [&](std::size_t action) {
      if (found) return;
      const GroundAction& a = task.actions[action];
      auto [it, fresh] = index.emplace(current.Apply(a.del, a.add), nodes.size());
      if (!fresh) return;
      nodes.push_back({&it->first, id, action});
      if (goal.SatisfiedBy(it->first)) {
        found = nodes.size() - 1;
        return;
      }
      queue.push_back(nodes.size() - 1);
    });
    if (found) {
      outcome.status = SolveStatus::kSolved;
      outcome.plan = ExtractPlan(nodes, *found);
      outcome.nodes_expanded = expansions;
      outcome.elapsed = watch.Elapsed(expansions);
      return outcome;
    }
  }
  outcome.status = SolveStatus::kUnsolvable;
  outcome.nodes_expanded = expansions;
  outcome.elapsed = watch.Elapsed(expansions);
  return outcome;
}

}  // namespace twostep
