#include "twostep/parallel_exec.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "twostep/errors.h"

namespace twostep {

std::size_t JointPlan::TotalCost() const {
  std::size_t total = 0;
  for (const auto& p : plans) total += p.cost();
  return total;
}

std::size_t JointPlan::MaxCost() const {
  std::size_t best = 0;
  for (const auto& p : plans) best = std::max(best, p.cost());
  return best;
}

namespace {

std::vector<std::string> DefaultIds(const JointPlan& plan) {
  if (plan.agent_ids.size() == plan.plans.size()) return plan.agent_ids;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < plan.plans.size(); ++i) {
    ids.push_back("agent" + std::to_string(i));
  }
  return ids;
}

std::vector<AtomId> Remap(const std::vector<AtomId>& atoms,
                          const std::vector<bool>& agent_specific, std::size_t universe,
                          std::size_t agent) {
  std::vector<AtomId> out;
  out.reserve(atoms.size());
  for (AtomId a : atoms) {
    out.push_back(agent_specific[a]
                      ? static_cast<AtomId>(universe + agent * universe + a)
                      : a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

JointProblem JointProblem::Shared(const GroundedTask& task, const State& init,
                                  const JointPlan& plan) {
  JointProblem problem;
  problem.init_ = init;
  problem.agent_ids_ = DefaultIds(plan);
  problem.universe_ = task.atoms.size();
  for (const Plan& p : plan.plans) {
    auto& list = problem.actions_.emplace_back();
    for (std::size_t step : p.steps) list.push_back(task.actions.at(step));
  }
  return problem;
}

JointProblem JointProblem::Separate(const GroundedTask& task, const State& init,
                                    const JointPlan& plan,
                                    const PredicateClassifier& classifier) {
  JointProblem problem;
  problem.separate_ = true;
  problem.agent_ids_ = DefaultIds(plan);
  problem.universe_ = task.atoms.size();
  problem.agent_specific_.resize(problem.universe_);
  for (AtomId a = 0; a < problem.universe_; ++a) {
    problem.agent_specific_[a] = classifier.IsAgentSpecific(task.atoms.Get(a).predicate);
  }
  const std::size_t n = plan.plans.size();
  if ((n + 1) * problem.universe_ > std::numeric_limits<AtomId>::max()) {
    throw CapExceeded("joint atom space exceeds the atom id range");
  }

  std::vector<AtomId> atoms;
  for (AtomId a : init.atoms()) {
    if (!problem.agent_specific_[a]) atoms.push_back(a);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (AtomId a : init.atoms()) {
      if (problem.agent_specific_[a]) {
        atoms.push_back(static_cast<AtomId>(problem.universe_ * (k + 1) + a));
      }
    }
  }
  problem.init_ = State(std::move(atoms));

  for (std::size_t k = 0; k < n; ++k) {
    auto& list = problem.actions_.emplace_back();
    for (std::size_t step : plan.plans[k].steps) {
      GroundAction action = task.actions.at(step);
      const auto& flags = problem.agent_specific_;
      const std::size_t u = problem.universe_;
      action.pre_pos = Remap(action.pre_pos, flags, u, k);
      action.pre_neg = Remap(action.pre_neg, flags, u, k);
      action.add = Remap(action.add, flags, u, k);
      action.del = Remap(action.del, flags, u, k);
      list.push_back(std::move(action));
    }
  }
  return problem;
}

State JointProblem::Project(const State& joint, std::size_t agent) const {
  if (!separate_) return joint;
  std::vector<AtomId> atoms;
  for (AtomId x : joint.atoms()) {
    if (x < universe_) {
      atoms.push_back(x);
    } else if ((x - universe_) / universe_ == agent) {
      atoms.push_back(static_cast<AtomId>((x - universe_) % universe_));
    }
  }
  return State(std::move(atoms));
}

bool JointApplicable(const State& state, std::span<const GroundAction* const> actions) {
  for (const GroundAction* a : actions) {
    if (!Applicable(state, *a)) return false;
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    for (std::size_t j = 0; j < actions.size(); ++j) {
      if (i == j) continue;
      const GroundAction& a = *actions[i];
      const GroundAction& b = *actions[j];
      if (Intersects(a.del, b.pre_pos) || Intersects(a.del, b.add)) return false;
      if (Intersects(a.add, b.pre_neg)) return false;
    }
  }
  return true;
}

State ApplyJoint(const State& state, std::span<const GroundAction* const> actions) {
  std::vector<AtomId> del;
  std::vector<AtomId> add;
  for (const GroundAction* a : actions) {
    del.insert(del.end(), a->del.begin(), a->del.end());
    add.insert(add.end(), a->add.begin(), a->add.end());
  }
  std::sort(del.begin(), del.end());
  del.erase(std::unique(del.begin(), del.end()), del.end());
  std::sort(add.begin(), add.end());
  add.erase(std::unique(add.begin(), add.end()), add.end());
  return state.Apply(del, add);
}

namespace {

constexpr std::size_t kInfeasible = std::numeric_limits<std::size_t>::max();
constexpr int kJointMove = -1;
constexpr int kDone = -2;

struct Key {
  std::vector<std::size_t> indices;
  State state;

  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  std::size_t operator()(const Key& key) const noexcept {
    std::size_t h = key.state.Hash();
    for (std::size_t i : key.indices) h = (h ^ i) * 1099511628211ULL;
    return h;
  }
};

class Scheduler {
 public:
  Scheduler(const JointProblem& problem, bool memoize)
      : problem_(problem), memoize_(memoize) {}

  struct Entry {
    std::size_t cost = kInfeasible;
    int choice = kDone;
  };

  Entry Best(const std::vector<std::size_t>& indices, const State& state) {
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (indices[k] < problem_.actions(k).size()) active.push_back(k);
    }
    if (active.empty()) return {0, kDone};

    Key key{indices, state};
    if (memoize_) {
      if (auto it = memo_.find(key); it != memo_.end()) {
        ++memo_hits_;
        return it->second;
      }
    }
    ++visited_;

    Entry best;
    std::vector<const GroundAction*> moving;
    for (std::size_t k : active) moving.push_back(&problem_.actions(k)[indices[k]]);
    if (JointApplicable(state, moving)) {
      std::vector<std::size_t> next = indices;
      for (std::size_t k : active) ++next[k];
      const Entry sub = Best(next, ApplyJoint(state, moving));
      if (sub.cost != kInfeasible) best = {sub.cost + 1, kJointMove};
    }
    if (active.size() > 1) {
      for (std::size_t k : active) {
        const GroundAction& a = problem_.actions(k)[indices[k]];
        if (!Applicable(state, a)) continue;
        std::vector<std::size_t> next = indices;
        ++next[k];
        const Entry sub = Best(next, state.Apply(a.del, a.add));
        if (sub.cost != kInfeasible && sub.cost + 1 < best.cost) {
          best = {sub.cost + 1, static_cast<int>(k)};
        }
      }
    }
    if (memoize_) memo_.emplace(std::move(key), best);
    return best;
  }

  std::size_t memo_hits() const { return memo_hits_; }
  std::size_t visited() const { return visited_; }

 private:
  const JointProblem& problem_;
  bool memoize_;
  std::unordered_map<Key, Entry, KeyHash> memo_;
  std::size_t memo_hits_ = 0;
  std::size_t visited_ = 0;
};

}  // namespace

ScheduleResult ExecLength(const JointProblem& problem, const ExecOptions& options) {
  Scheduler scheduler(problem, options.memoize);
  std::vector<std::size_t> indices(problem.agents(), 0);
  State state = problem.init();
  ScheduleResult result;

  const auto root = scheduler.Best(indices, state);
  if (root.cost == kInfeasible) {
    result.memo_hits = scheduler.memo_hits();
    result.states_visited = scheduler.visited();
    return result;
  }
  result.length = root.cost;
  // Walk the optimal choices forward to recover the schedule.
  for (auto entry = root; entry.choice != kDone; entry = scheduler.Best(indices, state)) {
    std::vector<ScheduledAction> step;
    std::vector<const GroundAction*> moving;
    for (std::size_t k = 0; k < problem.agents(); ++k) {
      const bool moves = entry.choice == kJointMove
                             ? indices[k] < problem.actions(k).size()
                             : static_cast<int>(k) == entry.choice;
      if (!moves) continue;
      step.push_back({k, indices[k]});
      moving.push_back(&problem.actions(k)[indices[k]]);
      ++indices[k];
    }
    state = ApplyJoint(state, moving);
    result.schedule.push_back(std::move(step));
  }
  result.memo_hits = scheduler.memo_hits();
  result.states_visited = scheduler.visited();
  return result;
}

ScheduleResult ExecLength(const GroundedTask& task, const State& init,
                          const JointPlan& plan, const ExecOptions& options) {
  return ExecLength(JointProblem::Shared(task, init, plan), options);
}

ScheduleResult BruteForceExecLength(const JointProblem& problem, std::size_t state_cap) {
  struct Node {
    Key key;
    std::size_t parent;
    std::vector<ScheduledAction> moved;
  };
  const std::size_t n = problem.agents();
  if (n >= 8 * sizeof(unsigned long long)) throw CapExceeded("too many agents");
  std::vector<Node> nodes;
  std::unordered_map<Key, std::size_t, KeyHash> seen;
  std::deque<std::size_t> queue;

  auto done = [&](const Key& key) {
    for (std::size_t k = 0; k < n; ++k) {
      if (key.indices[k] < problem.actions(k).size()) return false;
    }
    return true;
  };
  auto finish = [&](std::size_t id) {
    ScheduleResult result;
    result.states_visited = nodes.size();
    std::vector<std::vector<ScheduledAction>> reversed;
    for (std::size_t at = id; at != 0; at = nodes[at].parent) {
      reversed.push_back(nodes[at].moved);
    }
    result.schedule.assign(reversed.rbegin(), reversed.rend());
    result.length = result.schedule.size();
    return result;
  };

  Key root{std::vector<std::size_t>(n, 0), problem.init()};
  seen.emplace(root, 0);
  nodes.push_back({std::move(root), 0, {}});
  if (done(nodes[0].key)) return finish(0);
  queue.push_back(0);

  while (!queue.empty()) {
    const std::size_t id = queue.front();
    queue.pop_front();
    const Key current = nodes[id].key;
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < n; ++k) {
      if (current.indices[k] < problem.actions(k).size()) active.push_back(k);
    }
    const unsigned long long subsets = 1ULL << active.size();
    for (unsigned long long mask = 1; mask < subsets; ++mask) {
      std::vector<const GroundAction*> moving;
      std::vector<ScheduledAction> moved;
      Key next = current;
      for (std::size_t b = 0; b < active.size(); ++b) {
        if (!(mask & (1ULL << b))) continue;
        const std::size_t k = active[b];
        moving.push_back(&problem.actions(k)[current.indices[k]]);
        moved.push_back({k, current.indices[k]});
        ++next.indices[k];
      }
      if (!JointApplicable(current.state, moving)) continue;
      next.state = ApplyJoint(current.state, moving);
      if (seen.contains(next)) continue;
      if (nodes.size() >= state_cap) {
        throw CapExceeded("brute-force schedule search exceeded " +
                          std::to_string(state_cap) + " states");
      }
      seen.emplace(next, nodes.size());
      const bool finished = done(next);
      nodes.push_back({std::move(next), id, std::move(moved)});
      if (finished) return finish(nodes.size() - 1);
      queue.push_back(nodes.size() - 1);
    }
  }
  ScheduleResult result;
  result.states_visited = nodes.size();
  return result;
}

ReplayReport ReplaySchedule(const JointProblem& problem,
                            const std::vector<std::vector<ScheduledAction>>& schedule) {
  ReplayReport report;
  State state = problem.init();
  std::vector<std::size_t> indices(problem.agents(), 0);
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    std::vector<const GroundAction*> moving;
    std::vector<bool> used(problem.agents(), false);
    bool ok = !schedule[t].empty();
    for (const ScheduledAction& s : schedule[t]) {
      if (s.agent >= problem.agents() || used[s.agent] || s.step != indices[s.agent] ||
          s.step >= problem.actions(s.agent).size()) {
        ok = false;
        break;
      }
      used[s.agent] = true;
      moving.push_back(&problem.actions(s.agent)[s.step]);
    }
    if (!ok || !JointApplicable(state, moving)) {
      report.failing_step = t + 1;
      report.final_state = std::move(state);
      return report;
    }
    state = ApplyJoint(state, moving);
    for (const ScheduledAction& s : schedule[t]) ++indices[s.agent];
  }
  for (std::size_t k = 0; k < problem.agents(); ++k) {
    if (indices[k] != problem.actions(k).size()) {
      report.failing_step = schedule.size() + 1;
      report.final_state = std::move(state);
      return report;
    }
  }
  report.ok = true;
  report.final_state = std::move(state);
  return report;
}

std::vector<std::vector<ScheduledAction>> SequentialSchedule(
    const JointProblem& problem, const std::vector<std::size_t>& order) {
  std::vector<std::size_t> agents = order;
  if (agents.empty()) {
    for (std::size_t k = 0; k < problem.agents(); ++k) agents.push_back(k);
  }
  std::vector<std::vector<ScheduledAction>> schedule;
  for (std::size_t k : agents) {
    for (std::size_t i = 0; i < problem.actions(k).size(); ++i) {
      schedule.push_back({{k, i}});
    }
  }
  return schedule;
}

std::string ScheduleToJsonLines(const JointProblem& problem,
                                const std::vector<std::vector<ScheduledAction>>& schedule) {
  std::string out;
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    nlohmann::ordered_json line;
    line["t"] = t + 1;
    line["actions"] = nlohmann::ordered_json::array();
    for (const ScheduledAction& s : schedule[t]) {
      nlohmann::ordered_json entry;
      entry["agent"] = s.agent;
      entry["action"] = problem.actions(s.agent).at(s.step).ToString();
      line["actions"].push_back(std::move(entry));
    }
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace twostep
