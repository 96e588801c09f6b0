#include "twostep/pipeline.h"

#include <numeric>

#include "twostep/errors.h"
#include "twostep/plan_io.h"

namespace twostep {

using nlohmann::json;

std::string_view ToString(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::kPending:
      return "pending";
    case CandidateStatus::kTranslated:
      return "translated";
    case CandidateStatus::kPlanned:
      return "planned";
    case CandidateStatus::kDiscarded:
      return "discarded";
  }
  return "unknown";
}

double PipelineMetrics::SolverTime() const {
  return std::accumulate(solver_times.begin(), solver_times.end(), 0.0);
}

namespace {

class Run {
 public:
  Run(const DomainDef& domain, const ProblemDef& problem, const ProblemText& text,
      const PromptKit& kit, ChatBackend& llm, const PipelineConfig& config)
      : domain_(domain), problem_(problem), text_(text), kit_(kit), llm_(llm),
        config_(config), share_(config.budget.Split(config.n_agents)) {}

  TwoStepResult Execute() {
    auto task = std::make_shared<GroundedTask>(Ground(domain_, problem_, config_.ground));
    result_.task = task;
    result_.main_goal = problem_.goal;
    const GroundedTask& t = *task;

    State current = t.init;
    ProblemDef edited = problem_;
    std::vector<std::string> prior;
    std::vector<std::size_t> helpers;  // indices into candidates

    for (std::size_t h = 1; h < config_.n_agents; ++h) {
      SubgoalCandidate candidate;
      candidate.agent_index = h;
      auto english = Generate(h, prior);
      if (!english) break;  // "none": no further helpers wanted
      if (english->empty()) continue;  // failure already recorded
      candidate.english = *english;
      prior.push_back(*english);

      auto reject = [&](std::string reason) {
        candidate.status = CandidateStatus::kDiscarded;
        candidate.discard_reason = std::move(reason);
        result_.candidates.push_back(candidate);
      };

      std::string error;
      auto goal = Translate(h, candidate.english, &error);
      if (!goal) {
        reject(error);
        continue;
      }
      candidate.pddl_goal = goal;
      candidate.status = CandidateStatus::kTranslated;
      auto grounded = t.GroundFormula(*goal);
      if (!grounded) {
        reject("subgoal names atoms that can never hold");
        continue;
      }
      if (grounded->SatisfiedBy(current)) {
        reject("subgoal already holds");
        continue;
      }
      const SolveOutcome outcome = Solve(t, current, *grounded, share_);
      candidate.solver_time = outcome.elapsed;
      result_.metrics.solver_times.push_back(outcome.elapsed);
      if (!outcome.solved()) {
        if (outcome.status == SolveStatus::kTimeout) ++result_.metrics.timeouts;
        reject("helper planning " + std::string(ToString(outcome.status)));
        continue;
      }
      candidate.plan = outcome.plan;
      candidate.status = CandidateStatus::kPlanned;
      const ValidationReport report = ValidatePlan(t, current, *outcome.plan, *grounded);
      current = EditInitialState(t, t.init, report.final_state, config_.classifier);
      edited = EditInitialState(problem_, t, report.final_state, config_.classifier);
      result_.edited_inits.push_back(edited);
      helpers.push_back(result_.candidates.size());
      result_.candidates.push_back(std::move(candidate));
    }

    const SolveOutcome main = Solve(t, current, t.goal, share_);
    result_.metrics.solver_times.push_back(main.elapsed);
    if (main.status == SolveStatus::kTimeout) ++result_.metrics.timeouts;
    if (!main.solved()) {
      if (helpers.empty()) {
        // Same start as a fallback would use; no point in re-solving.
        Fail("single-agent planning " + std::string(ToString(main.status)));
        return std::move(result_);
      }
      return Fallback("main agent planning " + std::string(ToString(main.status)));
    }

    JointPlan joint;
    joint.plans.push_back(*main.plan);
    joint.agent_ids.push_back("agent0");
    for (std::size_t i : helpers) {
      joint.plans.push_back(*result_.candidates[i].plan);
      joint.agent_ids.push_back("agent" + std::to_string(result_.candidates[i].agent_index));
    }
    Assemble(std::move(joint));
    result_.fallback_used = helpers.empty() && config_.n_agents > 1;
    if (result_.fallback_used) result_.fallback_reason = "no helper subgoal survived";
    if (!VerifyResult(result_)) {
      return Fallback("joint schedule does not reach the goal");
    }
    result_.success = true;
    return std::move(result_);
  }

 private:
  // nullopt for "none"; empty string when the call or parse failed.
  std::optional<std::string> Generate(std::size_t h, const std::vector<std::string>& prior) {
    TranscriptEntry entry;
    entry.stage = "generator";
    entry.agent_index = h;
    std::optional<std::string> english = std::string();
    try {
      entry.request = BuildGeneratorPrompt(kit_, domain_.name, text_, prior, h);
      entry.digest = RequestDigest(entry.request);
      Ask(entry);
      english = ParseGeneratorResponse(entry.response);
    } catch (const std::exception& e) {
      entry.error = e.what();
      SubgoalCandidate failed;
      failed.agent_index = h;
      failed.status = CandidateStatus::kDiscarded;
      failed.discard_reason = std::string("generator: ") + e.what();
      result_.candidates.push_back(std::move(failed));
      english = std::string();
    }
    result_.transcript.push_back(std::move(entry));
    return english;
  }

  std::optional<Formula> Translate(std::size_t h, const std::string& english,
                                   std::string* error) {
    TranscriptEntry entry;
    entry.stage = "translator";
    entry.agent_index = h;
    std::optional<Formula> goal;
    try {
      entry.request = BuildTranslatorPrompt(kit_, problem_, text_, english);
      entry.digest = RequestDigest(entry.request);
      Ask(entry);
      goal = ParsePddlGoal(entry.response, domain_, problem_);
    } catch (const std::exception& e) {
      entry.error = e.what();
      *error = std::string("translator: ") + e.what();
    }
    result_.transcript.push_back(std::move(entry));
    return goal;
  }

  void Ask(TranscriptEntry& entry) {
    ++result_.metrics.llm_calls;
    const ChatResponse response = llm_.Complete(entry.request);
    entry.response = response.text;
    entry.latency = response.latency;
    result_.metrics.llm_time += response.latency;
  }

  void Assemble(JointPlan joint) {
    result_.joint_plan = std::move(joint);
    const GroundedTask& t = *result_.task;
    result_.joint_problem =
        JointProblem::Separate(t, t.init, result_.joint_plan, config_.classifier);
    const ScheduleResult schedule = ExecLength(result_.joint_problem);
    if (schedule.feasible()) {
      result_.schedule = schedule.schedule;
      result_.execution_length = *schedule.length;
      result_.schedule_sequential = false;
      return;
    }
    // Helpers ran first during planning, so that order is always valid.
    std::vector<std::size_t> order;
    for (std::size_t k = 1; k < result_.joint_plan.size(); ++k) order.push_back(k);
    order.push_back(0);
    result_.schedule = SequentialSchedule(result_.joint_problem, order);
    result_.execution_length = result_.schedule.size();
    result_.schedule_sequential = true;
  }

  TwoStepResult Fallback(std::string reason) {
    for (auto& c : result_.candidates) {
      if (c.status == CandidateStatus::kPlanned) {
        c.status = CandidateStatus::kDiscarded;
        c.discard_reason = "dropped by fallback";
      }
    }
    result_.edited_inits.clear();
    result_.fallback_used = true;
    result_.fallback_reason = std::move(reason);
    const GroundedTask& t = *result_.task;
    const SolveOutcome single = Solve(t, t.init, t.goal, share_);
    result_.metrics.solver_times.push_back(single.elapsed);
    if (single.status == SolveStatus::kTimeout) ++result_.metrics.timeouts;
    if (!single.solved()) {
      Fail(result_.fallback_reason + "; single-agent planning " +
           std::string(ToString(single.status)));
      return std::move(result_);
    }
    JointPlan joint;
    joint.plans.push_back(*single.plan);
    joint.agent_ids.push_back("agent0");
    Assemble(std::move(joint));
    result_.success = VerifyResult(result_);
    return std::move(result_);
  }

  void Fail(std::string reason) {
    result_.fallback_used = config_.n_agents > 1;
    result_.fallback_reason = std::move(reason);
    result_.joint_plan = {};
    result_.schedule.clear();
    result_.execution_length = 0;
    result_.success = false;
  }

  const DomainDef& domain_;
  const ProblemDef& problem_;
  const ProblemText& text_;
  const PromptKit& kit_;
  ChatBackend& llm_;
  const PipelineConfig& config_;
  TimeBudget share_;
  TwoStepResult result_;
};

}  // namespace

TwoStepResult Decompose(const DomainDef& domain, const ProblemDef& problem,
                        const ProblemText& text, const PromptKit& kit, ChatBackend& llm,
                        const PipelineConfig& config) {
  if (config.n_agents == 0) throw SemanticError("n_agents must be at least 1");
  return Run(domain, problem, text, kit, llm, config).Execute();
}

bool VerifyResult(const TwoStepResult& result) {
  if (!result.task || result.joint_plan.size() == 0) return false;
  const GroundedTask& t = *result.task;
  const ReplayReport replay = ReplaySchedule(result.joint_problem, result.schedule);
  if (!replay.ok) return false;
  if (!t.goal.SatisfiedBy(result.joint_problem.Project(replay.final_state, 0))) {
    return false;
  }
  for (std::size_t k = 1; k < result.joint_problem.agents(); ++k) {
    const State view = result.joint_problem.Project(replay.final_state, k);
    if (!view.ContainsNone(t.goal.neg)) return false;
  }
  return true;
}

json TranscriptToJson(const TwoStepResult& result) {
  json doc;
  doc["fallback_used"] = result.fallback_used;
  doc["fallback_reason"] = result.fallback_reason;
  doc["success"] = result.success;
  doc["execution_length"] = result.execution_length;
  doc["schedule_sequential"] = result.schedule_sequential;
  doc["llm_time"] = result.metrics.llm_time;
  doc["solver_times"] = result.metrics.solver_times;
  json candidates = json::array();
  for (const auto& c : result.candidates) {
    json entry;
    entry["agent"] = c.agent_index;
    entry["english"] = c.english;
    entry["pddl_goal"] = c.pddl_goal ? SerializeGoal(*c.pddl_goal) : "";
    entry["status"] = ToString(c.status);
    entry["discard_reason"] = c.discard_reason;
    entry["plan_length"] = c.plan ? c.plan->cost() : 0;
    candidates.push_back(std::move(entry));
  }
  doc["candidates"] = std::move(candidates);
  json calls = json::array();
  for (const auto& e : result.transcript) {
    json turns = json::array();
    for (const auto& t : e.request.turns) turns.push_back({{"role", t.role}, {"text", t.text}});
    calls.push_back({{"stage", e.stage},
                     {"agent", e.agent_index},
                     {"digest", e.digest},
                     {"system", e.request.system},
                     {"turns", std::move(turns)},
                     {"response", e.response},
                     {"latency_seconds", e.latency},
                     {"error", e.error}});
  }
  doc["calls"] = std::move(calls);
  return doc;
}

std::string FormatJointPlan(const TwoStepResult& result) {
  std::string out;
  if (!result.task) return out;
  for (std::size_t k = 0; k < result.joint_plan.size(); ++k) {
    out += "; " + result.joint_plan.agent_ids[k] + "\n";
    for (std::size_t step : result.joint_plan.plans[k].steps) {
      out += result.task->actions.at(step).ToString() + "\n";
    }
  }
  return out;
}

}  // namespace twostep
