#ifndef TWOSTEP_PIPELINE_H_
#define TWOSTEP_PIPELINE_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twostep/classifier.h"
#include "twostep/executor.h"
#include "twostep/grounding.h"
#include "twostep/llm.h"
#include "twostep/parallel_exec.h"
#include "twostep/pddl.h"
#include "twostep/planner.h"
#include "twostep/prompts.h"

namespace twostep {

enum class CandidateStatus { kPending, kTranslated, kPlanned, kDiscarded };
std::string_view ToString(CandidateStatus status);

struct SubgoalCandidate {
  std::size_t agent_index = 0;  // 1 .. N-1
  std::string english;
  std::optional<Formula> pddl_goal;
  CandidateStatus status = CandidateStatus::kPending;
  std::string discard_reason;
  std::optional<Plan> plan;
  double solver_time = 0.0;
};

struct TranscriptEntry {
  std::string stage;  // "generator" or "translator"
  std::size_t agent_index = 0;
  ChatRequest request;
  std::string digest;
  std::string response;
  double latency = 0.0;
  std::string error;
};

struct PipelineMetrics {
  double llm_time = 0.0;
  // Every solver call in order: helpers, main agent, then the fallback.
  std::vector<double> solver_times;
  std::size_t timeouts = 0;
  std::size_t llm_calls = 0;

  double SolverTime() const;
  // LLM latency plus every solver call.
  double PlanningTime() const { return llm_time + SolverTime(); }
};

struct PipelineConfig {
  std::size_t n_agents = 2;
  // Global budget; each solver call gets budget / n_agents.
  TimeBudget budget;
  PredicateClassifier classifier;
  GroundOptions ground;
};

struct TwoStepResult {
  std::shared_ptr<const GroundedTask> task;
  JointPlan joint_plan;
  // Scheduler view of joint_plan with per-agent agent-specific atoms.
  JointProblem joint_problem;
  Formula main_goal;
  std::vector<ProblemDef> edited_inits;
  std::vector<SubgoalCandidate> candidates;
  bool fallback_used = false;
  std::string fallback_reason;
  // Interleaved schedule, or the sequential one (helpers then main) when the
  // joint plan cannot be interleaved.
  std::vector<std::vector<ScheduledAction>> schedule;
  bool schedule_sequential = false;
  std::size_t execution_length = 0;
  // Schedule replays from the original init to a goal state.
  bool success = false;
  PipelineMetrics metrics;
  std::vector<TranscriptEntry> transcript;
};

// TwoStep: helpers 1..N-1 get LLM-proposed subgoals, planned one after the
// other from the environment state the previous helper leaves behind; the
// main agent then plans for the original goal. Faulty subgoals are
// discarded. When the main agent fails, or the assembled schedule does not
// reach the goal, a plain single-agent plan is used instead.
TwoStepResult Decompose(const DomainDef& domain, const ProblemDef& problem,
                        const ProblemText& text, const PromptKit& kit,
                        ChatBackend& llm, const PipelineConfig& config);

// Replays the result's schedule from the original init and checks the goal:
// the main agent's view must satisfy it, and negative literals must hold for
// every agent.
bool VerifyResult(const TwoStepResult& result);

nlohmann::json TranscriptToJson(const TwoStepResult& result);

// Joint plan as text: one `; agent<k>` header per agent followed by its plan.
std::string FormatJointPlan(const TwoStepResult& result);

}  // namespace twostep

#endif  // TWOSTEP_PIPELINE_H_
