#include "twostep/pipeline.h"

#include <gtest/gtest.h>

#include "instances.h"
#include "twostep/errors.h"

namespace twostep {
namespace {

using testing::AppendixFile;
using testing::DataDir;
using testing::DomainFile;

constexpr char kFinal[] =
    "Therefore, agent1's clearly stated (with object names) complete and final goal "
    "condition is: ";

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    kit = PromptKit::Load(DataDir() / "prompts");
    kit.LoadDomainExample(DataDir() / "domains" / "blocksworld");
    domain = LoadDomain(DomainFile("blocksworld"));
    problem = LoadProblem(AppendixFile("bw-rand-3.pddl"), domain);
    text = ProblemText::Load(AppendixFile("bw-rand-3.nl.json"));
    config.n_agents = 2;
    config.budget.seconds = 10;
    config.budget.clock = ClockMode::kVirtual;
    config.budget.seconds_per_expansion = 1e-4;
    config.classifier = ResolveClassifier(domain);
  }

  // Generator answers `english` for agent 1, the translator answers `pddl`.
  CallbackBackend Scripted(std::string english, std::string pddl, double latency = 1.0) {
    return CallbackBackend(
        [this, english, pddl](const ChatRequest& r) {
          if (r.system == kit.system_generator) return std::string(kFinal) + english + ".";
          return pddl;
        },
        latency);
  }

  PromptKit kit;
  DomainDef domain;
  ProblemDef problem;
  ProblemText text;
  PipelineConfig config;
};

TEST_F(PipelineTest, AppendixFixturesShortenExecution) {
  FixtureBackend fixtures(DataDir() / "fixtures" / "appendix-blocksworld");
  const TwoStepResult r = Decompose(domain, problem, text, kit, fixtures, config);
  ASSERT_TRUE(r.success);
  EXPECT_TRUE(VerifyResult(r));
  EXPECT_FALSE(r.fallback_used);
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].status, CandidateStatus::kPlanned);
  EXPECT_EQ(r.execution_length, 5u);
  EXPECT_EQ(r.joint_plan.size(), 2u);
  EXPECT_EQ(r.metrics.llm_calls, 2u);
  EXPECT_EQ(r.transcript.size(), 2u);
}

TEST_F(PipelineTest, PlanningTimeAddsLlmAndSolverTime) {
  auto llm = Scripted("b2 is on the table and the arm is empty",
                      "(:goal (and (on-table b2) (arm-empty)))", 1.5);
  const TwoStepResult r = Decompose(domain, problem, text, kit, llm, config);
  EXPECT_DOUBLE_EQ(r.metrics.llm_time, 3.0);
  ASSERT_EQ(r.metrics.solver_times.size(), 2u);
  EXPECT_DOUBLE_EQ(r.metrics.PlanningTime(),
                   3.0 + r.metrics.solver_times[0] + r.metrics.solver_times[1]);
}

TEST_F(PipelineTest, UntranslatableSubgoalIsDiscarded) {
  auto llm = Scripted("b2 floats", "(:goal (and (floating b2)))");
  const TwoStepResult r = Decompose(domain, problem, text, kit, llm, config);
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].status, CandidateStatus::kDiscarded);
  EXPECT_FALSE(r.candidates[0].discard_reason.empty());
  EXPECT_TRUE(r.success);
  EXPECT_TRUE(VerifyResult(r));
}

TEST_F(PipelineTest, SatisfiedSubgoalIsDiscarded) {
  auto llm = Scripted("b1 is clear", "(:goal (and (clear b1)))");
  const TwoStepResult r = Decompose(domain, problem, text, kit, llm, config);
  EXPECT_EQ(r.candidates[0].status, CandidateStatus::kDiscarded);
  EXPECT_TRUE(r.success);
}

TEST_F(PipelineTest, HoardingHelperForcesFallback) {
  // The helper ends up holding b2, which the main agent needs on b3.
  auto llm = Scripted("agent1 holds b2", "(:goal (and (holding b2)))");
  const TwoStepResult r = Decompose(domain, problem, text, kit, llm, config);
  EXPECT_TRUE(r.success);
  EXPECT_TRUE(VerifyResult(r));
  if (r.fallback_used) {
    EXPECT_FALSE(r.fallback_reason.empty());
  }
}

TEST_F(PipelineTest, BackendFailureFallsBackToSingleAgent) {
  CallbackBackend broken([](const ChatRequest&) -> std::string {
    throw BackendUnavailable("down");
  });
  const TwoStepResult r = Decompose(domain, problem, text, kit, broken, config);
  EXPECT_TRUE(r.success);
  EXPECT_TRUE(VerifyResult(r));
  EXPECT_EQ(r.execution_length, 6u);
  ASSERT_FALSE(r.transcript.empty());
  EXPECT_FALSE(r.transcript[0].error.empty());
}

TEST_F(PipelineTest, SingleAgentNeedsNoLlm) {
  config.n_agents = 1;
  CallbackBackend never([](const ChatRequest&) -> std::string {
    ADD_FAILURE() << "LLM called for one agent";
    return "None";
  });
  const TwoStepResult r = Decompose(domain, problem, text, kit, never, config);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.metrics.llm_calls, 0u);
}

TEST_F(PipelineTest, TranscriptJsonAndJointPlanText) {
  FixtureBackend fixtures(DataDir() / "fixtures" / "appendix-blocksworld");
  const TwoStepResult r = Decompose(domain, problem, text, kit, fixtures, config);
  const nlohmann::json j = TranscriptToJson(r);
  EXPECT_TRUE(j.dump().find("generator") != std::string::npos);
  EXPECT_TRUE(j.dump().find("translator") != std::string::npos);
  const std::string plan = FormatJointPlan(r);
  EXPECT_NE(plan.find("; agent0\n"), std::string::npos);
  EXPECT_NE(plan.find("; agent1\n"), std::string::npos);
}

}  // namespace
}  // namespace twostep
