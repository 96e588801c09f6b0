#include "twostep/executor.h"

#include <gtest/gtest.h>

#include "instances.h"
#include "twostep/errors.h"
#include "twostep/plan_io.h"

namespace twostep {
namespace {

using testing::AppendixFile;
using testing::LoadInstance;

Plan PlanOf(const GroundedTask& task, const std::string& text) {
  return ResolvePlan(task, ParsePlanText(text));
}

TEST(ExecutorTest, AppendixPlansReachTheirGoals) {
  struct Case {
    const char* domain;
    const char* stem;
  };
  for (const Case c : {Case{"blocksworld", "blocksworld-5"}, Case{"barman", "barman-1"},
                       Case{"gripper", "gripper-4-6"}, Case{"tyreworld", "tyreworld-2"},
                       Case{"termes", "termes-3x3"}}) {
    const auto inst = LoadInstance(c.domain, AppendixFile(std::string(c.stem) + ".pddl"));
    const Plan plan = ReadPlanFile(inst.task, AppendixFile(std::string(c.stem) + ".plan"));
    const auto report = ValidatePlan(inst.task, inst.task.init, plan);
    EXPECT_TRUE(report.valid) << c.stem;
    EXPECT_TRUE(report.goal_satisfied) << c.stem;
  }
}

TEST(ExecutorTest, ReportsFirstFailingStepAndLiteral) {
  const auto inst = LoadInstance("blocksworld", AppendixFile("bw-rand-3.pddl"));
  const Plan plan = PlanOf(inst.task, "(unstack b2 b3)\n(unstack b3 b1)\n");
  const auto report = ValidatePlan(inst.task, inst.task.init, plan);
  EXPECT_FALSE(report.valid);
  EXPECT_EQ(report.failing_step, 1u);
  ASSERT_TRUE(report.missing_precondition.has_value());
  EXPECT_EQ(report.missing_precondition->atom.predicate, "arm-empty");
}

TEST(ExecutorTest, ValidPlanThatMissesGoal) {
  const auto inst = LoadInstance("blocksworld", AppendixFile("bw-rand-3.pddl"));
  const auto report =
      ValidatePlan(inst.task, inst.task.init, PlanOf(inst.task, "(unstack b2 b3)\n"));
  EXPECT_TRUE(report.valid);
  EXPECT_FALSE(report.goal_satisfied);
}

TEST(ExecutorTest, ApplyThrowsWithViolatedLiteral) {
  const auto inst = LoadInstance("blocksworld", AppendixFile("bw-rand-3.pddl"));
  const auto index = inst.task.FindAction("pickup", {"b1"});
  ASSERT_TRUE(index.has_value());
  EXPECT_THROW(Apply(inst.task, inst.task.init, inst.task.actions[*index]), NotApplicable);
}

TEST(ExecutorTest, TraceHasOneStateMoreThanSteps) {
  const auto inst = LoadInstance("blocksworld", AppendixFile("bw-rand-3.pddl"));
  const auto trace =
      TraceStates(inst.task, inst.task.init, PlanOf(inst.task, "(unstack b2 b3)\n(putdown b2)"));
  EXPECT_EQ(trace.size(), 3u);
  EXPECT_EQ(trace.front(), inst.task.init);
}

TEST(ExecutorTest, EditInitialStateKeepsAgentAtomsOfOriginal) {
  const auto inst = LoadInstance("blocksworld", AppendixFile("bw-rand-3.pddl"));
  const auto trace = TraceStates(inst.task, inst.task.init, PlanOf(inst.task, "(unstack b2 b3)"));
  const State edited =
      EditInitialState(inst.task, inst.task.init, trace.back(), inst.classifier);
  auto has = [&](const State& s, Atom a) {
    auto id = inst.task.atoms.Find(a);
    return id && s.Contains(*id);
  };
  // Environment from the helper: b3 is now clear.
  EXPECT_TRUE(has(edited, {"clear", {"b3"}}));
  // Agent-specific atoms from the original: hand empty, not holding b2.
  EXPECT_TRUE(has(edited, {"arm-empty", {}}));
  EXPECT_FALSE(has(edited, {"holding", {"b2"}}));
}

TEST(ExecutorTest, EditInitialStateNeedsCompleteClassifier) {
  const auto inst = LoadInstance("blocksworld", AppendixFile("bw-rand-3.pddl"));
  const PredicateClassifier partial({"holding"}, {"on"});
  EXPECT_THROW(EditInitialState(inst.task, inst.task.init, inst.task.init, partial),
               ClassifierIncomplete);
}

TEST(PlanIoTest, ParsesBareAndParenthesizedLines) {
  const auto calls = ParsePlanText("; header\n(PICKUP b1)\nstack b1 b2\n\n; cost = 2\n");
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_EQ(calls[0], (ActionCall{"pickup", {"b1"}}));
  EXPECT_EQ(calls[1], (ActionCall{"stack", {"b1", "b2"}}));
  EXPECT_THROW(ParsePlanText("(pickup b1\n"), PlanParseError);
}

TEST(PlanIoTest, FormatRoundTrips) {
  const auto inst = LoadInstance("blocksworld", AppendixFile("blocksworld-5.pddl"));
  const Plan plan = ReadPlanFile(inst.task, AppendixFile("blocksworld-5.plan"));
  EXPECT_EQ(ResolvePlan(inst.task, ParsePlanText(FormatPlan(inst.task, plan))), plan);
  EXPECT_THROW(PlanOf(inst.task, "(teleport b1)"), PlanParseError);
}

}  // namespace
}  // namespace twostep
