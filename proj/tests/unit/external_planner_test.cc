#include "twostep/external_planner.h"

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>

#include "instances.h"
#include "twostep/errors.h"

namespace twostep {
namespace {

namespace fs = std::filesystem;
using testing::AppendixFile;
using testing::DomainFile;

class ExternalPlannerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("twostep-ext-" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  SolveOutcome Run(std::vector<std::string> args, double seconds = 10) {
    ExternalPlannerConfig config;
    config.binary = TWOSTEP_FAKE_PLANNER;
    config.alias_args = std::move(args);
    config.work_dir = dir_ / "work";
    TimeBudget budget;
    budget.seconds = seconds;
    return SolveExternal(DomainFile("blocksworld"), AppendixFile("blocksworld-5.pddl"), budget,
                         config);
  }

  fs::path Write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    WriteTextFile(p, text);
    return p;
  }

  fs::path dir_;
};

TEST_F(ExternalPlannerTest, ReadsAndValidatesPlan) {
  const SolveOutcome out = Run({"copy", AppendixFile("blocksworld-5.plan").string()});
  ASSERT_TRUE(out.solved());
  EXPECT_EQ(out.plan->cost(), 10u);
}

TEST_F(ExternalPlannerTest, LatestAnytimePlanWins) {
  const fs::path good = AppendixFile("blocksworld-5.plan");
  const fs::path bad = Write("bad.plan", "(unstack b3 b2)\n");
  // sas_plan.1 is the invalid one; sas_plan.2 supersedes it.
  const SolveOutcome out = Run({"anytime", bad.string(), good.string()});
  ASSERT_TRUE(out.solved());
  EXPECT_EQ(out.plan->cost(), 10u);
}

TEST_F(ExternalPlannerTest, LatestPlanFileOrdering) {
  Write("sas_plan", "");
  Write("sas_plan.2", "");
  Write("sas_plan.10", "");
  EXPECT_EQ(FindLatestPlanFile(dir_, "sas_plan").filename(), "sas_plan.10");
  EXPECT_TRUE(FindLatestPlanFile(dir_ / "missing", "sas_plan").empty());
}

TEST_F(ExternalPlannerTest, ErrorsAreTyped) {
  EXPECT_THROW(Run({"garbage"}), ExternalParseError);
  EXPECT_THROW(Run({"unknown"}), ExternalParseError);
  const fs::path short_plan = Write("short.plan", "(unstack b3 b2)\n");
  EXPECT_THROW(Run({"copy", short_plan.string()}), ExternalInvalidPlan);
  ExternalPlannerConfig config;
  config.binary = dir_ / "does-not-exist";
  TimeBudget budget;
  budget.seconds = 5;
  EXPECT_THROW(SolveExternal(DomainFile("blocksworld"), AppendixFile("blocksworld-5.pddl"),
                             budget, config),
               ExternalUnavailable);
}

TEST_F(ExternalPlannerTest, NoPlanMeansUnsolvable) {
  EXPECT_EQ(Run({"nothing"}).status, SolveStatus::kUnsolvable);
}

TEST_F(ExternalPlannerTest, BudgetKillsThePlanner) {
  const auto start = std::chrono::steady_clock::now();
  const SolveOutcome out = Run({"sleep"}, 0.5);
  const double took =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(out.status, SolveStatus::kTimeout);
  EXPECT_LT(took, 5.0);
}

}  // namespace
}  // namespace twostep
