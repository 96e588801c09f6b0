#include "twostep/classifier.h"

#include <gtest/gtest.h>

#include "instances.h"
#include "twostep/errors.h"

namespace twostep {
namespace {

using testing::DomainFile;

TEST(ClassifierTest, BuiltinsCoverBenchmarkDomains) {
  const DomainDef bw = LoadDomain(DomainFile("blocksworld"));
  const PredicateClassifier c = ResolveClassifier(bw);
  EXPECT_TRUE(c.IsAgentSpecific("holding"));
  EXPECT_TRUE(c.IsAgentSpecific("arm-empty"));
  EXPECT_FALSE(c.IsAgentSpecific("on"));
  const PredicateClassifier tyre = ResolveClassifier(LoadDomain(DomainFile("tyreworld")));
  EXPECT_TRUE(tyre.agent_specific().empty());
}

TEST(ClassifierTest, RobotTypedPredicatesAreAgentSpecific) {
  const DomainDef gripper = LoadDomain(DomainFile("gripper"));
  const auto typed = AgentTypedPredicates(gripper);
  EXPECT_TRUE(typed.contains("at-robby"));
  EXPECT_TRUE(typed.contains("carry"));
  EXPECT_FALSE(typed.contains("at"));
}

TEST(ClassifierTest, ConfigOverridesDefaults) {
  const DomainDef bw = LoadDomain(DomainFile("blocksworld"));
  const ClassifierConfig config =
      ClassifierConfig::Parse("# comment\nblocksworld-4ops = holding\n");
  const PredicateClassifier c = ResolveClassifier(bw, &config);
  EXPECT_TRUE(c.IsAgentSpecific("holding"));
  EXPECT_FALSE(c.IsAgentSpecific("arm-empty"));
}

TEST(ClassifierTest, BundledConfigMatchesBuiltins) {
  const ClassifierConfig config =
      ClassifierConfig::Load(testing::DataDir() / "classifiers.conf");
  for (const char* d : {"blocksworld-4ops", "gripper-strips", "barman", "termes", "tyreworld"}) {
    EXPECT_EQ(config.Lookup(d), BuiltinAgentPredicates(d)) << d;
  }
}

TEST(ClassifierTest, UnknownPredicatesAreRejected) {
  const DomainDef bw = LoadDomain(DomainFile("blocksworld"));
  EXPECT_THROW(PredicateClassifier::ForDomain(bw, {"flies"}), SemanticError);
  const PredicateClassifier partial({"holding"}, {"on"});
  EXPECT_THROW(partial.IsAgentSpecific("clear"), ClassifierIncomplete);
}

}  // namespace
}  // namespace twostep
