#include "twostep/pddl.h"

#include <gtest/gtest.h>

#include "instances.h"
#include "twostep/errors.h"

namespace twostep {
namespace {

using testing::AppendixFile;
using testing::DomainFile;

TEST(PddlTest, ParsesEveryBundledDomain) {
  for (const char* d : {"blocksworld", "gripper", "barman", "tyreworld", "termes"}) {
    const DomainDef domain = LoadDomain(DomainFile(d));
    EXPECT_FALSE(domain.actions.empty()) << d;
    EXPECT_FALSE(domain.predicates.empty()) << d;
  }
}

TEST(PddlTest, ParsesProblemWithTypedObjects) {
  const DomainDef domain = LoadDomain(DomainFile("gripper"));
  const ProblemDef p = LoadProblem(AppendixFile("gripper-2-2-2.pddl"), domain);
  EXPECT_EQ(p.name, "gripper-2-2-2");
  EXPECT_EQ(p.ObjectType("robot1"), "robot");
  EXPECT_EQ(p.ObjectType("ball1"), "object");
  EXPECT_EQ(p.goal.literals.size(), 2u);
  EXPECT_TRUE(domain.IsSubtype("robot", "object"));
}

TEST(PddlTest, BlocksworldKeepsInequalityConstraint) {
  const DomainDef domain = LoadDomain(DomainFile("blocksworld"));
  const ActionSchema* stack = domain.FindAction("stack");
  ASSERT_NE(stack, nullptr);
  ASSERT_EQ(stack->precondition.equalities.size(), 1u);
  EXPECT_TRUE(stack->precondition.equalities[0].negated);
}

TEST(PddlTest, RejectsUnsupportedFeatures) {
  const char* text =
      "(define (domain d) (:predicates (p ?x)) "
      "(:action a :parameters (?x) :precondition (or (p ?x) (p ?x)) :effect (p ?x)))";
  EXPECT_THROW(ParseDomain(text), UnsupportedFeature);
  const char* conditional =
      "(define (domain d) (:predicates (p ?x)) "
      "(:action a :parameters (?x) :effect (when (p ?x) (not (p ?x)))))";
  EXPECT_THROW(ParseDomain(conditional), UnsupportedFeature);
}

TEST(PddlTest, RejectsUndeclaredNames) {
  const DomainDef domain = LoadDomain(DomainFile("blocksworld"));
  EXPECT_THROW(ParseProblem("(define (problem p) (:domain blocksworld-4ops) (:objects a) "
                            "(:init (on a zz)) (:goal (clear a)))",
                            domain),
               SemanticError);
  EXPECT_THROW(ParseProblem("(define (problem p) (:domain blocksworld-4ops) (:objects a) "
                            "(:init (flies a)) (:goal (clear a)))",
                            domain),
               SemanticError);
}

TEST(PddlTest, SerializationRoundTrips) {
  const DomainDef domain = LoadDomain(DomainFile("barman"));
  const DomainDef again = ParseDomain(SerializeDomain(domain));
  EXPECT_EQ(again.name, domain.name);
  EXPECT_EQ(again.actions.size(), domain.actions.size());
  const ProblemDef problem = LoadProblem(AppendixFile("barman-1.pddl"), domain);
  const ProblemDef p2 = ParseProblem(SerializeProblem(problem), again);
  EXPECT_EQ(p2.InitSet(), problem.InitSet());
  EXPECT_EQ(p2.goal.LiteralSet(), problem.goal.LiteralSet());
}

TEST(PddlTest, SerializeGoalIsSingleLine) {
  const DomainDef domain = LoadDomain(DomainFile("termes"));
  const ProblemDef problem = LoadProblem(AppendixFile("termes-3x3.pddl"), domain);
  const std::string goal = SerializeGoal(problem.goal);
  EXPECT_EQ(goal.find('\n'), std::string::npos);
  EXPECT_NE(goal.find("(not (has-block))"), std::string::npos);
}

TEST(PddlTest, ValidateGroundFormulaNamesOffendingLiteral) {
  const DomainDef domain = LoadDomain(DomainFile("blocksworld"));
  const ProblemDef problem = LoadProblem(AppendixFile("bw-rand-3.pddl"), domain);
  Formula f;
  f.literals.push_back({{"on", {"b1", "b9"}}, false});
  try {
    ValidateGroundFormula(f, domain, problem);
    FAIL();
  } catch (const SemanticError& e) {
    EXPECT_NE(std::string(e.what()).find("b9"), std::string::npos);
  }
}

}  // namespace
}  // namespace twostep
