#ifndef TWOSTEP_MULTIAGENT_H_
#define TWOSTEP_MULTIAGENT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twostep/classifier.h"
#include "twostep/executor.h"
#include "twostep/grounding.h"
#include "twostep/parallel_exec.h"
#include "twostep/pddl.h"

namespace twostep {

enum class GoalPolicy {
  // Negative agent-specific goal literals must hold for every agent; positive
  // ones are bound to the first agent.
  kBindFirstAgent,
  // Any agent-specific goal literal raises GoalAgentAmbiguity.
  kStrict,
};

struct LiftConfig {
  std::size_t n_agents = 1;
  std::string agent_type_name = "agent";
  PredicateClassifier classifier;
  GoalPolicy goal_policy = GoalPolicy::kBindFirstAgent;
};

// A declared `agent` or `robot` type that every agent-specific predicate
// already takes as a parameter. Such domains are lifted by treating that
// type as the agent role instead of adding a parameter.
std::optional<std::string> NativeAgentType(const DomainDef& domain,
                                           const PredicateClassifier& classifier);

// Adds the agent type and a leading `?ag` parameter to every action, and a
// leading agent argument to every agent-specific predicate. The result is
// named `<name>-ma`.
DomainDef LiftDomain(const DomainDef& domain, const LiftConfig& config);

// Adds the agent objects, replicates agent-specific init atoms per agent and
// rewrites agent-specific goal literals per `config.goal_policy`.
ProblemDef LiftProblem(const ProblemDef& problem, const DomainDef& lifted_domain,
                       const LiftConfig& config);

struct LiftedTask {
  DomainDef domain;
  ProblemDef problem;
  // Agent objects in agent order; agents[0] is the main agent.
  std::vector<std::string> agents;
  // Type whose objects are the agents.
  std::string agent_type;
};

LiftedTask Lift(const DomainDef& domain, const ProblemDef& problem,
                const LiftConfig& config);

// Agent objects of a lifted problem in agent order.
std::vector<std::string> AgentObjects(const ProblemDef& lifted_problem,
                                      const DomainDef& lifted_domain,
                                      std::string_view agent_type);

// Position of the acting agent among the schema's parameters.
std::optional<std::size_t> AgentArgumentIndex(const ActionSchema& schema,
                                              const DomainDef& lifted_domain,
                                              std::string_view agent_type);

// Splits a sequential multi-agent plan into per-agent subsequences keyed by
// each action's agent argument. Throws SemanticError for actions without one.
JointPlan SplitByAgent(const GroundedTask& lifted_task, const Plan& plan,
                       const LiftedTask& lift);

}  // namespace twostep

#endif  // TWOSTEP_MULTIAGENT_H_
