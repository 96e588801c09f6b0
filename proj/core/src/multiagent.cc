#include "twostep/multiagent.h"

#include <algorithm>
#include <set>

#include "twostep/errors.h"

namespace twostep {

namespace {

bool AgentSpecific(const LiftConfig& config, std::string_view predicate) {
  return config.classifier.IsAgentSpecific(predicate);
}

// First variable name of the form ?ag, ?ag1, ... unused by the schema.
std::string FreshAgentVariable(const ActionSchema& schema) {
  std::set<std::string> used;
  for (const auto& p : schema.params) used.insert(p.name);
  std::string name = "?ag";
  for (int i = 1; used.contains(name); ++i) name = "?ag" + std::to_string(i);
  return name;
}

Literal PrependArgument(Literal literal, const std::string& arg) {
  literal.atom.args.insert(literal.atom.args.begin(), arg);
  return literal;
}

std::vector<Literal> RewireLiterals(const std::vector<Literal>& literals,
                                    const LiftConfig& config, const std::string& ag) {
  std::vector<Literal> out;
  for (const auto& l : literals) {
    out.push_back(AgentSpecific(config, l.atom.predicate) ? PrependArgument(l, ag) : l);
  }
  return out;
}

std::string AgentName(std::size_t index) { return "agent" + std::to_string(index); }

bool IsAliased(const ProblemDef& problem, const DomainDef& lifted,
               const LiftConfig& config) {
  if (!lifted.HasType(config.agent_type_name)) return true;
  for (const auto& o : problem.objects) {
    if (lifted.IsSubtype(o.type, config.agent_type_name)) return true;
  }
  return false;
}

}  // namespace

std::optional<std::string> NativeAgentType(const DomainDef& domain,
                                           const PredicateClassifier& classifier) {
  if (classifier.agent_specific().empty()) return std::nullopt;
  for (const std::string type : {"agent", "robot"}) {
    if (!domain.HasType(type)) continue;
    bool all = true;
    for (const auto& name : classifier.agent_specific()) {
      const PredicateDecl* decl = domain.FindPredicate(name);
      const bool has = decl != nullptr &&
                       std::any_of(decl->params.begin(), decl->params.end(),
                                   [&](const TypedName& p) {
                                     return domain.IsSubtype(p.type, type);
                                   });
      if (!has) {
        all = false;
        break;
      }
    }
    if (all) return type;
  }
  return std::nullopt;
}

DomainDef LiftDomain(const DomainDef& domain, const LiftConfig& config) {
  if (config.n_agents == 0) throw SemanticError("n_agents must be at least 1");
  for (const auto& p : domain.predicates) {
    if (!config.classifier.Covers(p.name)) throw ClassifierIncomplete(p.name);
  }
  DomainDef lifted = domain;
  lifted.name = domain.name + "-ma";

  if (auto native = NativeAgentType(domain, config.classifier)) {
    for (auto& action : lifted.actions) {
      const bool has = std::any_of(action.params.begin(), action.params.end(),
                                   [&](const TypedName& p) {
                                     return domain.IsSubtype(p.type, *native);
                                   });
      if (!has) {
        action.params.insert(action.params.begin(),
                             TypedName{FreshAgentVariable(action), *native});
      }
    }
    return lifted;
  }

  if (domain.HasType(config.agent_type_name)) {
    throw SemanticError("agent type '" + config.agent_type_name +
                        "' collides with a type of domain " + domain.name);
  }
  lifted.types[config.agent_type_name] = std::string(kRootType);
  if (std::find(lifted.requirements.begin(), lifted.requirements.end(), ":typing") ==
      lifted.requirements.end()) {
    lifted.requirements.push_back(":typing");
  }
  for (auto& pred : lifted.predicates) {
    if (AgentSpecific(config, pred.name)) {
      pred.params.insert(pred.params.begin(), TypedName{"?ag", config.agent_type_name});
    }
  }
  for (auto& action : lifted.actions) {
    const std::string ag = FreshAgentVariable(action);
    action.params.insert(action.params.begin(), TypedName{ag, config.agent_type_name});
    action.precondition.literals =
        RewireLiterals(action.precondition.literals, config, ag);
    action.effect = RewireLiterals(action.effect, config, ag);
  }
  return lifted;
}

ProblemDef LiftProblem(const ProblemDef& problem, const DomainDef& lifted_domain,
                       const LiftConfig& config) {
  if (config.n_agents == 0) throw SemanticError("n_agents must be at least 1");
  ProblemDef lifted = problem;
  lifted.name = problem.name + "-ma" + std::to_string(config.n_agents);
  lifted.domain_name = lifted_domain.name;

  if (IsAliased(problem, lifted_domain, config)) {
    auto native = NativeAgentType(lifted_domain, config.classifier);
    if (!native) {
      throw SemanticError("domain " + lifted_domain.name + " has no agent type");
    }
    std::string first;
    for (const auto& o : problem.objects) {
      if (lifted_domain.IsSubtype(o.type, *native)) {
        first = o.name;
        break;
      }
    }
    if (first.empty()) throw SemanticError("problem has no object of type " + *native);

    auto substitute = [&](Atom atom, const std::string& agent) {
      for (auto& a : atom.args) {
        if (a == first) a = agent;
      }
      return atom;
    };
    auto mentions_first = [&](const Atom& atom) {
      return std::find(atom.args.begin(), atom.args.end(), first) != atom.args.end();
    };
    for (std::size_t k = 2; k <= config.n_agents; ++k) {
      const std::string agent = AgentName(k);
      lifted.objects.push_back({agent, *native});
      for (const auto& atom : problem.init) {
        if (AgentSpecific(config, atom.predicate) && mentions_first(atom)) {
          lifted.init.push_back(substitute(atom, agent));
        }
      }
    }
    for (const auto& literal : problem.goal.literals) {
      if (!AgentSpecific(config, literal.atom.predicate)) continue;
      if (config.goal_policy == GoalPolicy::kStrict) {
        throw GoalAgentAmbiguity("agent-specific goal literal " + literal.ToString());
      }
      if (!literal.negated || !mentions_first(literal.atom)) continue;
      for (std::size_t k = 2; k <= config.n_agents; ++k) {
        lifted.goal.literals.push_back({substitute(literal.atom, AgentName(k)), true});
      }
    }
    return lifted;
  }

  for (std::size_t k = 1; k <= config.n_agents; ++k) {
    lifted.objects.push_back({AgentName(k), config.agent_type_name});
  }
  lifted.init.clear();
  for (const auto& atom : problem.init) {
    if (!AgentSpecific(config, atom.predicate)) {
      lifted.init.push_back(atom);
      continue;
    }
    for (std::size_t k = 1; k <= config.n_agents; ++k) {
      Atom copy = atom;
      copy.args.insert(copy.args.begin(), AgentName(k));
      lifted.init.push_back(std::move(copy));
    }
  }
  lifted.goal.literals.clear();
  for (const auto& literal : problem.goal.literals) {
    if (!AgentSpecific(config, literal.atom.predicate)) {
      lifted.goal.literals.push_back(literal);
      continue;
    }
    if (config.goal_policy == GoalPolicy::kStrict) {
      throw GoalAgentAmbiguity("agent-specific goal literal " + literal.ToString());
    }
    if (literal.negated) {
      for (std::size_t k = 1; k <= config.n_agents; ++k) {
        lifted.goal.literals.push_back(PrependArgument(literal, AgentName(k)));
      }
    } else {
      lifted.goal.literals.push_back(PrependArgument(literal, AgentName(1)));
    }
  }
  return lifted;
}

LiftedTask Lift(const DomainDef& domain, const ProblemDef& problem,
                const LiftConfig& config) {
  LiftedTask task;
  task.domain = LiftDomain(domain, config);
  task.problem = LiftProblem(problem, task.domain, config);
  if (IsAliased(problem, task.domain, config)) {
    task.agent_type = *NativeAgentType(task.domain, config.classifier);
  } else {
    task.agent_type = config.agent_type_name;
  }
  task.agents = AgentObjects(task.problem, task.domain, task.agent_type);
  return task;
}

std::vector<std::string> AgentObjects(const ProblemDef& lifted_problem,
                                      const DomainDef& lifted_domain,
                                      std::string_view agent_type) {
  std::vector<std::string> agents;
  for (const auto& o : lifted_problem.objects) {
    if (lifted_domain.IsSubtype(o.type, agent_type)) agents.push_back(o.name);
  }
  return agents;
}

std::optional<std::size_t> AgentArgumentIndex(const ActionSchema& schema,
                                              const DomainDef& lifted_domain,
                                              std::string_view agent_type) {
  for (std::size_t i = 0; i < schema.params.size(); ++i) {
    if (lifted_domain.IsSubtype(schema.params[i].type, agent_type)) return i;
  }
  return std::nullopt;
}

JointPlan SplitByAgent(const GroundedTask& lifted_task, const Plan& plan,
                       const LiftedTask& lift) {
  JointPlan joint;
  joint.plans.resize(lift.agents.size());
  joint.agent_ids = lift.agents;
  for (std::size_t step : plan.steps) {
    const GroundAction& action = lifted_task.actions.at(step);
    const ActionSchema* schema = lift.domain.FindAction(action.name);
    std::optional<std::size_t> index;
    if (schema != nullptr) index = AgentArgumentIndex(*schema, lift.domain, lift.agent_type);
    if (!index) {
      throw SemanticError("action " + action.ToString() + " has no agent argument");
    }
    const auto it = std::find(lift.agents.begin(), lift.agents.end(), action.args[*index]);
    if (it == lift.agents.end()) {
      throw SemanticError("action " + action.ToString() + " names an unknown agent");
    }
    joint.plans[static_cast<std::size_t>(it - lift.agents.begin())].steps.push_back(step);
  }
  return joint;
}

}  // namespace twostep
