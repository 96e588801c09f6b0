#include "twostep/executor.h"

#include "twostep/errors.h"

namespace twostep {

bool Applicable(const State& state, const GroundAction& action) {
  return state.ContainsAll(action.pre_pos) && state.ContainsNone(action.pre_neg);
}

std::optional<Literal> ViolatedPrecondition(const GroundedTask& task,
                                            const State& state,
                                            const GroundAction& action) {
  for (AtomId a : action.pre_pos) {
    if (!state.Contains(a)) return Literal{task.atoms.Get(a), false};
  }
  for (AtomId a : action.pre_neg) {
    if (state.Contains(a)) return Literal{task.atoms.Get(a), true};
  }
  return std::nullopt;
}

State Apply(const GroundedTask& task, const State& state, const GroundAction& action) {
  if (auto violated = ViolatedPrecondition(task, state, action)) {
    throw NotApplicable(action.ToString(), violated->ToString());
  }
  return state.Apply(action.del, action.add);
}

ValidationReport ValidatePlan(const GroundedTask& task, const State& init,
                              const Plan& plan) {
  return ValidatePlan(task, init, plan, task.goal);
}

ValidationReport ValidatePlan(const GroundedTask& task, const State& init,
                              const Plan& plan, const GroundGoal& goal) {
  ValidationReport report;
  State state = init;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (plan.steps[i] >= task.actions.size()) {
      report.failing_step = i;
      report.final_state = std::move(state);
      return report;
    }
    const GroundAction& action = task.actions[plan.steps[i]];
    if (auto violated = ViolatedPrecondition(task, state, action)) {
      report.failing_step = i;
      report.missing_precondition = std::move(violated);
      report.final_state = std::move(state);
      report.goal_satisfied = goal.SatisfiedBy(report.final_state);
      return report;
    }
    state = state.Apply(action.del, action.add);
  }
  report.valid = true;
  report.final_state = std::move(state);
  report.goal_satisfied = goal.SatisfiedBy(report.final_state);
  return report;
}

std::vector<State> TraceStates(const GroundedTask& task, const State& init,
                               const Plan& plan) {
  std::vector<State> trace;
  trace.reserve(plan.steps.size() + 1);
  trace.push_back(init);
  for (std::size_t step : plan.steps) {
    trace.push_back(Apply(task, trace.back(), task.actions.at(step)));
  }
  return trace;
}

State EditInitialState(const GroundedTask& task, const State& original_init,
                       const State& helper_final,
                       const PredicateClassifier& classifier) {
  std::vector<AtomId> atoms;
  for (AtomId a : helper_final.atoms()) {
    if (!classifier.IsAgentSpecific(task.atoms.Get(a).predicate)) atoms.push_back(a);
  }
  for (AtomId a : original_init.atoms()) {
    if (classifier.IsAgentSpecific(task.atoms.Get(a).predicate)) atoms.push_back(a);
  }
  return State(std::move(atoms));
}

ProblemDef EditInitialState(const ProblemDef& problem, const GroundedTask& task,
                            const State& helper_final,
                            const PredicateClassifier& classifier) {
  ProblemDef edited = problem;
  edited.init.clear();
  for (AtomId a : helper_final.atoms()) {
    const Atom& atom = task.atoms.Get(a);
    if (!classifier.IsAgentSpecific(atom.predicate)) edited.init.push_back(atom);
  }
  for (const Atom& atom : problem.init) {
    if (classifier.IsAgentSpecific(atom.predicate)) edited.init.push_back(atom);
  }
  return edited;
}

}  // namespace twostep
