#include "twostep/grounding.h"

#include <algorithm>
#include <deque>
#include <set>

#include "twostep/errors.h"

namespace twostep {

std::string AtomTable::Key(const Atom& atom) {
  std::string key = atom.predicate;
  for (const auto& arg : atom.args) {
    key += ' ';
    key += arg;
  }
  return key;
}

AtomId AtomTable::Intern(const Atom& atom) {
  auto [it, inserted] =
      index_.try_emplace(Key(atom), static_cast<AtomId>(atoms_.size()));
  if (inserted) atoms_.push_back(atom);
  return it->second;
}

std::optional<AtomId> AtomTable::Find(const Atom& atom) const {
  auto it = index_.find(Key(atom));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string GroundAction::ToString() const {
  std::string out = "(" + name;
  for (const auto& arg : args) out += " " + arg;
  return out + ")";
}

namespace {

std::string ActionKey(const std::string& name, const std::vector<std::string>& args) {
  std::string key = name;
  for (const auto& arg : args) {
    key += ' ';
    key += arg;
  }
  return key;
}

void SortUnique(std::vector<AtomId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::optional<GroundGoal> GroundedTask::GroundFormula(const Formula& formula) const {
  GroundGoal goal;
  for (const auto& lit : formula.literals) {
    auto id = atoms.Find(lit.atom);
    if (!id) {
      if (lit.negated) continue;
      return std::nullopt;
    }
    (lit.negated ? goal.neg : goal.pos).push_back(*id);
  }
  SortUnique(goal.pos);
  SortUnique(goal.neg);
  return goal;
}

State GroundedTask::StateFromAtoms(const std::vector<Atom>& list) const {
  std::vector<AtomId> ids;
  for (const auto& atom : list) {
    if (auto id = atoms.Find(atom)) ids.push_back(*id);
  }
  return State(std::move(ids));
}

std::vector<Atom> GroundedTask::AtomsOf(const State& state) const {
  std::vector<Atom> out;
  out.reserve(state.size());
  for (AtomId id : state.atoms()) out.push_back(atoms.Get(id));
  return out;
}

std::optional<std::size_t> GroundedTask::FindAction(
    const std::string& name, const std::vector<std::string>& args) const {
  auto it = action_index_.find(ActionKey(name, args));
  if (it == action_index_.end()) return std::nullopt;
  return it->second;
}

void GroundedTask::BuildActionIndex() {
  action_index_.clear();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    action_index_.emplace(ActionKey(actions[i].name, actions[i].args), i);
  }
}

namespace {

struct Candidate {
  std::string name;
  std::vector<std::string> args;
  std::vector<AtomId> pre_pos, pre_neg, add, del;
};

class Grounder {
 public:
  Grounder(const DomainDef& domain, const ProblemDef& problem,
           const GroundOptions& options)
      : domain_(domain), problem_(problem), options_(options) {
    for (const auto& c : domain.constants) objects_.push_back(c);
    for (const auto& o : problem.objects) {
      if (std::none_of(objects_.begin(), objects_.end(),
                       [&](const TypedName& t) { return t.name == o.name; })) {
        objects_.push_back(o);
      }
    }
    std::set<std::string> fluent;
    for (const auto& a : domain.actions) {
      for (const auto& lit : a.effect) fluent.insert(lit.atom.predicate);
    }
    for (const auto& p : domain.predicates) {
      if (!fluent.contains(p.name)) static_predicates_.insert(p.name);
    }
    for (const auto& atom : problem.init) {
      if (static_predicates_.contains(atom.predicate)) static_init_.insert(atom);
    }
  }

  GroundedTask Run() {
    for (const auto& schema : domain_.actions) GroundSchema(schema);

    std::vector<bool> keep(candidates_.size(), true);
    if (options_.prune_unreachable) keep = RelaxedReachable();

    // Compact the universe to atoms that are actually referenced.
    GroundedTask task;
    std::vector<AtomId> remap(scratch_.size(), kUnmapped);
    auto map = [&](AtomId old) {
      if (remap[old] == kUnmapped) remap[old] = task.atoms.Intern(scratch_.Get(old));
      return remap[old];
    };
    auto map_all = [&](const std::vector<AtomId>& in) {
      std::vector<AtomId> out;
      out.reserve(in.size());
      for (AtomId a : in) out.push_back(map(a));
      SortUnique(out);
      return out;
    };

    std::vector<AtomId> init_ids;
    for (const auto& atom : problem_.init) init_ids.push_back(map(scratch_.Intern(atom)));
    task.init = State(std::move(init_ids));
    for (const auto& lit : problem_.goal.literals) {
      AtomId id = map(scratch_.Intern(lit.atom));
      (lit.negated ? task.goal.neg : task.goal.pos).push_back(id);
    }
    SortUnique(task.goal.pos);
    SortUnique(task.goal.neg);

    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      if (!keep[i]) continue;
      Candidate& c = candidates_[i];
      GroundAction action;
      action.name = std::move(c.name);
      action.args = std::move(c.args);
      action.pre_pos = map_all(c.pre_pos);
      action.pre_neg = map_all(c.pre_neg);
      action.add = map_all(c.add);
      action.del = map_all(c.del);
      task.actions.push_back(std::move(action));
    }
    task.BuildActionIndex();
    return task;
  }

 private:
  static constexpr AtomId kUnmapped = static_cast<AtomId>(-1);

  void GroundSchema(const ActionSchema& schema) {
    std::vector<std::vector<const std::string*>> domains(schema.params.size());
    for (std::size_t i = 0; i < schema.params.size(); ++i) {
      for (const auto& o : objects_) {
        if (domain_.IsSubtype(o.type, schema.params[i].type)) {
          domains[i].push_back(&o.name);
        }
      }
    }
    std::vector<const std::string*> binding(schema.params.size(), nullptr);
    Bind(schema, domains, binding, 0);
  }

  const std::string* Resolve(const ActionSchema& schema,
                             const std::vector<const std::string*>& binding,
                             const std::string& term) const {
    if (term.empty() || term[0] != '?') return &term;
    for (std::size_t i = 0; i < schema.params.size(); ++i) {
      if (schema.params[i].name == term) return binding[i];
    }
    return nullptr;
  }

  // Checks every constraint whose terms are all bound.
  bool Consistent(const ActionSchema& schema,
                  const std::vector<const std::string*>& binding) const {
    for (const auto& eq : schema.precondition.equalities) {
      const std::string* l = Resolve(schema, binding, eq.lhs);
      const std::string* r = Resolve(schema, binding, eq.rhs);
      if (l == nullptr || r == nullptr) continue;
      if ((*l == *r) == eq.negated) return false;
    }
    if (!options_.prune_unreachable) return true;
    for (const auto& lit : schema.precondition.literals) {
      if (!static_predicates_.contains(lit.atom.predicate)) continue;
      Atom ground;
      if (!Substitute(schema, binding, lit.atom, ground)) continue;
      if (static_init_.contains(ground) == lit.negated) return false;
    }
    return true;
  }

  bool Substitute(const ActionSchema& schema,
                  const std::vector<const std::string*>& binding, const Atom& atom,
                  Atom& out) const {
    out.predicate = atom.predicate;
    out.args.clear();
    for (const auto& term : atom.args) {
      const std::string* value = Resolve(schema, binding, term);
      if (value == nullptr) return false;
      out.args.push_back(*value);
    }
    return true;
  }

  void Bind(const ActionSchema& schema,
            const std::vector<std::vector<const std::string*>>& domains,
            std::vector<const std::string*>& binding, std::size_t depth) {
    if (depth == binding.size()) {
      Emit(schema, binding);
      return;
    }
    for (const std::string* value : domains[depth]) {
      binding[depth] = value;
      if (Consistent(schema, binding)) Bind(schema, domains, binding, depth + 1);
    }
    binding[depth] = nullptr;
  }

  void Emit(const ActionSchema& schema, const std::vector<const std::string*>& binding) {
    if (candidates_.size() >= options_.max_actions) {
      throw GroundingExplosion("more than " + std::to_string(options_.max_actions) +
                               " ground actions (while grounding '" + schema.name +
                               "')");
    }
    Candidate c;
    c.name = schema.name;
    for (const std::string* value : binding) c.args.push_back(*value);
    Atom ground;
    for (const auto& lit : schema.precondition.literals) {
      Substitute(schema, binding, lit.atom, ground);
      (lit.negated ? c.pre_neg : c.pre_pos).push_back(scratch_.Intern(ground));
    }
    for (const auto& lit : schema.effect) {
      Substitute(schema, binding, lit.atom, ground);
      (lit.negated ? c.del : c.add).push_back(scratch_.Intern(ground));
    }
    SortUnique(c.pre_pos);
    SortUnique(c.pre_neg);
    SortUnique(c.add);
    SortUnique(c.del);
    if (options_.prune_unreachable) {
      // Contradictory preconditions can never hold.
      for (AtomId a : c.pre_pos) {
        if (std::binary_search(c.pre_neg.begin(), c.pre_neg.end(), a)) return;
      }
    }
    candidates_.push_back(std::move(c));
  }

  std::vector<bool> RelaxedReachable() {
    std::vector<bool> reached(scratch_.size(), false);
    std::vector<std::vector<std::size_t>> consumers(scratch_.size());
    std::vector<std::size_t> missing(candidates_.size());
    std::vector<bool> fired(candidates_.size(), false);
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      missing[i] = candidates_[i].pre_pos.size();
      for (AtomId a : candidates_[i].pre_pos) consumers[a].push_back(i);
      if (missing[i] == 0) ready.push_back(i);
    }
    std::deque<AtomId> frontier;
    for (const auto& atom : problem_.init) {
      AtomId id = scratch_.Intern(atom);
      if (id >= reached.size()) {
        reached.resize(id + 1, false);
        consumers.resize(id + 1);
      }
      if (!reached[id]) {
        reached[id] = true;
        frontier.push_back(id);
      }
    }
    while (!frontier.empty() || !ready.empty()) {
      while (!frontier.empty()) {
        AtomId a = frontier.front();
        frontier.pop_front();
        for (std::size_t consumer : consumers[a]) {
          if (--missing[consumer] == 0) ready.push_back(consumer);
        }
      }
      while (!ready.empty()) {
        std::size_t i = ready.front();
        ready.pop_front();
        if (fired[i]) continue;
        fired[i] = true;
        for (AtomId a : candidates_[i].add) {
          if (!reached[a]) {
            reached[a] = true;
            frontier.push_back(a);
          }
        }
      }
    }
    return fired;
  }

  const DomainDef& domain_;
  const ProblemDef& problem_;
  GroundOptions options_;
  std::vector<TypedName> objects_;
  std::set<std::string> static_predicates_;
  std::set<Atom> static_init_;
  AtomTable scratch_;
  std::vector<Candidate> candidates_;
};

}  // namespace

GroundedTask Ground(const DomainDef& domain, const ProblemDef& problem,
                    const GroundOptions& options) {
  return Grounder(domain, problem, options).Run();
}

}  // namespace twostep
