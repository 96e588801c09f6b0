#ifndef TWOSTEP_GROUNDING_H_
#define TWOSTEP_GROUNDING_H_

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "twostep/pddl.h"
#include "twostep/state.h"

namespace twostep {

// Interned universe of ground atoms.
class AtomTable {
 public:
  AtomId Intern(const Atom& atom);
  std::optional<AtomId> Find(const Atom& atom) const;
  const Atom& Get(AtomId id) const { return atoms_[id]; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  static std::string Key(const Atom& atom);

  std::vector<Atom> atoms_;
  std::unordered_map<std::string, AtomId> index_;
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  // All four lists are sorted and duplicate-free.
  std::vector<AtomId> pre_pos;
  std::vector<AtomId> pre_neg;
  std::vector<AtomId> add;
  std::vector<AtomId> del;

  // `(name arg1 arg2 ...)`
  std::string ToString() const;
};

struct GroundGoal {
  std::vector<AtomId> pos;
  std::vector<AtomId> neg;

  bool SatisfiedBy(const State& state) const {
    return state.ContainsAll(pos) && state.ContainsNone(neg);
  }
};

struct GroundedTask {
  AtomTable atoms;
  std::vector<GroundAction> actions;
  State init;
  GroundGoal goal;

  // Maps a ground formula into the atom universe. Returns nullopt when a
  // positive literal names an atom outside the universe (it can never hold).
  // Negative literals over unknown atoms hold trivially and are dropped.
  std::optional<GroundGoal> GroundFormula(const Formula& formula) const;

  // Atoms outside the universe are ignored.
  State StateFromAtoms(const std::vector<Atom>& atoms) const;
  std::vector<Atom> AtomsOf(const State& state) const;

  std::optional<std::size_t> FindAction(const std::string& name,
                                        const std::vector<std::string>& args) const;
  void BuildActionIndex();

 private:
  std::unordered_map<std::string, std::size_t> action_index_;
};

struct GroundOptions {
  std::size_t max_actions = 1'000'000;
  // Keep only actions reachable from init under the delete relaxation.
  bool prune_unreachable = true;
};

// Enumerates all type-consistent bindings of every schema. Equality
// constraints are compiled away. Throws GroundingExplosion past the cap.
GroundedTask Ground(const DomainDef& domain, const ProblemDef& problem,
                    const GroundOptions& options = {});

}  // namespace twostep

#endif  // TWOSTEP_GROUNDING_H_
