#include "twostep/state.h"

namespace twostep {

bool State::ContainsNone(std::span<const AtomId> sorted) const {
  return !Intersects(atoms_, sorted);
}

State State::Apply(std::span<const AtomId> del, std::span<const AtomId> add) const {
  std::vector<AtomId> kept;
  kept.reserve(atoms_.size());
  std::set_difference(atoms_.begin(), atoms_.end(), del.begin(), del.end(),
                      std::back_inserter(kept));
  State out;
  out.atoms_.reserve(kept.size() + add.size());
  std::set_union(kept.begin(), kept.end(), add.begin(), add.end(),
                 std::back_inserter(out.atoms_));
  return out;
}

std::size_t State::Hash() const {
  // FNV-1a over the id sequence.
  std::size_t h = 1469598103934665603ULL;
  for (AtomId a : atoms_) {
    h ^= a;
    h *= 1099511628211ULL;
  }
  return h;
}

bool Intersects(std::span<const AtomId> a, std::span<const AtomId> b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

}  // namespace twostep
