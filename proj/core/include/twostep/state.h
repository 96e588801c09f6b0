#ifndef TWOSTEP_STATE_H_
#define TWOSTEP_STATE_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace twostep {

using AtomId = std::uint32_t;

// Closed-world state: the sorted set of atom ids that hold.
class State {
 public:
  State() = default;
  explicit State(std::vector<AtomId> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end());
    atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
  }

  bool Contains(AtomId atom) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), atom);
  }
  // Both ranges must be sorted.
  bool ContainsAll(std::span<const AtomId> sorted) const {
    return std::includes(atoms_.begin(), atoms_.end(), sorted.begin(), sorted.end());
  }
  bool ContainsNone(std::span<const AtomId> sorted) const;

  // (this - del) | add, both sorted.
  State Apply(std::span<const AtomId> del, std::span<const AtomId> add) const;

  const std::vector<AtomId>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  std::size_t Hash() const;

  friend bool operator==(const State&, const State&) = default;

 private:
  std::vector<AtomId> atoms_;
};

// True iff the two sorted ranges share an element.
bool Intersects(std::span<const AtomId> a, std::span<const AtomId> b);

}  // namespace twostep

template <>
struct std::hash<twostep::State> {
  std::size_t operator()(const twostep::State& s) const noexcept { return s.Hash(); }
};

#endif  // TWOSTEP_STATE_H_
