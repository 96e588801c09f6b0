#ifndef TWOSTEP_PDDL_H_
#define TWOSTEP_PDDL_H_

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "twostep/sexpr.h"

namespace twostep {

inline constexpr std::string_view kRootType = "object";

struct TypedName {
  std::string name;
  std::string type{kRootType};

  auto operator<=>(const TypedName&) const = default;
};

// A predicate applied to arguments. Arguments are variables (`?x`) inside
// action schemas and object names everywhere else.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;
  std::string ToString() const;
};

struct Literal {
  Atom atom;
  bool negated = false;

  auto operator<=>(const Literal&) const = default;
  std::string ToString() const;
};

// `(= a b)` or `(not (= a b))` inside a precondition.
struct Equality {
  std::string lhs;
  std::string rhs;
  bool negated = false;

  auto operator<=>(const Equality&) const = default;
};

// Conjunction of literals and equality constraints. The empty formula is
// trivially true.
struct Formula {
  std::vector<Literal> literals;
  std::vector<Equality> equalities;

  bool Empty() const { return literals.empty() && equalities.empty(); }
  std::set<Literal> LiteralSet() const {
    return {literals.begin(), literals.end()};
  }
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> params;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  Formula precondition;
  // Positive literals add, negated literals delete.
  std::vector<Literal> effect;
};

struct DomainDef {
  std::string name;
  std::vector<std::string> requirements;
  // type -> parent. `object` is implicit and never stored.
  std::map<std::string, std::string> types;
  std::vector<TypedName> constants;
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;

  const PredicateDecl* FindPredicate(std::string_view name) const;
  const ActionSchema* FindAction(std::string_view name) const;
  bool HasType(std::string_view type) const;
  // Reflexive: every type is a subtype of itself, and of `object`.
  bool IsSubtype(std::string_view type, std::string_view ancestor) const;
  // Declared types in declaration order of the map (sorted).
  std::vector<std::string> TypeNames() const;
};

struct ProblemDef {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  Formula goal;

  std::optional<std::string> ObjectType(std::string_view object) const;
  std::set<Atom> InitSet() const { return {init.begin(), init.end()}; }
};

DomainDef ParseDomain(std::string_view text);
ProblemDef ParseProblem(std::string_view text, const DomainDef& domain);

DomainDef LoadDomain(const std::filesystem::path& path);
ProblemDef LoadProblem(const std::filesystem::path& path, const DomainDef& domain);

// Parses a goal body such as `(and (on a b) (not (p)))` or a single literal.
Formula ParseGoalFormula(const SExpr& expr);

// Checks every literal of a ground formula against the domain predicates and
// the problem's objects (plus domain constants). Throws SemanticError naming
// the offending literal.
void ValidateGroundFormula(const Formula& formula, const DomainDef& domain,
                           const ProblemDef& problem);

std::string SerializeDomain(const DomainDef& domain);

struct SerializeOptions {
  bool include_goal = true;
};
// Emits one init atom per line.
std::string SerializeProblem(const ProblemDef& problem,
                             const SerializeOptions& options = {});
// Single-line `(:goal (and ...))`.
std::string SerializeGoal(const Formula& goal);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace twostep

#endif  // TWOSTEP_PDDL_H_
