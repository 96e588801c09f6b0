#ifndef TWOSTEP_CLASSIFIER_H_
#define TWOSTEP_CLASSIFIER_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "twostep/pddl.h"

namespace twostep {

// Splits a domain's predicates into agent-specific ones (each agent keeps its
// own copy, e.g. `holding`) and environment ones shared by every agent.
class PredicateClassifier {
 public:
  PredicateClassifier() = default;
  PredicateClassifier(std::set<std::string> agent_specific,
                      std::set<std::string> environment);

  // Everything not listed as agent-specific is environment. Throws
  // SemanticError if a listed name is not a predicate of `domain`.
  static PredicateClassifier ForDomain(const DomainDef& domain,
                                       const std::set<std::string>& agent_specific);

  // Throws ClassifierIncomplete for predicates in neither set.
  bool IsAgentSpecific(std::string_view predicate) const;
  bool Covers(std::string_view predicate) const;

  const std::set<std::string, std::less<>>& agent_specific() const {
    return agent_specific_;
  }
  const std::set<std::string, std::less<>>& environment() const {
    return environment_;
  }

 private:
  std::set<std::string, std::less<>> agent_specific_;
  std::set<std::string, std::less<>> environment_;
};

// Plain key-value file, one domain per line:
//
//   # comment
//   blocksworld-4ops = arm-empty holding
//   tyreworld =
class ClassifierConfig {
 public:
  static ClassifierConfig Parse(std::string_view text);
  static ClassifierConfig Load(const std::filesystem::path& path);

  std::optional<std::set<std::string>> Lookup(std::string_view domain) const;
  void Set(const std::string& domain, std::set<std::string> agent_specific) {
    entries_[domain] = std::move(agent_specific);
  }

 private:
  std::map<std::string, std::set<std::string>, std::less<>> entries_;
};

// Agent-specific predicates of the built-in benchmark domains.
std::optional<std::set<std::string>> BuiltinAgentPredicates(std::string_view domain);

// Predicates with a parameter of type `agent` or `robot` (or a subtype).
std::set<std::string> AgentTypedPredicates(const DomainDef& domain);

// Resolution order: explicit config entry, then the agent/robot typing rule,
// then built-in defaults. A domain matched by none is all-environment.
PredicateClassifier ResolveClassifier(const DomainDef& domain,
                                      const ClassifierConfig* config = nullptr);

}  // namespace twostep

#endif  // TWOSTEP_CLASSIFIER_H_
