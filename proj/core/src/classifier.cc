#include "twostep/classifier.h"

#include <sstream>

#include "twostep/errors.h"

namespace twostep {

PredicateClassifier::PredicateClassifier(std::set<std::string> agent_specific,
                                         std::set<std::string> environment)
    : agent_specific_(agent_specific.begin(), agent_specific.end()),
      environment_(environment.begin(), environment.end()) {
  for (const auto& p : agent_specific_) {
    if (environment_.contains(p)) {
      throw SemanticError("predicate '" + p +
                          "' classified as both agent-specific and environment");
    }
  }
}

PredicateClassifier PredicateClassifier::ForDomain(
    const DomainDef& domain, const std::set<std::string>& agent_specific) {
  std::set<std::string> environment;
  for (const auto& name : agent_specific) {
    if (domain.FindPredicate(name) == nullptr) {
      throw SemanticError("classifier names unknown predicate '" + name +
                          "' for domain " + domain.name);
    }
  }
  for (const auto& p : domain.predicates) {
    if (!agent_specific.contains(p.name)) environment.insert(p.name);
  }
  return PredicateClassifier(agent_specific, std::move(environment));
}

bool PredicateClassifier::IsAgentSpecific(std::string_view predicate) const {
  if (agent_specific_.contains(predicate)) return true;
  if (environment_.contains(predicate)) return false;
  throw ClassifierIncomplete(std::string(predicate));
}

bool PredicateClassifier::Covers(std::string_view predicate) const {
  return agent_specific_.contains(predicate) || environment_.contains(predicate);
}

ClassifierConfig ClassifierConfig::Parse(std::string_view text) {
  ClassifierConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SyntaxError("expected '<domain> = <predicates...>'", line_no, 1);
    }
    std::istringstream key(line.substr(0, eq));
    std::string domain;
    key >> domain;
    if (domain.empty()) throw SyntaxError("missing domain name", line_no, 1);
    std::istringstream values(line.substr(eq + 1));
    std::set<std::string> predicates;
    for (std::string p; values >> p;) {
      for (char& c : p) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (p.back() == ',') p.pop_back();
      if (!p.empty()) predicates.insert(p);
    }
    for (char& c : domain) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    config.entries_[domain] = std::move(predicates);
  }
  return config;
}

ClassifierConfig ClassifierConfig::Load(const std::filesystem::path& path) {
  return Parse(ReadTextFile(path));
}

std::optional<std::set<std::string>> ClassifierConfig::Lookup(
    std::string_view domain) const {
  auto it = entries_.find(domain);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::set<std::string>> BuiltinAgentPredicates(std::string_view domain) {
  static const std::map<std::string, std::set<std::string>, std::less<>> kDefaults = {
      {"blocksworld-4ops", {"arm-empty", "holding"}},
      {"blocksworld", {"arm-empty", "holding"}},
      {"gripper-strips", {"at-robby", "free", "carry"}},
      {"gripper", {"at-robby", "free", "carry"}},
      {"barman", {"handempty", "holding", "used"}},
      {"termes", {"at", "has-block"}},
      {"tyreworld", {}},
  };
  auto it = kDefaults.find(domain);
  if (it == kDefaults.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> AgentTypedPredicates(const DomainDef& domain) {
  std::set<std::string> out;
  for (const auto& p : domain.predicates) {
    for (const auto& param : p.params) {
      const bool agent_like = (domain.HasType("agent") && domain.IsSubtype(param.type, "agent")) ||
                              (domain.HasType("robot") && domain.IsSubtype(param.type, "robot"));
      if (agent_like) {
        out.insert(p.name);
        break;
      }
    }
  }
  return out;
}

PredicateClassifier ResolveClassifier(const DomainDef& domain,
                                      const ClassifierConfig* config) {
  if (config != nullptr) {
    if (auto entry = config->Lookup(domain.name)) {
      return PredicateClassifier::ForDomain(domain, *entry);
    }
  }
  if (auto typed = AgentTypedPredicates(domain); !typed.empty()) {
    return PredicateClassifier::ForDomain(domain, typed);
  }
  if (auto builtin = BuiltinAgentPredicates(domain.name)) {
    std::set<std::string> present;
    for (const auto& name : *builtin) {
      if (domain.FindPredicate(name) != nullptr) present.insert(name);
    }
    return PredicateClassifier::ForDomain(domain, present);
  }
  return PredicateClassifier::ForDomain(domain, {});
}

}  // namespace twostep
