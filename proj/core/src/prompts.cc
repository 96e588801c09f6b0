#include "twostep/prompts.h"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "twostep/errors.h"
#include "twostep/sexpr.h"

namespace twostep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string Trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string TrimTrailingNewlines(std::string text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += "\n";
    out += lines[i];
  }
  return out;
}

PromptExample ExampleFromJson(const json& doc) {
  PromptExample example;
  example.description = doc.at("description").get<std::string>();
  example.plan = doc.at("plan").get<std::vector<std::string>>();
  example.problem = doc.value("problem", "");
  example.subgoals = doc.value("subgoals", std::vector<std::string>{});
  return example;
}

}  // namespace

ProblemText ProblemText::Load(const fs::path& path) {
  const json doc = json::parse(ReadTextFile(path));
  ProblemText text;
  text.description = doc.at("description").get<std::string>();
  text.goal = doc.at("goal").get<std::string>();
  return text;
}

fs::path ProblemText::PathFor(const fs::path& problem_file) {
  fs::path path = problem_file;
  path.replace_extension(".nl.json");
  return path;
}

PromptKit PromptKit::Load(const fs::path& prompts_dir) {
  PromptKit kit;
  kit.system_generator = TrimTrailingNewlines(ReadTextFile(prompts_dir / "system_generator.txt"));
  kit.system_translator =
      TrimTrailingNewlines(ReadTextFile(prompts_dir / "system_translator.txt"));
  kit.generator_template = TrimTrailingNewlines(ReadTextFile(prompts_dir / "generator.txt"));
  kit.translator_template =
      TrimTrailingNewlines(ReadTextFile(prompts_dir / "translator.txt"));
  kit.fixed_example =
      ExampleFromJson(json::parse(ReadTextFile(prompts_dir / "fixed_example.json")));
  return kit;
}

void PromptKit::LoadDomainExample(const fs::path& domain_dir) {
  const json doc = json::parse(ReadTextFile(domain_dir / "prompt_example.json"));
  domain_examples[Lower(doc.at("domain").get<std::string>())] = ExampleFromJson(doc);
}

std::string RenderTemplate(std::string_view text,
                           const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i);
      if (close != std::string_view::npos) {
        const std::string key(text.substr(i + 1, close - i - 1));
        if (auto it = values.find(key); it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

ChatRequest BuildGeneratorPrompt(const PromptKit& kit, std::string_view domain_name,
                                 const ProblemText& problem,
                                 const std::vector<std::string>& prior,
                                 std::size_t agent_index) {
  const auto it = kit.domain_examples.find(Lower(domain_name));
  if (it == kit.domain_examples.end()) {
    throw MissingExample("no prompt example for domain " + std::string(domain_name));
  }
  if (problem.description.empty()) {
    throw MissingExample("no natural-language description for the problem");
  }
  std::string fixed_subgoals;
  for (std::size_t i = 0; i < kit.fixed_example.subgoals.size(); ++i) {
    const std::string agent = "agent" + std::to_string(i + 1);
    if (i) fixed_subgoals += "\n";
    fixed_subgoals += "A possible " + agent +
                      " subgoal looking at how the domain works based on the plan "
                      "example provided for another task in this domain could be - \n" +
                      agent + " subgoals: " + kit.fixed_example.subgoals[i];
  }
  std::string priors;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    priors += "Agent " + std::to_string(i + 1) + ": " + prior[i] + "\n";
  }
  const std::map<std::string, std::string> values{
      {"fixed_description", kit.fixed_example.description},
      {"fixed_plan", JoinLines(kit.fixed_example.plan)},
      {"fixed_problem", kit.fixed_example.problem},
      {"fixed_subgoals", fixed_subgoals},
      {"domain_description", it->second.description},
      {"example_plan", JoinLines(it->second.plan)},
      {"problem_nl", problem.description},
      {"prior_subgoals", priors},
      {"agent_index", std::to_string(agent_index)},
  };
  ChatRequest request;
  request.system = kit.system_generator;
  request.turns.push_back({"user", RenderTemplate(kit.generator_template, values)});
  return request;
}

ChatRequest BuildTranslatorPrompt(const PromptKit& kit, const ProblemDef& problem,
                                  const ProblemText& text, std::string_view subgoal) {
  if (text.goal.empty()) {
    throw MissingExample("no natural-language goal for problem " + problem.name);
  }
  SerializeOptions options;
  options.include_goal = false;
  const std::map<std::string, std::string> values{
      {"problem_pddl", TrimTrailingNewlines(SerializeProblem(problem, options))},
      {"example_goal", text.goal},
      {"example_goal_pddl", SerializeGoal(problem.goal)},
      {"subgoal", std::string(subgoal)},
  };
  ChatRequest request;
  request.system = kit.system_translator;
  request.turns.push_back({"user", RenderTemplate(kit.translator_template, values)});
  return request;
}

std::optional<std::string> ParseGeneratorResponse(std::string_view text) {
  auto is_none = [](std::string candidate) {
    candidate = Trim(candidate);
    while (!candidate.empty() && (candidate.back() == '.' || candidate.back() == '"' ||
                                  candidate.back() == '\'')) {
      candidate.pop_back();
    }
    while (!candidate.empty() && (candidate.front() == '"' || candidate.front() == '\'')) {
      candidate.erase(candidate.begin());
    }
    return Lower(Trim(candidate)) == "none";
  };
  if (is_none(std::string(text))) return std::nullopt;

  static constexpr std::string_view kAnchor = "final goal condition is:";
  const std::string lowered = Lower(text);
  const auto at = lowered.rfind(kAnchor);
  if (at == std::string::npos) {
    throw UnparseableResponse("no goal condition in response");
  }
  std::string subgoal = Trim(text.substr(at + kAnchor.size()));
  // Keep only the first paragraph; models sometimes append commentary.
  if (auto blank = subgoal.find("\n\n"); blank != std::string::npos) {
    subgoal = Trim(subgoal.substr(0, blank));
  }
  while (!subgoal.empty() && subgoal.back() == '.') subgoal.pop_back();
  subgoal = Trim(subgoal);
  if (is_none(subgoal)) return std::nullopt;
  if (subgoal.empty()) throw UnparseableResponse("empty goal condition in response");
  return subgoal;
}

Formula ParsePddlGoal(std::string_view text, const DomainDef& domain,
                      const ProblemDef& problem) {
  const std::string lowered = Lower(text);
  const auto start = lowered.find("(:goal");
  if (start == std::string::npos) throw NoGoalFound("no (:goal ...) block in response");

  // Cut at the matching parenthesis so trailing prose is ignored.
  std::size_t end = lowered.size();
  int depth = 0;
  for (std::size_t i = start; i < lowered.size(); ++i) {
    if (lowered[i] == ';') {
      i = lowered.find('\n', i);
      if (i == std::string::npos) break;
      continue;
    }
    if (lowered[i] == '(') ++depth;
    if (lowered[i] == ')' && --depth == 0) {
      end = i + 1;
      break;
    }
  }
  ReadOptions options;
  options.close_unbalanced = true;
  SExpr block;
  try {
    block = ReadOne(text.substr(start, end - start), options);
  } catch (const Error& e) {
    throw NoGoalFound(std::string("unreadable goal block: ") + e.what());
  }
  if (block.items.size() < 2) throw NoGoalFound("empty (:goal) block");

  Formula goal;
  try {
    for (std::size_t i = 1; i < block.items.size(); ++i) {
      Formula part = ParseGoalFormula(block.items[i]);
      goal.literals.insert(goal.literals.end(), part.literals.begin(), part.literals.end());
      goal.equalities.insert(goal.equalities.end(), part.equalities.begin(),
                             part.equalities.end());
    }
    ValidateGroundFormula(goal, domain, problem);
  } catch (const Error& e) {
    throw InvalidLiteral(e.what());
  }
  return goal;
}

}  // namespace twostep
