#ifndef TWOSTEP_PROMPTS_H_
#define TWOSTEP_PROMPTS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twostep/llm.h"
#include "twostep/pddl.h"

namespace twostep {

// Worked example shown to the subgoal generator: a scenario, the plan one
// agent used for it and, for the fixed example only, a second scenario with
// sample helper subgoals.
struct PromptExample {
  std::string description;
  std::vector<std::string> plan;
  std::string problem;
  std::vector<std::string> subgoals;
};

// Natural-language rendering of one problem instance, authored next to the
// PDDL file as `<problem>.nl.json`.
struct ProblemText {
  // Full scenario including the goal sentences.
  std::string description;
  // The goal sentences alone.
  std::string goal;

  static ProblemText Load(const std::filesystem::path& path);
  // `foo.pddl` -> `foo.nl.json`
  static std::filesystem::path PathFor(const std::filesystem::path& problem_file);
};

struct PromptKit {
  std::string system_generator;
  std::string system_translator;
  // Placeholders: {fixed_description} {fixed_plan} {fixed_problem}
  // {fixed_subgoals} {domain_description} {example_plan} {problem_nl}
  // {prior_subgoals} {agent_index}
  std::string generator_template;
  // Placeholders: {problem_pddl} {example_goal} {example_goal_pddl} {subgoal}
  std::string translator_template;
  PromptExample fixed_example;
  // Keyed by domain name.
  std::map<std::string, PromptExample, std::less<>> domain_examples;

  // Reads `<prompts_dir>/{system_generator,system_translator,generator,
  // translator}.txt` and `fixed_example.json`.
  static PromptKit Load(const std::filesystem::path& prompts_dir);
  // Adds `<domain_dir>/prompt_example.json` under its "domain" key.
  void LoadDomainExample(const std::filesystem::path& domain_dir);
};

// Replaces `{key}` for every entry of `values`. Unknown braces are kept.
std::string RenderTemplate(std::string_view text,
                           const std::map<std::string, std::string>& values);

// `prior` holds the English subgoals generated so far, helper 1 first.
// Throws MissingExample when the kit has no example for `domain_name`.
ChatRequest BuildGeneratorPrompt(const PromptKit& kit, std::string_view domain_name,
                                 const ProblemText& problem,
                                 const std::vector<std::string>& prior,
                                 std::size_t agent_index);

// Throws MissingExample when the problem text has no goal sentence.
ChatRequest BuildTranslatorPrompt(const PromptKit& kit, const ProblemDef& problem,
                                  const ProblemText& text, std::string_view subgoal);

// English subgoal after the last "final goal condition is:", without the
// trailing period. nullopt when the model answers "none". Throws
// UnparseableResponse.
std::optional<std::string> ParseGeneratorResponse(std::string_view text);

// First `(:goal ...)` block of a completion, checked against the domain and
// problem. Missing closing parentheses are tolerated. Throws NoGoalFound or
// InvalidLiteral.
Formula ParsePddlGoal(std::string_view text, const DomainDef& domain,
                      const ProblemDef& problem);

}  // namespace twostep

#endif  // TWOSTEP_PROMPTS_H_
