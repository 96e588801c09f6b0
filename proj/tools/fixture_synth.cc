// Writes LLM fixture files by running the pipeline against a deterministic
// stand-in for the model.
//
//   fixture_synth rules --domains data/domains --out data/fixtures/suite
//   fixture_synth appendix --out data/fixtures/appendix-blocksworld
//
// `rules` gives helper h the h-th unsatisfied goal literal plus the atoms
// that free the agent's hands, and answers "None" once the literals run out.
// The answer depends only on the prompt, never on the agent count, so one
// fixture set serves every N. `appendix` replays the scripted three-block
// blocksworld exchange.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twostep/bench.h"
#include "twostep/classifier.h"
#include "twostep/errors.h"
#include "twostep/llm.h"
#include "twostep/pddl.h"
#include "twostep/pipeline.h"
#include "twostep/prompts.h"

namespace fs = std::filesystem;
using namespace twostep;

namespace {

// Predicates whose init atoms say "this agent holds nothing".
const std::map<std::string, std::set<std::string>, std::less<>> kReleasePredicates = {
    {"blocksworld-4ops", {"arm-empty"}},
    {"gripper-strips", {"free"}},
    {"barman", {"handempty"}},
};

std::size_t AgentIndexOf(const ChatRequest& request) {
  const std::string& text = request.turns.back().text;
  const auto at = text.rfind("Agent ");
  if (at == std::string::npos) throw Error("generator prompt without agent slot");
  return std::stoul(text.substr(at + 6));
}

std::string SubgoalOf(const ChatRequest& request) {
  static constexpr std::string_view kMarker = "Your goal is: ";
  const std::string& text = request.turns.back().text;
  const auto at = text.rfind(kMarker);
  if (at == std::string::npos) throw Error("translator prompt without subgoal");
  const auto start = at + kMarker.size();
  return text.substr(start, text.find('\n', start) - start);
}

// Subgoals are phrased as literals joined by " and ", which makes the
// translation a mechanical rewrite.
std::string TranslateLiterals(const std::string& english) {
  std::string body;
  std::size_t pos = 0;
  while (pos <= english.size()) {
    auto next = english.find(" and ", pos);
    if (next == std::string::npos) next = english.size();
    body += "  " + english.substr(pos, next - pos) + "\n";
    pos = next + 5;
  }
  return "(:goal\n (and\n" + body + " )\n)";
}

std::string Answer(std::size_t agent, const std::string& condition) {
  return "Agent " + std::to_string(agent) +
         " can work on part of the goal while agent0 handles the rest. Therefore, agent" +
         std::to_string(agent) +
         "'s clearly stated (with object names) complete and final goal condition is: " +
         condition + ".";
}

class RuleResponder {
 public:
  explicit RuleResponder(const PromptKit& kit) : kit_(kit) {}

  void SetTask(const DomainDef& domain, const ProblemDef& problem,
               const PredicateClassifier& classifier) {
    const auto init = problem.InitSet();
    unsatisfied_.clear();
    release_.clear();
    for (const auto& lit : problem.goal.literals) {
      if (!lit.negated && !init.contains(lit.atom)) unsatisfied_.push_back(lit.ToString());
      if (lit.negated && classifier.IsAgentSpecific(lit.atom.predicate)) {
        release_.push_back(lit.ToString());
      }
    }
    if (auto it = kReleasePredicates.find(domain.name); it != kReleasePredicates.end()) {
      for (const auto& atom : problem.init) {
        if (it->second.contains(atom.predicate)) release_.push_back(atom.ToString());
      }
    }
  }

  std::string operator()(const ChatRequest& request) const {
    if (request.system != kit_.system_generator) {
      return TranslateLiterals(SubgoalOf(request));
    }
    const std::size_t agent = AgentIndexOf(request);
    if (agent == 0 || agent > unsatisfied_.size()) return "None";
    std::string condition = unsatisfied_[agent - 1];
    for (const auto& r : release_) condition += " and " + r;
    return Answer(agent, condition);
  }

 private:
  const PromptKit& kit_;
  std::vector<std::string> unsatisfied_;
  std::vector<std::string> release_;
};

PromptKit LoadKit(const fs::path& prompts, const std::vector<fs::path>& domain_dirs) {
  PromptKit kit = PromptKit::Load(prompts);
  for (const auto& dir : domain_dirs) {
    if (fs::exists(dir / "prompt_example.json")) kit.LoadDomainExample(dir);
  }
  return kit;
}

TimeBudget MakeBudget(double seconds, double seconds_per_expansion) {
  TimeBudget budget;
  budget.seconds = seconds;
  budget.clock = ClockMode::kVirtual;
  budget.seconds_per_expansion = seconds_per_expansion;
  return budget;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesize LLM fixtures", "fixture_synth"};
  app.require_subcommand(1);

  std::string prompts = "data/prompts", out, domains = "data/domains";
  std::size_t tasks_per_domain = 0;
  std::vector<std::size_t> agents{2, 3, 4};
  double budget = 10.0, rate = 1e-5, latency = 2.0;

  auto* rules = app.add_subcommand("rules", "Rule-based fixtures for a task suite");
  rules->add_option("--domains", domains)->check(CLI::ExistingDirectory);
  rules->add_option("--tasks-per-domain", tasks_per_domain);
  rules->add_option("--agents", agents)->delimiter(',');
  auto* appendix = app.add_subcommand("appendix", "Scripted three-block blocksworld exchange");
  std::string domain_file = "data/domains/blocksworld/domain.pddl";
  std::string problem_file = "data/appendix/bw-rand-3.pddl";
  appendix->add_option("--domain", domain_file)->check(CLI::ExistingFile);
  appendix->add_option("--problem", problem_file)->check(CLI::ExistingFile);
  for (auto* cmd : {rules, appendix}) {
    cmd->add_option("--prompts", prompts)->check(CLI::ExistingDirectory);
    cmd->add_option("--out", out)->required();
    cmd->add_option("--budget", budget, "Virtual budget per pipeline run");
    cmd->add_option("--seconds-per-expansion", rate);
    cmd->add_option("--latency", latency, "Latency recorded for every response");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    fs::create_directories(out);
    if (rules->parsed()) {
      const auto tasks = DiscoverSuite(domains, tasks_per_domain);
      std::vector<fs::path> dirs;
      for (const auto& t : tasks) dirs.push_back(t.domain_file.parent_path());
      const PromptKit kit = LoadKit(prompts, dirs);
      RuleResponder responder(kit);
      auto upstream = std::make_shared<CallbackBackend>(
          [&responder](const ChatRequest& r) { return responder(r); }, latency);
      RecordingBackend recorder(out, upstream);
      std::size_t runs = 0, fallbacks = 0;
      for (const auto& task : tasks) {
        const DomainDef domain = LoadDomain(task.domain_file);
        const ProblemDef problem = LoadProblem(task.problem_file, domain);
        const ProblemText text = ProblemText::Load(ProblemText::PathFor(task.problem_file));
        const PredicateClassifier classifier = ResolveClassifier(domain);
        responder.SetTask(domain, problem, classifier);
        for (std::size_t n : agents) {
          PipelineConfig config;
          config.n_agents = n;
          config.budget = MakeBudget(budget, rate);
          config.classifier = classifier;
          const auto result = Decompose(domain, problem, text, kit, recorder, config);
          ++runs;
          if (result.fallback_used) ++fallbacks;
        }
      }
      std::printf("%zu pipeline runs, %zu fell back\n", runs, fallbacks);
    } else {
      const DomainDef domain = LoadDomain(domain_file);
      const ProblemDef problem = LoadProblem(problem_file, domain);
      const ProblemText text = ProblemText::Load(ProblemText::PathFor(problem_file));
      const PromptKit kit = LoadKit(prompts, {fs::path(domain_file).parent_path()});
      auto scripted = [&kit](const ChatRequest& r) -> std::string {
        if (r.system != kit.system_generator) {
          return "(:goal\n(and\n(on-table b2)\n(arm-empty)\n)\n)";
        }
        if (AgentIndexOf(r) != 1) return "None";
        return "It can help in unstacking block b2 from b3 and putting it down on the "
               "table, while agent0 works on rearranging the other blocks. In this way, "
               "agent1 would not need to wait for agent0 and it can complete its goal "
               "independently. agent1 should also release all objects that the main "
               "agent might need for its own actions. Therefore, agent1's clearly stated "
               "(with object names) complete and final goal condition is: b2 is on the "
               "table and the arm is empty.";
      };
      RecordingBackend recorder(out, std::make_shared<CallbackBackend>(scripted, latency));
      for (std::size_t n : {2, 3}) {
        PipelineConfig config;
        config.n_agents = n;
        config.budget = MakeBudget(budget, rate);
        config.classifier = ResolveClassifier(domain);
        const auto result = Decompose(domain, problem, text, kit, recorder, config);
        std::printf("N=%zu: success %d, execution_length %zu, fallback %d\n", n,
                    result.success, result.execution_length, result.fallback_used);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
