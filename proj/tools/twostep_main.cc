// Command-line front end: parse, solve, lift, exec-len, twostep, bench.
//
// Exit codes: 0 success, 1 planning failure or library error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "twostep/bench.h"
#include "twostep/classifier.h"
#include "twostep/errors.h"
#include "twostep/executor.h"
#include "twostep/external_planner.h"
#include "twostep/grounding.h"
#include "twostep/llm.h"
#include "twostep/multiagent.h"
#include "twostep/parallel_exec.h"
#include "twostep/pddl.h"
#include "twostep/pipeline.h"
#include "twostep/plan_io.h"
#include "twostep/planner.h"
#include "twostep/prompts.h"

namespace fs = std::filesystem;
using namespace twostep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BudgetFlags {
  double seconds = 1000.0;
  std::string clock = "wall";
  double seconds_per_expansion = 1e-5;

  void Add(CLI::App* cmd) {
    cmd->add_option("--budget", seconds, "Global time budget in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--clock", clock, "wall, or virtual for reproducible timing")
        ->check(CLI::IsMember({"wall", "virtual"}))
        ->capture_default_str();
    cmd->add_option("--seconds-per-expansion", seconds_per_expansion,
                    "Virtual clock rate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  TimeBudget Get() const {
    TimeBudget budget;
    budget.seconds = seconds;
    budget.clock = clock == "virtual" ? ClockMode::kVirtual : ClockMode::kWall;
    budget.seconds_per_expansion = seconds_per_expansion;
    return budget;
  }
};

struct LlmFlags {
  std::string spec;
  std::string fixtures;

  void Add(CLI::App* cmd) {
    auto* llm = cmd->add_option("--llm", spec,
                                "Backend: fixture:DIR, record:DIR or remote");
    auto* fx = cmd->add_option("--fixtures", fixtures, "Shorthand for --llm fixture:DIR");
    llm->excludes(fx);
    fx->excludes(llm);
  }

  std::shared_ptr<ChatBackend> Make() const {
    if (!fixtures.empty()) return MakeBackend("fixture:" + fixtures);
    if (!spec.empty()) return MakeBackend(spec);
    return nullptr;
  }
};

std::optional<ClassifierConfig> LoadClassifiers(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return ClassifierConfig::Load(path);
}

void WriteOrPrint(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    WriteTextFile(path, text);
  }
}

PromptKit LoadKit(const fs::path& prompts_dir, const std::vector<fs::path>& examples) {
  PromptKit kit = PromptKit::Load(prompts_dir);
  for (const auto& path : examples) {
    if (fs::exists(path / "prompt_example.json")) kit.LoadDomainExample(path);
  }
  return kit;
}

// ---------------------------------------------------------------- parse

struct ParseCmd {
  std::string domain, problem;
  bool ground = false;

  void Add(CLI::App& app) {
    auto* cmd = app.add_subcommand("parse", "Check PDDL files and print a summary");
    cmd->add_option("--domain", domain)->required()->check(CLI::ExistingFile);
    cmd->add_option("--problem", problem)->check(CLI::ExistingFile);
    cmd->add_flag("--ground", ground, "Also ground the task");
    cmd->callback([this] { selected = true; });
  }

  int Run() const {
    const DomainDef d = LoadDomain(domain);
    std::printf("domain %s: %zu types, %zu predicates, %zu actions\n", d.name.c_str(),
                d.types.size(), d.predicates.size(), d.actions.size());
    if (problem.empty()) return kExitOk;
    const ProblemDef p = LoadProblem(problem, d);
    std::printf("problem %s: %zu objects, %zu init atoms, %zu goal literals\n",
                p.name.c_str(), p.objects.size(), p.init.size(), p.goal.literals.size());
    if (ground) {
      const GroundedTask task = Ground(d, p);
      std::printf("ground: %zu atoms, %zu actions\n", task.atoms.size(),
                  task.actions.size());
    }
    return kExitOk;
  }

  bool selected = false;
};

// ---------------------------------------------------------------- solve

struct SolveCmd {
  std::string domain, problem, out, external;
  std::vector<std::string> alias;
  bool optimal = false;
  BudgetFlags budget;

  void Add(CLI::App& app) {
    auto* cmd = app.add_subcommand("solve", "Single-agent planning");
    cmd->add_option("--domain", domain)->required()->check(CLI::ExistingFile);
    cmd->add_option("--problem", problem)->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Plan file (stdout when omitted)");
    cmd->add_flag("--optimal", optimal, "Breadth-first search for a shortest plan");
    auto* ext = cmd->add_option("--external", external, "External planner binary");
    cmd->add_option("--planner-args", alias, "Arguments placed before the input files")
        ->needs(ext);
    budget.Add(cmd);
    cmd->callback([this] { selected = true; });
  }

  int Run() const {
    SolveOutcome outcome;
    std::unique_ptr<GroundedTask> task;
    const DomainDef d = LoadDomain(domain);
    const ProblemDef p = LoadProblem(problem, d);
    task = std::make_unique<GroundedTask>(Ground(d, p));
    if (!external.empty()) {
      ExternalPlannerConfig config;
      config.binary = external;
      config.alias_args = alias;
      outcome = SolveExternal(domain, problem, budget.Get(), config);
      // External plans index the default grounding, the same as `task`.
    } else if (optimal) {
      outcome = SolveOptimal(*task, budget.Get());
    } else {
      outcome = Solve(*task, budget.Get());
    }
    std::fprintf(stderr, "status: %s, %zu expansions, %.3f s\n",
                 std::string(ToString(outcome.status)).c_str(), outcome.nodes_expanded,
                 outcome.elapsed);
    if (!outcome.solved()) return kExitFailure;
    WriteOrPrint(out, FormatPlan(*task, *outcome.plan));
    return kExitOk;
  }

  bool selected = false;
};

// ---------------------------------------------------------------- lift

struct LiftCmd {
  std::string domain, problem, out_domain, out_problem, classifiers;
  std::size_t agents = 2;
  bool strict = false;

  void Add(CLI::App& app) {
    auto* cmd = app.add_subcommand("lift", "Write the N-agent version of a task");
    cmd->add_option("--domain", domain)->required()->check(CLI::ExistingFile);
    cmd->add_option("--problem", problem)->required()->check(CLI::ExistingFile);
    cmd->add_option("--agents", agents)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--classifiers", classifiers, "Agent-specific predicate config")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--strict", strict, "Reject agent-specific goal literals");
    cmd->add_option("--out-domain", out_domain);
    cmd->add_option("--out-problem", out_problem);
    cmd->callback([this] { selected = true; });
  }

  int Run() const {
    const DomainDef d = LoadDomain(domain);
    const ProblemDef p = LoadProblem(problem, d);
    const auto config_file = LoadClassifiers(classifiers);
    LiftConfig config;
    config.n_agents = agents;
    config.classifier = ResolveClassifier(d, config_file ? &*config_file : nullptr);
    config.goal_policy = strict ? GoalPolicy::kStrict : GoalPolicy::kBindFirstAgent;
    const LiftedTask lifted = Lift(d, p, config);
    if (out_domain.empty() && out_problem.empty()) {
      std::cout << SerializeDomain(lifted.domain) << "\n" << SerializeProblem(lifted.problem);
      return kExitOk;
    }
    WriteOrPrint(out_domain, SerializeDomain(lifted.domain));
    WriteOrPrint(out_problem, SerializeProblem(lifted.problem));
    return kExitOk;
  }

  bool selected = false;
};

// ---------------------------------------------------------------- exec-len

struct ExecLenCmd {
  std::string domain, problem, classifiers, schedule_out;
  std::vector<std::string> plans;
  bool shared = false;
  bool brute_force = false;

  void Add(CLI::App& app) {
    auto* cmd = app.add_subcommand("exec-len", "Parallel execution length of per-agent plans");
    cmd->add_option("--domain", domain)->required()->check(CLI::ExistingFile);
    cmd->add_option("--problem", problem)->required()->check(CLI::ExistingFile);
    cmd->add_option("--plans", plans, "One plan file per agent, main agent first")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--classifiers", classifiers)->check(CLI::ExistingFile);
    cmd->add_flag("--shared", shared,
                  "Plans are over a multi-agent task; no per-agent state copies");
    cmd->add_flag("--brute-force", brute_force, "Exhaustive search over agent subsets");
    cmd->add_option("--schedule", schedule_out, "Write the schedule as JSON lines");
    cmd->callback([this] { selected = true; });
  }

  int Run() const {
    const DomainDef d = LoadDomain(domain);
    const ProblemDef p = LoadProblem(problem, d);
    const GroundedTask task = Ground(d, p, GroundOptions{.prune_unreachable = false});
    JointPlan joint;
    for (std::size_t i = 0; i < plans.size(); ++i) {
      joint.plans.push_back(ReadPlanFile(task, plans[i]));
      joint.agent_ids.push_back("agent" + std::to_string(i));
    }
    const auto config_file = LoadClassifiers(classifiers);
    const JointProblem view =
        shared ? JointProblem::Shared(task, task.init, joint)
               : JointProblem::Separate(
                     task, task.init, joint,
                     ResolveClassifier(d, config_file ? &*config_file : nullptr));
    const ScheduleResult result = brute_force ? BruteForceExecLength(view) : ExecLength(view);
    if (!result.feasible()) {
      std::fprintf(stderr, "plans cannot be interleaved\n");
      return kExitFailure;
    }
    std::printf("execution_length %zu\n", *result.length);
    if (!schedule_out.empty()) WriteOrPrint(schedule_out, ScheduleToJsonLines(view, result.schedule));
    return kExitOk;
  }

  bool selected = false;
};

// ---------------------------------------------------------------- twostep

struct TwoStepCmd {
  std::string domain, problem, nl, example, classifiers, prompts = "data/prompts";
  std::string out_dir = "twostep-out";
  std::size_t agents = 2;
  BudgetFlags budget;
  LlmFlags llm;

  void Add(CLI::App& app) {
    auto* cmd = app.add_subcommand("twostep", "LLM subgoal decomposition for N agents");
    cmd->add_option("--domain", domain)->required()->check(CLI::ExistingFile);
    cmd->add_option("--problem", problem)->required()->check(CLI::ExistingFile);
    cmd->add_option("--agents", agents)->check(CLI::Range(1, 64))->capture_default_str();
    cmd->add_option("--nl", nl, "Problem description (default: <problem>.nl.json)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--example", example,
                    "Directory holding prompt_example.json (default: the domain's)")
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--prompts", prompts)->check(CLI::ExistingDirectory)->capture_default_str();
    cmd->add_option("--classifiers", classifiers)->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", out_dir)->capture_default_str();
    budget.Add(cmd);
    llm.Add(cmd);
    cmd->callback([this] { selected = true; });
  }

  int Run() const {
    auto backend = llm.Make();
    if (!backend) throw UsageError("twostep needs --llm or --fixtures");
    const DomainDef d = LoadDomain(domain);
    const ProblemDef p = LoadProblem(problem, d);
    const ProblemText text =
        ProblemText::Load(nl.empty() ? ProblemText::PathFor(problem) : fs::path(nl));
    const PromptKit kit =
        LoadKit(prompts, {example.empty() ? fs::path(domain).parent_path() : fs::path(example)});
    const auto config_file = LoadClassifiers(classifiers);
    PipelineConfig config;
    config.n_agents = agents;
    config.budget = budget.Get();
    config.classifier = ResolveClassifier(d, config_file ? &*config_file : nullptr);

    const TwoStepResult result = Decompose(d, p, text, kit, *backend, config);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    WriteTextFile(dir / "joint_plan.txt", FormatJointPlan(result));
    WriteTextFile(dir / "schedule.jsonl",
                  ScheduleToJsonLines(result.joint_problem, result.schedule));
    WriteTextFile(dir / "transcript.json", TranscriptToJson(result).dump(2) + "\n");
    nlohmann::ordered_json summary;
    summary["success"] = result.success;
    summary["fallback_used"] = result.fallback_used;
    summary["fallback_reason"] = result.fallback_reason;
    summary["execution_length"] = result.execution_length;
    summary["plan_cost"] = result.joint_plan.TotalCost();
    summary["schedule_sequential"] = result.schedule_sequential;
    summary["planning_time"] = result.metrics.PlanningTime();
    summary["solver_time"] = result.metrics.SolverTime();
    summary["llm_time"] = result.metrics.llm_time;
    summary["timeouts"] = result.metrics.timeouts;
    nlohmann::ordered_json candidates = nlohmann::ordered_json::array();
    for (const auto& c : result.candidates) {
      candidates.push_back({{"agent", c.agent_index},
                            {"english", c.english},
                            {"goal", c.pddl_goal ? SerializeGoal(*c.pddl_goal) : ""},
                            {"status", std::string(ToString(c.status))},
                            {"reason", c.discard_reason}});
    }
    summary["candidates"] = candidates;
    WriteTextFile(dir / "result.json", summary.dump(2) + "\n");

    std::printf("success %s, execution_length %zu, plan_cost %zu, fallback %s\n",
                result.success ? "true" : "false", result.execution_length,
                result.joint_plan.TotalCost(), result.fallback_used ? "true" : "false");
    return result.success ? kExitOk : kExitFailure;
  }

  bool selected = false;
};

// ---------------------------------------------------------------- bench

struct BenchCmd {
  std::string domains = "data/domains", prompts = "data/prompts", classifiers, out;
  std::string format = "csv";
  std::vector<std::string> only, methods{"SA", "MA", "TwoStep"};
  std::vector<std::size_t> agent_counts{2, 3, 4};
  std::size_t tasks_per_domain = 0, runs = 1, workers = 1;
  BudgetFlags budget;
  LlmFlags llm;

  void Add(CLI::App& app) {
    auto* cmd = app.add_subcommand("bench", "Run methods over a task suite");
    cmd->add_option("--domains", domains, "Directory of <domain>/{domain.pddl,problems/}")
        ->check(CLI::ExistingDirectory)
        ->capture_default_str();
    cmd->add_option("--tasks-per-domain", tasks_per_domain, "0 runs every task");
    cmd->add_option("--only", only, "Restrict to these domain directories");
    cmd->add_option("--methods", methods)->delimiter(',')->capture_default_str();
    cmd->add_option("--agents", agent_counts)
        ->delimiter(',')
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    cmd->add_option("--runs", runs)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--workers", workers)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--prompts", prompts)->check(CLI::ExistingDirectory)->capture_default_str();
    cmd->add_option("--classifiers", classifiers)->check(CLI::ExistingFile);
    cmd->add_option("--format", format)
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", out, "Output file (stdout when omitted)");
    budget.Add(cmd);
    llm.Add(cmd);
    cmd->callback([this] { selected = true; });
  }

  int Run() const {
    BenchConfig config;
    config.methods.clear();
    for (const auto& m : methods) {
      auto method = ParseMethod(m);
      if (!method) throw UsageError("unknown method '" + m + "'");
      config.methods.push_back(*method);
    }
    config.agent_counts = agent_counts;
    config.runs = runs;
    config.workers = workers;
    config.budget = budget.Get();

    const auto tasks = DiscoverSuite(domains, tasks_per_domain, only);
    std::vector<fs::path> domain_dirs;
    for (const auto& t : tasks) domain_dirs.push_back(t.domain_file.parent_path());

    std::optional<PromptKit> kit;
    const bool needs_llm = std::find(config.methods.begin(), config.methods.end(),
                                     Method::kTwoStep) != config.methods.end();
    if (needs_llm) {
      config.llm = llm.Make();
      if (!config.llm) throw UsageError("TwoStep needs --llm or --fixtures");
      kit = LoadKit(prompts, domain_dirs);
      config.kit = &*kit;
    }
    const auto config_file = LoadClassifiers(classifiers);
    if (config_file) config.classifiers = &*config_file;

    const auto rows = RunSuite(tasks, config);
    if (format == "csv") {
      WriteOrPrint(out, MetricsCsv(rows));
    } else {
      WriteOrPrint(out, ReportToJson(Aggregate(rows)).dump(2) + "\n");
    }
    return kExitOk;
  }

  bool selected = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent task planning with LLM subgoal decomposition", "twostep"};
  app.require_subcommand(1);
  ParseCmd parse;
  SolveCmd solve;
  LiftCmd lift;
  ExecLenCmd exec_len;
  TwoStepCmd two_step;
  BenchCmd bench;
  parse.Add(app);
  solve.Add(app);
  lift.Add(app);
  exec_len.Add(app);
  two_step.Add(app);
  bench.Add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (parse.selected) return parse.Run();
    if (solve.selected) return solve.Run();
    if (lift.selected) return lift.Run();
    if (exec_len.selected) return exec_len.Run();
    if (two_step.selected) return two_step.Run();
    if (bench.selected) return bench.Run();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
