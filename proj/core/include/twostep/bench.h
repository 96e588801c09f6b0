#ifndef TWOSTEP_BENCH_H_
#define TWOSTEP_BENCH_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "twostep/classifier.h"
#include "twostep/llm.h"
#include "twostep/planner.h"
#include "twostep/prompts.h"

namespace twostep {

enum class Method { kSA, kMA, kTwoStep };
std::string_view ToString(Method method);
std::optional<Method> ParseMethod(std::string_view text);

struct BenchTask {
  std::string task_id;
  std::string domain;
  std::filesystem::path domain_file;
  std::filesystem::path problem_file;
};

// `<domains_dir>/<domain>/domain.pddl` with problems in
// `<domains_dir>/<domain>/problems/*.pddl`, sorted by file name. At most
// `tasks_per_domain` per domain (0 = all); `only` restricts the domains.
std::vector<BenchTask> DiscoverSuite(const std::filesystem::path& domains_dir,
                                     std::size_t tasks_per_domain = 0,
                                     const std::vector<std::string>& only = {});

struct RunMetrics {
  std::string task_id;
  std::string domain;
  Method method = Method::kSA;
  std::size_t n_agents = 1;
  std::size_t run = 0;
  // solved, unsolvable, timeout or error
  std::string status;
  // Solver time plus LLM time. Grounding and parsing are not counted.
  double planning_time = 0.0;
  double solver_time = 0.0;
  double llm_time = 0.0;
  std::size_t execution_length = 0;
  std::size_t plan_cost = 0;
  std::size_t timeouts = 0;
  bool fallback_used = false;
  // Largest single solver call; checked against the per-agent budget.
  double max_solver_call = 0.0;
  std::string error;

  bool solved() const { return status == "solved"; }
};

struct BenchConfig {
  std::vector<Method> methods{Method::kSA, Method::kMA, Method::kTwoStep};
  std::vector<std::size_t> agent_counts{2, 3, 4};
  std::size_t runs = 1;
  TimeBudget budget;
  std::size_t workers = 1;
  const PromptKit* kit = nullptr;
  std::shared_ptr<ChatBackend> llm;
  const ClassifierConfig* classifiers = nullptr;
};

// One method on one task. SA ignores `n_agents`.
RunMetrics RunTask(const BenchTask& task, Method method, std::size_t n_agents,
                   std::size_t run, const BenchConfig& config);

// Every (task, method, agent count, run) combination. Rows come back in that
// nesting order regardless of the worker count.
std::vector<RunMetrics> RunSuite(const std::vector<BenchTask>& tasks,
                                 const BenchConfig& config);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

struct CellSummary {
  std::string domain;
  Method method = Method::kSA;
  std::size_t n_agents = 1;
  std::size_t attempted = 0;
  std::size_t solved = 0;
  MeanStd planning_time;
  MeanStd execution_length;
  // Min-max scaled within the domain across its cells.
  double normalized_planning_time = 0.0;
  double normalized_execution_length = 0.0;
};

struct NormalizedMean {
  Method method = Method::kSA;
  std::size_t n_agents = 1;
  double planning_time = 0.0;
  double execution_length = 0.0;
  std::size_t domains = 0;
};

struct SuiteReport {
  std::vector<RunMetrics> per_task;
  std::vector<CellSummary> cells;
  std::vector<NormalizedMean> normalized;
};

// Per cell: the mean over solved tasks within each run, then mean and
// population standard deviation across runs. Throws EmptyInput.
SuiteReport Aggregate(const std::vector<RunMetrics>& metrics);

std::string MetricsCsv(const std::vector<RunMetrics>& metrics);
nlohmann::json ReportToJson(const SuiteReport& report);

}  // namespace twostep

#endif  // TWOSTEP_BENCH_H_
