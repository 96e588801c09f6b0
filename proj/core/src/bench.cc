#include "twostep/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>
#include <tuple>

#include "twostep/errors.h"
#include "twostep/executor.h"
#include "twostep/grounding.h"
#include "twostep/multiagent.h"
#include "twostep/parallel_exec.h"
#include "twostep/pipeline.h"

namespace twostep {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view ToString(Method method) {
  switch (method) {
    case Method::kSA:
      return "SA";
    case Method::kMA:
      return "MA";
    case Method::kTwoStep:
      return "TwoStep";
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view text) {
  std::string lowered(text);
  for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lowered == "sa") return Method::kSA;
  if (lowered == "ma") return Method::kMA;
  if (lowered == "twostep") return Method::kTwoStep;
  return std::nullopt;
}

std::vector<BenchTask> DiscoverSuite(const fs::path& domains_dir,
                                     std::size_t tasks_per_domain,
                                     const std::vector<std::string>& only) {
  if (!fs::is_directory(domains_dir)) {
    throw Error("suite directory not found: " + domains_dir.string());
  }
  std::vector<fs::path> domain_dirs;
  for (const auto& entry : fs::directory_iterator(domains_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "domain.pddl")) {
      domain_dirs.push_back(entry.path());
    }
  }
  std::sort(domain_dirs.begin(), domain_dirs.end());
  std::vector<BenchTask> tasks;
  for (const auto& dir : domain_dirs) {
    const std::string name = dir.filename().string();
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    std::vector<fs::path> problems;
    if (fs::is_directory(dir / "problems")) {
      for (const auto& entry : fs::directory_iterator(dir / "problems")) {
        if (entry.path().extension() == ".pddl") problems.push_back(entry.path());
      }
    }
    std::sort(problems.begin(), problems.end());
    if (tasks_per_domain > 0 && problems.size() > tasks_per_domain) {
      problems.resize(tasks_per_domain);
    }
    for (const auto& p : problems) {
      tasks.push_back({name + "/" + p.stem().string(), name, dir / "domain.pddl", p});
    }
  }
  return tasks;
}

namespace {

void RecordSolve(RunMetrics& m, const SolveOutcome& outcome) {
  m.solver_time += outcome.elapsed;
  m.max_solver_call = std::max(m.max_solver_call, outcome.elapsed);
  if (outcome.status == SolveStatus::kTimeout) ++m.timeouts;
  m.status = std::string(ToString(outcome.status));
}

void RunSingle(RunMetrics& m, const DomainDef& domain, const ProblemDef& problem,
               const BenchConfig& config) {
  const GroundedTask task = Ground(domain, problem);
  const SolveOutcome outcome = Solve(task, config.budget);
  RecordSolve(m, outcome);
  if (!outcome.solved()) return;
  if (!ValidatePlan(task, task.init, *outcome.plan).goal_satisfied) {
    m.status = "error";
    m.error = "plan does not validate";
    return;
  }
  m.plan_cost = outcome.plan->cost();
  m.execution_length = outcome.plan->cost();
}

void RunMultiAgent(RunMetrics& m, const DomainDef& domain, const ProblemDef& problem,
                   std::size_t n, const BenchConfig& config) {
  LiftConfig lift_config;
  lift_config.n_agents = n;
  lift_config.classifier = ResolveClassifier(domain, config.classifiers);
  const LiftedTask lifted = Lift(domain, problem, lift_config);
  const GroundedTask task = Ground(lifted.domain, lifted.problem);
  const SolveOutcome outcome = Solve(task, config.budget);
  RecordSolve(m, outcome);
  if (!outcome.solved()) return;
  const JointPlan joint = SplitByAgent(task, *outcome.plan, lifted);
  const JointProblem problem_view = JointProblem::Shared(task, task.init, joint);
  const ScheduleResult schedule = ExecLength(problem_view);
  if (!schedule.feasible()) {
    m.status = "error";
    m.error = "multi-agent plan cannot be scheduled";
    return;
  }
  const ReplayReport replay = ReplaySchedule(problem_view, schedule.schedule);
  if (!replay.ok || !task.goal.SatisfiedBy(replay.final_state)) {
    m.status = "error";
    m.error = "schedule replay failed";
    return;
  }
  m.plan_cost = outcome.plan->cost();
  m.execution_length = *schedule.length;
}

void RunTwoStep(RunMetrics& m, const DomainDef& domain, const ProblemDef& problem,
                const BenchTask& task, std::size_t n, const BenchConfig& config) {
  if (config.kit == nullptr || !config.llm) {
    throw BackendUnavailable("TwoStep needs a prompt kit and an LLM backend");
  }
  const ProblemText text = ProblemText::Load(ProblemText::PathFor(task.problem_file));
  PipelineConfig pipeline;
  pipeline.n_agents = n;
  pipeline.budget = config.budget;
  pipeline.classifier = ResolveClassifier(domain, config.classifiers);
  const TwoStepResult result =
      Decompose(domain, problem, text, *config.kit, *config.llm, pipeline);
  m.llm_time = result.metrics.llm_time;
  m.solver_time = result.metrics.SolverTime();
  for (double t : result.metrics.solver_times) {
    m.max_solver_call = std::max(m.max_solver_call, t);
  }
  m.timeouts = result.metrics.timeouts;
  m.fallback_used = result.fallback_used;
  if (!result.success) {
    m.status = m.timeouts > 0 ? "timeout" : "unsolvable";
    m.error = result.fallback_reason;
    return;
  }
  m.status = "solved";
  m.plan_cost = result.joint_plan.TotalCost();
  m.execution_length = result.execution_length;
}

}  // namespace

RunMetrics RunTask(const BenchTask& task, Method method, std::size_t n_agents,
                   std::size_t run, const BenchConfig& config) {
  RunMetrics m;
  m.task_id = task.task_id;
  m.domain = task.domain;
  m.method = method;
  m.n_agents = method == Method::kSA ? 1 : n_agents;
  m.run = run;
  try {
    const DomainDef domain = LoadDomain(task.domain_file);
    const ProblemDef problem = LoadProblem(task.problem_file, domain);
    switch (method) {
      case Method::kSA:
        RunSingle(m, domain, problem, config);
        break;
      case Method::kMA:
        RunMultiAgent(m, domain, problem, n_agents, config);
        break;
      case Method::kTwoStep:
        RunTwoStep(m, domain, problem, task, n_agents, config);
        break;
    }
  } catch (const std::exception& e) {
    m.status = "error";
    m.error = e.what();
  }
  m.planning_time = m.solver_time + m.llm_time;
  return m;
}

std::vector<RunMetrics> RunSuite(const std::vector<BenchTask>& tasks,
                                 const BenchConfig& config) {
  struct Job {
    const BenchTask* task;
    Method method;
    std::size_t n;
    std::size_t run;
  };
  std::vector<Job> jobs;
  for (const auto& task : tasks) {
    for (Method method : config.methods) {
      std::vector<std::size_t> counts = config.agent_counts;
      if (method == Method::kSA) counts = {1};
      for (std::size_t n : counts) {
        for (std::size_t r = 0; r < config.runs; ++r) jobs.push_back({&task, method, n, r});
      }
    }
  }
  std::vector<RunMetrics> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = RunTask(*jobs[i].task, jobs[i].method, jobs[i].n, jobs[i].run, config);
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(config.workers, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < count; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

namespace {

MeanStd Summarize(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

double Scale(double value, double lo, double hi) {
  return hi > lo ? (value - lo) / (hi - lo) : 0.0;
}

}  // namespace

SuiteReport Aggregate(const std::vector<RunMetrics>& metrics) {
  if (metrics.empty()) throw EmptyInput("no metrics to aggregate");
  SuiteReport report;
  report.per_task = metrics;

  using CellKey = std::tuple<std::string, Method, std::size_t>;
  struct Acc {
    std::size_t attempted = 0;
    std::size_t solved = 0;
    // run -> values of solved tasks
    std::map<std::size_t, std::vector<double>> time;
    std::map<std::size_t, std::vector<double>> length;
  };
  std::map<CellKey, Acc> cells;
  for (const auto& m : metrics) {
    Acc& acc = cells[{m.domain, m.method, m.n_agents}];
    ++acc.attempted;
    if (!m.solved()) continue;
    ++acc.solved;
    acc.time[m.run].push_back(m.planning_time);
    acc.length[m.run].push_back(static_cast<double>(m.execution_length));
  }
  auto run_means = [](const std::map<std::size_t, std::vector<double>>& runs) {
    std::vector<double> means;
    for (const auto& [run, values] : runs) {
      double sum = 0.0;
      for (double v : values) sum += v;
      means.push_back(sum / static_cast<double>(values.size()));
    }
    return means;
  };
  for (const auto& [key, acc] : cells) {
    CellSummary cell;
    std::tie(cell.domain, cell.method, cell.n_agents) = key;
    cell.attempted = acc.attempted;
    cell.solved = acc.solved;
    cell.planning_time = Summarize(run_means(acc.time));
    cell.execution_length = Summarize(run_means(acc.length));
    report.cells.push_back(std::move(cell));
  }

  // Per-domain min-max over cells that solved something.
  struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool set = false;
    void Add(double v) {
      lo = set ? std::min(lo, v) : v;
      hi = set ? std::max(hi, v) : v;
      set = true;
    }
  };
  std::map<std::string, std::pair<Range, Range>> bounds;  // (time, length)
  for (const auto& c : report.cells) {
    if (c.solved == 0) continue;
    bounds[c.domain].first.Add(c.planning_time.mean);
    bounds[c.domain].second.Add(c.execution_length.mean);
  }
  std::map<std::pair<Method, std::size_t>, NormalizedMean> across;
  for (auto& c : report.cells) {
    if (c.solved == 0) continue;
    const auto& [time, length] = bounds[c.domain];
    c.normalized_planning_time = Scale(c.planning_time.mean, time.lo, time.hi);
    c.normalized_execution_length =
        Scale(c.execution_length.mean, length.lo, length.hi);
    NormalizedMean& n = across[{c.method, c.n_agents}];
    n.method = c.method;
    n.n_agents = c.n_agents;
    n.planning_time += c.normalized_planning_time;
    n.execution_length += c.normalized_execution_length;
    ++n.domains;
  }
  for (auto& [key, n] : across) {
    n.planning_time /= static_cast<double>(n.domains);
    n.execution_length /= static_cast<double>(n.domains);
    report.normalized.push_back(n);
  }
  return report;
}

std::string MetricsCsv(const std::vector<RunMetrics>& metrics) {
  std::string out =
      "task_id,domain,method,n_agents,run,status,planning_time,solver_time,llm_time,"
      "execution_length,plan_cost,timeouts,fallback_used\n";
  char buffer[128];
  for (const auto& m : metrics) {
    out += m.task_id + "," + m.domain + "," + std::string(ToString(m.method)) + "," +
           std::to_string(m.n_agents) + "," + std::to_string(m.run) + "," + m.status + ",";
    std::snprintf(buffer, sizeof(buffer), "%.6f,%.6f,%.6f,", m.planning_time,
                  m.solver_time, m.llm_time);
    out += buffer;
    out += std::to_string(m.execution_length) + "," + std::to_string(m.plan_cost) + "," +
           std::to_string(m.timeouts) + "," + (m.fallback_used ? "1" : "0") + "\n";
  }
  return out;
}

json ReportToJson(const SuiteReport& report) {
  json doc;
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"domain", c.domain},
                     {"method", ToString(c.method)},
                     {"n_agents", c.n_agents},
                     {"attempted", c.attempted},
                     {"solved", c.solved},
                     {"planning_time",
                      {{"mean", c.planning_time.mean}, {"std", c.planning_time.stddev}}},
                     {"execution_length",
                      {{"mean", c.execution_length.mean},
                       {"std", c.execution_length.stddev}}},
                     {"normalized_planning_time", c.normalized_planning_time},
                     {"normalized_execution_length", c.normalized_execution_length}});
  }
  doc["cells"] = std::move(cells);
  json normalized = json::array();
  for (const auto& n : report.normalized) {
    normalized.push_back({{"method", ToString(n.method)},
                          {"n_agents", n.n_agents},
                          {"planning_time", n.planning_time},
                          {"execution_length", n.execution_length},
                          {"domains", n.domains}});
  }
  doc["normalized"] = std::move(normalized);
  json rows = json::array();
  for (const auto& m : report.per_task) {
    rows.push_back({{"task_id", m.task_id},
                    {"domain", m.domain},
                    {"method", ToString(m.method)},
                    {"n_agents", m.n_agents},
                    {"run", m.run},
                    {"status", m.status},
                    {"planning_time", m.planning_time},
                    {"solver_time", m.solver_time},
                    {"llm_time", m.llm_time},
                    {"execution_length", m.execution_length},
                    {"plan_cost", m.plan_cost},
                    {"timeouts", m.timeouts},
                    {"fallback_used", m.fallback_used},
                    {"error", m.error}});
  }
  doc["per_task"] = std::move(rows);
  return doc;
}

}  // namespace twostep
