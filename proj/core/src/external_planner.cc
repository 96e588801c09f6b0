#include "twostep/external_planner.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include "twostep/errors.h"
#include "twostep/grounding.h"
#include "twostep/plan_io.h"

namespace twostep {

namespace fs = std::filesystem;

namespace {

// Temporary directory removed on scope exit unless the caller supplied one.
class WorkDir {
 public:
  explicit WorkDir(const fs::path& requested) {
    if (!requested.empty()) {
      path_ = requested;
      fs::create_directories(path_);
      return;
    }
    std::string pattern = (fs::temp_directory_path() / "twostep-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) {
      throw ExternalUnavailable("cannot create a working directory");
    }
    path_ = pattern;
    owned_ = true;
  }
  ~WorkDir() {
    if (owned_) {
      std::error_code ignored;
      fs::remove_all(path_, ignored);
    }
  }
  WorkDir(const WorkDir&) = delete;
  WorkDir& operator=(const WorkDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  bool owned_ = false;
};

struct ChildResult {
  bool timed_out = false;
  int exit_code = 0;
};

ChildResult RunChild(const std::vector<std::string>& argv, const fs::path& dir,
                     double seconds) {
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const std::string log = (dir / "planner.log").string();

  const pid_t pid = fork();
  if (pid < 0) throw ExternalUnavailable("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    if (chdir(dir.c_str()) != 0) _exit(127);
    const int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, STDOUT_FILENO);
      dup2(fd, STDERR_FILENO);
      close(fd);
    }
    execv(args[0], args.data());
    _exit(127);
  }
  // Also set from the parent so the group exists before any kill.
  setpgid(pid, pid);

  ChildResult result;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(seconds);
  int status = 0;
  while (true) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      result.timed_out = true;
      return result;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace

fs::path FindLatestPlanFile(const fs::path& dir, const std::string& plan_file) {
  fs::path best;
  long best_number = -1;
  if (!fs::is_directory(dir)) return best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    long number = -1;
    if (name == plan_file) {
      number = 0;
    } else if (name.rfind(plan_file + ".", 0) == 0) {
      const std::string suffix = name.substr(plan_file.size() + 1);
      if (suffix.empty() || suffix.find_first_not_of("0123456789") != std::string::npos) {
        continue;
      }
      number = std::stol(suffix);
    } else {
      continue;
    }
    if (number > best_number) {
      best_number = number;
      best = entry.path();
    }
  }
  return best;
}

SolveOutcome SolveExternal(const fs::path& domain_file, const fs::path& problem_file,
                           const TimeBudget& budget,
                           const ExternalPlannerConfig& config) {
  if (config.binary.empty() || access(config.binary.c_str(), X_OK) != 0) {
    throw ExternalUnavailable("planner binary not executable: " +
                              config.binary.string());
  }
  const DomainDef domain = LoadDomain(domain_file);
  const ProblemDef problem = LoadProblem(problem_file, domain);

  WorkDir dir(config.work_dir);
  std::vector<std::string> argv{fs::absolute(config.binary).string()};
  argv.insert(argv.end(), config.alias_args.begin(), config.alias_args.end());
  argv.push_back(fs::absolute(domain_file).string());
  argv.push_back(fs::absolute(problem_file).string());

  const auto start = std::chrono::steady_clock::now();
  const ChildResult child = RunChild(argv, dir.path(), budget.seconds);
  SolveOutcome outcome;
  outcome.elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!child.timed_out && child.exit_code == 127) {
    throw ExternalUnavailable("planner failed to start: " + config.binary.string());
  }

  const fs::path plan_path = FindLatestPlanFile(dir.path(), config.plan_file);
  if (plan_path.empty()) {
    outcome.status = child.timed_out ? SolveStatus::kTimeout : SolveStatus::kUnsolvable;
    return outcome;
  }

  std::vector<ActionCall> calls;
  try {
    calls = ParsePlanText(ReadTextFile(plan_path));
  } catch (const PlanParseError& e) {
    throw ExternalParseError(plan_path.filename().string() + ": " + e.what());
  }
  for (const auto& call : calls) {
    const ActionSchema* schema = domain.FindAction(call.name);
    if (schema == nullptr || schema->params.size() != call.args.size()) {
      throw ExternalParseError(plan_path.filename().string() +
                               ": no action schema matches '" + call.name + "'");
    }
  }

  // Actions of a valid plan are relaxed-reachable, so pruning loses nothing.
  const GroundedTask task = Ground(domain, problem);
  Plan plan;
  try {
    plan = ResolvePlan(task, calls);
  } catch (const PlanParseError& e) {
    throw ExternalInvalidPlan(e.what());
  }
  const ValidationReport report = ValidatePlan(task, task.init, plan);
  if (!report.valid || !report.goal_satisfied) {
    std::string why = report.valid ? "goal not reached"
                                   : "step " + std::to_string(*report.failing_step) +
                                         " not applicable";
    throw ExternalInvalidPlan("external plan rejected: " + why);
  }
  outcome.status = SolveStatus::kSolved;
  outcome.plan = std::move(plan);
  return outcome;
}

}  // namespace twostep
