#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "instances.h"
#include "twostep/pddl.h"

namespace twostep {
namespace {

namespace fs = std::filesystem;
using testing::AppendixFile;
using testing::DataDir;
using testing::DomainFile;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun Cli(const std::string& args) {
  const std::string cmd = std::string(TWOSTEP_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Quote(const fs::path& p) { return "'" + p.string() + "'"; }

TEST(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Cli("--help").code, 0);
  EXPECT_EQ(Cli("").code, 2);
  EXPECT_EQ(Cli("solve --problem x.pddl").code, 2);
  EXPECT_EQ(Cli("frobnicate").code, 2);
}

TEST(CliTest, ParseAndSolve) {
  const std::string args =
      "--domain " + Quote(DomainFile("blocksworld")) + " --problem " +
      Quote(AppendixFile("bw-rand-3.pddl"));
  EXPECT_EQ(Cli("parse " + args).code, 0);
  const CliRun solved = Cli("solve --optimal " + args);
  EXPECT_EQ(solved.code, 0) << solved.out;
  EXPECT_NE(solved.out.find("unstack"), std::string::npos);
}

TEST(CliTest, BadInputExitsOne) {
  const fs::path bad = fs::temp_directory_path() / "twostep-cli-bad.pddl";
  WriteTextFile(bad, "(define (problem p) (:domain blocksworld-4ops) (:init (nope))");
  EXPECT_EQ(Cli("parse --domain " + Quote(DomainFile("blocksworld")) + " --problem " +
                Quote(bad)).code,
            1);
  fs::remove(bad);
}

TEST(CliTest, ExecLengthPrintsLength) {
  const fs::path dir = fs::temp_directory_path() / "twostep-cli-exec";
  fs::create_directories(dir);
  WriteTextFile(dir / "a.plan", "(unstack b2 b3)\n(putdown b2)\n");
  WriteTextFile(dir / "b.plan", "");
  const CliRun r = Cli("exec-len --domain " + Quote(DomainFile("blocksworld")) + " --problem " +
                    Quote(AppendixFile("bw-rand-3.pddl")) + " --plans " + Quote(dir / "a.plan") +
                    " --plans " + Quote(dir / "b.plan"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("execution_length 2"), std::string::npos) << r.out;
  fs::remove_all(dir);
}

TEST(CliTest, TwoStepWritesArtifactsThatReparse) {
  const fs::path out = fs::temp_directory_path() / "twostep-cli-run";
  fs::remove_all(out);
  const CliRun r = Cli("twostep --domain " + Quote(DomainFile("blocksworld")) + " --problem " +
                    Quote(AppendixFile("bw-rand-3.pddl")) + " --agents 2 --fixtures " +
                    Quote(DataDir() / "fixtures" / "appendix-blocksworld") + " --prompts " +
                    Quote(DataDir() / "prompts") + " --clock virtual --budget 10 --out-dir " +
                    Quote(out));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("execution_length 5"), std::string::npos) << r.out;
  for (const char* f : {"joint_plan.txt", "schedule.jsonl", "transcript.json", "result.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto result = nlohmann::json::parse(ReadTextFile(out / "result.json"));
  EXPECT_TRUE(result.is_object());
  fs::remove_all(out);
}

TEST(CliTest, LiftWritesParseableFiles) {
  const fs::path dir = fs::temp_directory_path() / "twostep-cli-lift";
  fs::create_directories(dir);
  const CliRun r = Cli("lift --domain " + Quote(DomainFile("gripper")) + " --problem " +
                    Quote(AppendixFile("gripper-2-2-2.pddl")) + " --agents 2 --out-domain " +
                    Quote(dir / "d.pddl") + " --out-problem " + Quote(dir / "p.pddl"));
  ASSERT_EQ(r.code, 0) << r.out;
  const DomainDef d = LoadDomain(dir / "d.pddl");
  EXPECT_NO_THROW(LoadProblem(dir / "p.pddl", d));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace twostep
