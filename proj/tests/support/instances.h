#ifndef TWOSTEP_TESTS_SUPPORT_INSTANCES_H_
#define TWOSTEP_TESTS_SUPPORT_INSTANCES_H_

#include <cstddef>
#include <filesystem>
#include <random>
#include <string>

#include "twostep/classifier.h"
#include "twostep/grounding.h"
#include "twostep/parallel_exec.h"
#include "twostep/pddl.h"

namespace twostep::testing {

std::filesystem::path DataDir();
std::filesystem::path DomainFile(const std::string& domain);
std::filesystem::path AppendixFile(const std::string& name);

// A parsed and grounded single-agent task.
struct Instance {
  DomainDef domain;
  ProblemDef problem;
  GroundedTask task;
  PredicateClassifier classifier;
};

Instance MakeInstance(const std::string& domain_dir, const std::string& problem_text);
Instance LoadInstance(const std::string& domain_dir, const std::filesystem::path& problem);

// Random towers for both init and goal.
std::string RandomBlocksworld(std::mt19937& rng, std::size_t blocks);
// One robot with two grippers; every ball gets a random start and goal room.
std::string RandomGripper(std::mt19937& rng, std::size_t rooms, std::size_t balls);

// Agent k walks randomly (1..max_len steps) from the environment left by
// agents 0..k-1 and its own untouched agent-specific atoms, so running the
// plans one after another is always valid.
JointPlan RandomSequentialWalks(const Instance& instance, std::size_t agents,
                                std::size_t max_len, std::mt19937& rng);

}  // namespace twostep::testing

#endif  // TWOSTEP_TESTS_SUPPORT_INSTANCES_H_
