#include "twostep/plan_io.h"

#include <cctype>
#include <sstream>

#include "twostep/errors.h"

namespace twostep {

std::vector<ActionCall> ParsePlanText(std::string_view text) {
  std::vector<ActionCall> calls;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    std::string body = line.substr(first);
    body.erase(body.find_last_not_of(" \t\r") + 1);
    if (body.front() == '(') {
      if (body.back() != ')') {
        throw PlanParseError("line " + std::to_string(line_no) +
                             ": unterminated action '" + body + "'");
      }
      body = body.substr(1, body.size() - 2);
    }
    if (body.find_first_of("()") != std::string::npos) {
      throw PlanParseError("line " + std::to_string(line_no) +
                           ": malformed action '" + line + "'");
    }
    std::istringstream tokens(body);
    ActionCall call;
    tokens >> call.name;
    if (call.name.empty()) {
      throw PlanParseError("line " + std::to_string(line_no) + ": empty action");
    }
    for (std::string arg; tokens >> arg;) call.args.push_back(arg);
    calls.push_back(std::move(call));
  }
  return calls;
}

Plan ResolvePlan(const GroundedTask& task, const std::vector<ActionCall>& calls) {
  Plan plan;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    auto index = task.FindAction(calls[i].name, calls[i].args);
    if (!index) {
      std::string text = "(" + calls[i].name;
      for (const auto& a : calls[i].args) text += " " + a;
      throw PlanParseError("step " + std::to_string(i) + ": unknown ground action " +
                           text + ")");
    }
    plan.steps.push_back(*index);
  }
  return plan;
}

Plan ReadPlanFile(const GroundedTask& task, const std::filesystem::path& path) {
  return ResolvePlan(task, ParsePlanText(ReadTextFile(path)));
}

std::string FormatPlan(const GroundedTask& task, const Plan& plan) {
  std::string out;
  for (std::size_t step : plan.steps) out += task.actions.at(step).ToString() + "\n";
  out += "; cost = " + std::to_string(plan.cost()) + " (unit cost)\n";
  return out;
}

}  // namespace twostep
