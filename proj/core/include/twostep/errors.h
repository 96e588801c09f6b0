#ifndef TWOSTEP_ERRORS_H_
#define TWOSTEP_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twostep {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedFeature : public Error {
 public:
  explicit UnsupportedFeature(const std::string& construct)
      : Error("unsupported PDDL feature: " + construct), construct_(construct) {}
  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

class SemanticError : public Error {
 public:
  using Error::Error;
};

class GroundingExplosion : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  NotApplicable(const std::string& action, const std::string& literal)
      : Error("action " + action + " not applicable: " + literal +
              " does not hold"),
        literal_(literal) {}
  const std::string& literal() const { return literal_; }

 private:
  std::string literal_;
};

class ClassifierIncomplete : public Error {
 public:
  explicit ClassifierIncomplete(const std::string& predicate)
      : Error("predicate not covered by classifier: " + predicate),
        predicate_(predicate) {}
  const std::string& predicate() const { return predicate_; }

 private:
  std::string predicate_;
};

class GoalAgentAmbiguity : public Error {
 public:
  using Error::Error;
};

class PlanParseError : public Error {
 public:
  using Error::Error;
};

class ExternalUnavailable : public Error {
 public:
  using Error::Error;
};

class ExternalParseError : public Error {
 public:
  using Error::Error;
};

class ExternalInvalidPlan : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class RateLimited : public Error {
 public:
  using Error::Error;
};

class FixtureMiss : public Error {
 public:
  explicit FixtureMiss(const std::string& digest)
      : Error("no fixture for prompt digest " + digest), digest_(digest) {}
  const std::string& digest() const { return digest_; }

 private:
  std::string digest_;
};

class MissingExample : public Error {
 public:
  using Error::Error;
};

class UnparseableResponse : public Error {
 public:
  using Error::Error;
};

class NoGoalFound : public Error {
 public:
  using Error::Error;
};

class InvalidLiteral : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

}  // namespace twostep

#endif  // TWOSTEP_ERRORS_H_
