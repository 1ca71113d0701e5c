#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hive {

// Root of the error hierarchy. Every failure that crosses a module boundary
// is a subclass of this so the CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- input / schema errors ---------------------------------------------

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line_no = 0)
      : Error(line_no ? msg + " (line " + std::to_string(line_no) + ")" : msg),
        line(line_no) {}
  std::size_t line;
};

class ArityViolation : public Error {
 public:
  ArityViolation(const std::string& msg, std::size_t line_no = 0)
      : Error(line_no ? msg + " (line " + std::to_string(line_no) + ")" : msg),
        line(line_no) {}
  std::size_t line;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line_no, std::size_t col_no, const std::string& expected)
      : Error("syntax error at " + std::to_string(line_no) + ":" +
              std::to_string(col_no) + ": expected " + expected),
        line(line_no), col(col_no), expected(expected) {}
  std::size_t line;
  std::size_t col;
  std::string expected;
};

class UnsupportedFeature : public Error {
 public:
  explicit UnsupportedFeature(const std::string& feature)
      : Error("unsupported feature: " + feature), feature(feature) {}
  std::string feature;
};

class PredicateConflict : public Error {
 public:
  explicit PredicateConflict(const std::string& msg) : Error(msg) {}
};

class SpecParseError : public Error {
 public:
  explicit SpecParseError(const std::string& msg) : Error(msg) {}
};

class MissingVerdict : public Error {
 public:
  explicit MissingVerdict(const std::string& msg) : Error(msg) {}
};

// --- planning / selection errors ---------------------------------------

class UnknownAction : public Error {
 public:
  explicit UnknownAction(const std::string& name)
      : Error("unknown action: " + name), action(name) {}
  std::string action;
};

class NoInputArtifact : public Error {
 public:
  explicit NoInputArtifact(const std::string& msg) : Error(msg) {}
};

class GroundingExplosion : public Error {
 public:
  GroundingExplosion(std::size_t count, std::size_t cap)
      : Error("grounding explosion: " + std::to_string(count) +
              " ground actions exceed cap " + std::to_string(cap)) {}
};

class NoPlanFound : public Error {
 public:
  explicit NoPlanFound(const std::string& msg = "no plan found") : Error(msg) {}
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(std::uint64_t expansions)
      : Error("expansion budget exceeded after " + std::to_string(expansions)) {}
};

class ScaleGuard : public Error {
 public:
  explicit ScaleGuard(const std::string& msg) : Error(msg) {}
};

class EmptySelection : public Error {
 public:
  explicit EmptySelection(const std::string& msg) : Error(msg) {}
};

// --- provider / execution errors ----------------------------------------

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& msg) : Error(msg) {}
};

class UnboundParameter : public Error {
 public:
  explicit UnboundParameter(const std::string& param)
      : Error("unbound parameter: " + param), param(param) {}
  std::string param;
};

class ExecutionError : public Error {
 public:
  explicit ExecutionError(const std::string& msg) : Error(msg) {}
};

}  // namespace hive
