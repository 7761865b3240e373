#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace consensus {

// Argument outside the mathematical domain of a function (e.g. log_gamma(0)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Arguments individually valid but mutually inconsistent (count/draw mismatch).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation called in a state that cannot satisfy it (e.g. drawing from an empty pool).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Exact enumeration refused because the support exceeds the configured limit.
class SupportTooLarge : public std::runtime_error {
 public:
  SupportTooLarge(std::uint64_t support, std::uint64_t limit)
      : std::runtime_error("support of " + std::to_string(support) +
                           " completions exceeds limit " + std::to_string(limit)),
        support_(support) {}
  std::uint64_t support() const noexcept { return support_; }

 private:
  std::uint64_t support_;
};

// Caller asked for a loss or fit over an empty window.
class EmptyDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pearson correlation over a vector with zero variance.
class UndefinedCorrelation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace consensus
