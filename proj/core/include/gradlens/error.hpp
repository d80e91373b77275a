#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gradlens {

enum class ErrorKind {
  ZeroPopulation,
  EmptyCohort,
  SchemeMismatch,
  CategoryMismatch,
  DegenerateK,
  InvalidDistribution,
  UnknownGroup,
  UnknownInstitution,
  EmptyRange,
  MissingColumn,
  NegativeCount,
  MalformedRow,
  InvalidColumnMap,
  InvalidFilter,
  EmptyPayload,
  ManifestCorrupt,
  Io,
};

/// snake_case name used in CLI diagnostics and API error bodies.
std::string_view error_name(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind plus free-form context
/// (the offending label, file line, parameter...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string context = {})
      : std::runtime_error(std::move(message)), kind_(kind), context_(std::move(context)) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorKind kind_;
  std::string context_;
};

}  // namespace gradlens
