// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhqm
{

enum class ErrorKind
{
  NonFinite,
  NotHPD,
  Degenerate,
  PositivityLost,
  NoStationaryMetric,
  SingularBasis,
  NotUnitaryInput,
  IncompleteSet,
  UnnormalizedMember,
  BadWeights,
  IncompleteBasis,
  NonProductMetric,
  UnnormalizedState,
  RankTooLarge,
  BadShape,
  ConstraintViolated,
  OrthogonalInput,
  ParseError,
  ValidationError,
};

constexpr std::string_view to_string(ErrorKind kind)
{
  switch (kind)
  {
    case ErrorKind::NonFinite:
      return "NonFinite";
    case ErrorKind::NotHPD:
      return "NotHPD";
    case ErrorKind::Degenerate:
      return "Degenerate";
    case ErrorKind::PositivityLost:
      return "PositivityLost";
    case ErrorKind::NoStationaryMetric:
      return "NoStationaryMetric";
    case ErrorKind::SingularBasis:
      return "SingularBasis";
    case ErrorKind::NotUnitaryInput:
      return "NotUnitaryInput";
    case ErrorKind::IncompleteSet:
      return "IncompleteSet";
    case ErrorKind::UnnormalizedMember:
      return "UnnormalizedMember";
    case ErrorKind::BadWeights:
      return "BadWeights";
    case ErrorKind::IncompleteBasis:
      return "IncompleteBasis";
    case ErrorKind::NonProductMetric:
      return "NonProductMetric";
    case ErrorKind::UnnormalizedState:
      return "UnnormalizedState";
    case ErrorKind::RankTooLarge:
      return "RankTooLarge";
    case ErrorKind::BadShape:
      return "BadShape";
    case ErrorKind::ConstraintViolated:
      return "ConstraintViolated";
    case ErrorKind::OrthogonalInput:
      return "OrthogonalInput";
    case ErrorKind::ParseError:
      return "ParseError";
    case ErrorKind::ValidationError:
      return "ValidationError";
  }
  return "Unknown";
}

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// Raised when a metric trajectory loses positive definiteness at time t.
class PositivityLost : public Error
{
public:
  PositivityLost(double t, double min_eigenvalue)
    : Error(ErrorKind::PositivityLost,
            "metric not positive definite at t=" + std::to_string(t) +
                " (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
      time_(t)
  {
  }

  double time() const noexcept { return time_; }

private:
  double time_;
};

// Config validation failure tied to a named field.
class ValidationError : public Error
{
public:
  ValidationError(std::string field, const std::string &message)
    : Error(ErrorKind::ValidationError, field + ": " + message), field_(std::move(field)),
      detail_(message)
  {
  }

  const std::string &field() const noexcept { return field_; }
  const std::string &detail() const noexcept { return detail_; }

private:
  std::string field_;
  std::string detail_;
};

// JSON syntax failure with the 1-based line it occurred on.
class ParseError : public Error
{
public:
  ParseError(std::size_t line, const std::string &message)
    : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + message),
      line_(line)
  {
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace nhqm
