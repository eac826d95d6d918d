#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace madphys {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid function argument (negative sigma, length mismatch, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Unsupported or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class InitError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Simulation produced non-finite values.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, std::int64_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

/// Machine-readable protocol error codes echoed to agents on the wire.
enum class ErrorCode {
  Parse,
  MissingField,
  UnknownField,
  InvalidType,
  EmptySelection,
  InvalidObject,
  DuplicateObject,
  InvalidCoordinate,
  InvalidQuality,
  InvalidTimeDelta,
  InvalidParticle,
  InsufficientBudget,
  TimeLimit,
  WrongPhase,
  InvalidPrediction,
  TrialLimit,
};

const char* to_string(ErrorCode code) noexcept;

class ProtocolError : public Error {
 public:
  ProtocolError(ErrorCode code, const std::string& what) : Error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InsufficientBudget : public ProtocolError {
 public:
  InsufficientBudget(double requested, double remaining);
  double requested() const noexcept { return requested_; }
  double remaining() const noexcept { return remaining_; }

 private:
  double requested_;
  double remaining_;
};

class TimeLimitExceeded : public ProtocolError {
 public:
  TimeLimitExceeded(double requested_time, double t_max);
};

/// Agent transport failed (closed pipe, socket error).
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace madphys
