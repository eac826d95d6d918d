#include "madphys/core/error.hpp"

#include "madphys/protocol/format.hpp"

namespace madphys {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::MissingField: return "missing_field";
    case ErrorCode::UnknownField: return "unknown_field";
    case ErrorCode::InvalidType: return "invalid_type";
    case ErrorCode::EmptySelection: return "empty_selection";
    case ErrorCode::InvalidObject: return "invalid_object";
    case ErrorCode::DuplicateObject: return "duplicate_object";
    case ErrorCode::InvalidCoordinate: return "invalid_coordinate";
    case ErrorCode::InvalidQuality: return "invalid_quality";
    case ErrorCode::InvalidTimeDelta: return "invalid_time_delta";
    case ErrorCode::InvalidParticle: return "invalid_particle";
    case ErrorCode::InsufficientBudget: return "insufficient_budget";
    case ErrorCode::TimeLimit: return "time_limit";
    case ErrorCode::WrongPhase: return "wrong_phase";
    case ErrorCode::InvalidPrediction: return "invalid_prediction";
    case ErrorCode::TrialLimit: return "trial_limit";
  }
  return "unknown";
}

InsufficientBudget::InsufficientBudget(double requested, double remaining)
    : ProtocolError(ErrorCode::InsufficientBudget,
                    "Your selection costs " + protocol::format_budget(requested) +
                        " units, which exceeds your remaining budget of " +
                        protocol::format_budget(remaining) + " units. Choose a cheaper selection."),
      requested_(requested),
      remaining_(remaining) {}

TimeLimitExceeded::TimeLimitExceeded(double requested_time, double t_max)
    : ProtocolError(ErrorCode::TimeLimit,
                    "Requested observation time " + protocol::format_fixed(requested_time, 5) +
                        " exceeds the maximum observable time " + protocol::format_budget(t_max) +
                        "; the measurement phase is over.") {}

}  // namespace madphys
