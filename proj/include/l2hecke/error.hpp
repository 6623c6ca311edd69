#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l2hecke {

enum class ErrorKind {
  PoleAtEvaluationPoint,
  UnsupportedType,
  EmptyGeneratingSet,
  DimensionMismatch,
  PairMismatch,
  InsufficientRadius,
  NonconstantOnSphere,
  NotSelfAdjoint,
  NonIntegral,
  IrregularGraph,
  SelfAdjointnessViolated,
  NonpositiveMultiplicity,
  WeightedGraphUnsupported,
  EigensolverFailure,
  EmptyTruncation,
  ParityViolation,
  NotSymmetric,
  MixedDegrees,
  GapBoundViolated,
  BoundViolated,
  ParseError,
  IoError,
  Internal,
};

inline std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PoleAtEvaluationPoint: return "PoleAtEvaluationPoint";
    case ErrorKind::UnsupportedType: return "UnsupportedType";
    case ErrorKind::EmptyGeneratingSet: return "EmptyGeneratingSet";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::PairMismatch: return "PairMismatch";
    case ErrorKind::InsufficientRadius: return "InsufficientRadius";
    case ErrorKind::NonconstantOnSphere: return "NonconstantOnSphere";
    case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorKind::NonIntegral: return "NonIntegral";
    case ErrorKind::IrregularGraph: return "IrregularGraph";
    case ErrorKind::SelfAdjointnessViolated: return "SelfAdjointnessViolated";
    case ErrorKind::NonpositiveMultiplicity: return "NonpositiveMultiplicity";
    case ErrorKind::WeightedGraphUnsupported: return "WeightedGraphUnsupported";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::EmptyTruncation: return "EmptyTruncation";
    case ErrorKind::ParityViolation: return "ParityViolation";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::MixedDegrees: return "MixedDegrees";
    case ErrorKind::GapBoundViolated: return "GapBoundViolated";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

/// Every failure raised by the library. The kind is stable and is what the
/// CLI maps onto exit codes; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace l2hecke
