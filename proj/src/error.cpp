#include "hce/error.hpp"

namespace hce {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::WrongRowCount: return "WrongRowCount";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::ChildReused: return "ChildReused";
    case ErrorCode::NonMonotoneDistances: return "NonMonotoneDistances";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::SizesDoNotSumToN: return "SizesDoNotSumToN";
    case ErrorCode::NTooSmall: return "NTooSmall";
    case ErrorCode::ZeroNormNode: return "ZeroNormNode";
    case ErrorCode::ConstantRow: return "ConstantRow";
    case ErrorCode::NonFiniteDistance: return "NonFiniteDistance";
    case ErrorCode::AsymmetricWeights: return "AsymmetricWeights";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::TooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ProbabilityExceedsOne: return "ProbabilityExceedsOne";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::ProbabilitiesDontSumToOne: return "ProbabilitiesDontSumToOne";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyCommunity: return "EmptyCommunity";
    case ErrorCode::OrphanNode: return "OrphanNode";
    case ErrorCode::CyclicTree: return "CyclicTree";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::NonMonotoneSimilarity: return "NonMonotoneSimilarity";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::AllRowsDegenerate: return "AllRowsDegenerate";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return ErrorCategory::Io;
    case ErrorCode::ProbabilityExceedsOne:
    case ErrorCode::InfeasibleBudget:
    case ErrorCode::TooLargeForOracle:
      return ErrorCategory::Infeasible;
    default:
      return ErrorCategory::Validation;
  }
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      index_(index),
      detail_(message) {}

}  // namespace hce
