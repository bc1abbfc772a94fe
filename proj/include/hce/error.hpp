#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hce {

enum class ErrorCode {
  // linkage_core
  WrongRowCount,
  IdOutOfRange,
  ChildReused,
  NonMonotoneDistances,
  NegativeDistance,
  SizeMismatch,
  KOutOfRange,
  // hce_engine
  SizesDoNotSumToN,
  NTooSmall,
  // distance_geometry / upgma
  ZeroNormNode,
  ConstantRow,
  NonFiniteDistance,
  AsymmetricWeights,
  NegativeWeight,
  TooLargeForOracle,
  // benchgen
  InvalidConfig,
  ProbabilityExceedsOne,
  LevelOutOfRange,
  ProbabilitiesDontSumToOne,
  InfeasibleBudget,
  // partition_metrics
  LengthMismatch,
  EmptyCommunity,
  // mcc_adapter
  OrphanNode,
  CyclicTree,
  MultipleRoots,
  NonMonotoneSimilarity,
  // signal_prep
  ZeroVariance,
  AllRowsDegenerate,
  EmptyEnsemble,
  // io
  Parse,
  Io,
};

/// Coarse classification used for process exit codes.
enum class ErrorCategory { Validation, Io, Infeasible };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

/// All library failures are reported as hce::Error. `index()` carries the
/// offending row, node, level or trace when the failure can be localized.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  std::optional<std::size_t> index() const noexcept { return index_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
  std::string detail_;
};

}  // namespace hce
