#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autochart {

enum class ErrorKind {
  kParameter,
  kEmptyInput,
  kTooShort,
  kTrendUnrealizable,
  kIo,
  kMalformed,
  kOutOfRange,
  kInsufficientCoverage,
  kArity,
  kNegativeBar,
  kUnknownSlot,
  kUnknownMove,
  kInvalidTemplate,
  kCoverageHole,
  kRealization,
  kConsistency,
  kEmptyReport,
  kCorpus,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the corpus
// retry loop, the CLI) can react without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace autochart
