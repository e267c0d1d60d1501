#include "autochart/rng.hpp"

#include <cmath>
#include <numbers>

#include "autochart/error.hpp"

namespace autochart {

std::uint64_t Rng::next_u64() {
  state_ += kGoldenGamma;
  return mix64(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::kParameter, "Rng::below: n must be positive");
  // Reject the first (2^64 mod n) values so the accepted range is a multiple of n.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return x % n;
  }
}

int Rng::between(int lo, int hi) {
  if (hi < lo) throw Error(ErrorKind::kParameter, "Rng::between: hi < lo");
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(seed + kGoldenGamma);
  std::uint64_t k = 1;
  for (const std::uint64_t v : parts) {
    h = mix64(h ^ (v + k * kGoldenGamma));
    ++k;
  }
  return h;
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kTooShort: return "too-short";
    case ErrorKind::kTrendUnrealizable: return "trend-unrealizable";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kMalformed: return "malformed";
    case ErrorKind::kOutOfRange: return "out-of-range";
    case ErrorKind::kInsufficientCoverage: return "insufficient-coverage";
    case ErrorKind::kArity: return "arity";
    case ErrorKind::kNegativeBar: return "negative-bar";
    case ErrorKind::kUnknownSlot: return "unknown-slot";
    case ErrorKind::kUnknownMove: return "unknown-move";
    case ErrorKind::kInvalidTemplate: return "invalid-template";
    case ErrorKind::kCoverageHole: return "coverage-hole";
    case ErrorKind::kRealization: return "realization";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kEmptyReport: return "empty-report";
    case ErrorKind::kCorpus: return "corpus";
  }
  return "unknown";
}

}  // namespace autochart
