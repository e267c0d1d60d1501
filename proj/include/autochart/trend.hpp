#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace autochart::trend {

/// Geometric Brownian motion parameters. The drift actually applied is
/// `mu - sigma^2 / 2` and is always derived, never stored.
struct GbmParams {
  double s0 = 1.0;
  double mu = 0.0;
  double sigma = 0.0;
  int n_points = 2;

  double drift() const { return mu - sigma * sigma / 2.0; }

  /// Throws Error(kParameter) naming the first offending field.
  void validate() const;
};

enum class TrendClass {
  kLinearIncrease,
  kLinearDecrease,
  kConvexIncrease,
  kConcaveIncrease,
  kConvexDecrease,
  kConcaveDecrease,
  kRandomFluctuation,
  kPlateau,
};

inline constexpr std::array<TrendClass, 8> kAllTrendClasses = {
    TrendClass::kLinearIncrease,  TrendClass::kLinearDecrease,  TrendClass::kConvexIncrease,
    TrendClass::kConcaveIncrease, TrendClass::kConvexDecrease,  TrendClass::kConcaveDecrease,
    TrendClass::kRandomFluctuation, TrendClass::kPlateau,
};

/// The six classes with a direction (everything but random-fluctuation and plateau).
inline constexpr std::array<TrendClass, 6> kDirectionalTrendClasses = {
    TrendClass::kLinearIncrease,  TrendClass::kLinearDecrease, TrendClass::kConvexIncrease,
    TrendClass::kConcaveIncrease, TrendClass::kConvexDecrease, TrendClass::kConcaveDecrease,
};

std::string_view to_string(TrendClass c);
std::optional<TrendClass> parse_trend_class(std::string_view name);

bool is_increase(TrendClass c);
bool is_decrease(TrendClass c);
inline bool is_directional(TrendClass c) { return is_increase(c) || is_decrease(c); }

/// increase <-> decrease with the same curvature word; random/plateau fixed.
TrendClass mirrored(TrendClass c);

enum class ShapeTransform {
  kIdentity,
  kVerticalReflect,
  kTimeReverse,
  kReflectReverse,
};

std::string_view to_string(ShapeTransform t);

struct TrendSpec {
  TrendClass trend_class = TrendClass::kLinearIncrease;
  GbmParams params;
  ShapeTransform transform = ShapeTransform::kIdentity;

  /// Parameter validity plus drift-sign consistency with the class.
  void validate() const;
};

/// Default recipe for a class: drift sign, volatility and transform.
///
///   linear-*     |drift| = 0.05, sigma = 0.003, identity
///   convex-inc   drift = +0.3,   sigma = 0.02,  identity
///   concave-inc  drift = +0.3,   sigma = 0.02,  reflect+reverse
///   convex-dec   drift = -0.3,   sigma = 0.02,  reflect+reverse
///   concave-dec  drift = -0.3,   sigma = 0.02,  identity
///   random       drift = 0,      sigma = 0.04,  identity
///   plateau      drift = 0,      sigma = 0.002, identity
TrendSpec default_preset(TrendClass c, int n_points = 8, double s0 = 100.0);

/// Thresholds used by classify_trend, on the series divided by max|y|.
struct ClassifierConfig {
  double slope_threshold = 0.05;
  double curvature_threshold = 0.01;
};

/// Y_i = s0 * exp(drift * i + sigma * W_i), W_0 = 0, W_i = W_{i-1} + N(0, 1).
std::vector<double> gbm_path(const GbmParams& params, std::uint64_t seed);

std::vector<double> apply_transform(std::span<const double> series, ShapeTransform t);

inline constexpr int kMaxResamples = 10;

/// gbm_path + apply_transform, resampled (seed, then derive_seed(seed, {k})) until the output
/// classifies as spec.trend_class. Throws kTrendUnrealizable after kMaxResamples.
std::vector<double> synth_trend_series(const TrendSpec& spec, std::uint64_t seed,
                                       const ClassifierConfig& config = {});

/// Deterministic rule-based classification; series must have >= 3 points.
TrendClass classify_trend(std::span<const double> series, const ClassifierConfig& config = {});

/// Two-point fallback used where a chart series is too short to classify:
/// relative change below the slope threshold is a plateau, otherwise linear.
TrendClass classify_trend_lenient(std::span<const double> series,
                                  const ClassifierConfig& config = {});

/// Intermediate quantities of classify_trend, exposed for diagnostics and tests.
struct TrendFeatures {
  double slope = 0.0;           // least-squares slope of y / max|y| against x in [0, 1]
  double relative_range = 0.0;  // (max - min) / |mean|
  double curvature = 0.0;       // mean second difference of y / max|y|
};

TrendFeatures trend_features(std::span<const double> series);

}  // namespace autochart::trend
