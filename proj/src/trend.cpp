#include "autochart/trend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "autochart/error.hpp"
#include "autochart/rng.hpp"

namespace autochart::trend {

namespace {

constexpr std::array<std::string_view, 8> kTrendNames = {
    "linear-increase", "linear-decrease",  "convex-increase",    "concave-increase",
    "convex-decrease", "concave-decrease", "random-fluctuation", "plateau",
};

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace

void GbmParams::validate() const {
  if (!(s0 > 0) || !std::isfinite(s0))
    throw Error(ErrorKind::kParameter, fmt::format("GbmParams.s0 must be positive, got {}", s0));
  if (!std::isfinite(mu))
    throw Error(ErrorKind::kParameter, "GbmParams.mu must be finite");
  if (!(sigma >= 0) || !std::isfinite(sigma))
    throw Error(ErrorKind::kParameter,
                fmt::format("GbmParams.sigma must be non-negative, got {}", sigma));
  if (n_points < 2)
    throw Error(ErrorKind::kParameter,
                fmt::format("GbmParams.n_points must be >= 2, got {}", n_points));
}

std::string_view to_string(TrendClass c) { return kTrendNames[static_cast<std::size_t>(c)]; }

std::optional<TrendClass> parse_trend_class(std::string_view name) {
  for (std::size_t i = 0; i < kTrendNames.size(); ++i) {
    if (kTrendNames[i] == name) return static_cast<TrendClass>(i);
  }
  return std::nullopt;
}

bool is_increase(TrendClass c) {
  return c == TrendClass::kLinearIncrease || c == TrendClass::kConvexIncrease ||
         c == TrendClass::kConcaveIncrease;
}

bool is_decrease(TrendClass c) {
  return c == TrendClass::kLinearDecrease || c == TrendClass::kConvexDecrease ||
         c == TrendClass::kConcaveDecrease;
}

TrendClass mirrored(TrendClass c) {
  switch (c) {
    case TrendClass::kLinearIncrease: return TrendClass::kLinearDecrease;
    case TrendClass::kLinearDecrease: return TrendClass::kLinearIncrease;
    case TrendClass::kConvexIncrease: return TrendClass::kConvexDecrease;
    case TrendClass::kConvexDecrease: return TrendClass::kConvexIncrease;
    case TrendClass::kConcaveIncrease: return TrendClass::kConcaveDecrease;
    case TrendClass::kConcaveDecrease: return TrendClass::kConcaveIncrease;
    default: return c;
  }
}

std::string_view to_string(ShapeTransform t) {
  switch (t) {
    case ShapeTransform::kIdentity: return "identity";
    case ShapeTransform::kVerticalReflect: return "vertical-reflect";
    case ShapeTransform::kTimeReverse: return "time-reverse";
    case ShapeTransform::kReflectReverse: return "vertical-reflect+time-reverse";
  }
  return "identity";
}

void TrendSpec::validate() const {
  params.validate();
  const double d = params.drift();
  const auto bad = [&](std::string_view need) {
    throw Error(ErrorKind::kParameter,
                fmt::format("TrendSpec for {} requires drift {}, got {}", to_string(trend_class),
                            need, d));
  };
  if (is_increase(trend_class) && !(d > 0)) bad("> 0");
  if (is_decrease(trend_class) && !(d < 0)) bad("< 0");
  // Zero drift is compared with a tolerance: mu is usually computed as sigma^2/2.
  if (!is_directional(trend_class) && std::abs(d) > 1e-12) bad("= 0");
}

TrendSpec default_preset(TrendClass c, int n_points, double s0) {
  TrendSpec spec;
  spec.trend_class = c;
  spec.params.s0 = s0;
  spec.params.n_points = n_points;
  double drift = 0.0;
  double sigma = 0.0;
  ShapeTransform t = ShapeTransform::kIdentity;
  switch (c) {
    case TrendClass::kLinearIncrease: drift = 0.05; sigma = 0.003; break;
    case TrendClass::kLinearDecrease: drift = -0.05; sigma = 0.003; break;
    case TrendClass::kConvexIncrease: drift = 0.3; sigma = 0.02; break;
    case TrendClass::kConcaveIncrease:
      drift = 0.3; sigma = 0.02; t = ShapeTransform::kReflectReverse; break;
    case TrendClass::kConvexDecrease:
      drift = -0.3; sigma = 0.02; t = ShapeTransform::kReflectReverse; break;
    case TrendClass::kConcaveDecrease: drift = -0.3; sigma = 0.02; break;
    case TrendClass::kRandomFluctuation: drift = 0.0; sigma = 0.04; break;
    case TrendClass::kPlateau: drift = 0.0; sigma = 0.002; break;
  }
  spec.params.sigma = sigma;
  spec.params.mu = drift + sigma * sigma / 2.0;
  spec.transform = t;
  return spec;
}

std::vector<double> gbm_path(const GbmParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  const double drift = params.drift();
  std::vector<double> out(static_cast<std::size_t>(params.n_points));
  out[0] = params.s0;
  double w = 0.0;
  for (int i = 1; i < params.n_points; ++i) {
    w += rng.normal();
    out[static_cast<std::size_t>(i)] =
        params.s0 * std::exp(drift * static_cast<double>(i) + params.sigma * w);
  }
  return out;
}

std::vector<double> apply_transform(std::span<const double> series, ShapeTransform t) {
  if (series.empty()) throw Error(ErrorKind::kEmptyInput, "apply_transform: empty series");
  std::vector<double> out(series.begin(), series.end());
  if (t == ShapeTransform::kVerticalReflect || t == ShapeTransform::kReflectReverse) {
    const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
    const double pivot = *lo + *hi;
    for (double& v : out) v = pivot - v;
  }
  if (t == ShapeTransform::kTimeReverse || t == ShapeTransform::kReflectReverse) {
    std::reverse(out.begin(), out.end());
  }
  return out;
}

std::vector<double> synth_trend_series(const TrendSpec& spec, std::uint64_t seed,
                                       const ClassifierConfig& config) {
  spec.validate();
  if (spec.params.n_points < 3)
    throw Error(ErrorKind::kTooShort, "synth_trend_series: a trend needs at least 3 points");
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const std::uint64_t s =
        attempt == 0 ? seed : derive_seed(seed, {static_cast<std::uint64_t>(attempt)});
    auto series = apply_transform(gbm_path(spec.params, s), spec.transform);
    if (classify_trend(series, config) == spec.trend_class) return series;
  }
  throw Error(ErrorKind::kTrendUnrealizable,
              fmt::format("no {} series after {} resamples (s0={}, mu={}, sigma={}, n={}, "
                          "transform={}, seed={})",
                          to_string(spec.trend_class), kMaxResamples, spec.params.s0,
                          spec.params.mu, spec.params.sigma, spec.params.n_points,
                          to_string(spec.transform), seed));
}

TrendFeatures trend_features(std::span<const double> series) {
  TrendFeatures f;
  const std::size_t n = series.size();
  double scale = 0.0;
  for (double v : series) scale = std::max(scale, std::abs(v));
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  const double range = *hi - *lo;
  if (range == 0.0) {
    f.relative_range = 0.0;
  } else {
    f.relative_range =
        mean == 0.0 ? std::numeric_limits<double>::infinity() : range / std::abs(mean);
  }
  if (scale == 0.0) return f;

  // x in [0, 1], y / max|y| in [-1, 1].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = series[i] / scale;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  f.slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  if (n >= 3) {
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      acc += (series[i + 1] - 2.0 * series[i] + series[i - 1]) / scale;
    }
    f.curvature = acc / static_cast<double>(n - 2);
  }
  return f;
}

TrendClass classify_trend(std::span<const double> series, const ClassifierConfig& config) {
  if (series.size() < 3)
    throw Error(ErrorKind::kTooShort,
                fmt::format("classify_trend: need >= 3 points, got {}", series.size()));
  const TrendFeatures f = trend_features(series);
  if (std::abs(f.slope) < config.slope_threshold) {
    return f.relative_range < config.slope_threshold ? TrendClass::kPlateau
                                                     : TrendClass::kRandomFluctuation;
  }
  const bool up = f.slope > 0;
  if (std::abs(f.curvature) < config.curvature_threshold) {
    return up ? TrendClass::kLinearIncrease : TrendClass::kLinearDecrease;
  }
  // Convex means the magnitude of change accelerates in the direction of travel.
  const bool convex = sign(f.curvature) * sign(f.slope) > 0;
  if (up) return convex ? TrendClass::kConvexIncrease : TrendClass::kConcaveIncrease;
  return convex ? TrendClass::kConvexDecrease : TrendClass::kConcaveDecrease;
}

TrendClass classify_trend_lenient(std::span<const double> series, const ClassifierConfig& config) {
  if (series.size() >= 3) return classify_trend(series, config);
  if (series.size() < 2)
    throw Error(ErrorKind::kTooShort, "classify_trend_lenient: need >= 2 points");
  const TrendFeatures f = trend_features(series);
  if (std::abs(f.slope) < config.slope_threshold) return TrendClass::kPlateau;
  return f.slope > 0 ? TrendClass::kLinearIncrease : TrendClass::kLinearDecrease;
}

}  // namespace autochart::trend
