#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autochart/rng.hpp"
#include "autochart/trend.hpp"

namespace autochart::catalog {

enum class ValueKind { kPositiveInteger, kFloat, kPercentage };

std::string_view to_string(ValueKind kind);
std::optional<ValueKind> parse_value_kind(std::string_view name);

inline constexpr double kMaxMagnitude = 3.5e15;
inline constexpr int kFirstYear = 1950;
inline constexpr int kLastYear = 2016;
inline constexpr int kMinSeriesLength = 2;
inline constexpr int kMaxSeriesLength = 8;

struct ValueBounds {
  double lo;
  double hi;
};

ValueBounds bounds_of(ValueKind kind);

struct Indicator {
  std::string id;
  std::string name;
  std::string unit;
  ValueKind value_kind = ValueKind::kFloat;

  friend bool operator==(const Indicator&, const Indicator&) = default;
};

struct Entity {
  std::string id;
  std::string name;
  std::string kind;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct ObservationKey {
  std::uint32_t indicator = 0;
  std::uint32_t entity = 0;
  int year = 0;

  friend auto operator<=>(const ObservationKey&, const ObservationKey&) = default;
};

/// Immutable indicator/entity/year table. Construction validates every
/// observation and builds the sampling indexes.
class Catalog {
 public:
  Catalog(std::vector<Indicator> indicators, std::vector<Entity> entities,
          std::map<ObservationKey, double> observations);

  const std::vector<Indicator>& indicators() const { return indicators_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const std::map<ObservationKey, double>& observations() const { return observations_; }

  std::optional<double> value(std::uint32_t indicator, std::uint32_t entity, int year) const;

  /// Maximal runs of consecutive covered years, length >= 2.
  struct Run {
    std::uint32_t indicator;
    std::uint32_t entity;
    int first_year;
    int length;
  };
  /// Entities of one kind covered for (indicator, year), at least two of them.
  struct CrossSection {
    std::uint32_t indicator;
    int year;
    std::vector<std::uint32_t> entities;
  };

  const std::vector<Run>& runs() const { return runs_; }
  const std::vector<CrossSection>& cross_sections() const { return cross_sections_; }

  friend bool operator==(const Catalog& a, const Catalog& b) {
    return a.indicators_ == b.indicators_ && a.entities_ == b.entities_ &&
           a.observations_ == b.observations_;
  }

 private:
  std::vector<Indicator> indicators_;
  std::vector<Entity> entities_;
  std::map<ObservationKey, double> observations_;
  std::vector<Run> runs_;
  std::vector<CrossSection> cross_sections_;
};

struct CatalogStats {
  std::size_t indicators = 0;
  std::size_t entities = 0;
  std::size_t observations = 0;
  std::size_t covered_pairs = 0;
  int first_year = 0;
  int last_year = 0;
};

CatalogStats stats(const Catalog& catalog);
std::string format_stats(const CatalogStats& stats);

/// `foo.csv` -> `foo.dict.csv`.
std::filesystem::path dictionary_path_for(const std::filesystem::path& data_path);

Catalog load_catalog(const std::filesystem::path& data_path);
Catalog load_catalog(const std::filesystem::path& data_path,
                     const std::filesystem::path& dictionary_path);
void write_catalog(const Catalog& catalog, const std::filesystem::path& data_path);

Catalog synth_catalog(std::uint64_t seed, int n_indicators, int n_entities);

/// One plotted series. indicator_name, entity_kind and value_kind travel with
/// the values so charts can be titled and perturbations stay within bounds.
struct DataSeries {
  std::string series_name;
  std::vector<std::string> x_labels;
  std::vector<double> y_values;
  std::string y_unit;
  bool temporal = false;
  std::string indicator_name;
  std::string entity_kind;
  ValueKind value_kind = ValueKind::kFloat;

  std::size_t size() const { return y_values.size(); }

  /// Length, label/value agreement, temporal labels and value bounds.
  void validate() const;

  friend bool operator==(const DataSeries&, const DataSeries&) = default;
};

/// True when every label is an integer year and the sequence strictly increases.
bool labels_are_ordered_years(const std::vector<std::string>& labels);

/// Picks an indicator, entity(ies) and 2-8 x positions. Temporal series use
/// consecutive covered years of one (indicator, entity); categorical series use
/// the entities of one kind covered at one year. Arity 2 returns two series over
/// the same x labels (a second entity, or a second year for categorical).
std::vector<DataSeries> sample_series(const Catalog& catalog, bool temporal, int arity, Rng& rng,
                                      int min_length = kMinSeriesLength);

/// Replaces y_values by a synthetic trend series of the same length, scaled
/// multiplicatively onto the midpoint of the original [min, max] envelope and
/// kept inside the indicator's value bounds.
DataSeries perturb_to_trend(const DataSeries& series, const trend::TrendSpec& spec, Rng& rng,
                            const trend::ClassifierConfig& config = {});

}  // namespace autochart::catalog
