#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "autochart/chart.hpp"
#include "autochart/rng.hpp"
#include "autochart/templates.hpp"

namespace autochart::narrate {

using chart::ChartMeta;
using catalog::DataSeries;
using templates::ChartCategory;
using templates::MoveTag;
using templates::Template;
using templates::TemplateBank;
using trend::TrendClass;

struct SeriesFacts {
  std::string name;
  std::string x_first;
  std::string x_last;
  std::string x_at_max;  // first occurrence
  std::string x_at_min;
  double y_first = 0;
  double y_last = 0;
  double y_max = 0;
  double y_min = 0;
  double y_mean = 0;
  double delta = 0;           // y_last - y_first
  double relative_delta = 0;  // delta / |y_first|, 0 when y_first is 0
  TrendClass trend = TrendClass::kRandomFluctuation;
};

/// Ordering of series 0 relative to series 1 across all x positions.
enum class Dominance {
  kFirstAbove,    // strictly above everywhere
  kSecondAbove,
  kTie,           // identical everywhere
  kFirstAtLeast,  // never below, level somewhere
  kSecondAtLeast,
  kCrossing,      // strict sign change of the difference
};

std::string_view to_string(Dominance d);

struct CrossFacts {
  Dominance dominance = Dominance::kTie;
  double gap_first = 0;  // series 0 minus series 1
  double gap_last = 0;
  /// Bracketing x labels of every sign change of the difference (zeros skipped).
  std::vector<std::pair<std::string, std::string>> crossings;
};

struct ChartFacts {
  ChartCategory category = ChartCategory::kCategorical;
  chart::ChartKind kind = chart::ChartKind::kLine;
  bool temporal = false;
  std::string title;
  std::string x_label;  // category axis title, lower case
  std::string y_label;  // indicator name, lower case unless it starts with an acronym
  std::string unit;
  std::vector<std::string> x_labels;
  std::vector<SeriesFacts> series;
  std::optional<CrossFacts> cross;  // two-series charts only
};

/// Temporal charts whose focal (first) series has a directional trend are
/// temporal-trend; other temporal charts are temporal-random.
ChartCategory categorize(bool temporal, TrendClass focal_trend);

/// Facts from the meta data coordinates; `series` must match them exactly.
ChartFacts extract_facts(const ChartMeta& meta, const std::vector<DataSeries>& series);
ChartFacts extract_facts(const ChartMeta& meta);

std::string lower_label(std::string_view name);

// Numbers: two significant figures, word scales from a million upwards.
/// "nearly" is last and only used when the printed number is above the true magnitude.
inline constexpr std::array<std::string_view, 4> kApproximationQualifiers = {
    "about", "approximately", "around", "nearly"};

struct FormattedNumber {
  std::string text;    // "300", "1.2 million", "-0.045"
  bool approximate = false;  // rounding changed the value
  bool rounded_up = false;   // magnitude grew in rounding
};

FormattedNumber format_number(double value);
/// format_number plus a sampled qualifier when approximate.
std::string say_number(double value, Rng& rng);

std::span<const std::string_view> trend_phrases(TrendClass c);
/// The class whose phrase table contains `phrase`.
std::optional<TrendClass> trend_of_phrase(std::string_view phrase);
/// True when `text` contains one of the phrases of class `c`.
bool mentions_trend(std::string_view text, TrendClass c);

struct PlanConfig {
  double p_move2 = 0.5;
  double p_move4 = 0.5;
  int m3_min = 1;
  int m3_max = 2;
  int m3_1_min = 1;
  int m3_1_max = 2;

  void validate() const;
};

struct PlannedMove {
  MoveTag move = MoveTag::kM1;
  int series = 0;  // series the sentence is about

  friend bool operator==(const PlannedMove&, const PlannedMove&) = default;
};

using MovePlan = std::vector<PlannedMove>;

/// Draw order: M2 inclusion, then the M3 blocks (temporal: per series an M3
/// count, then per M3 an M3_1 count; categorical: one M3 count, then per M3 its
/// series and M3_1 count), then M4 inclusion and its series.
MovePlan plan_moves(ChartCategory category, int arity, Rng& rng, const PlanConfig& config = {});

/// Empty when the sequence is a valid move structure, otherwise the first violation.
std::optional<std::string> move_order_violation(const std::vector<MoveTag>& moves);
inline bool is_valid_move_sequence(const std::vector<MoveTag>& moves) {
  return !move_order_violation(moves).has_value();
}

/// Fills every slot of `t` with facts about series `series_index`.
std::string realize(const Template& t, const ChartFacts& facts, int series_index, Rng& rng);

struct Sentence {
  std::string text;
  MoveTag move = MoveTag::kM1;
  std::string template_id;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Description {
  int image_index = 0;
  int variant_index = 0;
  std::vector<Sentence> sentences;

  std::string text() const;
  std::vector<MoveTag> moves() const;
  std::size_t word_count() const;

  friend bool operator==(const Description&, const Description&) = default;
};

Description generate_description(const ChartFacts& facts, const TemplateBank& bank, int image_index,
                                 int variant_index, Rng& rng, const PlanConfig& config = {});
Description generate_description(const ChartMeta& meta, const std::vector<DataSeries>& series,
                                 const TemplateBank& bank, int variant_index, Rng& rng,
                                 const PlanConfig& config = {});

/// `count` candidates, candidate v seeded with derive_seed(seed, {v}); exact-text
/// duplicates dropped, first occurrence kept with its candidate index.
std::vector<Description> generate_description_set(const ChartFacts& facts, const TemplateBank& bank,
                                                  int image_index, std::uint64_t seed, int count = 3,
                                                  const PlanConfig& config = {});
std::vector<Description> generate_description_set(const ChartMeta& meta,
                                                  const std::vector<DataSeries>& series,
                                                  const TemplateBank& bank, std::uint64_t seed,
                                                  int count = 3, const PlanConfig& config = {});

/// Structure-free comparison generator: 4-10 sentences drawn from every
/// applicable template regardless of move.
Description baseline_generate(const ChartFacts& facts, const TemplateBank& bank, int image_index,
                              Rng& rng);
Description baseline_generate(const ChartMeta& meta, const std::vector<DataSeries>& series,
                              const TemplateBank& bank, Rng& rng);

/// Digit-bearing tokens of `text` that match no fact string or formatted fact number.
std::vector<std::string> unsupported_numbers(std::string_view text, const ChartFacts& facts);

/// Residual `{` or `}` characters, missing sentences, bad move order.
std::vector<std::string> check_description(const Description& d);

nlohmann::ordered_json description_to_json(const Description& d);
Description description_from_json(const nlohmann::json& j);

}  // namespace autochart::narrate
