#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autochart/trend.hpp"

namespace autochart::templates {

using trend::TrendClass;

enum class MoveTag { kM1, kM2, kM3, kM3_1, kM4, kM5 };

inline constexpr std::array<MoveTag, 6> kAllMoves = {MoveTag::kM1, MoveTag::kM2,   MoveTag::kM3,
                                                     MoveTag::kM3_1, MoveTag::kM4, MoveTag::kM5};
/// Moves every generated description contains; M3_1 always follows an M3.
inline constexpr std::array<MoveTag, 4> kRequiredMoves = {MoveTag::kM1, MoveTag::kM3,
                                                          MoveTag::kM3_1, MoveTag::kM5};

std::string_view to_string(MoveTag m);
std::optional<MoveTag> parse_move(std::string_view name);

enum class ChartCategory { kTemporalTrend, kTemporalRandom, kCategorical };

inline constexpr std::array<ChartCategory, 3> kAllCategories = {
    ChartCategory::kTemporalTrend, ChartCategory::kTemporalRandom, ChartCategory::kCategorical};

std::string_view to_string(ChartCategory c);
std::optional<ChartCategory> parse_category(std::string_view name);

enum class Origin { kHuman, kParaphrase };

std::string_view to_string(Origin o);

inline constexpr std::array<std::string_view, 21> kSlotVocabulary = {
    "title",       "chart_kind_phrase", "y_label",     "x_label",         "unit",
    "series_name", "series_name_2",     "x_first",     "x_last",          "x_at_max",
    "x_at_min",    "y_first",           "y_last",      "y_max",           "y_min",
    "y_mean",      "delta",             "trend_phrase", "comparison_phrase", "n_categories",
    "entity_list",
};

bool is_known_slot(std::string_view name);

/// Slot names in order of appearance. Throws kInvalidTemplate on unbalanced braces.
std::vector<std::string> template_slots(std::string_view text);

struct Template {
  std::string id;
  MoveTag move = MoveTag::kM1;
  std::optional<ChartCategory> category;        // nullopt = any
  std::optional<std::vector<TrendClass>> trends;  // nullopt = any
  int arity = 0;                                // 0 = any
  Origin origin = Origin::kHuman;
  std::string text;

  bool applies_to(ChartCategory c, TrendClass t, int n_series) const;
  /// Number of `any` fields among category, trend and arity.
  int wildcard_count() const;

  friend bool operator==(const Template&, const Template&) = default;
};

struct CensusRow {
  int human = 0;
  int paraphrase = 0;
};

class TemplateBank {
 public:
  /// Validates slots, move annotations and coverage of every
  /// (required move, category, trend class, arity) cell.
  explicit TemplateBank(std::vector<Template> templates);

  const std::vector<Template>& templates() const { return templates_; }

  /// Matching templates, exact matches first, then by increasing number of
  /// wildcards, bank order within a tier. Throws kCoverageHole when empty.
  std::vector<const Template*> query(MoveTag move, ChartCategory category, TrendClass trend,
                                     int arity) const;
  /// Same filter without the empty-result error.
  std::vector<const Template*> matching(MoveTag move, ChartCategory category, TrendClass trend,
                                        int arity) const;

  std::map<MoveTag, CensusRow> census() const;

 private:
  std::vector<Template> templates_;
};

/// Cells "move/category/trend/arity" of the required moves with no template.
std::vector<std::string> coverage_holes(const std::vector<Template>& templates);

std::vector<Template> parse_templates(std::string_view text, std::string_view source = "<bank>");
TemplateBank parse_bank(std::string_view text, std::string_view source = "<bank>");
TemplateBank load_bank(const std::string& path);
std::string serialize_template(const Template& t);
std::string serialize_bank(const TemplateBank& bank);
std::string format_census(const TemplateBank& bank);

/// The seed bank compiled into the library.
std::string_view seed_bank_text();
const TemplateBank& builtin_bank();

}  // namespace autochart::templates
