#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "autochart/catalog.hpp"
#include "autochart/rng.hpp"
#include "autochart/trend.hpp"

namespace autochart::chart {

using catalog::DataSeries;

enum class ChartKind { kScatter, kLine, kVerticalBar, kHorizontalBar };

inline constexpr std::array<ChartKind, 4> kAllChartKinds = {
    ChartKind::kLine, ChartKind::kHorizontalBar, ChartKind::kVerticalBar, ChartKind::kScatter};

std::string_view to_string(ChartKind kind);
std::optional<ChartKind> parse_chart_kind(std::string_view name);
inline bool is_bar(ChartKind k) {
  return k == ChartKind::kVerticalBar || k == ChartKind::kHorizontalBar;
}

struct NamedColor {
  std::string_view name;
  std::string_view hex;
};

inline constexpr std::array<NamedColor, 20> kPalette = {{
    {"blue", "#1f77b4"},        {"light blue", "#aec7e8"},   {"orange", "#ff7f0e"},
    {"light orange", "#ffbb78"}, {"green", "#2ca02c"},       {"light green", "#98df8a"},
    {"red", "#d62728"},         {"salmon", "#ff9896"},       {"purple", "#9467bd"},
    {"lavender", "#c5b0d5"},    {"brown", "#8c564b"},        {"tan", "#c49c94"},
    {"pink", "#e377c2"},        {"light pink", "#f7b6d2"},   {"grey", "#7f7f7f"},
    {"silver", "#c7c7c7"},      {"olive", "#bcbd22"},        {"khaki", "#dbdb8d"},
    {"cyan", "#17becf"},        {"light cyan", "#9edae5"},
}};

inline constexpr std::array<std::string_view, 10> kMarkerShapes = {
    "circle", "square", "triangle-up", "triangle-down", "diamond",
    "plus",   "cross",  "star",        "pentagon",      "hexagon",
};

enum class LineStyle { kSolid, kDashed, kDotted, kDashDot };
enum class LegendPosition { kTop, kRight, kBottom };

std::string_view to_string(LineStyle s);
std::string_view to_string(LegendPosition p);

struct StyleSpec {
  int marker_shape = 0;          // index into kMarkerShapes
  std::vector<int> colors;       // index into kPalette, one per series
  double bar_thickness = 0.8;    // fraction of the slot width
  LineStyle line_style = LineStyle::kSolid;
  LegendPosition legend_position = LegendPosition::kTop;
};

inline constexpr double kCanvasWidth = 640.0;
inline constexpr double kCanvasHeight = 480.0;

struct ChartSpec {
  ChartKind kind = ChartKind::kLine;
  std::vector<DataSeries> series;
  std::string title;
  std::string x_label;
  std::string y_label;
  StyleSpec style;
  int image_index = 0;
};

/// Draws the style uniformly from the palettes and composes title and labels.
/// Draw order (fixed): marker, color 1, color 2, bar thickness, line style, legend.
ChartSpec build_chart_spec(const std::vector<DataSeries>& series, ChartKind kind, Rng& rng,
                           int image_index = 0);

struct TextSize {
  double w = 0;
  double h = 0;
};

/// Fixed-metrics text model: every codepoint is 0.6 em wide, lines are 1.2 em tall.
TextSize estimate_text_bbox(std::string_view text, double font_size);

std::size_t codepoint_count(std::string_view utf8);

/// Ticks at integer multiples of {1, 2, 5} x 10^k covering [lo, hi], with
/// between target_count - 1 and target_count + 2 ticks.
std::vector<double> nice_ticks(double lo, double hi, int target_count);

std::string format_tick(double value, const std::vector<double>& ticks);

struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  bool within_canvas() const;
  bool overlaps(const BBox& o) const;
};

struct TextElement {
  std::string text;
  BBox bbox;
  double font_size = 0;
};

struct Tick {
  std::string label;
  double value = 0;  // data value (value axis) or slot index (category axis)
  BBox bbox;
};

struct Axis {
  bool is_value = false;
  double lo = 0;  // value axis range; unused for category axes
  double hi = 0;
  std::vector<Tick> ticks;
};

struct LegendEntry {
  std::string name;
  BBox name_bbox;
  BBox marker_bbox;
  std::string color;
};

struct PointMeta {
  std::string x_label;
  int x_index = 0;
  double value = 0;
  double canvas_x = 0;
  double canvas_y = 0;
  BBox bbox;  // marker or bar
};

struct SeriesMeta {
  std::string name;
  trend::TrendClass trend_class = trend::TrendClass::kRandomFluctuation;
  std::string color;
  std::vector<PointMeta> points;
};

struct ChartMeta {
  int image_index = 0;
  ChartKind kind = ChartKind::kLine;
  double canvas_width = kCanvasWidth;
  double canvas_height = kCanvasHeight;
  BBox plot_area;
  TextElement title;
  TextElement x_label;
  TextElement y_label;
  Axis x_axis;
  Axis y_axis;
  BBox legend_bbox;
  std::vector<LegendEntry> legend_entries;
  std::vector<SeriesMeta> series;
  bool temporal = false;
  std::string indicator;
  std::string unit;
  std::string entity_kind;
  catalog::ValueKind value_kind = catalog::ValueKind::kFloat;
  std::string marker_shape;
  std::string line_style;
  std::string legend_position;
  double bar_thickness = 0;

  std::vector<std::string> series_names() const;
  std::vector<trend::TrendClass> trend_classes() const;
  /// x labels of the category axis, in slot order.
  std::vector<std::string> x_labels() const;
  /// Rebuilds the plotted data series (values taken from the data coordinates).
  std::vector<DataSeries> data_series() const;
};

/// Canvas coordinate of a value on the chart's value axis and its inverse.
double value_to_canvas(const ChartMeta& meta, double value);
double canvas_to_value(const ChartMeta& meta, double canvas);
/// The canvas component carrying the value: y for most kinds, x for horizontal bars.
double value_coordinate(const ChartMeta& meta, const PointMeta& p);

struct Rendered {
  std::string svg;
  ChartMeta meta;
};

/// Lays out and draws the chart. Output bytes depend only on the spec.
Rendered render(const ChartSpec& spec);

nlohmann::ordered_json to_json(const BBox& b);
nlohmann::ordered_json meta_to_json(const ChartMeta& meta);
ChartMeta meta_from_json(const nlohmann::json& j);

/// Canvas-bound and round-trip checks on a meta record; returns one message per violation.
std::vector<std::string> check_meta(const ChartMeta& meta, double tolerance = 0.5);

}  // namespace autochart::chart
