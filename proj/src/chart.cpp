#include "autochart/chart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "autochart/error.hpp"

namespace autochart::chart {

using nlohmann::ordered_json;

namespace {

constexpr double kPad = 8.0;
constexpr double kTitleFont = 16.0;
constexpr double kLabelFont = 12.0;
constexpr double kTickFont = 10.0;
constexpr double kLegendFont = 11.0;
constexpr double kLegendSwatch = 10.0;
constexpr double kLegendPadding = 6.0;
constexpr double kLegendGap = 14.0;
constexpr double kMarkerHalf = 4.0;
constexpr double kTickMark = 4.0;

double r2(double v) {
  const double r = std::round(v * 100.0) / 100.0;
  return r == 0.0 ? 0.0 : r;  // no "-0.00"
}

BBox rounded(const BBox& b) { return {r2(b.x), r2(b.y), r2(b.w), r2(b.h)}; }

std::string num(double v) { return fmt::format("{:.2f}", r2(v)); }

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string capitalized(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

double fitted_font(std::string_view text, double preferred, double max_width) {
  const double per_font = 0.6 * static_cast<double>(codepoint_count(text));
  if (per_font <= 0) return preferred;
  return std::min(preferred, max_width / per_font);
}

double pow10i(int k) {
  double p = 1.0;
  for (int i = 0; i < std::abs(k); ++i) p *= 10.0;
  return p;
}

// Marker outline centred on (cx, cy) with half-size h.
std::string marker_svg(int shape, double cx, double cy, double h, std::string_view color) {
  const auto poly = [&](const std::vector<std::pair<double, double>>& pts) {
    std::string p;
    for (const auto& [x, y] : pts) {
      if (!p.empty()) p += ' ';
      p += num(cx + x) + "," + num(cy + y);
    }
    return fmt::format("<polygon points=\"{}\" fill=\"{}\"/>", p, color);
  };
  const auto regular = [&](int sides, double start) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < sides; ++i) {
      const double a = start + 2.0 * std::numbers::pi * i / sides;
      pts.emplace_back(h * std::cos(a), h * std::sin(a));
    }
    return poly(pts);
  };
  const double t = h / 3.0;
  switch (shape) {
    case 0: return fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>", num(cx), num(cy), num(h), color);
    case 1: return fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>", num(cx - h), num(cy - h), num(2 * h), num(2 * h), color);
    case 2: return poly({{0, -h}, {h, h}, {-h, h}});
    case 3: return poly({{-h, -h}, {h, -h}, {0, h}});
    case 4: return poly({{0, -h}, {h, 0}, {0, h}, {-h, 0}});
    case 5: return poly({{-t, -h}, {t, -h}, {t, -t}, {h, -t}, {h, t}, {t, t}, {t, h}, {-t, h}, {-t, t}, {-h, t}, {-h, -t}, {-t, -t}});
    case 6: {
      const double d = t * 0.75;
      return poly({{-h, -h + d}, {-h + d, -h}, {0, -d}, {h - d, -h}, {h, -h + d}, {d, 0}, {h, h - d}, {h - d, h}, {0, d}, {-h + d, h}, {-h, h - d}, {-d, 0}});
    }
    case 7: {
      std::vector<std::pair<double, double>> pts;
      for (int i = 0; i < 10; ++i) {
        const double a = -std::numbers::pi / 2 + std::numbers::pi * i / 5;
        const double r = (i % 2 == 0) ? h : h * 0.45;
        pts.emplace_back(r * std::cos(a), r * std::sin(a));
      }
      return poly(pts);
    }
    case 8: return regular(5, -std::numbers::pi / 2);
    default: return regular(6, 0.0);
  }
}

std::string dash_array(LineStyle s) {
  switch (s) {
    case LineStyle::kSolid: return "";
    case LineStyle::kDashed: return " stroke-dasharray=\"6,4\"";
    case LineStyle::kDotted: return " stroke-dasharray=\"2,3\"";
    case LineStyle::kDashDot: return " stroke-dasharray=\"6,3,2,3\"";
  }
  return "";
}

std::string text_svg(const TextElement& t, std::string_view anchor_extra = "") {
  // Baseline sits one font size below the top of the 1.2 em box; textLength pins
  // the drawn width to the modelled one whatever font the viewer picks.
  return fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"{}\" textLength=\"{}\" "
      "lengthAdjust=\"spacingAndGlyphs\"{}>{}</text>",
      num(t.bbox.x), num(t.bbox.y + t.font_size), num(t.font_size), num(t.bbox.w), anchor_extra,
      xml_escape(t.text));
}

// Value-axis range and ticks, with 4-6 ticks when possible.
std::vector<double> value_ticks(double lo, double hi) {
  std::vector<double> best;
  for (int target : {5, 4, 6, 3, 7}) {
    auto t = nice_ticks(lo, hi, target);
    if (t.size() >= 4 && t.size() <= 6) return t;
    if (best.empty()) best = std::move(t);
  }
  return best;
}

}  // namespace

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::kScatter: return "scatter";
    case ChartKind::kLine: return "line";
    case ChartKind::kVerticalBar: return "vertical-bar";
    case ChartKind::kHorizontalBar: return "horizontal-bar";
  }
  return "line";
}

std::optional<ChartKind> parse_chart_kind(std::string_view name) {
  for (auto k : kAllChartKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string_view to_string(LineStyle s) {
  switch (s) {
    case LineStyle::kSolid: return "solid";
    case LineStyle::kDashed: return "dashed";
    case LineStyle::kDotted: return "dotted";
    case LineStyle::kDashDot: return "dash-dot";
  }
  return "solid";
}

std::string_view to_string(LegendPosition p) {
  switch (p) {
    case LegendPosition::kTop: return "top";
    case LegendPosition::kRight: return "right";
    case LegendPosition::kBottom: return "bottom";
  }
  return "top";
}

ChartSpec build_chart_spec(const std::vector<DataSeries>& series, ChartKind kind, Rng& rng,
                           int image_index) {
  if (series.empty() || series.size() > 2)
    throw Error(ErrorKind::kArity, fmt::format("a chart takes 1 or 2 series, got {}", series.size()));
  for (const auto& s : series) s.validate();
  if (series.size() == 2 && series[0].x_labels != series[1].x_labels)
    throw Error(ErrorKind::kArity, "the two series of a chart must share their x labels");

  ChartSpec spec;
  spec.kind = kind;
  spec.series = series;
  spec.image_index = image_index;

  StyleSpec& st = spec.style;
  st.marker_shape = static_cast<int>(rng.below(kMarkerShapes.size()));
  const int c1 = static_cast<int>(rng.below(kPalette.size()));
  int c2 = static_cast<int>(rng.below(kPalette.size() - 1));
  if (c2 >= c1) ++c2;
  st.colors = {c1};
  if (series.size() == 2) st.colors.push_back(c2);
  st.bar_thickness = 0.4 + 0.5 * rng.uniform();
  st.line_style = static_cast<LineStyle>(rng.below(4));
  st.legend_position = static_cast<LegendPosition>(rng.below(3));

  const DataSeries& first = series.front();
  if (first.temporal) {
    std::string who = first.series_name;
    if (series.size() == 2) who += " and " + series[1].series_name;
    spec.title = fmt::format("{} of {}, {}–{}", first.indicator_name, who,
                             first.x_labels.front(), first.x_labels.back());
    spec.x_label = "Year";
  } else {
    spec.title = fmt::format("{} by {}", first.indicator_name, first.entity_kind);
    spec.x_label = capitalized(first.entity_kind);
  }
  spec.y_label = fmt::format("{} ({})", first.indicator_name, first.y_unit);
  return spec;
}

std::size_t codepoint_count(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

TextSize estimate_text_bbox(std::string_view text, double font_size) {
  return {0.6 * font_size * static_cast<double>(codepoint_count(text)), 1.2 * font_size};
}

std::vector<double> nice_ticks(double lo, double hi, int target_count) {
  if (lo > hi) std::swap(lo, hi);
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  target_count = std::clamp(target_count, 3, 8);
  const double raw = (hi - lo) / (target_count - 1);
  const int e = static_cast<int>(std::floor(std::log10(raw)));

  struct Candidate {
    long long first;
    long long last;
    int mantissa;
    int exponent;
  };
  const auto tick_value = [](long long i, int m, int k) {
    return k >= 0 ? static_cast<double>(i) * m * pow10i(k)
                  : static_cast<double>(i) * m / pow10i(k);
  };
  std::optional<Candidate> best;
  int best_score = 0;
  for (int span = 1; span <= 3 && !best; ++span) {
    for (int k = e - span; k <= e + span; ++k) {
      for (int m : {1, 2, 5}) {
        const double step = k >= 0 ? m * pow10i(k) : m / pow10i(k);
        auto first = static_cast<long long>(std::floor(lo / step));
        auto last = static_cast<long long>(std::ceil(hi / step));
        while (tick_value(first, m, k) > lo) --first;
        while (tick_value(last, m, k) < hi) ++last;
        const long long count = last - first + 1;
        if (count < target_count - 1 || count > target_count + 2) continue;
        const int score = static_cast<int>(std::abs(count - target_count));
        // Ties go to the larger step (fewer, rounder ticks).
        if (!best || score <= best_score) {
          best = Candidate{first, last, m, k};
          best_score = score;
        }
      }
    }
  }
  if (!best) throw Error(ErrorKind::kParameter, fmt::format("no nice ticks for [{}, {}]", lo, hi));
  std::vector<double> ticks;
  for (long long i = best->first; i <= best->last; ++i)
    ticks.push_back(tick_value(i, best->mantissa, best->exponent));
  return ticks;
}

std::string format_tick(double value, const std::vector<double>& ticks) {
  double peak = 0;
  for (double t : ticks) peak = std::max(peak, std::abs(t));
  if (value == 0.0) return "0";
  if (peak >= 1e6) {
    int exp10 = static_cast<int>(std::floor(std::log10(std::abs(value))));
    double mant = value / std::pow(10.0, exp10);
    mant = std::round(mant * 1e4) / 1e4;
    if (std::abs(mant) >= 10.0) {
      mant /= 10.0;
      ++exp10;
    }
    return fmt::format("{}e{}", mant, exp10);
  }
  int decimals = 0;
  for (; decimals < 10; ++decimals) {
    bool all = true;
    for (double t : ticks) {
      const double scaled = t * pow10i(decimals);
      if (std::abs(scaled - std::round(scaled)) > 1e-6 * std::max(1.0, std::abs(scaled))) {
        all = false;
        break;
      }
    }
    if (all) break;
  }
  return fmt::format("{:.{}f}", value, decimals);
}

bool BBox::within_canvas() const {
  return x >= 0 && y >= 0 && w >= 0 && h >= 0 && x + w <= kCanvasWidth && y + h <= kCanvasHeight;
}

bool BBox::overlaps(const BBox& o) const {
  return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
}

std::vector<std::string> ChartMeta::series_names() const {
  std::vector<std::string> out;
  for (const auto& s : series) out.push_back(s.name);
  return out;
}

std::vector<trend::TrendClass> ChartMeta::trend_classes() const {
  std::vector<trend::TrendClass> out;
  for (const auto& s : series) out.push_back(s.trend_class);
  return out;
}

std::vector<std::string> ChartMeta::x_labels() const {
  std::vector<std::string> out;
  if (!series.empty())
    for (const auto& p : series.front().points) out.push_back(p.x_label);
  return out;
}

std::vector<DataSeries> ChartMeta::data_series() const {
  std::vector<DataSeries> out;
  for (const auto& s : series) {
    DataSeries d;
    d.series_name = s.name;
    for (const auto& p : s.points) {
      d.x_labels.push_back(p.x_label);
      d.y_values.push_back(p.value);
    }
    d.y_unit = unit;
    d.temporal = temporal;
    d.indicator_name = indicator;
    d.entity_kind = entity_kind;
    d.value_kind = value_kind;
    out.push_back(std::move(d));
  }
  return out;
}

double value_to_canvas(const ChartMeta& meta, double value) {
  const BBox& p = meta.plot_area;
  if (meta.kind == ChartKind::kHorizontalBar) {
    return p.x + p.w * (value - meta.x_axis.lo) / (meta.x_axis.hi - meta.x_axis.lo);
  }
  return p.y + p.h * (meta.y_axis.hi - value) / (meta.y_axis.hi - meta.y_axis.lo);
}

double canvas_to_value(const ChartMeta& meta, double canvas) {
  const BBox& p = meta.plot_area;
  if (meta.kind == ChartKind::kHorizontalBar) {
    return meta.x_axis.lo + (canvas - p.x) * (meta.x_axis.hi - meta.x_axis.lo) / p.w;
  }
  return meta.y_axis.hi - (canvas - p.y) * (meta.y_axis.hi - meta.y_axis.lo) / p.h;
}

double value_coordinate(const ChartMeta& meta, const PointMeta& p) {
  return meta.kind == ChartKind::kHorizontalBar ? p.canvas_x : p.canvas_y;
}

Rendered render(const ChartSpec& spec) {
  if (spec.series.empty() || spec.series.size() > 2)
    throw Error(ErrorKind::kArity, "render: a chart takes 1 or 2 series");
  const auto& labels = spec.series.front().x_labels;
  for (const auto& s : spec.series) {
    if (s.x_labels != labels || s.y_values.size() != labels.size())
      throw Error(ErrorKind::kArity, "render: series must share x labels");
  }
  if (spec.style.colors.size() != spec.series.size())
    throw Error(ErrorKind::kParameter, "render: one color per series is required");
  const bool bars = is_bar(spec.kind);
  const bool horizontal = spec.kind == ChartKind::kHorizontalBar;

  double vmin = spec.series.front().y_values.front(), vmax = vmin;
  for (const auto& s : spec.series) {
    for (double v : s.y_values) {
      if (bars && v < 0)
        throw Error(ErrorKind::kNegativeBar,
                    fmt::format("bar charts need non-negative values; '{}' has {}", s.series_name, v));
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  double lo = vmin, hi = vmax;
  if (bars) lo = std::min(0.0, vmin);
  if (hi == lo) {
    if (bars) {
      hi = lo + 1.0;
    } else {
      lo -= 1.0;
      hi += 1.0;
    }
  }
  const std::vector<double> ticks = value_ticks(lo, hi);
  std::vector<std::string> tick_labels;
  for (double t : ticks) tick_labels.push_back(format_tick(t, ticks));

  ChartMeta meta;
  meta.image_index = spec.image_index;
  meta.kind = spec.kind;
  const DataSeries& first = spec.series.front();
  meta.temporal = first.temporal;
  meta.indicator = first.indicator_name;
  meta.unit = first.y_unit;
  meta.entity_kind = first.entity_kind;
  meta.value_kind = first.value_kind;
  meta.marker_shape = std::string(kMarkerShapes[static_cast<std::size_t>(spec.style.marker_shape)]);
  meta.line_style = std::string(to_string(spec.style.line_style));
  meta.legend_position = std::string(to_string(spec.style.legend_position));
  meta.bar_thickness = spec.style.bar_thickness;

  const double usable_w = kCanvasWidth - 2 * kPad;
  double top = kPad;

  // Title.
  {
    const double f = fitted_font(spec.title, kTitleFont, usable_w);
    const TextSize s = estimate_text_bbox(spec.title, f);
    meta.title = {spec.title, {(kCanvasWidth - s.w) / 2, top, s.w, s.h}, f};
    top += s.h + 6;
  }

  // Legend sizing.
  const LegendPosition lp = spec.style.legend_position;
  const bool stacked = lp == LegendPosition::kRight;
  double legend_font = kLegendFont;
  const auto legend_extent = [&](double font) {
    double w = 0, h = 0;
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
      const double ew = kLegendSwatch + 4 + estimate_text_bbox(spec.series[i].series_name, font).w;
      const double eh = std::max(kLegendSwatch, 1.2 * font);
      if (stacked) {
        w = std::max(w, ew);
        h += eh + (i > 0 ? 4 : 0);
      } else {
        w += ew + (i > 0 ? kLegendGap : 0);
        h = std::max(h, eh);
      }
    }
    return TextSize{w + 2 * kLegendPadding, h + 2 * kLegendPadding};
  };
  const double legend_max_w = stacked ? 180.0 : usable_w;
  TextSize legend = legend_extent(legend_font);
  while (legend.w > legend_max_w && legend_font > 4.0) {
    legend_font -= 0.5;
    legend = legend_extent(legend_font);
  }
  if (lp == LegendPosition::kTop) {
    meta.legend_bbox = {(kCanvasWidth - legend.w) / 2, top, legend.w, legend.h};
    top += legend.h + 8;
  }
  top += 6;  // room for the top tick label

  double bottom = kCanvasHeight - kPad;
  if (lp == LegendPosition::kBottom) {
    meta.legend_bbox = {(kCanvasWidth - legend.w) / 2, bottom - legend.h, legend.w, legend.h};
    bottom -= legend.h + 6;
  }
  double right = kCanvasWidth - kPad - 10;
  if (lp == LegendPosition::kRight) right = kCanvasWidth - kPad - legend.w - 10;

  // Axis titles.
  const std::string value_title = spec.y_label;
  const std::string category_title = spec.x_label;
  const std::string& bottom_title = horizontal ? value_title : category_title;
  const std::string& left_title = horizontal ? category_title : value_title;
  {
    const double f = fitted_font(bottom_title, kLabelFont, usable_w);
    const TextSize s = estimate_text_bbox(bottom_title, f);
    TextElement t = {bottom_title, {(kCanvasWidth - s.w) / 2, bottom - s.h, s.w, s.h}, f};
    (horizontal ? meta.y_label : meta.x_label) = t;  // placeholder, fixed below
    bottom -= s.h + 4;
  }
  const double bottom_ticks_h = 1.2 * kTickFont;
  bottom -= bottom_ticks_h + kTickMark + 2;
  const double plot_top = top;
  const double plot_bottom = bottom;
  const double plot_h = plot_bottom - plot_top;
  const std::size_t n = labels.size();

  // Left tick labels: numbers (vertical kinds) or categories (horizontal bars).
  double left_tick_font = kTickFont;
  double left_tick_w = 0;
  if (horizontal) {
    std::size_t longest = 0;
    for (const auto& l : labels) longest = std::max(longest, codepoint_count(l));
    const double slot_h = plot_h / static_cast<double>(n);
    left_tick_font = std::min({kTickFont, 150.0 / (0.6 * static_cast<double>(std::max<std::size_t>(longest, 1))),
                               0.95 * slot_h / 1.2});
    for (const auto& l : labels) left_tick_w = std::max(left_tick_w, estimate_text_bbox(l, left_tick_font).w);
  } else {
    for (const auto& l : tick_labels) left_tick_w = std::max(left_tick_w, estimate_text_bbox(l, kTickFont).w);
  }
  const double left_title_font = fitted_font(left_title, kLabelFont, plot_h);
  const double left_title_thickness = 1.2 * left_title_font;
  const double left = kPad + left_title_thickness + 6 + left_tick_w + kTickMark + 2;
  if (horizontal) {
    // Keep the last value tick label inside the canvas.
    double widest = 0;
    for (const auto& l : tick_labels) widest = std::max(widest, estimate_text_bbox(l, kTickFont).w);
    right = std::min(right, kCanvasWidth - kPad - widest / 2);
  }
  meta.plot_area = rounded({left, plot_top, right - left, plot_h});
  const BBox& plot = meta.plot_area;

  // Axis titles, final placement.
  {
    const double f = fitted_font(bottom_title, kLabelFont, usable_w);
    const TextSize s = estimate_text_bbox(bottom_title, f);
    const double y = plot.y + plot.h + kTickMark + 2 + bottom_ticks_h + 4;
    TextElement t = {bottom_title, rounded({plot.x + (plot.w - s.w) / 2, y, s.w, s.h}), f};
    if (t.bbox.x < kPad) t.bbox.x = kPad;
    if (t.bbox.x + t.bbox.w > kCanvasWidth - kPad) t.bbox.x = r2(kCanvasWidth - kPad - t.bbox.w);
    (horizontal ? meta.y_label : meta.x_label) = t;
    const TextSize ls = estimate_text_bbox(left_title, left_title_font);
    // Rotated by -90 degrees: the box is thickness wide and text-length tall.
    TextElement l = {left_title,
                     rounded({kPad, plot.y + (plot.h - ls.w) / 2, ls.h, ls.w}), left_title_font};
    (horizontal ? meta.x_label : meta.y_label) = l;
  }

  // Value axis.
  Axis value_axis;
  value_axis.is_value = true;
  value_axis.lo = ticks.front();
  value_axis.hi = ticks.back();
  Axis category_axis;
  category_axis.is_value = false;
  (horizontal ? meta.x_axis : meta.y_axis) = value_axis;  // range needed by value_to_canvas
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const double c = value_to_canvas(meta, ticks[i]);
    const TextSize s = estimate_text_bbox(tick_labels[i], kTickFont);
    BBox b = horizontal ? BBox{c - s.w / 2, plot.y + plot.h + kTickMark + 2, s.w, s.h}
                        : BBox{plot.x - kTickMark - 2 - s.w, c - s.h / 2, s.w, s.h};
    value_axis.ticks.push_back({tick_labels[i], ticks[i], rounded(b)});
  }
  const double slot = (horizontal ? plot.h : plot.w) / static_cast<double>(n);
  double category_font = left_tick_font;
  if (!horizontal) {
    std::size_t longest = 0;
    for (const auto& l : labels) longest = std::max(longest, codepoint_count(l));
    category_font = std::min(kTickFont, 0.95 * slot / (0.6 * static_cast<double>(std::max<std::size_t>(longest, 1))));
  }
  const auto slot_center = [&](std::size_t i) {
    return (horizontal ? plot.y : plot.x) + (static_cast<double>(i) + 0.5) * slot;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const TextSize s = estimate_text_bbox(labels[i], category_font);
    const double c = slot_center(i);
    BBox b = horizontal ? BBox{plot.x - kTickMark - 2 - s.w, c - s.h / 2, s.w, s.h}
                        : BBox{c - s.w / 2, plot.y + plot.h + kTickMark + 2, s.w, s.h};
    category_axis.ticks.push_back({labels[i], static_cast<double>(i), rounded(b)});
  }
  if (horizontal) {
    meta.x_axis = value_axis;
    meta.y_axis = category_axis;
  } else {
    meta.x_axis = category_axis;
    meta.y_axis = value_axis;
  }

  // Data coordinates.
  const std::size_t arity = spec.series.size();
  const double group = spec.style.bar_thickness * slot;
  const double bar_w = group / static_cast<double>(arity);
  const double base = value_to_canvas(meta, std::max(0.0, value_axis.lo));
  for (std::size_t k = 0; k < arity; ++k) {
    const DataSeries& s = spec.series[k];
    SeriesMeta sm;
    sm.name = s.series_name;
    sm.trend_class = trend::classify_trend_lenient(s.y_values);
    sm.color = std::string(kPalette[static_cast<std::size_t>(spec.style.colors[k])].hex);
    for (std::size_t i = 0; i < n; ++i) {
      PointMeta p;
      p.x_label = labels[i];
      p.x_index = static_cast<int>(i);
      p.value = s.y_values[i];
      const double along = value_to_canvas(meta, p.value);
      double across = slot_center(i);
      if (bars) across += -group / 2 + (static_cast<double>(k) + 0.5) * bar_w;
      if (horizontal) {
        p.canvas_x = r2(along);
        p.canvas_y = r2(across);
        p.bbox = rounded({base, across - bar_w / 2, along - base, bar_w});
      } else {
        p.canvas_x = r2(across);
        p.canvas_y = r2(along);
        if (bars) p.bbox = rounded({across - bar_w / 2, along, bar_w, base - along});
        else p.bbox = rounded({across - kMarkerHalf, along - kMarkerHalf, 2 * kMarkerHalf, 2 * kMarkerHalf});
      }
      sm.points.push_back(p);
    }
    meta.series.push_back(std::move(sm));
  }

  // Legend entries.
  if (lp == LegendPosition::kRight) {
    meta.legend_bbox = {kCanvasWidth - kPad - legend.w, plot.y + (plot.h - legend.h) / 2, legend.w, legend.h};
  }
  meta.legend_bbox = rounded(meta.legend_bbox);
  {
    double x = meta.legend_bbox.x + kLegendPadding;
    double y = meta.legend_bbox.y + kLegendPadding;
    const double eh = std::max(kLegendSwatch, 1.2 * legend_font);
    for (std::size_t k = 0; k < arity; ++k) {
      LegendEntry e;
      e.name = spec.series[k].series_name;
      e.color = meta.series[k].color;
      e.marker_bbox = rounded({x, y + (eh - kLegendSwatch) / 2, kLegendSwatch, kLegendSwatch});
      const TextSize s = estimate_text_bbox(e.name, legend_font);
      e.name_bbox = rounded({x + kLegendSwatch + 4, y + (eh - s.h) / 2, s.w, s.h});
      if (stacked) y += eh + 4;
      else x += kLegendSwatch + 4 + s.w + kLegendGap;
      meta.legend_entries.push_back(std::move(e));
    }
  }

  // SVG document.
  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} "
      "{1}\">\n",
      static_cast<int>(kCanvasWidth), static_cast<int>(kCanvasHeight));
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
                     static_cast<int>(kCanvasWidth), static_cast<int>(kCanvasHeight));
  svg += text_svg(meta.title) + "\n";
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n"
      "<line x1=\"{0}\" y1=\"{2}\" x2=\"{3}\" y2=\"{2}\" stroke=\"#000000\"/>\n",
      num(plot.x), num(plot.y), num(plot.y + plot.h), num(plot.x + plot.w));
  for (const auto& t : meta.x_axis.ticks) {
    const double c = meta.x_axis.is_value ? value_to_canvas(meta, t.value) : slot_center(static_cast<std::size_t>(t.value));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n",
                       num(c), num(plot.y + plot.h), num(plot.y + plot.h + kTickMark));
    const double f = meta.x_axis.is_value ? kTickFont : category_font;
    svg += text_svg({t.label, t.bbox, f}) + "\n";
  }
  for (const auto& t : meta.y_axis.ticks) {
    const double c = meta.y_axis.is_value ? value_to_canvas(meta, t.value) : slot_center(static_cast<std::size_t>(t.value));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\"/>\n",
                       num(plot.x - kTickMark), num(c), num(plot.x));
    const double f = meta.y_axis.is_value ? kTickFont : category_font;
    svg += text_svg({t.label, t.bbox, f}) + "\n";
  }
  // The value-axis title sits at the bottom of horizontal bar charts, the
  // category title on the left.
  svg += text_svg(horizontal ? meta.y_label : meta.x_label) + "\n";
  {
    const TextElement& yl = horizontal ? meta.x_label : meta.y_label;
    const double cx = yl.bbox.x + yl.bbox.w / 2;
    const double cy = yl.bbox.y + yl.bbox.h / 2;
    svg += fmt::format(
        "<text x=\"{0}\" y=\"{1}\" font-family=\"monospace\" font-size=\"{2}\" "
        "text-anchor=\"middle\" dominant-baseline=\"central\" textLength=\"{4}\" "
        "lengthAdjust=\"spacingAndGlyphs\" transform=\"rotate(-90 {0} {1})\">{3}</text>\n",
        num(cx), num(cy), num(yl.font_size), xml_escape(yl.text), num(yl.bbox.h));
  }
  for (std::size_t k = 0; k < arity; ++k) {
    const SeriesMeta& sm = meta.series[k];
    if (bars) {
      for (const auto& p : sm.points) {
        svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                           num(p.bbox.x), num(p.bbox.y), num(p.bbox.w), num(p.bbox.h), sm.color);
      }
    } else if (spec.kind == ChartKind::kLine) {
      std::string pts;
      for (const auto& p : sm.points) {
        if (!pts.empty()) pts += ' ';
        pts += num(p.canvas_x) + "," + num(p.canvas_y);
      }
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
                         pts, sm.color, dash_array(spec.style.line_style));
    } else {
      for (const auto& p : sm.points)
        svg += marker_svg(spec.style.marker_shape, p.canvas_x, p.canvas_y, kMarkerHalf, sm.color) + "\n";
    }
  }
  {
    const BBox& lb = meta.legend_bbox;
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\" stroke=\"#999999\"/>\n",
        num(lb.x), num(lb.y), num(lb.w), num(lb.h));
    for (const auto& e : meta.legend_entries) {
      const BBox& m = e.marker_bbox;
      if (bars) {
        svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                           num(m.x), num(m.y), num(m.w), num(m.h), e.color);
      } else if (spec.kind == ChartKind::kLine) {
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"2\"{4}/>\n",
            num(m.x), num(m.x + m.w), num(m.y + m.h / 2), e.color, dash_array(spec.style.line_style));
      } else {
        svg += marker_svg(spec.style.marker_shape, m.x + m.w / 2, m.y + m.h / 2, m.w / 2, e.color) + "\n";
      }
      svg += text_svg({e.name, e.name_bbox, legend_font}) + "\n";
    }
  }
  svg += "</svg>\n";
  return {std::move(svg), std::move(meta)};
}

ordered_json to_json(const BBox& b) {
  return ordered_json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

namespace {

BBox bbox_from(const nlohmann::json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("w").get<double>(),
          j.at("h").get<double>()};
}

ordered_json text_json(const TextElement& t) {
  return ordered_json{{"text", t.text}, {"bbox", to_json(t.bbox)}, {"font_size", t.font_size}};
}

TextElement text_from(const nlohmann::json& j) {
  return {j.at("text").get<std::string>(), bbox_from(j.at("bbox")), j.at("font_size").get<double>()};
}

ordered_json axis_json(const Axis& a) {
  ordered_json ticks = ordered_json::array();
  for (const auto& t : a.ticks)
    ticks.push_back(ordered_json{{"label", t.label}, {"value", t.value}, {"bbox", to_json(t.bbox)}});
  ordered_json j{{"type", a.is_value ? "value" : "category"}};
  j["range"] = a.is_value ? ordered_json::array({a.lo, a.hi}) : ordered_json(nullptr);
  j["ticks"] = std::move(ticks);
  return j;
}

Axis axis_from(const nlohmann::json& j) {
  Axis a;
  a.is_value = j.at("type").get<std::string>() == "value";
  if (a.is_value) {
    a.lo = j.at("range").at(0).get<double>();
    a.hi = j.at("range").at(1).get<double>();
  }
  for (const auto& t : j.at("ticks"))
    a.ticks.push_back({t.at("label").get<std::string>(), t.at("value").get<double>(), bbox_from(t.at("bbox"))});
  return a;
}

}  // namespace

ordered_json meta_to_json(const ChartMeta& m) {
  ordered_json j;
  j["format"] = "autochart-meta v1";
  j["image_index"] = m.image_index;
  j["chart_kind"] = to_string(m.kind);
  j["canvas"] = ordered_json{{"width", m.canvas_width}, {"height", m.canvas_height}};
  j["plot_area"] = to_json(m.plot_area);
  j["title"] = text_json(m.title);
  j["x_label"] = text_json(m.x_label);
  j["y_label"] = text_json(m.y_label);
  j["x_axis"] = axis_json(m.x_axis);
  j["y_axis"] = axis_json(m.y_axis);
  ordered_json entries = ordered_json::array();
  for (const auto& e : m.legend_entries) {
    entries.push_back(ordered_json{{"name", e.name},
                                   {"name_bbox", to_json(e.name_bbox)},
                                   {"marker_bbox", to_json(e.marker_bbox)},
                                   {"color", e.color}});
  }
  j["legend"] = ordered_json{{"bbox", to_json(m.legend_bbox)}, {"entries", std::move(entries)}};
  ordered_json series = ordered_json::array();
  for (const auto& s : m.series) {
    ordered_json pts = ordered_json::array();
    for (const auto& p : s.points) {
      pts.push_back(ordered_json{{"x_label", p.x_label},
                                 {"x_index", p.x_index},
                                 {"value", p.value},
                                 {"canvas", ordered_json{{"x", p.canvas_x}, {"y", p.canvas_y}}},
                                 {"bbox", to_json(p.bbox)}});
    }
    series.push_back(ordered_json{{"name", s.name},
                                  {"trend_class", trend::to_string(s.trend_class)},
                                  {"color", s.color},
                                  {"points", std::move(pts)}});
  }
  j["series"] = std::move(series);
  j["series_names"] = m.series_names();
  ordered_json trends = ordered_json::array();
  for (auto t : m.trend_classes()) trends.push_back(trend::to_string(t));
  j["trend_classes"] = std::move(trends);
  j["data"] = ordered_json{{"temporal", m.temporal},
                           {"indicator", m.indicator},
                           {"unit", m.unit},
                           {"entity_kind", m.entity_kind},
                           {"value_kind", catalog::to_string(m.value_kind)}};
  j["style"] = ordered_json{{"marker_shape", m.marker_shape},
                            {"line_style", m.line_style},
                            {"legend_position", m.legend_position},
                            {"bar_thickness", m.bar_thickness}};
  return j;
}

ChartMeta meta_from_json(const nlohmann::json& j) {
  try {
    ChartMeta m;
    m.image_index = j.at("image_index").get<int>();
    const auto kind = parse_chart_kind(j.at("chart_kind").get<std::string>());
    if (!kind) throw Error(ErrorKind::kMalformed, "meta: unknown chart_kind");
    m.kind = *kind;
    m.canvas_width = j.at("canvas").at("width").get<double>();
    m.canvas_height = j.at("canvas").at("height").get<double>();
    m.plot_area = bbox_from(j.at("plot_area"));
    m.title = text_from(j.at("title"));
    m.x_label = text_from(j.at("x_label"));
    m.y_label = text_from(j.at("y_label"));
    m.x_axis = axis_from(j.at("x_axis"));
    m.y_axis = axis_from(j.at("y_axis"));
    m.legend_bbox = bbox_from(j.at("legend").at("bbox"));
    for (const auto& e : j.at("legend").at("entries")) {
      m.legend_entries.push_back({e.at("name").get<std::string>(), bbox_from(e.at("name_bbox")),
                                  bbox_from(e.at("marker_bbox")), e.at("color").get<std::string>()});
    }
    for (const auto& s : j.at("series")) {
      SeriesMeta sm;
      sm.name = s.at("name").get<std::string>();
      const auto tc = trend::parse_trend_class(s.at("trend_class").get<std::string>());
      if (!tc) throw Error(ErrorKind::kMalformed, "meta: unknown trend_class");
      sm.trend_class = *tc;
      sm.color = s.at("color").get<std::string>();
      for (const auto& p : s.at("points")) {
        sm.points.push_back({p.at("x_label").get<std::string>(), p.at("x_index").get<int>(),
                             p.at("value").get<double>(), p.at("canvas").at("x").get<double>(),
                             p.at("canvas").at("y").get<double>(), bbox_from(p.at("bbox"))});
      }
      m.series.push_back(std::move(sm));
    }
    const auto& d = j.at("data");
    m.temporal = d.at("temporal").get<bool>();
    m.indicator = d.at("indicator").get<std::string>();
    m.unit = d.at("unit").get<std::string>();
    m.entity_kind = d.at("entity_kind").get<std::string>();
    const auto vk = catalog::parse_value_kind(d.at("value_kind").get<std::string>());
    if (!vk) throw Error(ErrorKind::kMalformed, "meta: unknown value_kind");
    m.value_kind = *vk;
    const auto& st = j.at("style");
    m.marker_shape = st.at("marker_shape").get<std::string>();
    m.line_style = st.at("line_style").get<std::string>();
    m.legend_position = st.at("legend_position").get<std::string>();
    m.bar_thickness = st.at("bar_thickness").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kMalformed, fmt::format("meta: {}", e.what()));
  }
}

std::vector<std::string> check_meta(const ChartMeta& m, double tolerance) {
  std::vector<std::string> out;
  const auto box = [&](const BBox& b, std::string_view what, bool non_empty) {
    if (!b.within_canvas())
      out.push_back(fmt::format("{} bbox ({}, {}, {}, {}) leaves the canvas", what, b.x, b.y, b.w, b.h));
    else if (non_empty && (b.w <= 0 || b.h <= 0))
      out.push_back(fmt::format("{} bbox is empty", what));
  };
  box(m.plot_area, "plot area", true);
  box(m.title.bbox, "title", !m.title.text.empty());
  box(m.x_label.bbox, "x label", !m.x_label.text.empty());
  box(m.y_label.bbox, "y label", !m.y_label.text.empty());
  for (const auto& t : m.x_axis.ticks) box(t.bbox, fmt::format("x tick '{}'", t.label), !t.label.empty());
  for (const auto& t : m.y_axis.ticks) box(t.bbox, fmt::format("y tick '{}'", t.label), !t.label.empty());
  box(m.legend_bbox, "legend", true);
  if (m.legend_bbox.overlaps(m.title.bbox)) out.push_back("legend overlaps the title");
  for (const auto& e : m.legend_entries) {
    box(e.name_bbox, fmt::format("legend name '{}'", e.name), !e.name.empty());
    box(e.marker_bbox, fmt::format("legend marker '{}'", e.name), true);
  }
  if (m.legend_entries.empty() || m.legend_entries.size() > 2)
    out.push_back(fmt::format("{} legend entries (expected 1-2)", m.legend_entries.size()));
  if (m.series.empty()) out.push_back("no series");
  const Axis& value_axis = m.kind == ChartKind::kHorizontalBar ? m.x_axis : m.y_axis;
  if (!value_axis.is_value || !(value_axis.hi > value_axis.lo)) out.push_back("value axis has no range");
  for (const auto& s : m.series) {
    if (s.points.size() < 2 || s.points.size() > 8)
      out.push_back(fmt::format("series '{}' has {} points (expected 2-8)", s.name, s.points.size()));
    for (const auto& p : s.points) {
      box(p.bbox, fmt::format("point {}/{}", s.name, p.x_label), false);
      if (value_axis.is_value && value_axis.hi > value_axis.lo) {
        const double c = value_coordinate(m, p);
        const double back = canvas_to_value(m, c);
        const double err = std::abs(value_to_canvas(m, back) - value_to_canvas(m, p.value));
        if (!(err <= tolerance) || !std::isfinite(c))
          out.push_back(fmt::format("point {}/{} round-trips with error {:.3f} canvas units", s.name,
                                    p.x_label, err));
      }
    }
  }
  return out;
}

}  // namespace autochart::chart
