#include "autochart/narrate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "autochart/error.hpp"

namespace autochart::narrate {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 3> kLinearIncrease = {
    "rose steadily", "increased at a fairly constant rate", "grew at a steady pace"};
constexpr std::array<std::string_view, 3> kLinearDecrease = {
    "fell steadily", "decreased at a fairly constant rate", "declined at a steady pace"};
constexpr std::array<std::string_view, 3> kConvexIncrease = {
    "rose at an accelerating pace", "increased slowly at first and then more sharply",
    "grew faster and faster"};
constexpr std::array<std::string_view, 3> kConcaveIncrease = {
    "rose quickly at first and then levelled off", "increased at a slowing pace",
    "grew sharply before flattening out"};
constexpr std::array<std::string_view, 3> kConvexDecrease = {
    "fell at an accelerating pace", "decreased slowly at first and then more sharply",
    "declined faster and faster"};
constexpr std::array<std::string_view, 3> kConcaveDecrease = {
    "fell quickly at first and then levelled off", "decreased at a slowing pace",
    "dropped sharply before flattening out"};
constexpr std::array<std::string_view, 3> kRandom = {
    "fluctuated without a clear direction", "moved up and down irregularly",
    "showed no consistent trend"};
constexpr std::array<std::string_view, 3> kPlateau = {
    "stayed broadly flat", "remained almost unchanged", "held steady at a similar level"};

std::span<const std::string_view> kind_phrases(chart::ChartKind k) {
  static constexpr std::array<std::string_view, 2> line = {"line chart", "line graph"};
  static constexpr std::array<std::string_view, 3> vbar = {"bar chart", "column chart",
                                                           "vertical bar chart"};
  static constexpr std::array<std::string_view, 2> hbar = {"horizontal bar chart", "bar chart"};
  static constexpr std::array<std::string_view, 2> scatter = {"scatter plot", "scatter chart"};
  switch (k) {
    case chart::ChartKind::kLine: return line;
    case chart::ChartKind::kVerticalBar: return vbar;
    case chart::ChartKind::kHorizontalBar: return hbar;
    case chart::ChartKind::kScatter: return scatter;
  }
  return line;
}

std::string strip_zeros(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

// Two-significant-figure text for a positive magnitude below a million.
std::string two_sig(double r) {
  const int e = static_cast<int>(std::floor(std::log10(r)));
  return strip_zeros(fmt::format("{:.{}f}", r, std::max(0, 1 - e)));
}

std::string join_list(const std::vector<std::string>& items) {
  if (items.empty()) return "";
  if (items.size() == 1) return items[0];
  if (items.size() == 2) return items[0] + " and " + items[1];
  std::string out;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) out += items[i] + ", ";
  return out + "and " + items.back();
}

void capitalize_first(std::string& s) {
  for (char& c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return;
    }
    if (c != '"' && c != '\'') return;
  }
}

Dominance dominance_of(const std::vector<double>& a, const std::vector<double>& b) {
  bool above = false, below = false, level = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) above = true;
    else if (a[i] < b[i]) below = true;
    else level = true;
  }
  if (above && below) return Dominance::kCrossing;
  if (above) return level ? Dominance::kFirstAtLeast : Dominance::kFirstAbove;
  if (below) return level ? Dominance::kSecondAtLeast : Dominance::kSecondAbove;
  return Dominance::kTie;
}

Dominance swapped(Dominance d) {
  switch (d) {
    case Dominance::kFirstAbove: return Dominance::kSecondAbove;
    case Dominance::kSecondAbove: return Dominance::kFirstAbove;
    case Dominance::kFirstAtLeast: return Dominance::kSecondAtLeast;
    case Dominance::kSecondAtLeast: return Dominance::kFirstAtLeast;
    default: return d;
  }
}

std::string comparison_phrase(const ChartFacts& f, int s, Rng& rng) {
  const std::string& a = f.series[static_cast<std::size_t>(s)].name;
  const std::string& b = f.series[static_cast<std::size_t>(1 - s)].name;
  const Dominance d = s == 0 ? f.cross->dominance : swapped(f.cross->dominance);
  std::vector<std::string> options;
  switch (d) {
    case Dominance::kFirstAbove:
      options = {fmt::format("{} recorded higher values than {} at every point", a, b),
                 fmt::format("{} stayed above {} throughout", a, b)};
      break;
    case Dominance::kSecondAbove:
      options = {fmt::format("{} recorded lower values than {} at every point", a, b),
                 fmt::format("{} stayed below {} throughout", a, b)};
      break;
    case Dominance::kTie:
      options = {fmt::format("{} and {} recorded identical values throughout", a, b)};
      break;
    case Dominance::kFirstAtLeast:
      options = {fmt::format("{} never fell below {}, although the two were level at some points", a, b)};
      break;
    case Dominance::kSecondAtLeast:
      options = {fmt::format("{} never rose above {}, although the two were level at some points", a, b)};
      break;
    case Dominance::kCrossing: {
      const auto& [x1, x2] = f.cross->crossings.front();
      options = {fmt::format("{} and {} swapped positions between {} and {}", a, b, x1, x2),
                 fmt::format("the ranking of {} and {} changed between {} and {}", a, b, x1, x2)};
      break;
    }
  }
  return options[rng.below(options.size())];
}

bool is_strip_char(char c) { return std::string_view(".,;:!?()\"'%").find(c) != std::string_view::npos; }

std::string strip_token(std::string_view t) {
  while (!t.empty() && is_strip_char(t.front())) t.remove_prefix(1);
  while (!t.empty() && is_strip_char(t.back())) t.remove_suffix(1);
  return std::string(t);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool has_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string_view to_string(Dominance d) {
  switch (d) {
    case Dominance::kFirstAbove: return "first-above";
    case Dominance::kSecondAbove: return "second-above";
    case Dominance::kTie: return "tie";
    case Dominance::kFirstAtLeast: return "first-at-least";
    case Dominance::kSecondAtLeast: return "second-at-least";
    case Dominance::kCrossing: return "crossing";
  }
  return "tie";
}

ChartCategory categorize(bool temporal, TrendClass focal_trend) {
  if (!temporal) return ChartCategory::kCategorical;
  return trend::is_directional(focal_trend) ? ChartCategory::kTemporalTrend
                                            : ChartCategory::kTemporalRandom;
}

std::string lower_label(std::string_view name) {
  std::string s(name);
  if (s.empty()) return s;
  const auto end = s.find(' ');
  const std::string_view first = std::string_view(s).substr(0, end);
  const auto upper = std::count_if(first.begin(), first.end(),
                                   [](char c) { return std::isupper(static_cast<unsigned char>(c)); });
  if (upper <= 1) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

ChartFacts extract_facts(const ChartMeta& meta, const std::vector<DataSeries>& series) {
  if (series.size() != meta.series.size() || series.empty())
    throw Error(ErrorKind::kConsistency,
                fmt::format("meta has {} series but {} were given", meta.series.size(), series.size()));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& pts = meta.series[k].points;
    if (pts.size() != series[k].y_values.size() || pts.size() != series[k].x_labels.size())
      throw Error(ErrorKind::kConsistency,
                  fmt::format("series '{}' has {} points, meta has {}", series[k].series_name,
                              series[k].y_values.size(), pts.size()));
    if (pts.empty()) throw Error(ErrorKind::kConsistency, "series without points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].value != series[k].y_values[i] || pts[i].x_label != series[k].x_labels[i])
        throw Error(ErrorKind::kConsistency,
                    fmt::format("series '{}' disagrees with the meta record at point {}",
                                series[k].series_name, i));
    }
  }

  ChartFacts f;
  f.kind = meta.kind;
  f.temporal = meta.temporal;
  f.title = meta.title.text;
  f.x_label = lower_label(meta.x_label.text);
  f.y_label = lower_label(meta.indicator);
  f.unit = meta.unit;
  f.x_labels = meta.x_labels();
  for (const auto& sm : meta.series) {
    SeriesFacts s;
    s.name = sm.name;
    s.trend = sm.trend_class;
    const auto& pts = sm.points;
    s.x_first = pts.front().x_label;
    s.x_last = pts.back().x_label;
    s.y_first = pts.front().value;
    s.y_last = pts.back().value;
    std::size_t imax = 0, imin = 0;
    double sum = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].value > pts[imax].value) imax = i;
      if (pts[i].value < pts[imin].value) imin = i;
      sum += pts[i].value;
    }
    s.x_at_max = pts[imax].x_label;
    s.x_at_min = pts[imin].x_label;
    s.y_max = pts[imax].value;
    s.y_min = pts[imin].value;
    s.y_mean = sum / static_cast<double>(pts.size());
    s.delta = s.y_last - s.y_first;
    s.relative_delta = s.y_first != 0 ? s.delta / std::abs(s.y_first) : 0.0;
    f.series.push_back(std::move(s));
  }
  if (meta.series.size() == 2) {
    std::vector<double> a, b;
    for (const auto& p : meta.series[0].points) a.push_back(p.value);
    for (const auto& p : meta.series[1].points) b.push_back(p.value);
    CrossFacts c;
    c.dominance = dominance_of(a, b);
    c.gap_first = a.front() - b.front();
    c.gap_last = a.back() - b.back();
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      if (d == 0) continue;
      if (prev && (a[*prev] - b[*prev] > 0) != (d > 0))
        c.crossings.emplace_back(f.x_labels[*prev], f.x_labels[i]);
      prev = i;
    }
    f.cross = std::move(c);
  }
  f.category = categorize(f.temporal, f.series.front().trend);
  return f;
}

ChartFacts extract_facts(const ChartMeta& meta) { return extract_facts(meta, meta.data_series()); }

FormattedNumber format_number(double value) {
  if (value == 0.0 || !std::isfinite(value)) return {value == 0.0 ? "0" : fmt::format("{}", value), false};
  const double a = std::abs(value);
  // Two significant figures via the decimal text, so printed and compared values agree.
  const double r = std::stod(fmt::format("{:.1e}", a));
  static constexpr std::array<std::string_view, 4> kScales = {"million", "billion", "trillion",
                                                             "quadrillion"};
  std::string text;
  if (r >= 1e6) {
    const int group = std::min(static_cast<int>(std::floor(std::log10(r) / 3.0)), 5);
    const double m = r / std::pow(10.0, 3 * group);
    text = two_sig(m) + " " + std::string(kScales[static_cast<std::size_t>(group - 2)]);
  } else {
    text = two_sig(r);
  }
  if (value < 0) text = "-" + text;
  const bool approximate = std::abs(r - a) > 1e-9 * a;
  return {std::move(text), approximate, approximate && r > a};
}

std::string say_number(double value, Rng& rng) {
  FormattedNumber n = format_number(value);
  if (!n.approximate) return n.text;
  const std::size_t options = kApproximationQualifiers.size() - (n.rounded_up ? 0 : 1);
  return std::string(kApproximationQualifiers[rng.below(options)]) + " " + n.text;
}

std::span<const std::string_view> trend_phrases(TrendClass c) {
  switch (c) {
    case TrendClass::kLinearIncrease: return kLinearIncrease;
    case TrendClass::kLinearDecrease: return kLinearDecrease;
    case TrendClass::kConvexIncrease: return kConvexIncrease;
    case TrendClass::kConcaveIncrease: return kConcaveIncrease;
    case TrendClass::kConvexDecrease: return kConvexDecrease;
    case TrendClass::kConcaveDecrease: return kConcaveDecrease;
    case TrendClass::kRandomFluctuation: return kRandom;
    case TrendClass::kPlateau: return kPlateau;
  }
  return kRandom;
}

std::optional<TrendClass> trend_of_phrase(std::string_view phrase) {
  for (auto c : trend::kAllTrendClasses)
    for (auto p : trend_phrases(c))
      if (p == phrase) return c;
  return std::nullopt;
}

bool mentions_trend(std::string_view text, TrendClass c) {
  for (auto p : trend_phrases(c))
    if (text.find(p) != std::string_view::npos) return true;
  return false;
}

void PlanConfig::validate() const {
  if (!(p_move2 >= 0 && p_move2 <= 1) || !(p_move4 >= 0 && p_move4 <= 1))
    throw Error(ErrorKind::kParameter, "move probabilities must lie in [0, 1]");
  if (m3_min < 1 || m3_max < m3_min)
    throw Error(ErrorKind::kParameter, "M3 counts need 1 <= min <= max");
  if (m3_1_min < 1 || m3_1_max < m3_1_min)
    throw Error(ErrorKind::kParameter, "M3_1 counts need 1 <= min <= max");
}

MovePlan plan_moves(ChartCategory category, int arity, Rng& rng, const PlanConfig& config) {
  config.validate();
  if (arity < 1 || arity > 2) throw Error(ErrorKind::kArity, fmt::format("arity {} is not 1 or 2", arity));
  MovePlan plan{{MoveTag::kM1, 0}};
  if (rng.bernoulli(config.p_move2)) plan.push_back({MoveTag::kM2, 0});
  const auto block = [&](int series) {
    plan.push_back({MoveTag::kM3, series});
    const auto n31 = rng.between(config.m3_1_min, config.m3_1_max);
    for (std::int64_t i = 0; i < n31; ++i) plan.push_back({MoveTag::kM3_1, series});
  };
  if (category == ChartCategory::kCategorical) {
    const auto n3 = rng.between(config.m3_min, config.m3_max);
    for (std::int64_t i = 0; i < n3; ++i) block(static_cast<int>(rng.below(static_cast<std::uint64_t>(arity))));
  } else {
    for (int s = 0; s < arity; ++s) {
      const auto n3 = rng.between(config.m3_min, config.m3_max);
      for (std::int64_t i = 0; i < n3; ++i) block(s);
    }
  }
  if (rng.bernoulli(config.p_move4))
    plan.push_back({MoveTag::kM4, static_cast<int>(rng.below(static_cast<std::uint64_t>(arity)))});
  plan.push_back({MoveTag::kM5, 0});
  return plan;
}

std::optional<std::string> move_order_violation(const std::vector<MoveTag>& moves) {
  if (moves.empty()) return "empty description";
  if (moves.front() != MoveTag::kM1) return fmt::format("starts with {} instead of M1", templates::to_string(moves.front()));
  if (moves.back() != MoveTag::kM5) return fmt::format("ends with {} instead of M5", templates::to_string(moves.back()));
  const auto rank = [](MoveTag m) {
    switch (m) {
      case MoveTag::kM1: return 0;
      case MoveTag::kM2: return 1;
      case MoveTag::kM3:
      case MoveTag::kM3_1:
      case MoveTag::kM4: return 2;
      case MoveTag::kM5: return 3;
    }
    return 0;
  };
  int m1 = 0, m2 = 0, m3 = 0, m5 = 0;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const MoveTag m = moves[i];
    if (i > 0 && rank(m) < rank(moves[i - 1]))
      return fmt::format("{} after {} at sentence {}", templates::to_string(m),
                         templates::to_string(moves[i - 1]), i + 1);
    if (m == MoveTag::kM3_1 && (i == 0 || (moves[i - 1] != MoveTag::kM3 && moves[i - 1] != MoveTag::kM3_1)))
      return fmt::format("M3_1 at sentence {} does not follow an M3", i + 1);
    if (m == MoveTag::kM4 && m3 == 0) return fmt::format("M4 at sentence {} precedes every M3", i + 1);
    m1 += m == MoveTag::kM1;
    m2 += m == MoveTag::kM2;
    m3 += m == MoveTag::kM3;
    m5 += m == MoveTag::kM5;
  }
  if (m1 != 1) return fmt::format("{} M1 sentences", m1);
  if (m5 != 1) return fmt::format("{} M5 sentences", m5);
  if (m2 > 1) return fmt::format("{} M2 sentences", m2);
  if (m3 == 0) return std::string("no M3 sentence");
  return std::nullopt;
}

std::string realize(const Template& t, const ChartFacts& f, int series_index, Rng& rng) {
  if (series_index < 0 || static_cast<std::size_t>(series_index) >= f.series.size())
    throw Error(ErrorKind::kRealization,
                fmt::format("template {}: series {} does not exist", t.id, series_index));
  const SeriesFacts& s = f.series[static_cast<std::size_t>(series_index)];
  const auto fill = [&](std::string_view slot) -> std::string {
    if (slot == "title") return f.title;
    if (slot == "chart_kind_phrase") {
      const auto options = kind_phrases(f.kind);
      return std::string(options[rng.below(options.size())]);
    }
    if (slot == "y_label") return f.y_label;
    if (slot == "x_label") return f.x_label;
    if (slot == "unit") return f.unit;
    if (slot == "series_name") return s.name;
    if (slot == "series_name_2") {
      if (f.series.size() != 2) throw Error(ErrorKind::kRealization, fmt::format("template {}: no second series", t.id));
      return f.series[static_cast<std::size_t>(1 - series_index)].name;
    }
    if (slot == "x_first") return s.x_first;
    if (slot == "x_last") return s.x_last;
    if (slot == "x_at_max") return s.x_at_max;
    if (slot == "x_at_min") return s.x_at_min;
    if (slot == "y_first") return say_number(s.y_first, rng);
    if (slot == "y_last") return say_number(s.y_last, rng);
    if (slot == "y_max") return say_number(s.y_max, rng);
    if (slot == "y_min") return say_number(s.y_min, rng);
    if (slot == "y_mean") return say_number(s.y_mean, rng);
    if (slot == "delta") return say_number(std::abs(s.delta), rng);
    if (slot == "trend_phrase") {
      const auto options = trend_phrases(s.trend);
      return std::string(options[rng.below(options.size())]);
    }
    if (slot == "comparison_phrase") {
      if (!f.cross) throw Error(ErrorKind::kRealization, fmt::format("template {}: no second series", t.id));
      return comparison_phrase(f, series_index, rng);
    }
    if (slot == "n_categories") return std::to_string(f.x_labels.size());
    if (slot == "entity_list") return join_list(f.x_labels);
    throw Error(ErrorKind::kRealization, fmt::format("template {}: no fact for slot '{{{}}}'", t.id, slot));
  };

  std::string out;
  std::string_view text = t.text;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t open = text.find('{', i);
    if (open == std::string_view::npos) {
      out.append(text.substr(i));
      break;
    }
    const std::size_t close = text.find('}', open);
    if (close == std::string_view::npos)
      throw Error(ErrorKind::kRealization, fmt::format("template {}: unmatched '{{'", t.id));
    out.append(text.substr(i, open - i));
    out += fill(text.substr(open + 1, close - open - 1));
    i = close + 1;
  }
  capitalize_first(out);
  return out;
}

std::string Description::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

std::vector<MoveTag> Description::moves() const {
  std::vector<MoveTag> out;
  for (const auto& s : sentences) out.push_back(s.move);
  return out;
}

std::size_t Description::word_count() const { return split_ws(text()).size(); }

Description generate_description(const ChartFacts& facts, const TemplateBank& bank, int image_index,
                                 int variant_index, Rng& rng, const PlanConfig& config) {
  const int arity = static_cast<int>(facts.series.size());
  const MovePlan plan = plan_moves(facts.category, arity, rng, config);
  Description d;
  d.image_index = image_index;
  d.variant_index = variant_index;
  std::set<std::string> used;
  for (const auto& step : plan) {
    const bool about_series = step.move == MoveTag::kM3 || step.move == MoveTag::kM3_1 || step.move == MoveTag::kM4;
    const int series = about_series ? step.series : 0;
    const TrendClass trend = facts.series[static_cast<std::size_t>(series)].trend;
    std::vector<const Template*> pool;
    if (step.move == MoveTag::kM2 || step.move == MoveTag::kM4) {
      // Optional moves are skipped when the bank has nothing for them.
      pool = bank.matching(step.move, facts.category, trend, arity);
      if (pool.empty()) continue;
    } else {
      pool = bank.query(step.move, facts.category, trend, arity);
    }
    std::vector<const Template*> fresh;
    for (const Template* t : pool)
      if (!used.count(t->id)) fresh.push_back(t);
    // A small bank may run out; repeats are then allowed.
    const auto& candidates = fresh.empty() ? pool : fresh;
    const Template* t = candidates[rng.below(candidates.size())];
    used.insert(t->id);
    d.sentences.push_back({realize(*t, facts, series, rng), step.move, t->id});
  }
  return d;
}

Description generate_description(const ChartMeta& meta, const std::vector<DataSeries>& series,
                                 const TemplateBank& bank, int variant_index, Rng& rng,
                                 const PlanConfig& config) {
  return generate_description(extract_facts(meta, series), bank, meta.image_index, variant_index, rng,
                              config);
}

std::vector<Description> generate_description_set(const ChartFacts& facts, const TemplateBank& bank,
                                                  int image_index, std::uint64_t seed, int count,
                                                  const PlanConfig& config) {
  if (count < 1) throw Error(ErrorKind::kParameter, "descriptions per chart must be at least 1");
  std::vector<Description> out;
  std::set<std::string> seen;
  for (int v = 0; v < count; ++v) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(v)}));
    Description d = generate_description(facts, bank, image_index, v, rng, config);
    if (seen.insert(d.text()).second) out.push_back(std::move(d));
  }
  return out;
}

std::vector<Description> generate_description_set(const ChartMeta& meta,
                                                  const std::vector<DataSeries>& series,
                                                  const TemplateBank& bank, std::uint64_t seed,
                                                  int count, const PlanConfig& config) {
  return generate_description_set(extract_facts(meta, series), bank, meta.image_index, seed, count,
                                  config);
}

Description baseline_generate(const ChartFacts& facts, const TemplateBank& bank, int image_index,
                              Rng& rng) {
  const int arity = static_cast<int>(facts.series.size());
  Description d;
  d.image_index = image_index;
  const auto k = rng.between(4, 10);
  std::set<std::string> used;
  for (std::int64_t i = 0; i < k; ++i) {
    const int series = static_cast<int>(rng.below(static_cast<std::uint64_t>(arity)));
    const TrendClass trend = facts.series[static_cast<std::size_t>(series)].trend;
    std::vector<const Template*> pool;
    for (const auto& t : bank.templates())
      if (t.applies_to(facts.category, trend, arity)) pool.push_back(&t);
    std::vector<const Template*> fresh;
    for (const Template* t : pool)
      if (!used.count(t->id)) fresh.push_back(t);
    const auto& candidates = fresh.empty() ? pool : fresh;
    if (candidates.empty()) throw Error(ErrorKind::kCoverageHole, "no applicable template");
    const Template* t = candidates[rng.below(candidates.size())];
    used.insert(t->id);
    d.sentences.push_back({realize(*t, facts, series, rng), t->move, t->id});
  }
  return d;
}

Description baseline_generate(const ChartMeta& meta, const std::vector<DataSeries>& series,
                              const TemplateBank& bank, Rng& rng) {
  return baseline_generate(extract_facts(meta, series), bank, meta.image_index, rng);
}

std::vector<std::string> unsupported_numbers(std::string_view text, const ChartFacts& f) {
  std::set<std::string> allowed;
  const auto allow_text = [&](std::string_view s) {
    for (const auto& tok : split_ws(s)) allowed.insert(strip_token(tok));
  };
  allow_text(f.title);
  allow_text(f.x_label);
  allow_text(f.y_label);
  allow_text(f.unit);
  for (const auto& x : f.x_labels) allow_text(x);
  allowed.insert(std::to_string(f.x_labels.size()));
  for (const auto& s : f.series) {
    allow_text(s.name);
    for (double v : {s.y_first, s.y_last, s.y_max, s.y_min, s.y_mean, std::abs(s.delta)})
      allow_text(format_number(v).text);
  }
  std::vector<std::string> out;
  for (const auto& tok : split_ws(text)) {
    const std::string t = strip_token(tok);
    if (has_digit(t) && !allowed.count(t)) out.push_back(t);
  }
  return out;
}

std::vector<std::string> check_description(const Description& d) {
  std::vector<std::string> out;
  if (d.sentences.empty()) out.push_back("description has no sentences");
  for (std::size_t i = 0; i < d.sentences.size(); ++i) {
    const auto& s = d.sentences[i];
    if (s.text.find_first_of("{}") != std::string::npos)
      out.push_back(fmt::format("sentence {} has a residual slot marker: {}", i + 1, s.text));
  }
  if (auto v = move_order_violation(d.moves())) out.push_back("move order: " + *v);
  return out;
}

ordered_json description_to_json(const Description& d) {
  ordered_json sentences = ordered_json::array();
  for (const auto& s : d.sentences)
    sentences.push_back(ordered_json{{"move", templates::to_string(s.move)},
                                     {"template_id", s.template_id},
                                     {"text", s.text}});
  return ordered_json{{"image_index", d.image_index},
                      {"variant_index", d.variant_index},
                      {"sentences", std::move(sentences)},
                      {"text", d.text()}};
}

Description description_from_json(const json& j) {
  try {
    Description d;
    d.image_index = j.at("image_index").get<int>();
    d.variant_index = j.at("variant_index").get<int>();
    for (const auto& s : j.at("sentences")) {
      const auto move = templates::parse_move(s.at("move").get<std::string>());
      if (!move) throw Error(ErrorKind::kUnknownMove, "description: unknown move tag");
      d.sentences.push_back({s.at("text").get<std::string>(), *move, s.at("template_id").get<std::string>()});
    }
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformed, fmt::format("description: {}", e.what()));
  }
}

}  // namespace autochart::narrate
