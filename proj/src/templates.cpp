#include "autochart/templates.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "autochart/error.hpp"
#include "json.hpp"

namespace autochart::templates {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(MoveTag m) {
  switch (m) {
    case MoveTag::kM1: return "M1";
    case MoveTag::kM2: return "M2";
    case MoveTag::kM3: return "M3";
    case MoveTag::kM3_1: return "M3_1";
    case MoveTag::kM4: return "M4";
    case MoveTag::kM5: return "M5";
  }
  return "M1";
}

std::optional<MoveTag> parse_move(std::string_view name) {
  for (auto m : kAllMoves)
    if (to_string(m) == name) return m;
  return std::nullopt;
}

std::string_view to_string(ChartCategory c) {
  switch (c) {
    case ChartCategory::kTemporalTrend: return "temporal-trend";
    case ChartCategory::kTemporalRandom: return "temporal-random";
    case ChartCategory::kCategorical: return "categorical";
  }
  return "categorical";
}

std::optional<ChartCategory> parse_category(std::string_view name) {
  for (auto c : kAllCategories)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::string_view to_string(Origin o) { return o == Origin::kHuman ? "human" : "paraphrase"; }

bool is_known_slot(std::string_view name) {
  return std::find(kSlotVocabulary.begin(), kSlotVocabulary.end(), name) != kSlotVocabulary.end();
}

std::vector<std::string> template_slots(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '}') throw Error(ErrorKind::kInvalidTemplate, "unmatched '}'");
    if (text[i] != '{') {
      ++i;
      continue;
    }
    const std::size_t close = text.find_first_of("{}", i + 1);
    if (close == std::string_view::npos || text[close] != '}')
      throw Error(ErrorKind::kInvalidTemplate, "unmatched '{'");
    out.emplace_back(text.substr(i + 1, close - i - 1));
    i = close + 1;
  }
  return out;
}

bool Template::applies_to(ChartCategory c, TrendClass t, int n_series) const {
  if (category && *category != c) return false;
  if (arity != 0 && arity != n_series) return false;
  if (trends && std::find(trends->begin(), trends->end(), t) == trends->end()) return false;
  return true;
}

int Template::wildcard_count() const {
  return (category ? 0 : 1) + (trends ? 0 : 1) + (arity != 0 ? 0 : 1);
}

namespace {

void validate_template(const Template& t) {
  std::vector<std::string> slots;
  try {
    slots = template_slots(t.text);
  } catch (const Error& e) {
    throw Error(ErrorKind::kInvalidTemplate, fmt::format("template {}: {}", t.id, e.what()));
  }
  if (t.id.empty()) throw Error(ErrorKind::kInvalidTemplate, "template with empty id");
  if (t.arity < 0 || t.arity > 2)
    throw Error(ErrorKind::kInvalidTemplate, fmt::format("template {}: arity must be 1, 2 or any", t.id));
  if (t.trends && t.trends->empty())
    throw Error(ErrorKind::kInvalidTemplate, fmt::format("template {}: empty trend list", t.id));
  for (const auto& s : slots) {
    if (!is_known_slot(s))
      throw Error(ErrorKind::kUnknownSlot, fmt::format("template {}: unknown slot '{{{}}}'", t.id, s));
    if ((s == "series_name_2" || s == "comparison_phrase") && t.arity != 2)
      throw Error(ErrorKind::kInvalidTemplate,
                  fmt::format("template {}: slot '{{{}}}' needs arity 2", t.id, s));
    if (s == "trend_phrase" && !t.trends &&
        (t.move == MoveTag::kM3 || t.move == MoveTag::kM4))
      throw Error(ErrorKind::kInvalidTemplate,
                  fmt::format("template {}: a trend phrase needs a declared trend list", t.id));
  }
}

Template template_from_json(const json& j) {
  Template t;
  t.id = j.at("id").get<std::string>();
  const std::string move = j.at("move").get<std::string>();
  const auto m = parse_move(move);
  if (!m) throw Error(ErrorKind::kUnknownMove, fmt::format("template {}: unknown move '{}'", t.id, move));
  t.move = *m;
  const std::string cat = j.at("category").get<std::string>();
  if (cat != "any") {
    t.category = parse_category(cat);
    if (!t.category)
      throw Error(ErrorKind::kInvalidTemplate, fmt::format("template {}: unknown category '{}'", t.id, cat));
  }
  const json& tr = j.at("trend");
  if (tr.is_string()) {
    if (tr.get<std::string>() != "any")
      throw Error(ErrorKind::kInvalidTemplate, fmt::format("template {}: trend must be \"any\" or a list", t.id));
  } else {
    t.trends.emplace();
    for (const auto& name : tr) {
      const auto c = trend::parse_trend_class(name.get<std::string>());
      if (!c)
        throw Error(ErrorKind::kInvalidTemplate,
                    fmt::format("template {}: unknown trend class '{}'", t.id, name.get<std::string>()));
      t.trends->push_back(*c);
    }
  }
  const json& ar = j.at("arity");
  if (ar.is_string()) {
    if (ar.get<std::string>() != "any")
      throw Error(ErrorKind::kInvalidTemplate, fmt::format("template {}: arity must be 1, 2 or \"any\"", t.id));
  } else {
    t.arity = ar.get<int>();
  }
  const std::string origin = j.at("origin").get<std::string>();
  if (origin == "human") t.origin = Origin::kHuman;
  else if (origin == "paraphrase") t.origin = Origin::kParaphrase;
  else throw Error(ErrorKind::kInvalidTemplate, fmt::format("template {}: unknown origin '{}'", t.id, origin));
  t.text = j.at("text").get<std::string>();
  return t;
}

}  // namespace

std::vector<std::string> coverage_holes(const std::vector<Template>& templates) {
  std::vector<std::string> holes;
  for (auto move : kRequiredMoves) {
    for (auto cat : kAllCategories) {
      for (auto tc : trend::kAllTrendClasses) {
        for (int arity : {1, 2}) {
          const bool covered = std::any_of(templates.begin(), templates.end(), [&](const Template& t) {
            return t.move == move && t.applies_to(cat, tc, arity);
          });
          if (!covered)
            holes.push_back(fmt::format("{}/{}/{}/{}", to_string(move), to_string(cat), trend::to_string(tc), arity));
        }
      }
    }
  }
  return holes;
}

TemplateBank::TemplateBank(std::vector<Template> templates) : templates_(std::move(templates)) {
  std::set<std::string> ids;
  for (const auto& t : templates_) {
    validate_template(t);
    if (!ids.insert(t.id).second)
      throw Error(ErrorKind::kInvalidTemplate, fmt::format("duplicate template id '{}'", t.id));
  }
  const auto holes = coverage_holes(templates_);
  if (!holes.empty()) {
    std::set<std::string_view> moves;
    for (const auto& h : holes) moves.insert(std::string_view(h).substr(0, h.find('/')));
    std::string shown;
    for (std::size_t i = 0; i < holes.size() && i < 12; ++i) shown += (i ? ", " : "") + holes[i];
    if (holes.size() > 12) shown += fmt::format(", ... ({} cells)", holes.size());
    throw Error(ErrorKind::kCoverageHole,
                fmt::format("template bank has no template for moves {}: {}", fmt::join(moves, ", "), shown));
  }
}

std::vector<const Template*> TemplateBank::matching(MoveTag move, ChartCategory category,
                                                    TrendClass trend, int arity) const {
  std::vector<const Template*> out;
  for (const auto& t : templates_)
    if (t.move == move && t.applies_to(category, trend, arity)) out.push_back(&t);
  std::stable_sort(out.begin(), out.end(), [](const Template* a, const Template* b) {
    return a->wildcard_count() < b->wildcard_count();
  });
  return out;
}

std::vector<const Template*> TemplateBank::query(MoveTag move, ChartCategory category,
                                                 TrendClass trend, int arity) const {
  auto out = matching(move, category, trend, arity);
  if (out.empty())
    throw Error(ErrorKind::kCoverageHole,
                fmt::format("no template for {}/{}/{}/{}", to_string(move), to_string(category),
                            trend::to_string(trend), arity));
  return out;
}

std::map<MoveTag, CensusRow> TemplateBank::census() const {
  std::map<MoveTag, CensusRow> out;
  for (auto m : kAllMoves) out[m];
  for (const auto& t : templates_) {
    auto& row = out[t.move];
    (t.origin == Origin::kHuman ? row.human : row.paraphrase)++;
  }
  return out;
}

std::vector<Template> parse_templates(std::string_view text, std::string_view source) {
  std::vector<Template> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(template_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kMalformed, fmt::format("{}:{}: {}", source, line_no, e.what()));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  return out;
}

TemplateBank parse_bank(std::string_view text, std::string_view source) {
  return TemplateBank(parse_templates(text, source));
}

TemplateBank load_bank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open template bank '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bank(ss.str(), path);
}

std::string serialize_template(const Template& t) {
  ordered_json j;
  j["id"] = t.id;
  j["move"] = to_string(t.move);
  j["category"] = t.category ? to_string(*t.category) : "any";
  if (t.trends) {
    ordered_json arr = ordered_json::array();
    for (auto c : *t.trends) arr.push_back(trend::to_string(c));
    j["trend"] = std::move(arr);
  } else {
    j["trend"] = "any";
  }
  if (t.arity == 0) j["arity"] = "any";
  else j["arity"] = t.arity;
  j["origin"] = to_string(t.origin);
  j["text"] = t.text;
  return j.dump();
}

std::string serialize_bank(const TemplateBank& bank) {
  std::string out;
  for (const auto& t : bank.templates()) out += serialize_template(t) + "\n";
  return out;
}

std::string format_census(const TemplateBank& bank) {
  std::string out = fmt::format("{:<6} {:>6} {:>11} {:>6}\n", "move", "human", "paraphrase", "total");
  int h = 0, p = 0;
  for (const auto& [move, row] : bank.census()) {
    out += fmt::format("{:<6} {:>6} {:>11} {:>6}\n", to_string(move), row.human, row.paraphrase,
                       row.human + row.paraphrase);
    h += row.human;
    p += row.paraphrase;
  }
  out += fmt::format("{:<6} {:>6} {:>11} {:>6}\n", "all", h, p, h + p);
  return out;
}

const TemplateBank& builtin_bank() {
  static const TemplateBank bank = parse_bank(seed_bank_text(), "builtin seed bank");
  return bank;
}

}  // namespace autochart::templates
