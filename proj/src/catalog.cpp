#include "autochart/catalog.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "autochart/error.hpp"

namespace autochart::catalog {

namespace {

constexpr std::string_view kDataHeader = "# autochart-catalog-data v1";
constexpr std::string_view kDataColumns = "indicator_id,entity_id,year,value";
constexpr std::string_view kDictHeader = "# autochart-catalog-dictionary v1";
constexpr std::string_view kDictColumns = "record,id,name,unit,value_kind,entity_kind";

struct MeasureWord {
  std::string_view name;
  std::string_view unit;
  ValueKind kind;
};

// Bundled vocabulary for synthetic catalogs.
constexpr std::array<MeasureWord, 40> kMeasures = {{
    {"CO2 emissions", "kilotonnes", ValueKind::kFloat},
    {"Total population", "people", ValueKind::kPositiveInteger},
    {"GDP growth", "percent", ValueKind::kPercentage},
    {"Labour force", "people", ValueKind::kPositiveInteger},
    {"Unemployment rate", "percent", ValueKind::kPercentage},
    {"Electricity consumption", "kilowatt-hours", ValueKind::kFloat},
    {"Number of visitors", "visitors", ValueKind::kPositiveInteger},
    {"Forest area", "square kilometres", ValueKind::kFloat},
    {"Literacy rate", "percent", ValueKind::kPercentage},
    {"Health expenditure", "US dollars", ValueKind::kFloat},
    {"Number of hospital beds", "beds", ValueKind::kPositiveInteger},
    {"Cereal yield", "kilograms per hectare", ValueKind::kFloat},
    {"Fertility rate", "births per woman", ValueKind::kFloat},
    {"Internet usage", "percent", ValueKind::kPercentage},
    {"Exports of goods", "US dollars", ValueKind::kFloat},
    {"Imports of goods", "US dollars", ValueKind::kFloat},
    {"Number of new businesses", "businesses", ValueKind::kPositiveInteger},
    {"Life expectancy", "years", ValueKind::kFloat},
    {"Urban population share", "percent", ValueKind::kPercentage},
    {"Freshwater withdrawal", "cubic metres", ValueKind::kFloat},
    {"Renewable energy share", "percent", ValueKind::kPercentage},
    {"Number of tourists", "tourists", ValueKind::kPositiveInteger},
    {"Fast food consumption", "grams per week", ValueKind::kFloat},
    {"Sugar intake", "grams per day", ValueKind::kFloat},
    {"Number of students enrolled", "students", ValueKind::kPositiveInteger},
    {"School enrolment rate", "percent", ValueKind::kPercentage},
    {"Military expenditure", "US dollars", ValueKind::kFloat},
    {"Number of registered vehicles", "vehicles", ValueKind::kPositiveInteger},
    {"Rail freight", "tonne-kilometres", ValueKind::kFloat},
    {"Air passengers carried", "passengers", ValueKind::kPositiveInteger},
    {"Inflation rate", "percent", ValueKind::kPercentage},
    {"Household savings", "US dollars", ValueKind::kFloat},
    {"Number of physicians", "physicians", ValueKind::kPositiveInteger},
    {"Agricultural land share", "percent", ValueKind::kPercentage},
    {"Fish consumption", "kilograms per person", ValueKind::kFloat},
    {"Mobile subscriptions", "subscriptions", ValueKind::kPositiveInteger},
    {"Research expenditure", "US dollars", ValueKind::kFloat},
    {"Poverty rate", "percent", ValueKind::kPercentage},
    {"Energy use", "kilograms of oil equivalent", ValueKind::kFloat},
    {"Number of patents filed", "patents", ValueKind::kPositiveInteger},
}};

constexpr std::array<std::string_view, 10> kQualifiers = {
    "",
    " in rural areas",
    " in urban areas",
    " among women",
    " among men",
    " among young people",
    " in the public sector",
    " in the private sector",
    " in coastal regions",
    " in inland regions",
};

constexpr std::array<std::string_view, 60> kCountries = {
    "Argentina",  "Australia",   "Austria",     "Belgium",      "Brazil",       "Bulgaria",
    "Canada",     "Chile",       "China",       "Colombia",     "Croatia",      "Denmark",
    "Egypt",      "Estonia",     "Finland",     "France",       "Georgia",      "Germany",
    "Ghana",      "Greece",      "Hungary",     "Iceland",      "India",        "Indonesia",
    "Ireland",    "Israel",      "Italy",       "Japan",        "Kenya",        "Latvia",
    "Lithuania",  "Malaysia",    "Mexico",      "Morocco",      "Nepal",        "the Netherlands",
    "New Zealand", "Nigeria",    "Norway",      "Pakistan",     "Peru",         "the Philippines",
    "Poland",     "Portugal",    "Romania",     "Singapore",    "Slovakia",     "South Africa",
    "South Korea", "Spain",      "Sweden",      "Switzerland",  "Thailand",     "Turkey",
    "Uganda",     "the UK",      "the USA",     "Uruguay",      "Vietnam",      "Zambia",
};

constexpr std::array<std::string_view, 40> kCities = {
    "Amsterdam", "Athens",    "Bangkok",   "Barcelona", "Berlin",     "Boston",   "Brussels",
    "Budapest",  "Cairo",     "Chicago",   "Dublin",    "Edinburgh",  "Helsinki", "Istanbul",
    "Jakarta",   "Lagos",     "Lima",      "Lisbon",    "London",     "Madrid",   "Manila",
    "Melbourne", "Milan",     "Montreal",  "Mumbai",    "Nairobi",    "Osaka",    "Oslo",
    "Paris",     "Prague",    "Rome",      "Seoul",     "Shanghai",   "Stockholm", "Sydney",
    "Tokyo",     "Toronto",   "Vancouver", "Vienna",    "Warsaw",
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// RFC 4180 style: fields with a comma or quote are quoted, quotes doubled.
std::vector<std::string> split_csv(std::string_view line, bool& ok) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  ok = true;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (quoted) ok = false;
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void row_error(ErrorKind kind, const std::filesystem::path& path, std::size_t line,
                            std::string_view what) {
  throw Error(kind, fmt::format("{}:{}: {}", path.string(), line, what));
}

void check_value(const Indicator& ind, double v, const std::filesystem::path& path,
                 std::size_t line) {
  const ValueBounds b = bounds_of(ind.value_kind);
  if (!std::isfinite(v) || v < b.lo || v > b.hi) {
    row_error(ErrorKind::kOutOfRange, path, line,
              fmt::format("{} value {} for indicator {} outside [{}, {}]",
                          to_string(ind.value_kind), v, ind.id, b.lo, b.hi));
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open {}", path.string()));
  return in;
}

void expect_line(std::istream& in, std::string_view expected, const std::filesystem::path& path,
                 std::size_t line_no) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != expected) {
    row_error(ErrorKind::kMalformed, path, line_no,
              fmt::format("expected header '{}'", expected));
  }
}

}  // namespace

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::kPositiveInteger: return "positive-integer";
    case ValueKind::kFloat: return "float";
    case ValueKind::kPercentage: return "percentage";
  }
  return "float";
}

std::optional<ValueKind> parse_value_kind(std::string_view name) {
  if (name == "positive-integer") return ValueKind::kPositiveInteger;
  if (name == "float") return ValueKind::kFloat;
  if (name == "percentage") return ValueKind::kPercentage;
  return std::nullopt;
}

ValueBounds bounds_of(ValueKind kind) {
  if (kind == ValueKind::kPercentage) return {0.0, 100.0};
  return {0.0, kMaxMagnitude};
}

Catalog::Catalog(std::vector<Indicator> indicators, std::vector<Entity> entities,
                 std::map<ObservationKey, double> observations)
    : indicators_(std::move(indicators)),
      entities_(std::move(entities)),
      observations_(std::move(observations)) {
  std::set<std::string> ids;
  for (const auto& ind : indicators_) {
    if (ind.id.empty() || !ids.insert("i:" + ind.id).second)
      throw Error(ErrorKind::kMalformed, fmt::format("duplicate or empty indicator id '{}'", ind.id));
  }
  for (const auto& ent : entities_) {
    if (ent.name.empty())
      throw Error(ErrorKind::kMalformed, fmt::format("entity '{}' has an empty name", ent.id));
    if (ent.id.empty() || !ids.insert("e:" + ent.id).second)
      throw Error(ErrorKind::kMalformed, fmt::format("duplicate or empty entity id '{}'", ent.id));
  }
  for (const auto& [key, v] : observations_) {
    if (key.indicator >= indicators_.size() || key.entity >= entities_.size())
      throw Error(ErrorKind::kMalformed, "observation refers to an unknown indicator or entity");
    if (key.year < kFirstYear || key.year > kLastYear)
      throw Error(ErrorKind::kOutOfRange, fmt::format("year {} outside [{}, {}]", key.year,
                                                      kFirstYear, kLastYear));
    const ValueBounds b = bounds_of(indicators_[key.indicator].value_kind);
    if (!std::isfinite(v) || v < b.lo || v > b.hi)
      throw Error(ErrorKind::kOutOfRange,
                  fmt::format("value {} of indicator {} outside [{}, {}]", v,
                              indicators_[key.indicator].id, b.lo, b.hi));
  }

  // Runs: the map is ordered by (indicator, entity, year).
  for (auto it = observations_.begin(); it != observations_.end();) {
    const ObservationKey start = it->first;
    int len = 1;
    auto next = std::next(it);
    while (next != observations_.end() && next->first.indicator == start.indicator &&
           next->first.entity == start.entity && next->first.year == start.year + len) {
      ++len;
      ++next;
    }
    if (len >= 2) runs_.push_back({start.indicator, start.entity, start.year, len});
    it = next;
  }

  // Cross sections grouped by (indicator, year, entity kind).
  std::map<std::tuple<std::uint32_t, int, std::string>, std::vector<std::uint32_t>> groups;
  for (const auto& [key, v] : observations_) {
    groups[{key.indicator, key.year, entities_[key.entity].kind}].push_back(key.entity);
  }
  for (auto& [key, ents] : groups) {
    if (ents.size() < 2) continue;
    std::sort(ents.begin(), ents.end());
    cross_sections_.push_back({std::get<0>(key), std::get<1>(key), std::move(ents)});
  }
}

std::optional<double> Catalog::value(std::uint32_t indicator, std::uint32_t entity,
                                     int year) const {
  const auto it = observations_.find({indicator, entity, year});
  if (it == observations_.end()) return std::nullopt;
  return it->second;
}

CatalogStats stats(const Catalog& catalog) {
  CatalogStats s;
  s.indicators = catalog.indicators().size();
  s.entities = catalog.entities().size();
  s.observations = catalog.observations().size();
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  int lo = kLastYear + 1, hi = kFirstYear - 1;
  for (const auto& [key, v] : catalog.observations()) {
    pairs.insert({key.indicator, key.entity});
    lo = std::min(lo, key.year);
    hi = std::max(hi, key.year);
  }
  s.covered_pairs = pairs.size();
  if (s.observations > 0) {
    s.first_year = lo;
    s.last_year = hi;
  }
  return s;
}

std::string format_stats(const CatalogStats& s) {
  return fmt::format(
      "indicators    {}\nentities      {}\nobservations  {}\ncovered pairs {}\nyears         "
      "{}-{}\n",
      s.indicators, s.entities, s.observations, s.covered_pairs, s.first_year, s.last_year);
}

std::filesystem::path dictionary_path_for(const std::filesystem::path& data_path) {
  auto p = data_path;
  p.replace_extension(".dict.csv");
  return p;
}

Catalog load_catalog(const std::filesystem::path& data_path) {
  return load_catalog(data_path, dictionary_path_for(data_path));
}

Catalog load_catalog(const std::filesystem::path& data_path,
                     const std::filesystem::path& dictionary_path) {
  std::vector<Indicator> indicators;
  std::vector<Entity> entities;
  std::map<std::string, std::uint32_t> indicator_index, entity_index;

  {
    auto in = open_input(dictionary_path);
    expect_line(in, kDictHeader, dictionary_path, 1);
    expect_line(in, kDictColumns, dictionary_path, 2);
    std::string line;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      bool ok = true;
      const auto f = split_csv(line, ok);
      if (!ok || f.size() != 6) row_error(ErrorKind::kMalformed, dictionary_path, line_no,
                                          "expected 6 comma-separated fields");
      if (f[0] == "indicator") {
        const auto kind = parse_value_kind(f[4]);
        if (!kind) row_error(ErrorKind::kMalformed, dictionary_path, line_no,
                             fmt::format("unknown value_kind '{}'", f[4]));
        if (indicator_index.count(f[1]))
          row_error(ErrorKind::kMalformed, dictionary_path, line_no,
                    fmt::format("duplicate indicator id '{}'", f[1]));
        indicator_index[f[1]] = static_cast<std::uint32_t>(indicators.size());
        indicators.push_back({f[1], f[2], f[3], *kind});
      } else if (f[0] == "entity") {
        if (f[2].empty())
          row_error(ErrorKind::kMalformed, dictionary_path, line_no, "entity name is empty");
        if (entity_index.count(f[1]))
          row_error(ErrorKind::kMalformed, dictionary_path, line_no,
                    fmt::format("duplicate entity id '{}'", f[1]));
        entity_index[f[1]] = static_cast<std::uint32_t>(entities.size());
        entities.push_back({f[1], f[2], f[5]});
      } else {
        row_error(ErrorKind::kMalformed, dictionary_path, line_no,
                  fmt::format("unknown record type '{}'", f[0]));
      }
    }
  }

  std::map<ObservationKey, double> observations;
  auto in = open_input(data_path);
  expect_line(in, kDataHeader, data_path, 1);
  expect_line(in, kDataColumns, data_path, 2);
  std::string line;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    bool ok = true;
    const auto f = split_csv(line, ok);
    if (!ok || f.size() != 4)
      row_error(ErrorKind::kMalformed, data_path, line_no, "expected 4 comma-separated fields");
    const auto ii = indicator_index.find(f[0]);
    if (ii == indicator_index.end())
      row_error(ErrorKind::kMalformed, data_path, line_no,
                fmt::format("unknown indicator id '{}'", f[0]));
    const auto ei = entity_index.find(f[1]);
    if (ei == entity_index.end())
      row_error(ErrorKind::kMalformed, data_path, line_no,
                fmt::format("unknown entity id '{}'", f[1]));
    int year = 0;
    double value = 0;
    if (!parse_number(trim(f[2]), year))
      row_error(ErrorKind::kMalformed, data_path, line_no, fmt::format("bad year '{}'", f[2]));
    if (!parse_number(trim(f[3]), value))
      row_error(ErrorKind::kMalformed, data_path, line_no, fmt::format("bad value '{}'", f[3]));
    if (year < kFirstYear || year > kLastYear)
      row_error(ErrorKind::kOutOfRange, data_path, line_no,
                fmt::format("year {} outside [{}, {}]", year, kFirstYear, kLastYear));
    check_value(indicators[ii->second], value, data_path, line_no);
    if (!observations.emplace(ObservationKey{ii->second, ei->second, year}, value).second)
      row_error(ErrorKind::kMalformed, data_path, line_no, "duplicate observation");
  }
  return Catalog(std::move(indicators), std::move(entities), std::move(observations));
}

void write_catalog(const Catalog& catalog, const std::filesystem::path& data_path) {
  const auto dict_path = dictionary_path_for(data_path);
  {
    std::ofstream out(dict_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", dict_path.string()));
    out << kDictHeader << '\n' << kDictColumns << '\n';
    for (const auto& ind : catalog.indicators()) {
      out << "indicator," << csv_field(ind.id) << ',' << csv_field(ind.name) << ','
          << csv_field(ind.unit) << ',' << to_string(ind.value_kind) << ",\n";
    }
    for (const auto& ent : catalog.entities()) {
      out << "entity," << csv_field(ent.id) << ',' << csv_field(ent.name) << ",,,"
          << csv_field(ent.kind) << '\n';
    }
  }
  std::ofstream out(data_path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", data_path.string()));
  out << kDataHeader << '\n' << kDataColumns << '\n';
  for (const auto& [key, v] : catalog.observations()) {
    out << fmt::format("{},{},{},{}\n", csv_field(catalog.indicators()[key.indicator].id),
                       csv_field(catalog.entities()[key.entity].id), key.year, v);
  }
}

Catalog synth_catalog(std::uint64_t seed, int n_indicators, int n_entities) {
  if (n_indicators < 1 || n_entities < 1)
    throw Error(ErrorKind::kParameter,
                fmt::format("synth_catalog: counts must be >= 1 (indicators={}, entities={})",
                            n_indicators, n_entities));
  Rng rng(seed);

  // Indicator names: every (measure, qualifier) combination in a seeded order.
  std::vector<std::pair<std::size_t, std::size_t>> combos;
  for (std::size_t q = 0; q < kQualifiers.size(); ++q)
    for (std::size_t m = 0; m < kMeasures.size(); ++m) combos.emplace_back(m, q);
  // Unqualified measures come first so small catalogs read naturally.
  for (std::size_t i = combos.size() - 1; i > kMeasures.size(); --i) {
    const std::size_t lo = kMeasures.size();
    const std::size_t j = lo + rng.below(i - lo + 1);
    std::swap(combos[i], combos[j]);
  }
  std::vector<Indicator> indicators;
  for (int i = 0; i < n_indicators; ++i) {
    const auto [m, q] = combos[static_cast<std::size_t>(i) % combos.size()];
    const int round = i / static_cast<int>(combos.size());
    std::string name = fmt::format("{}{}", kMeasures[m].name, kQualifiers[q]);
    if (round > 0) name += fmt::format(" (survey {})", round + 1);
    indicators.push_back({fmt::format("IND{:04d}", i + 1), std::move(name),
                          std::string(kMeasures[m].unit), kMeasures[m].kind});
  }

  std::vector<std::pair<std::string_view, std::string_view>> names;
  for (auto c : kCountries) names.emplace_back(c, "country");
  for (auto c : kCities) names.emplace_back(c, "city");
  for (std::size_t i = names.size() - 1; i > 0; --i) std::swap(names[i], names[rng.below(i + 1)]);
  std::vector<Entity> entities;
  for (int e = 0; e < n_entities; ++e) {
    const auto [name, kind] = names[static_cast<std::size_t>(e) % names.size()];
    const int round = e / static_cast<int>(names.size());
    std::string full(name);
    if (round > 0) full = fmt::format("{} district {}", name, round + 1);
    entities.push_back({fmt::format("ENT{:03d}", e + 1), std::move(full), std::string(kind)});
  }

  std::map<ObservationKey, double> obs;
  const double log_max = std::log(kMaxMagnitude);
  for (std::uint32_t i = 0; i < indicators.size(); ++i) {
    const ValueKind kind = indicators[i].value_kind;
    const double magnitude = std::exp(rng.uniform() * log_max);
    for (std::uint32_t e = 0; e < entities.size(); ++e) {
      if (!rng.bernoulli(0.55)) continue;
      const int first = rng.between(kFirstYear, kLastYear - 2);
      const int length = rng.between(3, std::min(40, kLastYear - first + 1));
      double v = kind == ValueKind::kPercentage ? 2.0 + 93.0 * rng.uniform()
                                                : magnitude * std::exp(0.7 * rng.normal());
      for (int y = first; y < first + length; ++y) {
        double stored = v;
        if (kind == ValueKind::kPercentage) {
          stored = std::round(std::clamp(v, 0.0, 100.0) * 100.0) / 100.0;
          v = std::clamp(v + 2.0 * rng.normal(), 0.0, 100.0);
        } else {
          stored = std::clamp(v, 0.0, kMaxMagnitude);
          if (kind == ValueKind::kPositiveInteger) stored = std::max(1.0, std::round(stored));
          v = std::min(v * std::exp(0.01 + 0.06 * rng.normal()), kMaxMagnitude);
        }
        obs.emplace(ObservationKey{i, e, y}, stored);
      }
    }
  }
  return Catalog(std::move(indicators), std::move(entities), std::move(obs));
}

bool labels_are_ordered_years(const std::vector<std::string>& labels) {
  int prev = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int y = 0;
    if (!parse_number(std::string_view(labels[i]), y)) return false;
    if (i > 0 && y <= prev) return false;
    prev = y;
  }
  return !labels.empty();
}

void DataSeries::validate() const {
  if (x_labels.size() != y_values.size())
    throw Error(ErrorKind::kConsistency,
                fmt::format("series '{}': {} labels but {} values", series_name, x_labels.size(),
                            y_values.size()));
  const int n = static_cast<int>(y_values.size());
  if (n < kMinSeriesLength || n > kMaxSeriesLength)
    throw Error(ErrorKind::kParameter,
                fmt::format("series '{}': length {} outside [{}, {}]", series_name, n,
                            kMinSeriesLength, kMaxSeriesLength));
  if (temporal != labels_are_ordered_years(x_labels))
    throw Error(ErrorKind::kConsistency,
                fmt::format("series '{}': temporal flag disagrees with its x labels", series_name));
  const ValueBounds b = bounds_of(value_kind);
  for (double v : y_values) {
    if (!std::isfinite(v) || v < b.lo || v > b.hi)
      throw Error(ErrorKind::kOutOfRange,
                  fmt::format("series '{}': value {} outside [{}, {}]", series_name, v, b.lo, b.hi));
  }
}

std::vector<DataSeries> sample_series(const Catalog& catalog, bool temporal, int arity, Rng& rng,
                                      int min_length) {
  if (arity != 1 && arity != 2)
    throw Error(ErrorKind::kArity, fmt::format("sample_series: arity must be 1 or 2, got {}", arity));
  min_length = std::max(min_length, kMinSeriesLength);
  constexpr int kTries = 64;
  const auto& inds = catalog.indicators();
  const auto& ents = catalog.entities();

  const auto make = [&](std::uint32_t ind, std::string name, std::vector<std::string> labels,
                        std::vector<double> values, std::string entity_kind) {
    DataSeries s;
    s.series_name = std::move(name);
    s.x_labels = std::move(labels);
    s.y_values = std::move(values);
    s.y_unit = inds[ind].unit;
    s.temporal = temporal;
    s.indicator_name = inds[ind].name;
    s.entity_kind = std::move(entity_kind);
    s.value_kind = inds[ind].value_kind;
    return s;
  };

  if (temporal) {
    std::vector<const Catalog::Run*> runs;
    for (const auto& r : catalog.runs())
      if (r.length >= min_length) runs.push_back(&r);
    if (runs.empty())
      throw Error(ErrorKind::kInsufficientCoverage,
                  fmt::format("no (indicator, entity) pair covers {} consecutive years", min_length));
    for (int attempt = 0; attempt < kTries; ++attempt) {
      const auto& run = *runs[rng.below(runs.size())];
      const int len = rng.between(min_length, std::min(kMaxSeriesLength, run.length));
      const int start = run.first_year + static_cast<int>(rng.below(
                                             static_cast<std::uint64_t>(run.length - len + 1)));
      std::vector<std::string> labels;
      for (int y = start; y < start + len; ++y) labels.push_back(std::to_string(y));
      const auto values_for = [&](std::uint32_t e) {
        std::vector<double> v;
        for (int y = start; y < start + len; ++y) {
          const auto x = catalog.value(run.indicator, e, y);
          if (!x) return std::vector<double>{};
          v.push_back(*x);
        }
        return v;
      };
      std::vector<DataSeries> out;
      out.push_back(make(run.indicator, ents[run.entity].name, labels, values_for(run.entity),
                         ents[run.entity].kind));
      if (arity == 2) {
        std::vector<std::uint32_t> partners;
        for (std::uint32_t e = 0; e < ents.size(); ++e)
          if (e != run.entity && !values_for(e).empty()) partners.push_back(e);
        if (partners.empty()) continue;
        const auto e = partners[rng.below(partners.size())];
        out.push_back(make(run.indicator, ents[e].name, labels, values_for(e), ents[e].kind));
      }
      return out;
    }
    throw Error(ErrorKind::kInsufficientCoverage,
                "no second entity shares a sampled indicator and year range");
  }

  std::vector<const Catalog::CrossSection*> sections;
  for (const auto& cs : catalog.cross_sections())
    if (static_cast<int>(cs.entities.size()) >= min_length) sections.push_back(&cs);
  if (sections.empty())
    throw Error(ErrorKind::kInsufficientCoverage,
                fmt::format("no (indicator, year) is covered by {} entities of one kind", min_length));
  for (int attempt = 0; attempt < kTries; ++attempt) {
    const auto& cs = *sections[rng.below(sections.size())];
    const int count = static_cast<int>(cs.entities.size());
    const int len = rng.between(min_length, std::min(kMaxSeriesLength, count));
    // Partial Fisher-Yates, then catalog order for display.
    std::vector<std::uint32_t> pool = cs.entities;
    for (int i = 0; i < len; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.below(pool.size() - static_cast<std::size_t>(i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(len));
    std::sort(pool.begin(), pool.end());
    std::vector<std::string> labels;
    for (auto e : pool) labels.push_back(ents[e].name);
    const auto values_at = [&](int year) {
      std::vector<double> v;
      for (auto e : pool) {
        const auto x = catalog.value(cs.indicator, e, year);
        if (!x) return std::vector<double>{};
        v.push_back(*x);
      }
      return v;
    };
    const std::string kind = ents[pool.front()].kind;
    std::vector<DataSeries> out;
    out.push_back(make(cs.indicator, std::to_string(cs.year), labels, values_at(cs.year), kind));
    if (arity == 2) {
      std::vector<int> years;
      for (int y = kFirstYear; y <= kLastYear; ++y)
        if (y != cs.year && !values_at(y).empty()) years.push_back(y);
      if (years.empty()) continue;
      const int y = years[rng.below(years.size())];
      auto second = make(cs.indicator, std::to_string(y), labels, values_at(y), kind);
      // Legend order follows time.
      if (y < cs.year) out.insert(out.begin(), std::move(second));
      else out.push_back(std::move(second));
    }
    return out;
  }
  throw Error(ErrorKind::kInsufficientCoverage,
              "no second year covers a sampled set of entities");
}

DataSeries perturb_to_trend(const DataSeries& series, const trend::TrendSpec& spec, Rng& rng,
                            const trend::ClassifierConfig& config) {
  series.validate();
  trend::TrendSpec local = spec;
  local.params.n_points = static_cast<int>(series.size());
  local.validate();
  if (series.size() < 3)
    throw Error(ErrorKind::kTrendUnrealizable,
                fmt::format("cannot impose {} on a {}-point series", trend::to_string(spec.trend_class),
                            series.size()));
  const auto [lo_it, hi_it] = std::minmax_element(series.y_values.begin(), series.y_values.end());
  double mid = (*lo_it + *hi_it) / 2.0;
  const ValueBounds bounds = bounds_of(series.value_kind);
  if (!(mid > 0)) mid = std::min(1.0, bounds.hi);

  for (int attempt = 0; attempt < trend::kMaxResamples; ++attempt) {
    std::vector<double> shape;
    try {
      shape = trend::synth_trend_series(local, rng.next_u64(), config);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kTrendUnrealizable) continue;
      throw;
    }
    const double mean = std::accumulate(shape.begin(), shape.end(), 0.0) / static_cast<double>(shape.size());
    const double peak = *std::max_element(shape.begin(), shape.end());
    // Multiplicative scaling keeps the classification features unchanged.
    double k = mid / mean;
    if (peak * k > bounds.hi) k = bounds.hi / peak;
    DataSeries out = series;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      double v = shape[i] * k;
      if (series.value_kind == ValueKind::kPositiveInteger) v = std::max(1.0, std::round(v));
      out.y_values[i] = std::clamp(v, bounds.lo, bounds.hi);
    }
    if (trend::classify_trend(out.y_values, config) == spec.trend_class) return out;
  }
  throw Error(ErrorKind::kTrendUnrealizable,
              fmt::format("could not perturb '{}' into {} after {} attempts", series.series_name,
                          trend::to_string(spec.trend_class), trend::kMaxResamples));
}

}  // namespace autochart::catalog
