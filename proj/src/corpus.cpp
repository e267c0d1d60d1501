#include "autochart/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "autochart/error.hpp"

namespace autochart::corpus {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& text, std::string_view where) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorKind::kParameter, fmt::format("{}: '{}' is not a valid number", where, text));
  return value;
}

std::size_t category_position(ChartCategory c) {
  return static_cast<std::size_t>(
      std::find(templates::kAllCategories.begin(), templates::kAllCategories.end(), c) -
      templates::kAllCategories.begin());
}

std::size_t kind_position(ChartKind k) {
  return static_cast<std::size_t>(
      std::find(chart::kAllChartKinds.begin(), chart::kAllChartKinds.end(), k) -
      chart::kAllChartKinds.begin());
}

std::string cell_key(const Cell& c) {
  return fmt::format("{}.{}", templates::to_string(c.first), chart::to_string(c.second));
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(ErrorKind::kIo, fmt::format("failed writing '{}'", path.string()));
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool random_like(trend::TrendClass c) { return !trend::is_directional(c); }

std::vector<catalog::DataSeries> sample_for_cell(const CorpusContext& ctx, const RecordPlan& plan,
                                                 int arity, Rng& rng) {
  using trend::TrendClass;
  const auto& cat = ctx.catalog;
  switch (plan.category) {
    case ChartCategory::kTemporalTrend: {
      // Shape classification needs three points.
      auto series = catalog::sample_series(cat, true, arity, rng, 3);
      const auto& classes = trend::kDirectionalTrendClasses;
      for (std::size_t k = 0; k < series.size(); ++k) {
        const TrendClass c = k == 0 ? classes[static_cast<std::size_t>(plan.index_in_cell) % classes.size()]
                                    : classes[rng.below(classes.size())];
        const int n = static_cast<int>(series[k].size());
        series[k] = catalog::perturb_to_trend(series[k], trend::default_preset(c, n), rng);
      }
      return series;
    }
    case ChartCategory::kTemporalRandom: {
      auto series = catalog::sample_series(cat, true, arity, rng, 3);
      bool raw = rng.bernoulli(0.5);
      // Raw data only stands in when it actually lacks a trend.
      if (raw && !random_like(trend::classify_trend(series[0].y_values))) raw = false;
      if (!raw) {
        for (auto& s : series) {
          const TrendClass c = rng.bernoulli(0.5) ? TrendClass::kRandomFluctuation : TrendClass::kPlateau;
          s = catalog::perturb_to_trend(s, trend::default_preset(c, static_cast<int>(s.size())), rng);
        }
      }
      return series;
    }
    case ChartCategory::kCategorical:
      return catalog::sample_series(cat, false, arity, rng);
  }
  return {};
}

RecordResult attempt_record(const CorpusContext& ctx, const RecordPlan& plan, int attempt) {
  RecordResult r;
  r.plan = plan;
  r.attempt = attempt;
  r.seed = record_seed(ctx.config.seed, plan, attempt);
  Rng rng(r.seed);
  r.arity = rng.bernoulli(0.5) ? 2 : 1;
  const auto series = sample_for_cell(ctx, plan, r.arity, rng);
  const chart::ChartSpec spec = chart::build_chart_spec(series, plan.kind, rng, plan.image_index);
  chart::Rendered rendered = chart::render(spec);
  if (const auto issues = chart::check_meta(rendered.meta); !issues.empty())
    throw Error(ErrorKind::kCorpus, "meta check failed: " + issues.front());
  const narrate::ChartFacts facts = narrate::extract_facts(rendered.meta, series);
  if (facts.category != plan.category)
    throw Error(ErrorKind::kConsistency,
                fmt::format("chart reads as {} instead of {}", templates::to_string(facts.category),
                            templates::to_string(plan.category)));
  const auto descriptions = narrate::generate_description_set(
      facts, ctx.bank, plan.image_index, derive_seed(r.seed, {0x6465736372ULL}),
      ctx.config.descriptions_per_chart, ctx.config.plan);
  for (const auto& d : descriptions) {
    if (const auto issues = narrate::check_description(d); !issues.empty())
      throw Error(ErrorKind::kCorpus, "description check failed: " + issues.front());
    if (const auto bad = narrate::unsupported_numbers(d.text(), facts); !bad.empty())
      throw Error(ErrorKind::kCorpus, "unsupported number in description: " + bad.front());
    r.files.descriptions += narrate::description_to_json(d).dump() + "\n";
  }
  r.trends = rendered.meta.trend_classes();
  r.descriptions = static_cast<int>(descriptions.size());
  r.files.svg = std::move(rendered.svg);
  r.files.meta = chart::meta_to_json(rendered.meta).dump(2) + "\n";
  return r;
}

ordered_json config_echo(const CorpusConfig& c) {
  ordered_json cells;
  for (const auto& [cell, n] : c.cell_counts) cells[cell_key(cell)] = n;
  ordered_json sorted_cells;
  for (auto cat : templates::kAllCategories)
    for (auto kind : chart::kAllChartKinds) {
      const auto key = cell_key({cat, kind});
      if (cells.contains(key)) sorted_cells[key] = cells[key];
    }
  return ordered_json{{"seed", c.seed},
                      {"count_scale", c.count_scale},
                      {"catalog", c.catalog.describe()},
                      {"template_bank", c.template_bank},
                      {"descriptions_per_chart", c.descriptions_per_chart},
                      {"p_move2", c.plan.p_move2},
                      {"p_move4", c.plan.p_move4},
                      {"m3_min", c.plan.m3_min},
                      {"m3_max", c.plan.m3_max},
                      {"m3_1_min", c.plan.m3_1_min},
                      {"m3_1_max", c.plan.m3_1_max},
                      {"cells", std::move(sorted_cells)}};
}

const std::array<std::string_view, 3> kSubdirs = {"charts", "meta", "descriptions"};

}  // namespace

std::map<Cell, int> default_cell_counts() {
  using CK = ChartKind;
  std::map<Cell, int> out;
  const std::array<std::pair<ChartCategory, std::array<int, 4>>, 3> rows = {{
      {ChartCategory::kTemporalTrend, {880, 480, 880, 880}},
      {ChartCategory::kTemporalRandom, {1049, 676, 1049, 1049}},
      {ChartCategory::kCategorical, {951, 436, 951, 951}},
  }};
  const std::array<CK, 4> kinds = {CK::kLine, CK::kHorizontalBar, CK::kVerticalBar, CK::kScatter};
  for (const auto& [cat, counts] : rows)
    for (std::size_t k = 0; k < kinds.size(); ++k) out[{cat, kinds[k]}] = counts[k];
  return out;
}

std::string CatalogSource::describe() const {
  if (synthetic) return fmt::format("synthetic({}, {})", n_indicators, n_entities);
  return path.generic_string();
}

void CorpusConfig::validate() const {
  if (!(count_scale >= 0) || !std::isfinite(count_scale))
    throw Error(ErrorKind::kParameter, "count_scale must be a non-negative number");
  if (descriptions_per_chart < 1)
    throw Error(ErrorKind::kParameter, "descriptions_per_chart must be at least 1");
  if (catalog.synthetic && (catalog.n_indicators < 1 || catalog.n_entities < 2))
    throw Error(ErrorKind::kParameter, "a synthetic catalog needs >= 1 indicator and >= 2 entities");
  for (const auto& [cell, n] : cell_counts)
    if (n < 0) throw Error(ErrorKind::kParameter, fmt::format("cell {} has a negative count", cell_key(cell)));
  plan.validate();
}

CorpusConfig parse_config(std::string_view text, const fs::path& base_dir, std::string_view source) {
  CorpusConfig c;
  bool has_seed = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  const auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = fmt::format("{}:{}", source, line_no);
    if (eq == std::string::npos) throw Error(ErrorKind::kParameter, fmt::format("{}: expected key = value", where));
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.empty()) throw Error(ErrorKind::kParameter, fmt::format("{}: '{}' has no value", where, key));
    if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(value, where);
      has_seed = true;
    } else if (key == "output_dir") {
      c.output_dir = resolve(value);
    } else if (key == "count_scale") {
      c.count_scale = parse_number<double>(value, where);
    } else if (key == "catalog") {
      static const std::regex synth(R"(synthetic\s*(\(\s*(\d+)\s*,\s*(\d+)\s*\))?)");
      std::smatch m;
      if (std::regex_match(value, m, synth)) {
        c.catalog = CatalogSource{};
        if (m[1].matched) {
          c.catalog.n_indicators = parse_number<int>(m[2].str(), where);
          c.catalog.n_entities = parse_number<int>(m[3].str(), where);
        }
      } else {
        c.catalog.synthetic = false;
        c.catalog.path = resolve(value);
      }
    } else if (key == "template_bank") {
      c.template_bank = value == "builtin" ? value : resolve(value).string();
    } else if (key == "descriptions_per_chart") {
      c.descriptions_per_chart = parse_number<int>(value, where);
    } else if (key == "p_move2") {
      c.plan.p_move2 = parse_number<double>(value, where);
    } else if (key == "p_move4") {
      c.plan.p_move4 = parse_number<double>(value, where);
    } else if (key == "m3_min") {
      c.plan.m3_min = parse_number<int>(value, where);
    } else if (key == "m3_max") {
      c.plan.m3_max = parse_number<int>(value, where);
    } else if (key == "m3_1_min") {
      c.plan.m3_1_min = parse_number<int>(value, where);
    } else if (key == "m3_1_max") {
      c.plan.m3_1_max = parse_number<int>(value, where);
    } else if (key.rfind("cell.", 0) == 0) {
      const std::string rest = key.substr(5);
      const auto dot = rest.find('.');
      const auto cat = templates::parse_category(rest.substr(0, dot));
      const auto kind = dot == std::string::npos ? std::nullopt : chart::parse_chart_kind(rest.substr(dot + 1));
      if (!cat || !kind) throw Error(ErrorKind::kParameter, fmt::format("{}: unknown cell '{}'", where, key));
      c.cell_counts[{*cat, *kind}] = parse_number<int>(value, where);
    } else {
      throw Error(ErrorKind::kParameter, fmt::format("{}: unknown key '{}'", where, key));
    }
  }
  if (!has_seed) throw Error(ErrorKind::kParameter, fmt::format("{}: 'seed' is required", source));
  c.validate();
  return c;
}

CorpusConfig load_config(const fs::path& path) {
  const auto text = read_file(path);
  if (!text) throw Error(ErrorKind::kIo, fmt::format("cannot read config '{}'", path.string()));
  return parse_config(*text, path.parent_path(), path.string());
}

int scaled_count(int count, double scale) {
  if (count <= 0) return 0;
  return std::max(1, static_cast<int>(std::floor(count * scale)));
}

std::vector<RecordPlan> plan_records(const CorpusConfig& config) {
  std::vector<RecordPlan> out;
  int image = 0;
  for (auto cat : templates::kAllCategories) {
    for (auto kind : chart::kAllChartKinds) {
      const auto it = config.cell_counts.find({cat, kind});
      const int n = it == config.cell_counts.end() ? 0 : scaled_count(it->second, config.count_scale);
      for (int i = 0; i < n; ++i) out.push_back({image++, cat, kind, i});
    }
  }
  return out;
}

std::uint64_t record_seed(std::uint64_t global_seed, const RecordPlan& plan, int attempt) {
  return derive_seed(global_seed, {category_position(plan.category), kind_position(plan.kind),
                                   static_cast<std::uint64_t>(plan.index_in_cell),
                                   static_cast<std::uint64_t>(attempt)});
}

CorpusContext make_context(const CorpusConfig& config) {
  config.validate();
  auto catalog = config.catalog.synthetic
                     ? catalog::synth_catalog(config.seed, config.catalog.n_indicators, config.catalog.n_entities)
                     : catalog::load_catalog(config.catalog.path);
  auto bank = config.template_bank == "builtin" ? templates::builtin_bank()
                                                : templates::load_bank(config.template_bank);
  return CorpusContext{config, std::move(catalog), std::move(bank)};
}

std::string record_stem(int image_index) { return fmt::format("{:06d}", image_index); }

RecordResult generate_record(const CorpusContext& ctx, const RecordPlan& plan) {
  std::vector<std::string> log;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    try {
      RecordResult r = attempt_record(ctx, plan, attempt);
      r.retry_log = std::move(log);
      return r;
    } catch (const std::exception& e) {
      log.push_back(fmt::format("record {} attempt {}: {}", plan.image_index, attempt, e.what()));
    }
  }
  throw Error(ErrorKind::kCorpus, fmt::format("record {} failed after {} retries; last error: {}",
                                              plan.image_index, kMaxRetries, log.back()));
}

ordered_json generate_corpus(const CorpusConfig& config, const GenerateOptions& options) {
  const CorpusContext ctx = make_context(config);
  const std::vector<RecordPlan> plans = plan_records(config);
  const fs::path& out = config.output_dir;

  if (fs::exists(out)) {
    const bool ours = fs::exists(out / "manifest.json");
    if (!ours && !fs::is_empty(out))
      throw Error(ErrorKind::kIo,
                  fmt::format("'{}' is not empty and holds no corpus; refusing to write there", out.string()));
    for (auto sub : kSubdirs) fs::remove_all(out / sub);
    fs::remove(out / "manifest.json");
  }
  for (auto sub : kSubdirs) fs::create_directories(out / sub);

  std::vector<RecordResult> results(plans.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= plans.size()) return;
      try {
        RecordResult r = generate_record(ctx, plans[i]);
        const std::string stem = record_stem(plans[i].image_index);
        write_file(out / "charts" / (stem + ".svg"), r.files.svg);
        write_file(out / "meta" / (stem + ".json"), r.files.meta);
        write_file(out / "descriptions" / (stem + ".jsonl"), r.files.descriptions);
        r.files = {};
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  ordered_json records = ordered_json::array();
  std::map<Cell, std::pair<int, int>> realized;
  int total_descriptions = 0;
  for (const auto& r : results) {
    if (options.log)
      for (const auto& line : r.retry_log) options.log(line);
    const std::string stem = record_stem(r.plan.image_index);
    ordered_json trends = ordered_json::array();
    for (auto t : r.trends) trends.push_back(trend::to_string(t));
    records.push_back(ordered_json{{"image_index", r.plan.image_index},
                                   {"category", templates::to_string(r.plan.category)},
                                   {"kind", chart::to_string(r.plan.kind)},
                                   {"index_in_cell", r.plan.index_in_cell},
                                   {"seed", r.seed},
                                   {"attempt", r.attempt},
                                   {"arity", r.arity},
                                   {"trend_classes", std::move(trends)},
                                   {"chart", "charts/" + stem + ".svg"},
                                   {"meta", "meta/" + stem + ".json"},
                                   {"descriptions", "descriptions/" + stem + ".jsonl"},
                                   {"n_descriptions", r.descriptions}});
    auto& cell = realized[{r.plan.category, r.plan.kind}];
    cell.first++;
    cell.second += r.descriptions;
    total_descriptions += r.descriptions;
  }
  ordered_json cells = ordered_json::array();
  for (auto cat : templates::kAllCategories) {
    for (auto kind : chart::kAllChartKinds) {
      const auto it = config.cell_counts.find({cat, kind});
      const int requested = it == config.cell_counts.end() ? 0 : scaled_count(it->second, config.count_scale);
      const auto [charts, descriptions] = realized[{cat, kind}];
      cells.push_back(ordered_json{{"category", templates::to_string(cat)},
                                   {"kind", chart::to_string(kind)},
                                   {"requested", requested},
                                   {"charts", charts},
                                   {"descriptions", descriptions}});
    }
  }
  ordered_json manifest{{"format", "autochart-corpus v1"},
                        {"config", config_echo(config)},
                        {"cells", std::move(cells)},
                        {"totals", ordered_json{{"charts", static_cast<int>(results.size())},
                                                {"descriptions", total_descriptions}}},
                        {"records", std::move(records)}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

GridStats grid_from_manifest(const json& manifest) {
  GridStats g;
  for (auto cat : templates::kAllCategories)
    for (auto kind : chart::kAllChartKinds) {
      g.charts[{cat, kind}] = 0;
      g.descriptions[{cat, kind}] = 0;
    }
  try {
    for (const auto& r : manifest.at("records")) {
      const auto cat = templates::parse_category(r.at("category").get<std::string>());
      const auto kind = chart::parse_chart_kind(r.at("kind").get<std::string>());
      if (!cat || !kind) throw Error(ErrorKind::kMalformed, "manifest: unknown category or kind");
      g.charts[{*cat, *kind}]++;
      g.descriptions[{*cat, *kind}] += r.at("n_descriptions").get<int>();
      g.total_charts++;
      g.total_descriptions += r.at("n_descriptions").get<int>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformed, fmt::format("manifest: {}", e.what()));
  }
  return g;
}

GridStats corpus_stats(const fs::path& dir) {
  const auto text = read_file(dir / "manifest.json");
  if (!text) throw Error(ErrorKind::kIo, fmt::format("no manifest.json in '{}'", dir.string()));
  try {
    return grid_from_manifest(json::parse(*text));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kMalformed, fmt::format("manifest: {}", e.what()));
  }
}

std::string format_grid(const GridStats& g) {
  static constexpr std::array<std::string_view, 4> kHeads = {"Line", "Horizontal bar", "Vertical bar",
                                                             "Scatter"};
  std::string out = fmt::format("{:<22}", "");
  for (auto h : kHeads) out += fmt::format("{:>16}", h);
  out += fmt::format("{:>10}\n", "Total");
  const auto row = [&](std::string_view name, const std::function<int(ChartKind)>& value) {
    std::string line = fmt::format("{:<22}", name);
    int total = 0;
    for (auto kind : chart::kAllChartKinds) {
      const int v = value(kind);
      total += v;
      line += fmt::format("{:>16}", v);
    }
    return line + fmt::format("{:>10}\n", total);
  };
  const auto at = [](const std::map<Cell, int>& m, Cell c) {
    const auto it = m.find(c);
    return it == m.end() ? 0 : it->second;
  };
  const std::array<std::pair<ChartCategory, std::string_view>, 3> names = {{
      {ChartCategory::kTemporalTrend, "Temporal (trend)"},
      {ChartCategory::kTemporalRandom, "Temporal (random)"},
      {ChartCategory::kCategorical, "Categorical"},
  }};
  for (const auto& [cat, name] : names)
    out += row(name, [&](ChartKind k) { return at(g.charts, {cat, k}); });
  out += row("Total charts", [&](ChartKind k) {
    int t = 0;
    for (auto cat : templates::kAllCategories) t += at(g.charts, {cat, k});
    return t;
  });
  out += row("Descriptions", [&](ChartKind k) {
    int t = 0;
    for (auto cat : templates::kAllCategories) t += at(g.descriptions, {cat, k});
    return t;
  });
  return out;
}

ValidationReport validate_corpus(const fs::path& dir) {
  ValidationReport rep;
  const auto flag = [&](int image, std::string msg) { rep.violations.push_back({image, std::move(msg)}); };
  const auto text = read_file(dir / "manifest.json");
  if (!text) {
    flag(-1, "manifest.json is missing");
    return rep;
  }
  json manifest;
  try {
    manifest = json::parse(*text);
  } catch (const json::parse_error& e) {
    flag(-1, fmt::format("manifest.json does not parse: {}", e.what()));
    return rep;
  }
  if (!manifest.contains("records") || !manifest["records"].is_array()) {
    flag(-1, "manifest.json has no record list");
    return rep;
  }

  std::set<std::string> listed;
  std::map<std::string, std::pair<int, int>> per_cell;
  int n_descriptions = 0;
  for (const auto& rec : manifest["records"]) {
    ++rep.records_checked;
    int image = -1;
    try {
      image = rec.at("image_index").get<int>();
      const std::string cell = rec.at("category").get<std::string>() + "." + rec.at("kind").get<std::string>();
      const int listed_desc = rec.at("n_descriptions").get<int>();
      per_cell[cell].first++;
      per_cell[cell].second += listed_desc;
      n_descriptions += listed_desc;
      const std::string chart_rel = rec.at("chart").get<std::string>();
      const std::string meta_rel = rec.at("meta").get<std::string>();
      const std::string desc_rel = rec.at("descriptions").get<std::string>();
      listed.insert(chart_rel);
      listed.insert(meta_rel);
      listed.insert(desc_rel);

      const auto svg = read_file(dir / chart_rel);
      if (!svg) flag(image, fmt::format("{} is missing", chart_rel));
      else if (svg->rfind("<svg", 0) != 0 || svg->find("</svg>") == std::string::npos)
        flag(image, fmt::format("{} is not a complete SVG document", chart_rel));

      std::optional<chart::ChartMeta> meta;
      const auto meta_text = read_file(dir / meta_rel);
      if (!meta_text) {
        flag(image, fmt::format("{} is missing", meta_rel));
      } else {
        try {
          meta = chart::meta_from_json(json::parse(*meta_text));
        } catch (const std::exception& e) {
          flag(image, fmt::format("{} does not load: {}", meta_rel, e.what()));
        }
      }
      std::optional<narrate::ChartFacts> facts;
      if (meta) {
        if (meta->image_index != image)
          flag(image, fmt::format("{} has image_index {}", meta_rel, meta->image_index));
        for (const auto& issue : chart::check_meta(*meta)) flag(image, fmt::format("{}: {}", meta_rel, issue));
        if (chart::to_string(meta->kind) != rec.at("kind").get<std::string>())
          flag(image, fmt::format("{} is a {} chart, manifest says {}", meta_rel, chart::to_string(meta->kind),
                                  rec.at("kind").get<std::string>()));
        try {
          facts = narrate::extract_facts(*meta);
        } catch (const std::exception& e) {
          flag(image, fmt::format("{}: {}", meta_rel, e.what()));
        }
      }

      const auto desc_text = read_file(dir / desc_rel);
      if (!desc_text) {
        flag(image, fmt::format("{} is missing", desc_rel));
        continue;
      }
      std::istringstream lines(*desc_text);
      std::string line;
      int count = 0, line_no = 0;
      while (std::getline(lines, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++count;
        try {
          const auto j = json::parse(line);
          const narrate::Description d = narrate::description_from_json(j);
          if (d.image_index != image)
            flag(image, fmt::format("{}:{} has image_index {}", desc_rel, line_no, d.image_index));
          if (j.contains("text") && j["text"].get<std::string>() != d.text())
            flag(image, fmt::format("{}:{}: flat text disagrees with its sentences", desc_rel, line_no));
          for (const auto& issue : narrate::check_description(d))
            flag(image, fmt::format("{}:{}: {}", desc_rel, line_no, issue));
          if (facts)
            for (const auto& tok : narrate::unsupported_numbers(d.text(), *facts))
              flag(image, fmt::format("{}:{}: number '{}' matches no chart fact", desc_rel, line_no, tok));
        } catch (const std::exception& e) {
          flag(image, fmt::format("{}:{} does not load: {}", desc_rel, line_no, e.what()));
        }
      }
      if (count == 0) flag(image, fmt::format("{} holds no description", desc_rel));
      if (count != listed_desc)
        flag(image, fmt::format("{} holds {} descriptions, manifest says {}", desc_rel, count, listed_desc));
    } catch (const json::exception& e) {
      flag(image, fmt::format("manifest record is malformed: {}", e.what()));
    }
  }

  try {
    const int total_charts = manifest.at("totals").at("charts").get<int>();
    const int total_desc = manifest.at("totals").at("descriptions").get<int>();
    if (total_charts != rep.records_checked)
      flag(-1, fmt::format("manifest totals list {} charts but {} records", total_charts, rep.records_checked));
    if (total_desc != n_descriptions)
      flag(-1, fmt::format("manifest totals list {} descriptions but records sum to {}", total_desc, n_descriptions));
    for (const auto& c : manifest.at("cells")) {
      const std::string cell = c.at("category").get<std::string>() + "." + c.at("kind").get<std::string>();
      const auto [charts, desc] = per_cell[cell];
      if (c.at("charts").get<int>() != charts || c.at("descriptions").get<int>() != desc)
        flag(-1, fmt::format("cell {} lists {}/{} charts/descriptions but records give {}/{}", cell,
                             c.at("charts").get<int>(), c.at("descriptions").get<int>(), charts, desc));
    }
  } catch (const json::exception& e) {
    flag(-1, fmt::format("manifest totals are malformed: {}", e.what()));
  }
  std::vector<std::string> unlisted;
  for (auto sub : kSubdirs) {
    if (!fs::is_directory(dir / sub)) continue;
    for (const auto& entry : fs::directory_iterator(dir / sub)) {
      const std::string rel = std::string(sub) + "/" + entry.path().filename().string();
      if (!listed.count(rel)) unlisted.push_back(rel);
    }
  }
  std::sort(unlisted.begin(), unlisted.end());
  for (const auto& rel : unlisted) flag(-1, fmt::format("{} is not listed in the manifest", rel));
  return rep;
}

std::string format_validation(const ValidationReport& r) {
  std::string out;
  for (const auto& v : r.violations) {
    if (v.image_index >= 0) out += fmt::format("record {}: {}\n", record_stem(v.image_index), v.message);
    else out += fmt::format("corpus: {}\n", v.message);
  }
  out += fmt::format("{} records checked, {} violations\n", r.records_checked, r.violations.size());
  return out;
}

}  // namespace autochart::corpus
