#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "autochart/catalog.hpp"
#include "autochart/chart.hpp"
#include "autochart/narrate.hpp"
#include "autochart/templates.hpp"

namespace autochart::corpus {

using chart::ChartKind;
using templates::ChartCategory;

using Cell = std::pair<ChartCategory, ChartKind>;

/// Chart counts per (category, kind) for a full-size corpus.
std::map<Cell, int> default_cell_counts();

struct CatalogSource {
  bool synthetic = true;
  int n_indicators = 346;
  int n_entities = 76;
  std::filesystem::path path;  // data file when not synthetic

  std::string describe() const;
};

struct CorpusConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "corpus";
  double count_scale = 1.0;
  CatalogSource catalog;
  std::string template_bank = "builtin";  // or a path
  int descriptions_per_chart = 3;
  narrate::PlanConfig plan;
  std::map<Cell, int> cell_counts = default_cell_counts();

  void validate() const;
};

/// `key = value` lines, `#` comments. Relative paths resolve against `base_dir`.
CorpusConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {},
                          std::string_view source = "<config>");
CorpusConfig load_config(const std::filesystem::path& path);

/// floor(count * scale), at least 1 for a non-zero count.
int scaled_count(int count, double scale);

struct RecordPlan {
  int image_index = 0;
  ChartCategory category = ChartCategory::kCategorical;
  ChartKind kind = ChartKind::kLine;
  int index_in_cell = 0;
};

/// Records in canonical cell order (categories, then kinds in table order),
/// image indices counting up from 0.
std::vector<RecordPlan> plan_records(const CorpusConfig& config);

/// Seed of one generation attempt: derive_seed(global, {category, kind, index, attempt})
/// with category and kind given by their position in the canonical orders.
std::uint64_t record_seed(std::uint64_t global_seed, const RecordPlan& plan, int attempt);

inline constexpr int kMaxRetries = 5;

/// Loaded catalog and bank shared read-only by all workers.
struct CorpusContext {
  CorpusConfig config;
  catalog::Catalog catalog;
  templates::TemplateBank bank;
};

CorpusContext make_context(const CorpusConfig& config);

struct RecordFiles {
  std::string svg;
  std::string meta;          // JSON text
  std::string descriptions;  // one JSON description per line
};

struct RecordResult {
  RecordPlan plan;
  int attempt = 0;
  std::uint64_t seed = 0;
  int arity = 0;
  std::vector<trend::TrendClass> trends;
  int descriptions = 0;
  RecordFiles files;
  std::vector<std::string> retry_log;  // one line per failed attempt
};

/// One record, independent of every other record. Throws kCorpus after the
/// last retry fails.
RecordResult generate_record(const CorpusContext& ctx, const RecordPlan& plan);

std::string record_stem(int image_index);  // "000042"

struct GenerateOptions {
  int jobs = 1;
  std::function<void(const std::string&)> log;  // retry and progress messages
};

/// Writes charts/, meta/, descriptions/ and manifest.json under config.output_dir.
nlohmann::ordered_json generate_corpus(const CorpusConfig& config, const GenerateOptions& options = {});

struct GridStats {
  std::map<Cell, int> charts;
  std::map<Cell, int> descriptions;
  int total_charts = 0;
  int total_descriptions = 0;
};

GridStats grid_from_manifest(const nlohmann::json& manifest);
GridStats corpus_stats(const std::filesystem::path& dir);
std::string format_grid(const GridStats& stats);

struct Violation {
  int image_index = -1;  // -1 for corpus-level findings
  std::string message;
};

struct ValidationReport {
  int records_checked = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_corpus(const std::filesystem::path& dir);
std::string format_validation(const ValidationReport& report);

}  // namespace autochart::corpus
