// Command-line front end: corpus generation, inspection and scoring.
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "autochart/catalog.hpp"
#include "autochart/corpus.hpp"
#include "autochart/error.hpp"
#include "autochart/metrics.hpp"
#include "autochart/narrate.hpp"
#include "autochart/templates.hpp"

namespace {

using namespace autochart;
using nlohmann::json;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Lines are either JSON objects with image_index and text, or "index<TAB>text".
std::map<int, std::vector<std::string>> read_keyed_lines(const std::string& path) {
  std::map<int, std::vector<std::string>> out;
  std::istringstream in(read_text(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (line.front() == '{') {
        const json j = json::parse(line);
        out[j.at("image_index").get<int>()].push_back(j.at("text").get<std::string>());
      } else {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw std::runtime_error("expected index<TAB>text");
        out[std::stoi(line.substr(0, tab))].push_back(line.substr(tab + 1));
      }
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kMalformed, fmt::format("{}:{}: {}", path, line_no, e.what()));
    }
  }
  return out;
}

int run_generate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::optional<double> scale, std::optional<std::string> out_dir, int jobs) {
  corpus::CorpusConfig config = corpus::load_config(config_path);
  if (seed) config.seed = *seed;
  if (scale) config.count_scale = *scale;
  if (out_dir) config.output_dir = *out_dir;
  config.validate();
  corpus::GenerateOptions options;
  options.jobs = jobs;
  options.log = [](const std::string& line) { std::cerr << "retry: " << line << "\n"; };
  const auto manifest = corpus::generate_corpus(config, options);
  std::cout << corpus::format_grid(corpus::grid_from_manifest(json::parse(manifest.dump())));
  std::cout << fmt::format("wrote {}\n", config.output_dir.string());
  return 0;
}

int run_describe(const std::string& meta_path, const std::string& bank_path, std::uint64_t seed, int count,
                 bool baseline) {
  const chart::ChartMeta meta = chart::meta_from_json(json::parse(read_text(meta_path)));
  const templates::TemplateBank bank =
      bank_path == "builtin" ? templates::builtin_bank() : templates::load_bank(bank_path);
  const narrate::ChartFacts facts = narrate::extract_facts(meta);
  std::cout << fmt::format("category: {}\n", templates::to_string(facts.category));
  if (baseline) {
    Rng rng(seed);
    const auto d = narrate::baseline_generate(facts, bank, meta.image_index, rng);
    for (const auto& s : d.sentences) std::cout << fmt::format("[{}] {}\n", templates::to_string(s.move), s.text);
    return 0;
  }
  for (const auto& d : narrate::generate_description_set(facts, bank, meta.image_index, seed, count)) {
    std::cout << fmt::format("-- variant {} ({} sentences, {} words)\n", d.variant_index, d.sentences.size(),
                             d.word_count());
    for (const auto& s : d.sentences) std::cout << fmt::format("[{}] {}\n", templates::to_string(s.move), s.text);
  }
  return 0;
}

int run_eval(const std::string& hyp_path, const std::string& ref_path, const std::string& manifest_path,
             const std::string& rouge, const std::string& out_path) {
  const auto variant = metrics::parse_rouge_variant(rouge);
  if (!variant) throw Error(ErrorKind::kParameter, fmt::format("unknown ROUGE variant '{}'", rouge));
  const auto hyps = read_keyed_lines(hyp_path);
  const auto refs = read_keyed_lines(ref_path);
  std::map<int, std::string> kinds;
  if (!manifest_path.empty()) {
    const json m = json::parse(read_text(manifest_path));
    for (const auto& r : m.at("records")) kinds[r.at("image_index").get<int>()] = r.at("kind").get<std::string>();
  }
  std::vector<metrics::EvalPair> pairs;
  for (const auto& [index, texts] : hyps) {
    const auto it = refs.find(index);
    if (it == refs.end()) {
      std::cerr << fmt::format("warning: no reference for image {}\n", index);
      continue;
    }
    const auto kind = kinds.find(index);
    pairs.push_back({kind == kinds.end() ? "unknown" : kind->second, texts.front(), it->second});
  }
  const metrics::Report report = metrics::corpus_report(pairs, *variant);
  std::cout << metrics::format_report(report);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", out_path));
    out << metrics::report_to_json(report).dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic chart corpus generator with analytical descriptions"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate a corpus from a config file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> scale;
  std::optional<std::string> out_dir;
  int jobs = 1;
  gen->add_option("--config", config_path, "Config file")->required();
  gen->add_option("--seed", seed, "Override the config seed");
  gen->add_option("--count-scale", scale, "Override count_scale");
  gen->add_option("--out", out_dir, "Override output_dir");
  gen->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* stats = app.add_subcommand("stats", "Print the chart/description grid of a corpus");
  std::string stats_dir;
  stats->add_option("dir", stats_dir, "Corpus directory")->required();

  auto* validate = app.add_subcommand("validate", "Re-check every corpus invariant on disk");
  std::string validate_dir;
  validate->add_option("dir", validate_dir, "Corpus directory")->required();

  auto* describe = app.add_subcommand("describe", "Describe one chart from its meta file");
  std::string meta_path, bank_path = "builtin";
  std::uint64_t describe_seed = 0;
  int count = 3;
  bool baseline = false;
  describe->add_option("--meta", meta_path, "Meta JSON file")->required();
  describe->add_option("--bank", bank_path, "Template bank file, or 'builtin'");
  describe->add_option("--seed", describe_seed, "Seed")->required();
  describe->add_option("--count", count, "Candidate descriptions")->check(CLI::PositiveNumber);
  describe->add_flag("--baseline", baseline, "Use the structure-free baseline generator");

  auto* eval = app.add_subcommand("eval", "Score hypotheses against references");
  std::string hyp_path, ref_path, manifest_path, rouge = "rouge-l", eval_out;
  eval->add_option("--hyp", hyp_path, "Hypotheses, one per image_index")->required();
  eval->add_option("--ref", ref_path, "References, any number per image_index")->required();
  eval->add_option("--by-kind", manifest_path, "Corpus manifest giving each image's chart kind");
  eval->add_option("--rouge", rouge, "rouge-1, rouge-2 or rouge-l");
  eval->add_option("--out", eval_out, "Write the report as JSON");

  auto* cat = app.add_subcommand("catalog", "Catalog utilities");
  auto* cat_stats = cat->add_subcommand("stats", "Summarize a catalog file");
  cat->require_subcommand(1);
  std::string data_path, dict_path;
  cat_stats->add_option("data", data_path, "Data file")->required();
  cat_stats->add_option("--dict", dict_path, "Dictionary file (default: <data>.dict.csv)");

  auto* bank = app.add_subcommand("bank", "Validate a template bank and print its census");
  std::string census_path = "builtin";
  bank->add_option("path", census_path, "Bank file, or 'builtin'");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_generate(config_path, seed, scale, out_dir, jobs);
    if (*stats) {
      std::cout << corpus::format_grid(corpus::corpus_stats(stats_dir));
      return 0;
    }
    if (*validate) {
      const auto report = corpus::validate_corpus(validate_dir);
      std::cout << corpus::format_validation(report);
      return report.ok() ? 0 : 1;
    }
    if (*describe) return run_describe(meta_path, bank_path, describe_seed, count, baseline);
    if (*eval) return run_eval(hyp_path, ref_path, manifest_path, rouge, eval_out);
    if (*cat_stats) {
      const auto c = dict_path.empty() ? catalog::load_catalog(data_path) : catalog::load_catalog(data_path, dict_path);
      std::cout << catalog::format_stats(catalog::stats(c));
      return 0;
    }
    if (*bank) {
      const auto b = census_path == "builtin" ? templates::builtin_bank() : templates::load_bank(census_path);
      std::cout << templates::format_census(b);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << fmt::format("error ({}): {}\n", to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
