// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "autochart/chart.hpp"
#include "autochart/corpus.hpp"
#include "autochart/metrics.hpp"
#include "autochart/narrate.hpp"
#include "autochart/rng.hpp"
#include "autochart/templates.hpp"
#include "autochart/trend.hpp"

using namespace autochart;
namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const std::string kCli = AUTOCHART_CLI;
const fs::path kSource = AUTOCHART_SOURCE_DIR;
fs::path g_work;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmtd(double v, int prec = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

struct RunResult {
  int status = -1;
  std::string output;
  double seconds = 0;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int st = pclose(pipe);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

RunResult generate(const fs::path& config, const fs::path& out, double scale, int n_jobs) {
  return run(kCli + " generate --config " + quote(config) + " --out " + quote(out) +
             " --count-scale " + fmtd(scale, 4) + " --jobs " + std::to_string(n_jobs));
}

json load_json(const fs::path& p) { return json::parse(read_file(p)); }

std::vector<json> load_jsonl(const fs::path& p) {
  std::vector<json> out;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

const fs::path kDefaultConfig = kSource / "configs" / "default.conf";

// Corpora shared between criteria.
fs::path full_a() { return g_work / "full_a"; }
fs::path full_b() { return g_work / "full_b"; }
fs::path mid() { return g_work / "mid"; }  // >= 500 charts

// ---------------------------------------------------------------------------
// 1. Corpus shape

Outcome corpus_shape() {
  Outcome o;
  auto r = generate(kDefaultConfig, full_a(), 1.0, jobs());
  o.require(r.status == 0, "full generate exits 0 (" + fmtd(r.seconds, 1) + " s)");
  if (r.status != 0) return o;

  const json manifest = load_json(full_a() / "manifest.json");
  std::map<std::string, int> per_kind;
  int total = 0;
  for (const auto& rec : manifest["records"]) {
    ++per_kind[rec["kind"].get<std::string>()];
    ++total;
  }
  const std::map<std::string, int> expect{
      {"line", 2880}, {"horizontal-bar", 1592}, {"vertical-bar", 2880}, {"scatter", 2880}};
  for (const auto& [kind, n] : expect)
    o.require(per_kind[kind] == n, kind + " charts " + std::to_string(per_kind[kind]) + " == " + std::to_string(n));
  o.require(total == 10232, "total charts " + std::to_string(total) + " == 10232");
  o.require(manifest["totals"]["charts"] == 10232, "manifest totals.charts == 10232");
  std::size_t svgs = 0;
  for (const auto& e : fs::directory_iterator(full_a() / "charts")) svgs += e.path().extension() == ".svg";
  o.require(svgs == 10232, "chart files on disk " + std::to_string(svgs));

  // Desk scale on one worker.
  const fs::path desk = g_work / "desk";
  auto d = generate(kDefaultConfig, desk, 0.01, 1);
  o.require(d.status == 0 && d.seconds < 60.0, "count_scale 0.01 with --jobs 1 in " + fmtd(d.seconds, 2) + " s < 60 s");
  if (d.status != 0) return o;
  const json dm = load_json(desk / "manifest.json");
  const auto defaults = corpus::default_cell_counts();
  bool proportional = true;
  int desk_total = 0;
  for (const auto& cell : dm["cells"]) {
    const auto cat = templates::parse_category(cell["category"].get<std::string>());
    const auto kind = chart::parse_chart_kind(cell["kind"].get<std::string>());
    const int want = corpus::scaled_count(defaults.at({*cat, *kind}), 0.01);
    proportional = proportional && cell["charts"].get<int>() == want;
    desk_total += cell["charts"].get<int>();
  }
  o.require(proportional && dm["cells"].size() == defaults.size(),
            "every desk cell == floor(0.01 * full cell), " + std::to_string(desk_total) + " charts");
  return o;
}

// ---------------------------------------------------------------------------
// 2. Description statistics

Outcome description_stats() {
  Outcome o;
  auto r = generate(kDefaultConfig, mid(), 0.05, jobs());
  o.require(r.status == 0, "0.05-scale generate exits 0");
  if (r.status != 0) return o;
  const json manifest = load_json(mid() / "manifest.json");
  const std::size_t charts = manifest["records"].size();
  o.require(charts >= 500, std::to_string(charts) + " charts >= 500");

  double sentences = 0, words = 0, descriptions = 0;
  for (const auto& rec : manifest["records"]) {
    for (const auto& d : load_jsonl(mid() / rec["descriptions"].get<std::string>())) {
      sentences += static_cast<double>(d["sentences"].size());
      std::istringstream in(d["text"].get<std::string>());
      std::string w;
      while (in >> w) ++words;
      ++descriptions;
    }
  }
  const double ms = sentences / descriptions, mw = words / descriptions, dpc = descriptions / charts;
  o.require(ms >= 6 && ms <= 10, "mean sentences " + fmtd(ms) + " in [6, 10]");
  o.require(mw >= 110 && mw <= 170, "mean words " + fmtd(mw) + " in [110, 170]");
  o.require(dpc >= 2.0 && dpc <= 3.0, "descriptions per chart " + fmtd(dpc, 3) + " in [2.0, 3.0]");
  return o;
}

// ---------------------------------------------------------------------------
// 3. Trend fidelity

Outcome trend_fidelity() {
  Outcome o;
  for (auto c : trend::kAllTrendClasses) {
    const auto spec = trend::default_preset(c);
    int hits = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
      try {
        if (trend::classify_trend(trend::synth_trend_series(spec, derive_seed(31337, {s}))) == c) ++hits;
      } catch (const std::exception&) {
      }
    }
    o.require(hits >= 950, std::string(trend::to_string(c)) + " " + std::to_string(hits) + "/1000 >= 950");
  }

  double worst = 0;
  for (double mu : {-0.3, -0.05, 0.0, 0.05, 0.3, 1.1}) {
    for (double s0 : {1e-3, 1.0, 100.0, 7.5e9}) {
      trend::GbmParams p{s0, mu, 0.0, 40};
      const auto y = trend::gbm_path(p, 99);
      for (int i = 0; i < 40; ++i) {
        const double exact = s0 * std::exp(mu * i);
        worst = std::max(worst, std::abs(y[i] - exact) / exact);
      }
    }
  }
  std::ostringstream err;
  err << std::scientific << worst;
  o.require(worst <= 1e-12, "sigma = 0 worst relative error " + err.str() + " <= 1e-12");
  return o;
}

// ---------------------------------------------------------------------------
// 4. Meta correctness

bool in_canvas(const json& b, double W, double H) {
  const double x = b["x"], y = b["y"], w = b["w"], h = b["h"];
  return x >= 0 && y >= 0 && w >= 0 && h >= 0 && x + w <= W + 1e-9 && y + h <= H + 1e-9;
}

// Every object reached under a key ending in "bbox", plus plot_area.
void collect_boxes(const json& j, const std::string& key, std::vector<const json*>& out) {
  if (j.is_object()) {
    if ((key.size() >= 4 && key.compare(key.size() - 4, 4, "bbox") == 0) || key == "plot_area") out.push_back(&j);
    for (auto it = j.begin(); it != j.end(); ++it) collect_boxes(it.value(), it.key(), out);
  } else if (j.is_array()) {
    for (const auto& e : j) collect_boxes(e, key, out);
  }
}

struct MetaCheck {
  int points = 0, points_ok = 0, boxes = 0, boxes_ok = 0;
};

void check_meta_json(const json& m, MetaCheck& c) {
  const double W = m["canvas"]["width"], H = m["canvas"]["height"];
  const bool horizontal = m["chart_kind"] == "horizontal-bar";
  const json& axis = horizontal ? m["x_axis"] : m["y_axis"];
  const auto centre = [&](const json& t) {
    const json& b = t["bbox"];
    return horizontal ? b["x"].get<double>() + b["w"].get<double>() / 2
                      : b["y"].get<double>() + b["h"].get<double>() / 2;
  };
  const json& t0 = axis["ticks"].front();
  const json& t1 = axis["ticks"].back();
  const double slope = (centre(t1) - centre(t0)) / (t1["value"].get<double>() - t0["value"].get<double>());
  const double offset = centre(t0) - slope * t0["value"].get<double>();
  for (const auto& s : m["series"]) {
    for (const auto& p : s["points"]) {
      const double v = p["value"];
      const double canvas = horizontal ? p["canvas"]["x"].get<double>() : p["canvas"]["y"].get<double>();
      ++c.points;
      c.points_ok += std::abs(canvas - (offset + slope * v)) <= 0.5;
    }
  }
  std::vector<const json*> boxes;
  collect_boxes(m, "", boxes);
  for (const auto* b : boxes) {
    ++c.boxes;
    c.boxes_ok += in_canvas(*b, W, H);
  }
}

std::string small_config_text(const fs::path& out) {
  std::string text = "seed = 404\noutput_dir = " + out.string() + "\ncatalog = synthetic(60, 30)\n";
  for (const auto& [cell, n] : corpus::default_cell_counts())
    text += "cell." + std::string(templates::to_string(cell.first)) + "." +
            std::string(chart::to_string(cell.second)) + " = 2\n";
  return text;
}

using Fault = std::function<void(const fs::path&)>;

ojson load_ojson(const fs::path& p) { return ojson::parse(read_file(p)); }
void save_ojson(const fs::path& p, const ojson& j) { write_file(p, j.dump(2) + "\n"); }

void edit_meta(const fs::path& dir, int idx, const std::function<void(ojson&)>& f) {
  const fs::path p = dir / "meta" / (corpus::record_stem(idx) + ".json");
  auto j = load_ojson(p);
  f(j);
  save_ojson(p, j);
}

void edit_descriptions(const fs::path& dir, int idx, const std::function<void(std::vector<ojson>&)>& f) {
  const fs::path p = dir / "descriptions" / (corpus::record_stem(idx) + ".jsonl");
  std::vector<ojson> lines;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(ojson::parse(line));
  f(lines);
  std::string out;
  for (const auto& l : lines) out += l.dump() + "\n";
  write_file(p, out);
}

void rebuild_text(ojson& d) {
  std::string text;
  for (const auto& s : d["sentences"]) text += (text.empty() ? "" : " ") + s["text"].get<std::string>();
  d["text"] = text;
}

Outcome meta_correctness() {
  Outcome o;
  if (!fs::exists(mid() / "manifest.json")) {
    o.require(false, "0.05-scale corpus missing");
    return o;
  }
  const json manifest = load_json(mid() / "manifest.json");
  const auto& recs = manifest["records"];
  MetaCheck c;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto& rec = recs[i * recs.size() / 200];
    check_meta_json(load_json(mid() / rec["meta"].get<std::string>()), c);
  }
  o.require(c.points_ok == c.points, std::to_string(c.points_ok) + "/" + std::to_string(c.points) +
                                         " points round-trip within 0.5 over 200 charts");
  o.require(c.boxes_ok == c.boxes, std::to_string(c.boxes_ok) + "/" + std::to_string(c.boxes) + " boxes in canvas");

  auto v = run(kCli + " validate " + quote(mid()));
  o.require(v.status == 0 && v.output.find(" 0 violations") != std::string::npos,
            "validate clean on fresh corpus: " + v.output.substr(v.output.rfind('\n', v.output.size() - 2) + 1,
                                                                  std::string::npos));
  if (!o.notes.empty() && o.notes.back().back() == '\n') o.notes.back().pop_back();

  // Fault injection on copies of a small corpus.
  const fs::path base = g_work / "fault_base";
  const fs::path cfg = g_work / "fault.conf";
  write_file(cfg, small_config_text(base));
  auto g = run(kCli + " generate --config " + quote(cfg));
  o.require(g.status == 0, "fault base corpus generated");
  if (g.status != 0) return o;
  const json bm = load_json(base / "manifest.json");
  const int n = static_cast<int>(bm["records"].size());
  const auto kind_of = [&](int idx) { return bm["records"][idx]["kind"].get<std::string>(); };

  struct Case {
    std::string name;
    int record;  // -1 corpus level
    Fault apply;
  };
  std::vector<Case> cases;
  auto meta_case = [&](std::string name, int idx, std::function<void(ojson&)> f) {
    cases.push_back({std::move(name), idx, [idx, f](const fs::path& d) { edit_meta(d, idx, f); }});
  };
  auto desc_case = [&](std::string name, int idx, std::function<void(std::vector<ojson>&)> f) {
    cases.push_back({std::move(name), idx, [idx, f](const fs::path& d) { edit_descriptions(d, idx, f); }});
  };
  auto file = [](const fs::path& d, const char* sub, int idx, const char* ext) {
    return d / sub / (corpus::record_stem(idx) + ext);
  };

  meta_case("title bbox x = -5", 1, [](ojson& m) { m["title"]["bbox"]["x"] = -5.0; });
  {
    const int idx = 2;
    const bool h = kind_of(idx) == "horizontal-bar";
    meta_case("point shifted 5 units off its value", idx, [h](ojson& m) {
      auto& c = m["series"][0]["points"][0]["canvas"];
      if (h) c["x"] = c["x"].get<double>() + 5;
      else c["y"] = c["y"].get<double>() - 5;
    });
  }
  meta_case("plot area wider than canvas", 3, [](ojson& m) { m["plot_area"]["w"] = 1000.0; });
  meta_case("tick bbox below canvas", 4, [](ojson& m) { m["y_axis"]["ticks"][0]["bbox"]["y"] = 500.0; });
  meta_case("negative legend bbox", 5, [](ojson& m) { m["legend"]["bbox"]["x"] = -20.0; });
  meta_case("meta image_index changed", 6, [](ojson& m) { m["image_index"] = 9999; });
  cases.push_back({"meta file deleted", 7, [&](const fs::path& d) { fs::remove(file(d, "meta", 7, ".json")); }});
  cases.push_back({"meta file truncated", 8, [&](const fs::path& d) {
                     auto p = file(d, "meta", 8, ".json");
                     auto t = read_file(p);
                     write_file(p, t.substr(0, t.size() / 2));
                   }});
  cases.push_back({"svg deleted", 9, [&](const fs::path& d) { fs::remove(file(d, "charts", 9, ".svg")); }});
  cases.push_back({"svg truncated", 10, [&](const fs::path& d) {
                     auto p = file(d, "charts", 10, ".svg");
                     auto t = read_file(p);
                     write_file(p, t.substr(0, t.size() / 2));
                   }});
  desc_case("residual slot in a sentence", 11, [](std::vector<ojson>& ds) {
    auto& s = ds[0]["sentences"][0];
    s["text"] = s["text"].get<std::string>() + " See {y_label}.";
    rebuild_text(ds[0]);
  });
  desc_case("moves out of order", 12, [](std::vector<ojson>& ds) {
    auto& ss = ds[0]["sentences"];
    std::swap(ss[0], ss[ss.size() - 1]);
    rebuild_text(ds[0]);
  });
  desc_case("unsupported number", 13, [](std::vector<ojson>& ds) {
    auto& s = ds[0]["sentences"][0];
    s["text"] = s["text"].get<std::string>() + " It reached 98765 in 1949.";
    rebuild_text(ds[0]);
  });
  cases.push_back({"description file emptied", 14,
                   [&](const fs::path& d) { write_file(file(d, "descriptions", 14, ".jsonl"), ""); }});
  desc_case("description line dropped", 15, [](std::vector<ojson>& ds) { ds.pop_back(); });
  desc_case("description image_index changed", 16, [](std::vector<ojson>& ds) { ds[0]["image_index"] = 777; });
  desc_case("flat text disagrees with sentences", 17,
            [](std::vector<ojson>& ds) { ds[0]["text"] = ds[0]["text"].get<std::string>() + " Extra."; });
  cases.push_back({"manifest totals altered", -1, [](const fs::path& d) {
                     auto m = load_ojson(d / "manifest.json");
                     m["totals"]["charts"] = m["totals"]["charts"].get<int>() + 1;
                     save_ojson(d / "manifest.json", m);
                   }});
  cases.push_back({"stray file in meta/", -1, [](const fs::path& d) { write_file(d / "meta" / "notes.txt", "x\n"); }});
  meta_case("chart_kind changed", 19, [](ojson& m) {
    m["chart_kind"] = m["chart_kind"] == "scatter" ? "line" : "scatter";
  });

  int flagged = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& fc = cases[k];
    if (fc.record >= n) continue;
    const fs::path copy = g_work / ("fault_" + std::to_string(k));
    fs::remove_all(copy);
    fs::copy(base, copy, fs::copy_options::recursive);
    fc.apply(copy);
    auto res = run(kCli + " validate " + quote(copy));
    const std::string tag = fc.record >= 0 ? "record " + corpus::record_stem(fc.record) + ":" : "corpus:";
    const bool ok = res.status != 0 && res.output.find(tag) != std::string::npos;
    flagged += ok;
    if (!ok) o.require(false, "fault not attributed: " + fc.name);
    fs::remove_all(copy);
  }
  o.require(flagged == static_cast<int>(cases.size()) && cases.size() == 20,
            std::to_string(flagged) + "/" + std::to_string(cases.size()) + " injected faults flagged at the right record");
  return o;
}

// ---------------------------------------------------------------------------
// 5. Structure superiority

Outcome structure_superiority() {
  Outcome o;
  if (!fs::exists(mid() / "manifest.json")) {
    o.require(false, "0.05-scale corpus missing");
    return o;
  }
  const json manifest = load_json(mid() / "manifest.json");
  const auto& bank = templates::builtin_bank();
  double sb = 0, sr = 0, bb = 0, br = 0;
  int charts = 0, structured_valid = 0, baseline_fail = 0;
  for (std::size_t i = 0; i < manifest["records"].size(); i += 4) {
    const auto& rec = manifest["records"][i];
    const auto meta = chart::meta_from_json(load_json(mid() / rec["meta"].get<std::string>()));
    const auto facts = narrate::extract_facts(meta);
    const std::uint64_t s = derive_seed(5150, {static_cast<std::uint64_t>(meta.image_index)});
    std::vector<metrics::Tokens> refs;
    for (std::uint64_t k = 0; k < 30; ++k) {
      Rng rng(derive_seed(s, {100 + k}));
      refs.push_back(metrics::tokenize(
          narrate::generate_description(facts, bank, meta.image_index, 0, rng).text()));
    }
    Rng hs(derive_seed(s, {1})), hb(derive_seed(s, {2}));
    const auto structured = narrate::generate_description(facts, bank, meta.image_index, 0, hs);
    const auto baseline = narrate::baseline_generate(facts, bank, meta.image_index, hb);
    const auto ts = metrics::tokenize(structured.text()), tb = metrics::tokenize(baseline.text());
    sb += metrics::bleu(ts, refs);
    sr += metrics::rouge_l(ts, refs);
    bb += metrics::bleu(tb, refs);
    br += metrics::rouge_l(tb, refs);
    structured_valid += narrate::is_valid_move_sequence(structured.moves());
    baseline_fail += !narrate::is_valid_move_sequence(baseline.moves());
    ++charts;
  }
  o.require(charts >= 100, std::to_string(charts) + " charts >= 100");
  sb /= charts, sr /= charts, bb /= charts, br /= charts;
  o.require(sb > bb, "BLEU-4 structured " + fmtd(sb) + " > baseline " + fmtd(bb));
  o.require(sr > br, "ROUGE-L structured " + fmtd(sr) + " > baseline " + fmtd(br));
  o.require(structured_valid == charts,
            std::to_string(structured_valid) + "/" + std::to_string(charts) + " structured pass the order check");
  const double fail_rate = static_cast<double>(baseline_fail) / charts;
  o.require(fail_rate >= 0.30, "baseline order-check failure rate " + fmtd(100 * fail_rate, 1) + "% >= 30%");
  return o;
}

// ---------------------------------------------------------------------------
// 6. Metric oracles

Outcome metric_oracles() {
  Outcome o;
  using metrics::tokenize;
  const double b = metrics::bleu(tokenize("the cat sat"), {tokenize("the cat sat down")});
  o.require(std::abs(b - 71.65) <= 0.01, "BLEU brevity case " + fmtd(b, 4) + " vs 71.65");
  o.require(std::abs(b - 100.0 * std::exp(1.0 - 4.0 / 3.0)) <= 1e-9, "BLEU brevity case equals 100 e^(1-4/3)");
  const double r = metrics::rouge_l(tokenize("a b c"), {tokenize("a c")});
  o.require(std::abs(r - 80.0) <= 0.01, "ROUGE-L case " + fmtd(r, 4) + " vs 80.0");

  Rng rng(777);
  auto random_tokens = [&](int lo, int hi) {
    metrics::Tokens t;
    const int n = rng.between(lo, hi);
    for (int i = 0; i < n; ++i) t.push_back("w" + std::to_string(rng.below(12)));
    return t;
  };
  int identity = 0, disjoint = 0, permutation = 0;
  for (int i = 0; i < 50; ++i) {
    const auto h = random_tokens(1, 20);
    identity += metrics::bleu(h, {h}) == 100.0 && metrics::rouge_l(h, {h}) == 100.0 &&
                metrics::rouge_n(h, {h}, 1) == 100.0 && metrics::rouge_n(h, {h}, 2) == 100.0;
    metrics::Tokens z;
    for (const auto& t : h) z.push_back("z" + t);
    disjoint += metrics::bleu(h, {z}) == 0.0 && metrics::rouge_l(h, {z}) == 0.0 &&
                metrics::rouge_n(h, {z}, 1) == 0.0 && metrics::rouge_n(h, {z}, 2) == 0.0;
    std::vector<metrics::Tokens> refs;
    for (int k = 0; k < 5; ++k) refs.push_back(random_tokens(1, 20));
    auto perm = refs;
    std::rotate(perm.begin(), perm.begin() + 2, perm.end());
    std::swap(perm[0], perm[3]);
    permutation += metrics::bleu(h, refs) == metrics::bleu(h, perm) &&
                   metrics::rouge_l(h, refs) == metrics::rouge_l(h, perm) &&
                   metrics::rouge_n(h, refs, 1) == metrics::rouge_n(h, perm, 1) &&
                   metrics::rouge_n(h, refs, 2) == metrics::rouge_n(h, perm, 2);
  }
  o.require(identity == 50, "identity = 100 on " + std::to_string(identity) + "/50");
  o.require(disjoint == 50, "disjoint = 0 on " + std::to_string(disjoint) + "/50");
  o.require(permutation == 50, "reference-permutation invariance on " + std::to_string(permutation) + "/50");
  return o;
}

// ---------------------------------------------------------------------------
// 7. Determinism

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  return out;
}

Outcome determinism() {
  Outcome o;
  if (!fs::exists(full_a() / "manifest.json")) {
    o.require(false, "first full corpus missing");
    return o;
  }
  auto r = generate(kDefaultConfig, full_b(), 1.0, std::max(2, jobs() + 1));
  o.require(r.status == 0, "second full generate (different worker count) exits 0");
  if (r.status != 0) return o;
  // The manifest echoes neither output_dir nor job count, so whole trees compare.
  const auto a = tree(full_a()), b = tree(full_b());
  std::size_t differing = 0;
  for (const auto& [path, bytes] : a) {
    auto it = b.find(path);
    differing += it == b.end() || it->second != bytes;
  }
  o.require(a.size() == b.size() && differing == 0,
            std::to_string(a.size()) + " files byte-identical across runs (" + std::to_string(differing) + " differ)");

  auto config = corpus::load_config(kDefaultConfig);
  config.count_scale = 1.0;
  const auto ctx = corpus::make_context(config);
  int mismatched = 0, checked = 0;
  for (const auto& plan : corpus::plan_records(config)) {
    const auto rec = corpus::generate_record(ctx, plan);
    const std::string stem = corpus::record_stem(plan.image_index);
    mismatched += rec.files.svg != a.at("charts/" + stem + ".svg") ||
                  rec.files.meta != a.at("meta/" + stem + ".json") ||
                  rec.files.descriptions != a.at("descriptions/" + stem + ".jsonl");
    ++checked;
  }
  o.require(mismatched == 0, std::to_string(checked - mismatched) + "/" + std::to_string(checked) +
                                 " records regenerated in isolation match their files");
  return o;
}

// ---------------------------------------------------------------------------
// 8. No hallucinated numbers

std::string strip_edges(std::string t) {
  const std::string edge = ".,;:!?()\"'%";
  while (!t.empty() && edge.find(t.front()) != std::string::npos) t.erase(t.begin());
  while (!t.empty() && edge.find(t.back()) != std::string::npos) t.pop_back();
  return t;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool has_digit(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

// Fact values recomputed from the meta file alone.
struct OracleFacts {
  std::set<std::string> strings;
  std::vector<double> values;
};

OracleFacts oracle_facts(const json& m) {
  OracleFacts f;
  auto add_text = [&](const std::string& s) {
    for (const auto& w : words(s)) f.strings.insert(lower(strip_edges(w)));
  };
  add_text(m["title"]["text"]);
  add_text(m["x_label"]["text"]);
  add_text(m["y_label"]["text"]);
  for (const auto& k : {"indicator", "unit", "entity_kind"})
    if (m["data"].contains(k) && m["data"][k].is_string()) add_text(m["data"][k]);
  std::size_t n_labels = 0;
  for (const auto& s : m["series"]) {
    add_text(s["name"]);
    std::vector<double> y;
    for (const auto& p : s["points"]) {
      add_text(p["x_label"]);
      y.push_back(p["value"]);
    }
    n_labels = std::max(n_labels, y.size());
    double mean = 0;
    for (double v : y) mean += v / static_cast<double>(y.size());
    f.values.insert(f.values.end(), {y.front(), y.back(), *std::max_element(y.begin(), y.end()),
                                     *std::min_element(y.begin(), y.end()), mean, std::abs(y.back() - y.front())});
  }
  f.strings.insert(std::to_string(n_labels));
  return f;
}

bool two_sig_figs(double p) {
  if (p == 0) return true;
  const double e = std::floor(std::log10(std::abs(p)));
  const double q = std::abs(p) / std::pow(10.0, e - 1);
  return std::abs(q - std::round(q)) < 1e-6;
}

bool near_fact(double p, const std::vector<double>& values) {
  for (double v : values) {
    if (v == 0) {
      if (p == 0) return true;
      continue;
    }
    const double half = 0.5 * std::pow(10.0, std::floor(std::log10(std::abs(v))) - 1);
    if (std::abs(p - v) <= half * (1 + 1e-9)) return true;
  }
  return false;
}

bool parse_plain_number(const std::string& t, double& out) {
  std::size_t i = 0, digits = 0;
  if (i < t.size() && t[i] == '-') ++i;
  bool dot = false;
  for (; i < t.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(t[i]))) ++digits;
    else if (t[i] == '.' && !dot) dot = true;
    else return false;
  }
  if (digits == 0) return false;
  out = std::stod(t);
  return true;
}

Outcome no_hallucinated_numbers() {
  Outcome o;
  if (!fs::exists(mid() / "manifest.json")) {
    o.require(false, "0.05-scale corpus missing");
    return o;
  }
  const json manifest = load_json(mid() / "manifest.json");
  const std::map<std::string, double> scale{
      {"million", 1e6}, {"billion", 1e9}, {"trillion", 1e12}, {"quadrillion", 1e15}};
  int descriptions = 0, tokens = 0, matched = 0;
  std::vector<std::string> misses;
  for (const auto& rec : manifest["records"]) {
    if (descriptions >= 1000) break;
    const auto facts = oracle_facts(load_json(mid() / rec["meta"].get<std::string>()));
    for (const auto& d : load_jsonl(mid() / rec["descriptions"].get<std::string>())) {
      if (descriptions >= 1000) break;
      ++descriptions;
      const auto ws = words(d["text"].get<std::string>());
      for (std::size_t i = 0; i < ws.size(); ++i) {
        const std::string t = strip_edges(ws[i]);
        if (!has_digit(t)) continue;
        ++tokens;
        bool ok = facts.strings.count(lower(t)) > 0;
        double p = 0;
        if (!ok && parse_plain_number(t, p)) {
          if (i + 1 < ws.size()) {
            auto it = scale.find(lower(strip_edges(ws[i + 1])));
            if (it != scale.end()) p *= it->second;
          }
          ok = two_sig_figs(p) && near_fact(p, facts.values);
        }
        matched += ok;
        if (!ok && misses.size() < 5) misses.push_back(rec["meta"].get<std::string>() + ": " + t);
      }
    }
  }
  o.require(descriptions == 1000, std::to_string(descriptions) + " descriptions scanned");
  o.require(matched == tokens && tokens > 0,
            std::to_string(matched) + "/" + std::to_string(tokens) + " digit-bearing tokens reverse-match a fact");
  for (const auto& m : misses) o.require(false, "unmatched " + m);
  return o;
}

}  // namespace

int main() {
  g_work = fs::temp_directory_path() / ("autochart_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 corpus shape", corpus_shape},
      {"2 description statistics", description_stats},
      {"3 trend fidelity", trend_fidelity},
      {"4 meta-information correctness", meta_correctness},
      {"5 structure superiority", structure_superiority},
      {"6 metric oracle equivalence", metric_oracles},
      {"7 determinism", determinism},
      {"8 no hallucinated numbers", no_hallucinated_numbers},
  };
  std::vector<std::string> summary;
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    for (const auto& n : o.notes) std::cout << "  [" << name.substr(0, 1) << "] " << n << "\n";
    summary.push_back(std::string(o.pass ? "PASS" : "FAIL") + "  " + name);
    all = all && o.pass;
    std::cout.flush();
  }
  std::cout << "\n";
  for (const auto& s : summary) std::cout << s << "\n";
  fs::remove_all(g_work);
  return all ? 0 : 1;
}
