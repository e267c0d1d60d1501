#include "autochart/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "autochart/error.hpp"

namespace autochart::metrics {

namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(const Tokens& t, int n) {
  NgramCounts out;
  if (n <= 0 || t.size() < static_cast<std::size_t>(n)) return out;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= t.size(); ++i)
    ++out[std::vector<std::string>(t.begin() + static_cast<std::ptrdiff_t>(i),
                                   t.begin() + static_cast<std::ptrdiff_t>(i) + n)];
  return out;
}

struct BleuStats {
  std::vector<long long> matches;
  std::vector<long long> totals;
  long long hyp_len = 0;
  long long ref_len = 0;
};

void accumulate(BleuStats& st, const Tokens& hyp, const std::vector<Tokens>& refs, int max_n) {
  for (int n = 1; n <= max_n; ++n) {
    const NgramCounts h = ngrams(hyp, n);
    NgramCounts max_ref;
    for (const auto& r : refs)
      for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
    long long m = 0, t = 0;
    for (const auto& [g, c] : h) {
      t += c;
      const auto it = max_ref.find(g);
      if (it != max_ref.end()) m += std::min(c, it->second);
    }
    st.matches[static_cast<std::size_t>(n - 1)] += m;
    st.totals[static_cast<std::size_t>(n - 1)] += t;
  }
  const long long c = static_cast<long long>(hyp.size());
  // Shortest reference length: adding a reference can then never lower the score.
  long long shortest = -1;
  for (const auto& r : refs) {
    const long long len = static_cast<long long>(r.size());
    if (shortest < 0 || len < shortest) shortest = len;
  }
  st.hyp_len += c;
  st.ref_len += shortest;
}

double bleu_from(const BleuStats& st, int max_n) {
  if (st.hyp_len == 0 || st.matches[0] == 0) return 0.0;
  double log_sum = 0;
  for (int n = 0; n < max_n; ++n) {
    const auto m = static_cast<double>(st.matches[static_cast<std::size_t>(n)]);
    const auto t = static_cast<double>(st.totals[static_cast<std::size_t>(n)]);
    const double p = m > 0 ? m / t : 1.0 / (t + 1.0);
    log_sum += std::log(p) / max_n;
  }
  const double c = static_cast<double>(st.hyp_len);
  const double r = static_cast<double>(st.ref_len);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return 100.0 * bp * std::exp(log_sum);
}

double f1(double overlap, double hyp_total, double ref_total) {
  if (overlap <= 0 || hyp_total <= 0 || ref_total <= 0) return 0.0;
  const double p = overlap / hyp_total;
  const double r = overlap / ref_total;
  return 2 * p * r / (p + r);
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  const auto punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    std::string chunk(text.substr(i, j - i));
    for (char& c : chunk) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::size_t lo = 0, hi = chunk.size();
    while (lo < hi && punct(chunk[lo])) ++lo;
    while (hi > lo && punct(chunk[hi - 1])) --hi;
    for (std::size_t k = 0; k < lo; ++k) out.emplace_back(1, chunk[k]);
    if (hi > lo) out.push_back(chunk.substr(lo, hi - lo));
    for (std::size_t k = hi; k < chunk.size(); ++k) out.emplace_back(1, chunk[k]);
    i = j;
  }
  return out;
}

double bleu(const Tokens& hyp, const std::vector<Tokens>& refs, int max_n) {
  if (max_n < 1) throw Error(ErrorKind::kParameter, "BLEU needs max_n >= 1");
  if (refs.empty()) throw Error(ErrorKind::kParameter, "BLEU needs at least one reference");
  BleuStats st{std::vector<long long>(static_cast<std::size_t>(max_n)),
               std::vector<long long>(static_cast<std::size_t>(max_n))};
  accumulate(st, hyp, refs, max_n);
  return bleu_from(st, max_n);
}

double corpus_bleu(const std::vector<Tokens>& hyps, const std::vector<std::vector<Tokens>>& refs,
                   int max_n) {
  if (max_n < 1) throw Error(ErrorKind::kParameter, "BLEU needs max_n >= 1");
  if (hyps.size() != refs.size())
    throw Error(ErrorKind::kParameter, "corpus BLEU needs one reference set per hypothesis");
  BleuStats st{std::vector<long long>(static_cast<std::size_t>(max_n)),
               std::vector<long long>(static_cast<std::size_t>(max_n))};
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (refs[i].empty()) throw Error(ErrorKind::kParameter, "BLEU needs at least one reference");
    accumulate(st, hyps[i], refs[i], max_n);
  }
  return bleu_from(st, max_n);
}

double rouge_n(const Tokens& hyp, const std::vector<Tokens>& refs, int n) {
  if (n < 1) throw Error(ErrorKind::kParameter, "ROUGE-N needs n >= 1");
  const NgramCounts h = ngrams(hyp, n);
  long long h_total = 0;
  for (const auto& [g, c] : h) h_total += c;
  double best = 0;
  for (const auto& r : refs) {
    const NgramCounts rc = ngrams(r, n);
    long long r_total = 0, overlap = 0;
    for (const auto& [g, c] : rc) {
      r_total += c;
      const auto it = h.find(g);
      if (it != h.end()) overlap += std::min(c, it->second);
    }
    // Both sides shorter than n: nothing to count, so compare the sequences whole.
    if (h_total == 0 && r_total == 0) {
      if (!hyp.empty() && hyp == r) return 100.0;
      continue;
    }
    best = std::max(best, f1(static_cast<double>(overlap), static_cast<double>(h_total),
                             static_cast<double>(r_total)));
  }
  return 100.0 * best;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const Tokens& hyp, const std::vector<Tokens>& refs) {
  double best = 0;
  for (const auto& r : refs)
    best = std::max(best, f1(static_cast<double>(lcs_length(hyp, r)), static_cast<double>(hyp.size()),
                             static_cast<double>(r.size())));
  return 100.0 * best;
}

std::string_view to_string(RougeVariant v) {
  switch (v) {
    case RougeVariant::kRouge1: return "rouge-1";
    case RougeVariant::kRouge2: return "rouge-2";
    case RougeVariant::kRougeL: return "rouge-l";
  }
  return "rouge-l";
}

std::optional<RougeVariant> parse_rouge_variant(std::string_view name) {
  for (auto v : {RougeVariant::kRouge1, RougeVariant::kRouge2, RougeVariant::kRougeL})
    if (to_string(v) == name) return v;
  return std::nullopt;
}

Report corpus_report(const std::vector<EvalPair>& pairs, RougeVariant variant) {
  if (pairs.empty()) throw Error(ErrorKind::kEmptyReport, "no pairs to score");
  Report report;
  report.rouge_variant = variant;
  const std::vector<std::string> groups = {"bar", "line", "scatter", "overall"};
  std::map<std::string, ReportRow> rows;
  for (const auto& g : groups) rows[g].group = g;
  for (const auto& p : pairs) {
    const Tokens hyp = tokenize(p.hypothesis);
    std::vector<Tokens> refs;
    for (const auto& r : p.references) refs.push_back(tokenize(r));
    if (refs.empty()) throw Error(ErrorKind::kParameter, "pair without references");
    const double b = bleu(hyp, refs);
    double r = 0;
    switch (variant) {
      case RougeVariant::kRouge1: r = rouge_n(hyp, refs, 1); break;
      case RougeVariant::kRouge2: r = rouge_n(hyp, refs, 2); break;
      case RougeVariant::kRougeL: r = rouge_l(hyp, refs); break;
    }
    std::string group = p.kind;
    if (group == "vertical-bar" || group == "horizontal-bar") group = "bar";
    for (const auto& g : {group, std::string("overall")}) {
      auto it = rows.find(g);
      if (it == rows.end()) continue;
      it->second.pairs++;
      it->second.bleu += b;
      it->second.rouge += r;
    }
  }
  for (const auto& g : groups) {
    ReportRow row = rows[g];
    if (row.pairs > 0) {
      row.bleu /= static_cast<double>(row.pairs);
      row.rouge /= static_cast<double>(row.pairs);
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string format_report(const Report& r) {
  std::string out = fmt::format("{:<8} {:>6} {:>8} {:>8}\n", "kind", "pairs", "BLEU",
                                r.rouge_variant == RougeVariant::kRougeL   ? "ROUGE-L"
                                : r.rouge_variant == RougeVariant::kRouge1 ? "ROUGE-1"
                                                                           : "ROUGE-2");
  for (const auto& row : r.rows) {
    if (row.pairs == 0) out += fmt::format("{:<8} {:>6} {:>8} {:>8}\n", row.group, 0, "-", "-");
    else out += fmt::format("{:<8} {:>6} {:>8.2f} {:>8.2f}\n", row.group, row.pairs, row.bleu, row.rouge);
  }
  return out;
}

nlohmann::ordered_json report_to_json(const Report& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json j{{"group", row.group}, {"pairs", row.pairs}};
    if (row.pairs > 0) {
      j["bleu"] = row.bleu;
      j["rouge"] = row.rouge;
    } else {
      j["bleu"] = nullptr;
      j["rouge"] = nullptr;
    }
    rows.push_back(std::move(j));
  }
  return nlohmann::ordered_json{{"rouge_variant", to_string(r.rouge_variant)}, {"rows", std::move(rows)}};
}

}  // namespace autochart::metrics
