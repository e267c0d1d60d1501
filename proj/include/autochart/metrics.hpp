#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace autochart::metrics {

using Tokens = std::vector<std::string>;

/// ASCII lower-casing, whitespace split, and every ASCII punctuation character
/// at either edge of a chunk split off as its own token. Inner punctuation
/// ("1.2", "kilowatt-hours") and digit-letter runs ("300g") stay intact.
Tokens tokenize(std::string_view text);

/// Sentence BLEU on a 0-100 scale: clipped n-gram precisions up to max_n with
/// uniform weights, brevity penalty against the shortest reference length.
/// Orders above 1 with no match get add-one smoothing; no unigram match scores 0.
double bleu(const Tokens& hyp, const std::vector<Tokens>& refs, int max_n = 4);

/// Corpus BLEU: counts summed over all pairs before the precisions are formed.
double corpus_bleu(const std::vector<Tokens>& hyps, const std::vector<std::vector<Tokens>>& refs,
                   int max_n = 4);

/// ROUGE-N F1 against the best reference, 0-100. A hypothesis and reference both
/// shorter than n score 100 when identical, 0 otherwise.
double rouge_n(const Tokens& hyp, const std::vector<Tokens>& refs, int n);
/// ROUGE-L F1 from the longest common subsequence, best reference, 0-100.
double rouge_l(const Tokens& hyp, const std::vector<Tokens>& refs);

std::size_t lcs_length(const Tokens& a, const Tokens& b);

enum class RougeVariant { kRouge1, kRouge2, kRougeL };

std::string_view to_string(RougeVariant v);
std::optional<RougeVariant> parse_rouge_variant(std::string_view name);

struct EvalPair {
  std::string kind;  // chart kind name
  std::string hypothesis;
  std::vector<std::string> references;
};

struct ReportRow {
  std::string group;  // bar, line, scatter, overall
  std::size_t pairs = 0;
  double bleu = 0;
  double rouge = 0;
};

struct Report {
  RougeVariant rouge_variant = RougeVariant::kRougeL;
  std::vector<ReportRow> rows;
};

/// Unweighted per-pair means grouped by chart kind; both bar kinds form the
/// "bar" row. Throws kEmptyReport for an empty set.
Report corpus_report(const std::vector<EvalPair>& pairs,
                     RougeVariant variant = RougeVariant::kRougeL);

std::string format_report(const Report& r);
nlohmann::ordered_json report_to_json(const Report& r);

}  // namespace autochart::metrics
