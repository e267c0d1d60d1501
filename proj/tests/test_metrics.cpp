#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "autochart/error.hpp"
#include "autochart/metrics.hpp"
#include "autochart/rng.hpp"

using namespace autochart;
using namespace autochart::metrics;

namespace {

Tokens T(std::string_view s) { return tokenize(s); }

// Exhaustive LCS: longest subsequence of `a` that is also a subsequence of `b`.
std::size_t brute_lcs(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
    Tokens sub;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (mask & (1u << i)) sub.push_back(a[i]);
    std::size_t j = 0;
    for (const auto& t : b)
      if (j < sub.size() && sub[j] == t) ++j;
    if (j == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

Tokens random_tokens(Rng& rng, int vocab, int lo, int hi) {
  Tokens out;
  const int n = rng.between(lo, hi);
  for (int i = 0; i < n; ++i) out.push_back("w" + std::to_string(rng.below(static_cast<std::uint64_t>(vocab))));
  return out;
}

}  // namespace

TEST(Tokenize, Examples) {
  EXPECT_EQ(T("The cat, sat."), (Tokens{"the", "cat", ",", "sat", "."}));
  EXPECT_TRUE(T("").empty());
  EXPECT_TRUE(T("   \t ").empty());
  EXPECT_EQ(T("about 300g"), (Tokens{"about", "300g"}));
  EXPECT_EQ(T("\"Rice (kg)\" rose 1.2 kilowatt-hours!"),
            (Tokens{"\"", "rice", "(", "kg", ")", "\"", "rose", "1.2", "kilowatt-hours", "!"}));
}

TEST(Bleu, BrevityPenaltyExample) {
  // c = 3, r = 4, every precision 1 (no 4-gram in the hypothesis): 100 * e^(1 - 4/3).
  const double expect = 100.0 * std::exp(1.0 - 4.0 / 3.0);
  EXPECT_NEAR(expect, 71.65, 0.01);
  EXPECT_NEAR(bleu(T("the cat sat"), {T("the cat sat down")}), expect, 1e-9);
  EXPECT_NEAR(bleu(T("the cat sat"), {T("the cat sat down")}), 71.65, 0.01);
}

TEST(Bleu, SmoothedExample) {
  // p1 = 5/6, p2 = 3/5, p3 = 1/4, p4 = 0/3 smoothed to 1/4, c = r = 6.
  const double expect = 100.0 * std::pow(5.0 / 6 * 3.0 / 5 * 1.0 / 4 * 1.0 / 4, 0.25);
  EXPECT_NEAR(bleu(T("the cat sat on the mat"), {T("the cat is on the mat")}), expect, 1e-9);
}

TEST(Bleu, Edges) {
  EXPECT_DOUBLE_EQ(bleu(T("a b c d e"), {T("a b c d e")}), 100.0);
  EXPECT_DOUBLE_EQ(bleu(T("a b"), {T("c d")}), 0.0);
  EXPECT_DOUBLE_EQ(bleu({}, {T("c d")}), 0.0);
  EXPECT_THROW(bleu(T("a"), {}), Error);
  EXPECT_THROW(bleu(T("a"), {T("a")}, 0), Error);
}

TEST(Bleu, ClippedCounts) {
  // "the the the" against "the cat": unigram precision clipped to 1/3.
  const double expect = 100.0 * std::pow(1.0 / 3 * 1.0 / 3 * 1.0 / 2 * 1.0, 0.25);
  EXPECT_NEAR(bleu(T("the the the"), {T("the cat")}), expect, 1e-9);
}

TEST(Rouge, LcsExample) {
  // LCS("a b c", "a c") = 2, P = 2/3, R = 1, F1 = 0.8.
  EXPECT_NEAR(rouge_l(T("a b c"), {T("a c")}), 80.0, 0.01);
  EXPECT_EQ(lcs_length(T("a b c"), T("a c")), 2u);
}

TEST(Rouge, Edges) {
  EXPECT_DOUBLE_EQ(rouge_l(T("x y z"), {T("x y z")}), 100.0);
  EXPECT_DOUBLE_EQ(rouge_n(T("x y z"), {T("x y z")}, 1), 100.0);
  EXPECT_DOUBLE_EQ(rouge_n(T("x y z"), {T("x y z")}, 3), 100.0);
  EXPECT_DOUBLE_EQ(rouge_n(T("x y"), {T("p q")}, 1), 0.0);
  EXPECT_DOUBLE_EQ(rouge_l({}, {T("p q")}), 0.0);
  EXPECT_DOUBLE_EQ(rouge_l(T("p"), {}), 0.0);
  EXPECT_DOUBLE_EQ(rouge_n(T("x"), {T("x")}, 2), 100.0);
  EXPECT_DOUBLE_EQ(rouge_n(T("x"), {T("y")}, 2), 0.0);
  EXPECT_DOUBLE_EQ(rouge_n(T("x"), {T("y"), T("x")}, 2), 100.0);
  // Bigram overlap 1 of 2 in both directions.
  EXPECT_NEAR(rouge_n(T("a b c"), {T("a b d")}, 2), 50.0, 1e-9);
}

TEST(Rouge, LcsAgreesWithBruteForce) {
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    auto a = random_tokens(rng, 4, 0, 10);
    auto b = random_tokens(rng, 4, 0, 12);
    EXPECT_EQ(lcs_length(a, b), brute_lcs(a, b)) << i;
  }
}

TEST(Properties, FiftyCaseSuite) {
  Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    auto h = random_tokens(rng, 12, 1, 20);
    EXPECT_DOUBLE_EQ(bleu(h, {h}), 100.0) << i;
    EXPECT_DOUBLE_EQ(rouge_l(h, {h}), 100.0) << i;
    EXPECT_DOUBLE_EQ(rouge_n(h, {h}, 1), 100.0) << i;

    Tokens disjoint;
    for (const auto& t : h) disjoint.push_back("z" + t);
    EXPECT_DOUBLE_EQ(bleu(h, {disjoint}), 0.0) << i;
    EXPECT_DOUBLE_EQ(rouge_l(h, {disjoint}), 0.0) << i;
    EXPECT_DOUBLE_EQ(rouge_n(h, {disjoint}, 2), 0.0) << i;

    std::vector<Tokens> refs;
    for (int k = 0; k < 4; ++k) refs.push_back(random_tokens(rng, 12, 1, 20));
    const double b = bleu(h, refs), l = rouge_l(h, refs), r1 = rouge_n(h, refs, 1);
    auto perm = refs;
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[0], perm[2]);
    EXPECT_DOUBLE_EQ(bleu(h, perm), b) << i;
    EXPECT_DOUBLE_EQ(rouge_l(h, perm), l) << i;
    EXPECT_DOUBLE_EQ(rouge_n(h, perm, 1), r1) << i;

    for (double v : {b, l, r1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 100.0);
    }

    // Adding a reference never lowers a score.
    auto more = refs;
    more.push_back(random_tokens(rng, 12, 1, 20));
    EXPECT_GE(bleu(h, more), b - 1e-9) << i;
    EXPECT_GE(rouge_l(h, more), l - 1e-9) << i;
    EXPECT_GE(rouge_n(h, more, 1), r1 - 1e-9) << i;
  }
}

TEST(CorpusBleu, PoolsCounts) {
  std::vector<Tokens> hyps{T("the cat sat"), T("a dog ran home")};
  std::vector<std::vector<Tokens>> refs{{T("the cat sat")}, {T("a dog ran home")}};
  EXPECT_DOUBLE_EQ(corpus_bleu(hyps, refs), 100.0);
  refs.pop_back();
  EXPECT_THROW(corpus_bleu(hyps, refs), Error);
}

TEST(Report, IdenticalPairsScoreFull) {
  std::vector<EvalPair> pairs{{"line", "the line rose", {"the line rose"}},
                              {"vertical-bar", "bars are tall here", {"bars are tall here"}},
                              {"horizontal-bar", "bars lie flat", {"bars lie flat"}},
                              {"scatter", "dots spread out", {"dots spread out"}}};
  auto r = corpus_report(pairs);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].group, "bar");
  EXPECT_EQ(r.rows[0].pairs, 2u);
  EXPECT_EQ(r.rows[3].group, "overall");
  EXPECT_EQ(r.rows[3].pairs, 4u);
  for (const auto& row : r.rows) {
    EXPECT_DOUBLE_EQ(row.bleu, 100.0) << row.group;
    EXPECT_DOUBLE_EQ(row.rouge, 100.0) << row.group;
  }
}

TEST(Report, SinglePairAndMeans) {
  std::vector<EvalPair> one{{"line", "the cat sat", {"the cat sat down"}}};
  auto r = corpus_report(one);
  EXPECT_NEAR(r.rows[3].bleu, bleu(T("the cat sat"), {T("the cat sat down")}), 1e-12);
  EXPECT_NEAR(r.rows[3].rouge, rouge_l(T("the cat sat"), {T("the cat sat down")}), 1e-12);
  EXPECT_EQ(r.rows[0].pairs, 0u);

  std::vector<EvalPair> mixed{{"line", "a b c", {"a c"}},
                              {"scatter", "x y z w", {"x y z w"}},
                              {"line", "p q", {"r s"}}};
  auto m = corpus_report(mixed, RougeVariant::kRougeL);
  const double mean = (rouge_l(T("a b c"), {T("a c")}) + 100.0 + 0.0) / 3.0;
  EXPECT_NEAR(m.rows[3].rouge, mean, 1e-12);
  EXPECT_NEAR(m.rows[1].rouge, (rouge_l(T("a b c"), {T("a c")}) + 0.0) / 2.0, 1e-12);
  EXPECT_NE(format_report(m).find("ROUGE-L"), std::string::npos);
  EXPECT_EQ(report_to_json(m)["rows"].size(), 4u);
}

TEST(Report, EmptyThrows) {
  try {
    corpus_report({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyReport);
  }
}

TEST(Report, VariantNames) {
  for (auto v : {RougeVariant::kRouge1, RougeVariant::kRouge2, RougeVariant::kRougeL})
    EXPECT_EQ(parse_rouge_variant(to_string(v)), v);
  EXPECT_FALSE(parse_rouge_variant("rouge-9").has_value());
}
