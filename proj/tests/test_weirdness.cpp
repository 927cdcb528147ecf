#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "wdrift/driftgen.hpp"
#include "wdrift/random.hpp"
#include "wdrift/weirdness.hpp"

using namespace wdrift;
using Tokens = std::vector<std::string>;

namespace {

FrequencyTable table(std::initializer_list<std::pair<const char*, std::uint64_t>> counts, std::string period = "t") {
  FrequencyTable t;
  t.period = std::move(period);
  for (const auto& [w, c] : counts) t.add(w, c);
  return t;
}

/// Random table over words w0..w{n-1}; every word present.
FrequencyTable random_table(Rng& g, std::size_t n, std::uint64_t max_count = 50) {
  FrequencyTable t;
  for (std::size_t i = 0; i < n; ++i) t.add("w" + std::to_string(i), 1 + uniform_below(g, max_count));
  return t;
}

}  // namespace

// --- frequency tables --------------------------------------------------------

TEST(FrequencyTable, DirectCount) {
  const std::vector<Tokens> comments{{"a", "b"}, {"a"}};
  const auto t = build_frequency_table(comments, "p");
  EXPECT_EQ(t.count("a"), 2u);
  EXPECT_EQ(t.count("b"), 1u);
  EXPECT_EQ(t.total, 3u);
  EXPECT_EQ(t.period, "p");
}

TEST(FrequencyTable, MinCountDropsAndRecomputesTotal) {
  const std::vector<Tokens> comments{{"a", "b"}, {"a"}};
  const auto t = build_frequency_table(comments, "p", {.min_count = 2});
  EXPECT_EQ(t.counts.size(), 1u);
  EXPECT_EQ(t.count("a"), 2u);
  EXPECT_EQ(t.total, 2u);
}

TEST(FrequencyTable, TotalEqualsSummedLengthsOnLargeMonth) {
  DriftSpec spec;
  spec.vocabulary = {"a", "b", "c", "d"};
  spec.baseline_probs = {0.4, 0.3, 0.2, 0.1};
  spec.baseline_start = spec.baseline_end = {2021, 1};
  spec.comments_per_month = 40000;
  spec.tokens_per_comment = {3, 17};
  const auto corpus = generate_corpus(spec);
  std::uint64_t oracle = 0;
  for (const auto& c : corpus.baseline) oracle += c.tokens.size();
  const auto t = build_frequency_table(corpus.baseline, "2021-01");
  EXPECT_EQ(t.total, oracle);
  std::uint64_t sum = 0;
  for (const auto& [w, c] : t.counts) sum += c;
  EXPECT_EQ(sum, t.total);
}

TEST(FrequencyTable, ShardedCountingMatchesSerial) {
  Rng g = make_rng(3);
  std::vector<Tokens> comments(50000);
  for (auto& c : comments)
    for (int k = 0; k < 5; ++k) c.push_back("w" + std::to_string(uniform_below(g, 300)));
  const auto serial = build_frequency_table(comments, "x");
  const auto sharded = build_frequency_table(comments, "x", {.threads = 4});
  EXPECT_EQ(serial, sharded);
}

TEST(FrequencyTable, StopwordsExcluded) {
  const std::vector<Tokens> comments{{"a", "the", "b", "the"}};
  const Stopwords stop{"the"};
  const auto t = build_frequency_table(comments, "x", {.stopwords = &stop});
  EXPECT_EQ(t.total, 2u);
  EXPECT_FALSE(t.contains("the"));
}

TEST(FrequencyTable, CsvRoundTrip) {
  const auto t = table({{"a", 5}, {"b,c", 2}, {"ő", 9}}, "2021-03");
  std::stringstream s;
  write_frequency_table(s, t);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "# period=2021-03 total=16");
  const auto back = read_frequency_table(s);
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.period, "2021-03");
}

TEST(FrequencyTable, CsvTotalMismatchRejected) {
  std::istringstream s("# period=x total=10\nword,count\na,3\n");
  EXPECT_THROW(read_frequency_table(s), InputError);
}

// --- baseline ratio ----------------------------------------------------------

TEST(BaselineRatio, DirectDivision) {
  const auto t = table({{"a", 2}, {"b", 1}});
  EXPECT_DOUBLE_EQ(baseline_ratio(t, "a"), 2.0 / 3.0);
  EXPECT_EQ(baseline_ratio(t, "zzz"), 0.0);
}

TEST(BaselineRatio, UniformTable) {
  FrequencyTable t;
  for (int i = 0; i < 10; ++i) t.add("w" + std::to_string(i), 7);
  for (const auto& [w, c] : t.counts) EXPECT_DOUBLE_EQ(baseline_ratio(t, w), 0.1);
}

TEST(BaselineRatio, EmptyBaselineIsAnError) {
  try {
    baseline_ratio(FrequencyTable{}, "a");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "empty baseline");
  }
}

// --- word weirdness ----------------------------------------------------------

TEST(WordWeirdness, SameRelativeFrequencyIsOne) {
  const auto base = table({{"a", 3}, {"b", 7}});
  const auto month = table({{"a", 30}, {"b", 70}});
  EXPECT_DOUBLE_EQ(word_weirdness(base, month, "a", 0.0), 1.0);
}

TEST(WordWeirdness, HandComputedRatio) {
  // (2/10) / (1/10)
  EXPECT_DOUBLE_EQ(word_weirdness(table({{"a", 1}, {"b", 9}}), table({{"a", 2}, {"b", 8}}), "a", 0.0), 2.0);
}

TEST(WordWeirdness, AbsentFromMonthIsZero) {
  EXPECT_EQ(word_weirdness(table({{"a", 1}, {"b", 9}}), table({{"b", 8}}), "a", 0.0), 0.0);
}

TEST(WordWeirdness, AbsentFromBaselineIsInfiniteInExactMode) {
  EXPECT_TRUE(std::isinf(word_weirdness(table({{"b", 9}}), table({{"a", 1}, {"b", 8}}), "a", 0.0)));
}

TEST(WordWeirdness, UnknownWordInExactMode) {
  try {
    word_weirdness(table({{"b", 9}}), table({{"b", 8}}), "zzz", 0.0);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown word"), std::string::npos);
  }
}

TEST(WordWeirdness, SmoothedHandComputation) {
  // V = |{a,b,c}| = 3, eps = 0.5:
  // month a: (2+0.5)/(10+1.5) ; baseline a: (0+0.5)/(4+1.5)
  const auto base = table({{"b", 3}, {"c", 1}});
  const auto month = table({{"a", 2}, {"b", 8}});
  const double expected = (2.5 / 11.5) / (0.5 / 5.5);
  EXPECT_NEAR(word_weirdness(base, month, "a", 0.5), expected, 1e-15);
  EXPECT_GT(word_weirdness(base, month, "zzz", 0.5), 0.0);
}

// --- model and drift indicator ----------------------------------------------

TEST(ComputeModel, IdentityMonthGivesOnes) {
  const auto base = table({{"a", 12}, {"b", 30}, {"c", 7}});
  const auto model = compute_model(base, {{MonthKey{2021, 2}, base}}, {.epsilon = 0.0, .min_baseline_count = 1});
  for (double w : model.word_weirdness.at({2021, 2})) EXPECT_EQ(w, 1.0);
  EXPECT_EQ(model.drift_indicator.at({2021, 2}), 0.0);
}

TEST(ComputeModel, TwoWordHandComputation) {
  const auto base = table({{"a", 3}, {"b", 1}});
  const auto month = table({{"a", 1}, {"b", 1}});
  const MonthKey m{2021, 5};
  const auto exact = compute_model(base, {{m, month}}, {.epsilon = 0.0, .min_baseline_count = 1});
  ASSERT_EQ(exact.vocabulary, (std::vector<std::string>{"a", "b"}));
  EXPECT_NEAR(*exact.weirdness(m, "a"), 2.0 / 3.0, 1e-15);  // (1/2)/(3/4)
  EXPECT_NEAR(*exact.weirdness(m, "b"), 2.0, 1e-15);        // (1/2)/(1/4)
  EXPECT_NEAR(exact.drift_indicator.at(m), 2.0 / 3.0, 1e-15);
  const auto smooth = compute_model(base, {{m, month}}, {.epsilon = 0.5, .min_baseline_count = 1});
  EXPECT_NEAR(*smooth.weirdness(m, "a"), 5.0 / 7.0, 1e-15);  // (1.5/3)/(3.5/5)
  EXPECT_NEAR(*smooth.weirdness(m, "b"), 5.0 / 3.0, 1e-15);  // (1.5/3)/(1.5/5)
}

TEST(ComputeModel, MinBaselineCountRestrictsVocabulary) {
  const auto base = table({{"a", 10}, {"b", 4}, {"c", 5}});
  const auto model = compute_model(base, {{MonthKey{2021, 2}, base}}, {.epsilon = 0.0, .min_baseline_count = 5});
  EXPECT_EQ(model.vocabulary, (std::vector<std::string>{"a", "c"}));
  EXPECT_FALSE(model.weirdness({2021, 2}, "b"));
}

TEST(ComputeModel, RisingWordHasMaximalWeirdness) {
  std::vector<Tokens> baseline, month;
  for (int i = 0; i < 2000; ++i) baseline.push_back({"oltás", "vakcina", "nem", i % 400 == 0 ? "delta" : "pfizer"});
  for (int i = 0; i < 2000; ++i) month.push_back({"oltás", "vakcina", "nem", i % 4 == 0 ? "delta" : "pfizer"});
  const MonthKey aug{2021, 8};
  const std::map<MonthKey, std::vector<Tokens>> months{{aug, month}};
  const auto model = compute_model(baseline, months, {.epsilon = 0.5, .min_baseline_count = 5});
  const auto& vals = model.word_weirdness.at(aug);
  const auto top = std::max_element(vals.begin(), vals.end()) - vals.begin();
  EXPECT_EQ(model.vocabulary[static_cast<std::size_t>(top)], "delta");
  EXPECT_GT(vals[static_cast<std::size_t>(top)], 10.0);
}

TEST(DriftIndicator, PopulationStdDevOfFixedValues) {
  WeirdnessModel model;
  model.vocabulary = {"a", "b", "c", "d"};
  model.word_weirdness[{2021, 3}] = {1.0, 1.0, 1.0, 3.0};
  // sqrt(E[x^2] - E[x]^2) = sqrt(12/4 - (6/4)^2) = sqrt(0.75)
  EXPECT_NEAR(drift_indicator(model, {2021, 3}), std::sqrt(0.75), 1e-15);
}

TEST(DriftIndicator, DegenerateVocabulary) {
  WeirdnessModel model;
  model.vocabulary = {"a"};
  model.word_weirdness[{2021, 3}] = {2.0};
  EXPECT_THROW(drift_indicator(model, {2021, 3}), InputError);
  EXPECT_THROW(drift_indicator(model, {2021, 4}), InputError);
}

TEST(DriftIndicator, MonotoneScheduleIsNonDecreasing) {
  // Two words, multiplier 1 + t/2 on the first: expected indicator (m-1)/(m+1).
  DriftSpec spec;
  spec.vocabulary = {"a", "b"};
  spec.baseline_probs = {0.5, 0.5};
  spec.baseline_start = spec.baseline_end = {2021, 1};
  spec.comments_per_month = 5000;
  spec.seed = 5;
  for (unsigned t = 1; t <= 6; ++t) spec.monthly_multipliers[{2021, 1 + t}] = {{"a", 1.0 + 0.5 * t}};
  const auto corpus = generate_corpus(spec);
  const auto model = compute_model(corpus.baseline, corpus.monthly, {.epsilon = 0.0, .min_baseline_count = 1});
  double prev = -1.0;
  for (const auto& [m, d] : model.drift_indicator) {
    EXPECT_GE(d, prev) << m.str();
    prev = d;
  }
}

// --- comment weirdness -------------------------------------------------------

TEST(CommentWeirdness, ConstantWeirdness) {
  const std::unordered_map<std::string, double> w{{"a", 1.0}, {"b", 1.0}};
  EXPECT_EQ(comment_weirdness(Tokens{"a", "b", "a"}, w), 1.0);
}

TEST(CommentWeirdness, ArithmeticMean) {
  const std::unordered_map<std::string, double> w{{"a", 2.0}, {"b", 0.5}};
  EXPECT_EQ(comment_weirdness(Tokens{"a", "b"}, w), 1.25);
}

TEST(CommentWeirdness, EmptyIsUndefined) {
  EXPECT_FALSE(comment_weirdness(Tokens{}, std::unordered_map<std::string, double>{}));
}

TEST(CommentWeirdness, OovPolicies) {
  const std::unordered_map<std::string, double> w{{"a", 3.0}};
  EXPECT_EQ(comment_weirdness(Tokens{"a", "zz"}, w), 3.0);
  EXPECT_EQ(comment_weirdness(Tokens{"a", "zz"}, w, {.oov = OovPolicy::TreatAsOne}), 2.0);
  EXPECT_FALSE(comment_weirdness(Tokens{"zz", "yy"}, w));
}

TEST(CommentWeirdness, TokenVersusTypeAveraging) {
  const std::unordered_map<std::string, double> w{{"a", 3.0}, {"b", 1.0}};
  const Tokens toks{"a", "a", "a", "b"};
  EXPECT_EQ(comment_weirdness(toks, w), 2.5);
  EXPECT_EQ(comment_weirdness(toks, w, {.averaging = Averaging::UniqueTypes}), 2.0);
}

TEST(CommentWeirdness, ModelLookupMatchesMapLookup) {
  const auto base = table({{"a", 3}, {"b", 1}});
  const MonthKey m{2021, 5};
  const auto model = compute_model(base, {{m, table({{"a", 1}, {"b", 1}})}}, {.epsilon = 0.0, .min_baseline_count = 1});
  const Tokens toks{"a", "b", "b", "x"};
  EXPECT_EQ(comment_weirdness(model, m, toks), comment_weirdness(toks, model.month_map(m)));
}

// --- properties ----------------------------------------------------------------

TEST(WeirdnessProperties, IdentityAndNonNegativity) {
  Rng g = make_rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto base = random_table(g, 2 + uniform_below(g, 40));
    const auto model = compute_model(base, {{MonthKey{2021, 2}, base}}, {.epsilon = 0.0, .min_baseline_count = 1});
    for (double w : model.word_weirdness.at({2021, 2})) EXPECT_NEAR(w, 1.0, 1e-12);
    EXPECT_NEAR(model.drift_indicator.at({2021, 2}), 0.0, 1e-12);

    FrequencyTable month = random_table(g, 1 + uniform_below(g, 60));
    for (double eps : {0.0, 0.5, 2.0}) {
      const auto m2 = compute_model(base, {{MonthKey{2021, 3}, month}}, {.epsilon = eps, .min_baseline_count = 1});
      for (double w : m2.word_weirdness.at({2021, 3})) {
        EXPECT_GE(w, 0.0);
        if (eps > 0) {
          EXPECT_GT(w, 0.0);
        }
      }
      EXPECT_GE(m2.drift_indicator.at({2021, 3}), 0.0);
    }
  }
}

TEST(WeirdnessProperties, ConservationUnderBaselineProbabilities) {
  Rng g = make_rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_below(g, 60);
    const auto base = random_table(g, n);
    const auto month = random_table(g, 1 + uniform_below(g, n));  // vocab ⊆ baseline
    const auto model = compute_model(base, {{MonthKey{2021, 2}, month}}, {.epsilon = 0.0, .min_baseline_count = 1});
    double sum = 0.0;
    const auto& vals = model.word_weirdness.at({2021, 2});
    for (std::size_t i = 0; i < vals.size(); ++i) sum += baseline_ratio(base, model.vocabulary[i]) * vals[i];
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(WeirdnessProperties, DuplicatingCommentsLeavesWeirdnessUnchanged) {
  Rng g = make_rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Tokens> base, month;
    for (int i = 0; i < 200; ++i) {
      base.push_back({"w" + std::to_string(uniform_below(g, 20)), "w" + std::to_string(uniform_below(g, 20))});
      month.push_back({"w" + std::to_string(uniform_below(g, 20))});
    }
    auto doubled = month;
    doubled.insert(doubled.end(), month.begin(), month.end());
    const WeirdnessOptions opt{.epsilon = 0.0, .min_baseline_count = 1};
    const MonthKey m{2021, 6};
    const auto a = compute_model(base, std::map<MonthKey, std::vector<Tokens>>{{m, month}}, opt);
    const auto b = compute_model(base, std::map<MonthKey, std::vector<Tokens>>{{m, doubled}}, opt);
    const auto& va = a.word_weirdness.at(m);
    const auto& vb = b.word_weirdness.at(m);
    for (std::size_t i = 0; i < va.size(); ++i) EXPECT_NEAR(va[i], vb[i], 1e-12);
  }
}

TEST(WeirdnessProperties, RaisingMonthCountStrictlyIncreasesWeirdness) {
  Rng g = make_rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto base = random_table(g, 5);
    auto month = random_table(g, 5);
    const std::string w = "w" + std::to_string(uniform_below(g, 5));
    for (double eps : {0.0, 0.5}) {
      const double before = word_weirdness(base, month, w, eps);
      auto raised = month;
      raised.add(w, 1 + uniform_below(g, 5));
      EXPECT_GT(word_weirdness(base, raised, w, eps), before);
    }
  }
}

TEST(WeirdnessProperties, CommentWeirdnessWithinTokenRange) {
  Rng g = make_rng(505);
  std::unordered_map<std::string, double> w;
  for (int i = 0; i < 30; ++i) w["w" + std::to_string(i)] = 0.1 + 5.0 * uniform01(g);
  for (int trial = 0; trial < 500; ++trial) {
    Tokens toks;
    for (std::uint64_t k = 1 + uniform_below(g, 12); k > 0; --k) toks.push_back("w" + std::to_string(uniform_below(g, 30)));
    double lo = 1e300, hi = -1e300;
    for (const auto& t : toks) {
      lo = std::min(lo, w.at(t));
      hi = std::max(hi, w.at(t));
    }
    for (auto avg : {Averaging::TokenOccurrences, Averaging::UniqueTypes}) {
      const auto cw = comment_weirdness(toks, w, {.averaging = avg});
      ASSERT_TRUE(cw);
      EXPECT_GE(*cw, lo - 1e-12);
      EXPECT_LE(*cw, hi + 1e-12);
    }
  }
}

TEST(WeirdnessOutput, CsvLayouts) {
  const auto base = table({{"a", 3}, {"b", 1}});
  const MonthKey m{2021, 5};
  const auto model = compute_model(base, {{m, table({{"a", 1}, {"b", 1}})}}, {.epsilon = 0.0, .min_baseline_count = 1});
  std::ostringstream words, summary;
  write_word_weirdness(words, model);
  write_drift_summary(summary, model);
  EXPECT_EQ(words.str(), "month,word,weirdness\n2021-05,a," + format_double(2.0 / 3.0) + "\n2021-05,b,2\n");
  EXPECT_EQ(summary.str(), "month,vocab_size,drift_indicator\n2021-05,2," +
                               format_double(model.drift_indicator.at(m)) + "\n");
}
