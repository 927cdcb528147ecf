#include <gtest/gtest.h>

#include <sstream>

#include "wdrift/driftgen.hpp"
#include "wdrift/ingest.hpp"

using namespace wdrift;

namespace {

std::vector<std::string> words(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

DriftSpec uniform_spec(std::size_t vocab, std::size_t comments) {
  DriftSpec s;
  s.vocabulary = words(vocab);
  s.baseline_probs.assign(vocab, 1.0 / double(vocab));
  s.comments_per_month = comments;
  return s;
}

WeirdnessModel model_of(const GeneratedCorpus& c, WeirdnessOptions opt = {}) {
  return compute_model(c.baseline, c.monthly, opt);
}

}  // namespace

TEST(DriftGen, IdentityMonthsHaveUnitWeirdness) {
  auto spec = uniform_spec(50, 1000);
  spec.draw = DrawMode::Quota;
  for (unsigned m = 2; m <= 7; ++m) spec.monthly_multipliers[{2021, m}] = {};
  const auto model = model_of(generate_corpus(spec));
  ASSERT_EQ(model.vocabulary.size(), 50u);
  for (const auto& [m, vals] : model.word_weirdness) {
    for (double v : vals) EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_NEAR(model.drift_indicator.at(m), 0.0, 1e-12);
  }
}

TEST(DriftGen, IdentityWithSkewedProbsAndNoSmoothing) {
  DriftSpec spec;
  spec.vocabulary = {"alma", "körte", "szilva", "barack"};
  spec.baseline_probs = {0.4, 0.3, 0.2, 0.1};
  spec.comments_per_month = 500;
  spec.draw = DrawMode::Quota;
  spec.monthly_multipliers[{2021, 3}] = {};
  WeirdnessOptions opt;
  opt.epsilon = 0.0;
  const auto model = model_of(generate_corpus(spec), opt);
  for (double v : model.word_weirdness.at({2021, 3})) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(DriftGen, TwoWordMultiplierConverges) {
  auto spec = uniform_spec(2, 40000);
  const MonthKey m{2021, 5};
  spec.monthly_multipliers[m] = {{"w0", 3.0}};
  const auto expected = spec.expected_weirdness(m);
  EXPECT_DOUBLE_EQ(expected[0], 1.5);
  EXPECT_DOUBLE_EQ(expected[1], 0.5);
  EXPECT_DOUBLE_EQ(expected_drift_indicator(spec, m), 0.5);
  const auto model = model_of(generate_corpus(spec));
  EXPECT_NEAR(model.weirdness(m, "w0").value(), 1.5, 0.05);
  EXPECT_NEAR(model.weirdness(m, "w1").value(), 0.5, 0.05);
}

TEST(DriftGen, FiftyWordVocabularyConverges) {
  DriftSpec spec;
  spec.vocabulary = words(50);
  Rng g = make_rng(50);
  double z = 0.0;
  for (int i = 0; i < 50; ++i) z += spec.baseline_probs.emplace_back(0.5 + uniform01(g));
  for (double& p : spec.baseline_probs) p /= z;
  spec.comments_per_month = 40000;
  const MonthKey m{2021, 6};
  for (int i = 0; i < 50; i += 3) spec.monthly_multipliers[m]["w" + std::to_string(i)] = 0.5 + 1.5 * uniform01(g);
  WeirdnessOptions opt;
  opt.epsilon = 0.0;
  const auto corpus = generate_corpus(spec);
  const auto model = model_of(corpus, opt);
  const auto& expected = corpus.expected_weirdness.at(m);
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.vocabulary.size(); ++i)
    worst = std::max(worst, std::abs(model.weirdness(m, spec.vocabulary[i]).value() - expected[i]));
  EXPECT_LT(worst, 0.05);
  EXPECT_NEAR(model.drift_indicator.at(m), expected_drift_indicator(spec, m), 0.02);
}

TEST(DriftGen, LinearScheduleIncreasesDrift) {
  auto spec = uniform_spec(2, 20000);
  spec.draw = DrawMode::Quota;
  for (unsigned k = 1; k <= 6; ++k) spec.monthly_multipliers[{2021, k + 1}] = {{"w0", 1.0 + 0.5 * k}};
  const auto model = model_of(generate_corpus(spec));
  double prev = -1.0;
  for (unsigned k = 1; k <= 6; ++k) {
    const MonthKey m{2021, k + 1};
    const double mult = 1.0 + 0.5 * k;
    EXPECT_NEAR(expected_drift_indicator(spec, m), (mult - 1.0) / (mult + 1.0), 1e-12);
    EXPECT_NEAR(model.drift_indicator.at(m), (mult - 1.0) / (mult + 1.0), 1e-3);
    EXPECT_GT(model.drift_indicator.at(m), prev);
    prev = model.drift_indicator.at(m);
  }
}

TEST(DriftGen, ConservationWithoutSmoothing) {
  Rng g = make_rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    DriftSpec spec;
    const std::size_t v = 2 + uniform_below(g, 20);
    spec.vocabulary = words(v);
    double z = 0.0;
    for (std::size_t i = 0; i < v; ++i) z += spec.baseline_probs.emplace_back(0.2 + uniform01(g));
    for (double& p : spec.baseline_probs) p /= z;
    spec.comments_per_month = 200;
    spec.seed = g();
    spec.draw = uniform_below(g, 2) ? DrawMode::Iid : DrawMode::Quota;
    spec.monthly_multipliers[{2021, 4}] = {{"w0", 0.2 + 4.0 * uniform01(g)}, {"w1", 0.2 + 4.0 * uniform01(g)}};
    const auto corpus = generate_corpus(spec);
    const auto base = build_frequency_table(corpus.baseline, "baseline");
    const auto month = build_frequency_table(corpus.monthly.at({2021, 4}), "2021-04");
    bool subset = true;
    for (const auto& [w, c] : month.counts) subset = subset && base.contains(w);
    ASSERT_TRUE(subset);
    double sum = 0.0;
    for (const auto& [w, c] : base.counts) sum += baseline_ratio(base, w) * word_weirdness(base, month, w, 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(DriftGen, DeterministicPerSeed) {
  auto spec = uniform_spec(8, 50);
  spec.monthly_multipliers[{2021, 6}] = {{"w3", 2.0}};
  const auto a = generate_corpus(spec).all_comments();
  const auto b = generate_corpus(spec).all_comments();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].text, b[i].text);
    EXPECT_EQ(a[i].timestamp, b[i].timestamp);
  }
  spec.seed = 2;
  const auto c = generate_corpus(spec).all_comments();
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i].text != c[i].text;
  EXPECT_GT(differ, 0u);
}

TEST(DriftGen, CommentsFallInsideTheirMonth) {
  auto spec = uniform_spec(5, 100);
  spec.tokens_per_comment = {3, 12};
  spec.monthly_multipliers[{2021, 2}] = {};
  const auto corpus = generate_corpus(spec);
  EXPECT_EQ(corpus.baseline.size(), 500u);
  for (const auto& [m, cs] : corpus.monthly)
    for (const auto& c : cs) {
      EXPECT_EQ(MonthKey::of(c.timestamp), m);
      EXPECT_GE(c.tokens.size(), 3u);
      EXPECT_LE(c.tokens.size(), 12u);
      EXPECT_EQ(tokenize(c.text), c.tokens);
    }
}

TEST(DriftGen, QuotaCountsAreExact) {
  EXPECT_EQ(detail::apportion({0.5, 0.25, 0.25}, 10), (std::vector<std::uint64_t>{5, 3, 2}));
  EXPECT_EQ(detail::apportion({1.0 / 3, 1.0 / 3, 1.0 / 3}, 100), (std::vector<std::uint64_t>{34, 33, 33}));
  auto spec = uniform_spec(4, 100);
  spec.draw = DrawMode::Quota;
  spec.monthly_multipliers[{2021, 2}] = {{"w0", 2.0}};  // probs 0.4 0.2 0.2 0.2
  const auto month = build_frequency_table(generate_corpus(spec).monthly.at({2021, 2}), "m");
  EXPECT_EQ(month.count("w0"), 400u);
  EXPECT_EQ(month.count("w3"), 200u);
}

TEST(DriftGen, JsonRoundTrip) {
  auto spec = uniform_spec(3, 10);
  spec.baseline_probs = {0.5, 0.3, 0.2};
  spec.monthly_multipliers[{2021, 9}] = {{"w1", 4.0}};
  spec.tokens_per_comment = {2, 5};
  spec.draw = DrawMode::Quota;
  spec.seed = 77;
  const auto back = DriftSpec::from_json(nlohmann::json::parse(spec.to_json().dump()));
  EXPECT_EQ(back.to_json(), spec.to_json());
}

TEST(DriftGen, JsonDefaults) {
  const auto s = DriftSpec::from_json(nlohmann::json::parse(R"({"vocabulary": ["a", "b", "c", "d"]})"));
  EXPECT_EQ(s.baseline_probs, std::vector<double>(4, 0.25));
  EXPECT_EQ(s.baseline_start, (MonthKey{2020, 9}));
  EXPECT_EQ(s.baseline_end, (MonthKey{2021, 1}));
  EXPECT_EQ(s.draw, DrawMode::Iid);
}

TEST(DriftGen, CorpusSurvivesJsonlRoundTrip) {
  auto spec = uniform_spec(6, 20);
  spec.monthly_multipliers[{2021, 3}] = {{"w2", 5.0}};
  const auto comments = generate_corpus(spec).all_comments();
  std::stringstream buf;
  write_comments_jsonl(buf, comments);
  const auto parsed = parse_comments(buf, InputFormat::Jsonl, {});
  ASSERT_EQ(parsed.records.size(), comments.size());
  EXPECT_EQ(parsed.skipped, 0u);
  for (std::size_t i = 0; i < comments.size(); ++i) {
    EXPECT_EQ(parsed.records[i].id, comments[i].id);
    EXPECT_EQ(parsed.records[i].tokens, comments[i].tokens);
    EXPECT_EQ(parsed.records[i].timestamp, comments[i].timestamp);
  }
}

TEST(DriftGen, InvalidSpecsRejected) {
  auto bad = [](auto mutate) {
    auto s = uniform_spec(3, 10);
    mutate(s);
    EXPECT_THROW(s.validate(), InputError);
  };
  bad([](DriftSpec& s) { s.vocabulary[1] = "Upper"; });
  bad([](DriftSpec& s) { s.vocabulary[1] = "two words"; });
  bad([](DriftSpec& s) { s.vocabulary[1] = s.vocabulary[0]; });
  bad([](DriftSpec& s) { s.baseline_probs = {0.5, 0.5, 0.5}; });
  bad([](DriftSpec& s) { s.baseline_probs = {0.0, 0.5, 0.5}; });
  bad([](DriftSpec& s) { s.monthly_multipliers[{2020, 10}] = {}; });
  bad([](DriftSpec& s) { s.monthly_multipliers[{2021, 4}] = {{"nope", 2.0}}; });
  bad([](DriftSpec& s) { s.monthly_multipliers[{2021, 4}] = {{"w0", 0.0}}; });
  bad([](DriftSpec& s) { s.tokens_per_comment = {5, 2}; });
  EXPECT_THROW(DriftSpec::from_json(nlohmann::json::parse(R"({"vocabulary": ["a"], "draw": "magic"})")), InputError);
  EXPECT_THROW(DriftSpec::from_json(nlohmann::json::parse(R"({"months": {}})")), InputError);
}
