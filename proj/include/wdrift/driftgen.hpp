#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wdrift/core.hpp"
#include "wdrift/random.hpp"
#include "wdrift/text.hpp"
#include "wdrift/weirdness.hpp"

namespace wdrift {

/// How tokens are drawn for a period.
///   Iid:   every token i.i.d. from the period's categorical distribution.
///   Quota: the period's token counts are fixed by largest-remainder
///          apportionment of p(w) * total tokens, then shuffled into
///          comments. Identical distributions then give identical counts.
enum class DrawMode { Iid, Quota };

struct TokensPerComment {
  unsigned min = 10;
  unsigned max = 10;
};

/// Synthetic corpus description with analytically known monthly
/// distributions: p_m(w) is proportional to baseline_probs(w) * multiplier_m(w).
struct DriftSpec {
  std::vector<std::string> vocabulary;
  std::vector<double> baseline_probs;
  MonthKey baseline_start{2020, 9};
  MonthKey baseline_end{2021, 1};
  /// month -> word -> multiplier; unlisted words keep multiplier 1.
  std::map<MonthKey, std::map<std::string, double>> monthly_multipliers;
  std::size_t comments_per_month = 1000;
  TokensPerComment tokens_per_comment;
  std::uint64_t seed = 1;
  DrawMode draw = DrawMode::Iid;

  std::vector<MonthKey> baseline_months() const { return month_range(baseline_start, baseline_end); }

  void validate() const {
    if (vocabulary.empty()) throw InputError("drift spec: empty vocabulary");
    std::set<std::string> seen;
    for (const auto& w : vocabulary) {
      if (!seen.insert(w).second) throw InputError("drift spec: duplicate word '" + w + "'");
      const auto toks = tokenize(w);
      if (toks.size() != 1 || toks[0] != w)
        throw InputError("drift spec: word '" + w + "' is not a single lowercase token");
    }
    if (baseline_probs.size() != vocabulary.size())
      throw InputError("drift spec: baseline_probs must have one entry per word");
    double sum = 0.0;
    for (double p : baseline_probs) {
      if (!(p > 0.0) || !std::isfinite(p)) throw InputError("drift spec: baseline probabilities must be > 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InputError("drift spec: baseline_probs must sum to 1");
    if (baseline_end < baseline_start) throw InputError("drift spec: baseline_end before baseline_start");
    for (const auto& [m, mults] : monthly_multipliers) {
      if (m >= baseline_start && m <= baseline_end)
        throw InputError("drift spec: month " + m.str() + " lies inside the baseline period");
      for (const auto& [w, x] : mults) {
        if (!seen.count(w)) throw InputError("drift spec: multiplier for unknown word '" + w + "'");
        if (!(x > 0.0) || !std::isfinite(x)) throw InputError("drift spec: multipliers must be finite and > 0");
      }
    }
    if (comments_per_month < 1) throw InputError("drift spec: comments_per_month must be >= 1");
    if (tokens_per_comment.min < 1 || tokens_per_comment.max < tokens_per_comment.min)
      throw InputError("drift spec: invalid tokens_per_comment range");
  }

  /// Renormalized distribution for `month`; the baseline for baseline months.
  std::vector<double> month_probs(MonthKey month) const {
    std::vector<double> p = baseline_probs;
    auto it = monthly_multipliers.find(month);
    if (it == monthly_multipliers.end()) return p;
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
      auto m = it->second.find(vocabulary[i]);
      if (m != it->second.end()) p[i] *= m->second;
    }
    const double z = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= z;
    return p;
  }

  /// p_m(w) / p_base(w) for every vocabulary word.
  std::vector<double> expected_weirdness(MonthKey month) const {
    auto p = month_probs(month);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] /= baseline_probs[i];
    return p;
  }

  static DriftSpec from_json(const nlohmann::json& j) {
    DriftSpec s;
    try {
      s.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
      if (j.contains("baseline_probs")) {
        s.baseline_probs = j.at("baseline_probs").get<std::vector<double>>();
      } else {
        s.baseline_probs.assign(s.vocabulary.size(), 1.0 / static_cast<double>(s.vocabulary.size()));
      }
      if (j.contains("baseline_start")) s.baseline_start = MonthKey::parse(j.at("baseline_start").get<std::string>());
      if (j.contains("baseline_end")) s.baseline_end = MonthKey::parse(j.at("baseline_end").get<std::string>());
      if (j.contains("months")) {
        for (const auto& [m, mults] : j.at("months").items()) {
          auto& dst = s.monthly_multipliers[MonthKey::parse(m)];
          for (const auto& [w, x] : mults.items()) dst[w] = x.get<double>();
        }
      }
      if (j.contains("comments_per_month")) s.comments_per_month = j.at("comments_per_month").get<std::size_t>();
      if (j.contains("tokens_per_comment")) {
        const auto& t = j.at("tokens_per_comment");
        if (t.is_number()) {
          s.tokens_per_comment.min = s.tokens_per_comment.max = t.get<unsigned>();
        } else {
          s.tokens_per_comment.min = t.at("min").get<unsigned>();
          s.tokens_per_comment.max = t.at("max").get<unsigned>();
        }
      }
      if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("draw")) {
        const auto d = j.at("draw").get<std::string>();
        if (d == "iid") s.draw = DrawMode::Iid;
        else if (d == "quota") s.draw = DrawMode::Quota;
        else throw InputError("drift spec: draw must be 'iid' or 'quota'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("drift spec: ") + e.what());
    }
    s.validate();
    return s;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["vocabulary"] = vocabulary;
    j["baseline_probs"] = baseline_probs;
    j["baseline_start"] = baseline_start.str();
    j["baseline_end"] = baseline_end.str();
    nlohmann::ordered_json months = nlohmann::ordered_json::object();
    for (const auto& [m, mults] : monthly_multipliers) {
      nlohmann::ordered_json mj = nlohmann::ordered_json::object();
      for (const auto& [w, x] : mults) mj[w] = x;
      months[m.str()] = mj;
    }
    j["months"] = months;
    j["comments_per_month"] = comments_per_month;
    j["tokens_per_comment"] = {{"min", tokens_per_comment.min}, {"max", tokens_per_comment.max}};
    j["seed"] = seed;
    j["draw"] = draw == DrawMode::Iid ? "iid" : "quota";
    return j;
  }
};

struct GeneratedCorpus {
  std::vector<CommentRecord> baseline;
  std::map<MonthKey, std::vector<CommentRecord>> monthly;
  /// month -> expected weirdness aligned with DriftSpec::vocabulary.
  std::map<MonthKey, std::vector<double>> expected_weirdness;

  /// Every comment, baseline months first, then drift months in order.
  std::vector<CommentRecord> all_comments() const {
    std::vector<CommentRecord> out = baseline;
    for (const auto& [m, c] : monthly) out.insert(out.end(), c.begin(), c.end());
    return out;
  }
};

namespace detail {

/// Largest-remainder apportionment of `total` over `probs`; ties to lower index.
inline std::vector<std::uint64_t> apportion(const std::vector<double>& probs, std::uint64_t total) {
  std::vector<std::uint64_t> counts(probs.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double exact = probs[i] * static_cast<double>(total);
    counts[i] = static_cast<std::uint64_t>(std::floor(exact));
    assigned += counts[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[rem[k % rem.size()].second];
  return counts;
}

inline std::vector<CommentRecord> generate_month(const DriftSpec& spec, MonthKey month) {
  Rng rng = make_rng(spec.seed, static_cast<std::uint64_t>(month.year) * 12 + month.month);
  const auto probs = spec.month_probs(month);
  const auto span_seconds = static_cast<std::uint64_t>(month.length().count());

  std::vector<CommentRecord> out(spec.comments_per_month);
  std::vector<unsigned> lengths(out.size());
  std::uint64_t total_tokens = 0;
  const unsigned lo = spec.tokens_per_comment.min, hi = spec.tokens_per_comment.max;
  for (std::size_t i = 0; i < out.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%s-%06zu", month.str().c_str(), i + 1);
    out[i].id = id;
    out[i].timestamp = month.first_second() + std::chrono::seconds{uniform_below(rng, span_seconds)};
    lengths[i] = lo + static_cast<unsigned>(uniform_below(rng, hi - lo + 1));
    total_tokens += lengths[i];
  }

  std::vector<std::size_t> draws;
  draws.reserve(total_tokens);
  if (spec.draw == DrawMode::Quota) {
    const auto counts = apportion(probs, total_tokens);
    for (std::size_t w = 0; w < counts.size(); ++w) draws.insert(draws.end(), counts[w], w);
    shuffle(draws, rng);
  } else {
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    cdf.back() = 1.0;
    for (std::uint64_t t = 0; t < total_tokens; ++t) {
      const double u = uniform01(rng);
      draws.push_back(static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()));
    }
  }

  std::size_t next = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& c = out[i];
    c.tokens.reserve(lengths[i]);
    for (unsigned k = 0; k < lengths[i]; ++k) {
      const auto& w = spec.vocabulary[draws[next++]];
      if (k) c.text.push_back(' ');
      c.text += w;
      c.tokens.push_back(w);
    }
  }
  return out;
}

}  // namespace detail

/// Generates the baseline months and every month with multipliers. Each
/// month uses its own substream of spec.seed.
inline GeneratedCorpus generate_corpus(const DriftSpec& spec) {
  spec.validate();
  GeneratedCorpus out;
  for (MonthKey m : spec.baseline_months()) {
    auto month = detail::generate_month(spec, m);
    out.baseline.insert(out.baseline.end(), std::make_move_iterator(month.begin()),
                        std::make_move_iterator(month.end()));
  }
  for (const auto& [m, mults] : spec.monthly_multipliers) {
    out.monthly.emplace(m, detail::generate_month(spec, m));
    out.expected_weirdness.emplace(m, spec.expected_weirdness(m));
  }
  return out;
}

/// Population std-dev of the analytic expected weirdness for `month`.
inline double expected_drift_indicator(const DriftSpec& spec, MonthKey month) {
  if (!spec.monthly_multipliers.count(month)) throw InputError("drift spec has no month " + month.str());
  return population_stddev(spec.expected_weirdness(month));
}

}  // namespace wdrift
