#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <future>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wdrift/core.hpp"
#include "wdrift/csv.hpp"

namespace wdrift {

using Stopwords = std::unordered_set<std::string>;

/// Word counts for one period (the baseline or a single month).
/// Invariant: total == sum of counts, and every stored count is >= 1.
struct FrequencyTable {
  std::string period;
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(const std::string& word) const {
    auto it = counts.find(word);
    return it == counts.end() ? 0 : it->second;
  }

  bool contains(const std::string& word) const { return counts.find(word) != counts.end(); }
  std::size_t vocabulary_size() const { return counts.size(); }

  void add(const std::string& word, std::uint64_t n = 1) {
    if (n == 0) return;
    counts[word] += n;
    total += n;
  }

  /// Commutative and associative, so sharded counts can be merged in any order.
  void merge(const FrequencyTable& other) {
    for (const auto& [w, c] : other.counts) add(w, c);
  }

  /// Drops words with count < min_count and recomputes total.
  void prune(std::uint64_t min_count) {
    if (min_count <= 1) return;
    for (auto it = counts.begin(); it != counts.end();) {
      if (it->second < min_count) {
        total -= it->second;
        it = counts.erase(it);
      } else {
        ++it;
      }
    }
  }

  friend bool operator==(const FrequencyTable& a, const FrequencyTable& b) {
    return a.total == b.total && a.counts == b.counts;
  }
};

struct CountOptions {
  std::uint64_t min_count = 1;
  const Stopwords* stopwords = nullptr;
  unsigned threads = 1;
};

namespace detail {

inline const std::vector<std::string>& tokens_of(const CommentRecord& c) { return c.tokens; }
inline const std::vector<std::string>& tokens_of(const std::vector<std::string>& t) { return t; }

template <class Range>
FrequencyTable count_range(const Range& comments, std::size_t begin, std::size_t end, const Stopwords* stop) {
  FrequencyTable t;
  for (std::size_t i = begin; i < end; ++i) {
    for (const auto& tok : tokens_of(comments[i])) {
      if (stop && stop->count(tok)) continue;
      t.add(tok);
    }
  }
  return t;
}

}  // namespace detail

/// Counts every token of every comment. `comments` is any random-access
/// range of CommentRecord or of token lists.
template <class Range>
FrequencyTable build_frequency_table(const Range& comments, std::string period, const CountOptions& opt = {}) {
  const std::size_t n = std::size(comments);
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(opt.threads, n / 10000));
  FrequencyTable table;
  if (shards == 1) {
    table = detail::count_range(comments, 0, n, opt.stopwords);
  } else {
    std::vector<std::future<FrequencyTable>> parts;
    for (std::size_t s = 0; s < shards; ++s) {
      const std::size_t b = n * s / shards, e = n * (s + 1) / shards;
      parts.push_back(std::async(std::launch::async, [&, b, e] {
        return detail::count_range(comments, b, e, opt.stopwords);
      }));
    }
    table = parts.front().get();
    for (std::size_t s = 1; s < shards; ++s) table.merge(parts[s].get());
  }
  table.period = std::move(period);
  table.prune(opt.min_count);
  return table;
}

/// Relative frequency of `word` in the table; 0 for absent words.
inline double baseline_ratio(const FrequencyTable& baseline, const std::string& word) {
  if (baseline.total == 0) throw InputError("empty baseline");
  return static_cast<double>(baseline.count(word)) / static_cast<double>(baseline.total);
}

/// |vocab(a) ∪ vocab(b)|
inline std::size_t union_vocabulary_size(const FrequencyTable& a, const FrequencyTable& b) {
  std::size_t n = a.counts.size();
  for (const auto& [w, c] : b.counts)
    if (!a.contains(w)) ++n;
  return n;
}

/// Smoothed weirdness with a precomputed union vocabulary size:
///   ((c_m + eps) / (T_m + eps V)) / ((c_b + eps) / (T_b + eps V))
/// With eps == 0 a word absent from the baseline but present in the month
/// yields +inf.
inline double word_weirdness(const FrequencyTable& baseline, const FrequencyTable& month, const std::string& word,
                             double epsilon, std::size_t union_vocab) {
  if (baseline.total == 0) throw InputError("empty baseline");
  if (month.total == 0) throw InputError("empty month table");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be finite and >= 0");
  const double cm = static_cast<double>(month.count(word));
  const double cb = static_cast<double>(baseline.count(word));
  if (epsilon == 0.0) {
    if (cb == 0.0) {
      if (cm == 0.0) throw InputError("unknown word '" + word + "'");
      return std::numeric_limits<double>::infinity();
    }
    return (cm / static_cast<double>(month.total)) / (cb / static_cast<double>(baseline.total));
  }
  const double v = static_cast<double>(union_vocab);
  const double pm = (cm + epsilon) / (static_cast<double>(month.total) + epsilon * v);
  const double pb = (cb + epsilon) / (static_cast<double>(baseline.total) + epsilon * v);
  return pm / pb;
}

inline double word_weirdness(const FrequencyTable& baseline, const FrequencyTable& month, const std::string& word,
                             double epsilon) {
  return word_weirdness(baseline, month, word, epsilon, union_vocabulary_size(baseline, month));
}

/// Population standard deviation.
inline double population_stddev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

struct WeirdnessOptions {
  double epsilon = 0.5;
  std::uint64_t min_baseline_count = 5;
  const Stopwords* stopwords = nullptr;
  unsigned threads = 1;
};

/// Baseline and monthly tables with per-month word weirdness over a fixed
/// vocabulary: the baseline words with count >= min_baseline_count, sorted.
struct WeirdnessModel {
  FrequencyTable baseline;
  std::map<MonthKey, FrequencyTable> monthly;
  double smoothing_epsilon = 0.5;
  std::uint64_t min_baseline_count = 5;
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, std::size_t> vocabulary_index;
  /// word_weirdness[m][i] is the weirdness of vocabulary[i] in month m.
  std::map<MonthKey, std::vector<double>> word_weirdness;
  std::map<MonthKey, double> drift_indicator;

  bool has_month(MonthKey m) const { return word_weirdness.count(m) != 0; }

  std::optional<double> weirdness(MonthKey m, const std::string& word) const {
    auto mi = word_weirdness.find(m);
    if (mi == word_weirdness.end()) return std::nullopt;
    auto wi = vocabulary_index.find(word);
    if (wi == vocabulary_index.end()) return std::nullopt;
    return mi->second[wi->second];
  }

  std::unordered_map<std::string, double> month_map(MonthKey m) const {
    std::unordered_map<std::string, double> out;
    const auto& vals = word_weirdness.at(m);
    for (std::size_t i = 0; i < vocabulary.size(); ++i) out.emplace(vocabulary[i], vals[i]);
    return out;
  }
};

/// Population std-dev of the month's word weirdness over the model vocabulary.
inline double drift_indicator(const WeirdnessModel& model, MonthKey month) {
  auto it = model.word_weirdness.find(month);
  if (it == model.word_weirdness.end()) throw InputError("month " + month.str() + " not in model");
  if (it->second.size() < 2) throw InputError("degenerate vocabulary");
  return population_stddev(it->second);
}

namespace detail {

inline std::vector<double> month_weirdness(const FrequencyTable& baseline, const FrequencyTable& month,
                                           const std::vector<std::string>& vocab, double epsilon) {
  const std::size_t v = union_vocabulary_size(baseline, month);
  std::vector<double> out;
  out.reserve(vocab.size());
  for (const auto& w : vocab) out.push_back(word_weirdness(baseline, month, w, epsilon, v));
  return out;
}

}  // namespace detail

inline WeirdnessModel compute_model(const FrequencyTable& baseline, std::map<MonthKey, FrequencyTable> monthly,
                                    const WeirdnessOptions& opt = {}) {
  if (baseline.total == 0) throw InputError("empty baseline");
  if (monthly.empty()) throw InputError("no months to score");
  WeirdnessModel model;
  model.baseline = baseline;
  model.monthly = std::move(monthly);
  model.smoothing_epsilon = opt.epsilon;
  model.min_baseline_count = opt.min_baseline_count;
  for (const auto& [w, c] : baseline.counts)
    if (c >= opt.min_baseline_count) model.vocabulary.push_back(w);
  std::sort(model.vocabulary.begin(), model.vocabulary.end());
  for (std::size_t i = 0; i < model.vocabulary.size(); ++i) model.vocabulary_index.emplace(model.vocabulary[i], i);

  for (const auto& [m, table] : model.monthly) {
    if (table.total == 0) throw InputError("month " + m.str() + " has no tokens");
    model.word_weirdness.emplace(m, detail::month_weirdness(model.baseline, table, model.vocabulary, opt.epsilon));
  }
  for (const auto& [m, vals] : model.word_weirdness) model.drift_indicator.emplace(m, drift_indicator(model, m));
  return model;
}

/// Counts the baseline and each month, then builds the model.
template <class Range>
WeirdnessModel compute_model(const Range& baseline_comments, const std::map<MonthKey, Range>& monthly_comments,
                             const WeirdnessOptions& opt = {}) {
  if (std::size(baseline_comments) == 0) throw InputError("empty baseline");
  const CountOptions count_opt{1, opt.stopwords, opt.threads};
  FrequencyTable baseline = build_frequency_table(baseline_comments, "baseline", count_opt);
  std::map<MonthKey, FrequencyTable> monthly;
  for (const auto& [m, comments] : monthly_comments)
    monthly.emplace(m, build_frequency_table(comments, m.str(), count_opt));
  return compute_model(baseline, std::move(monthly), opt);
}

// ---------------------------------------------------------------------------
// Comment-level weirdness

enum class OovPolicy { Skip, TreatAsOne };
enum class Averaging { TokenOccurrences, UniqueTypes };

struct CommentWeirdnessOptions {
  OovPolicy oov = OovPolicy::Skip;
  Averaging averaging = Averaging::TokenOccurrences;
};

/// Mean weirdness over a comment's tokens. `lookup(token)` returns the
/// token's weirdness for the month, or nullopt when out of vocabulary.
/// Returns nullopt (undefined) when no token contributes.
template <class Lookup>
  requires std::invocable<Lookup&, const std::string&>
std::optional<double> comment_weirdness(std::span<const std::string> tokens, Lookup&& lookup,
                                        const CommentWeirdnessOptions& opt = {}) {
  double sum = 0.0;
  std::size_t n = 0;
  std::unordered_set<std::string_view> seen;
  for (const auto& t : tokens) {
    if (opt.averaging == Averaging::UniqueTypes && !seen.insert(t).second) continue;
    std::optional<double> w = lookup(t);
    if (!w) {
      if (opt.oov == OovPolicy::Skip) continue;
      w = 1.0;
    }
    sum += *w;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

inline std::optional<double> comment_weirdness(std::span<const std::string> tokens,
                                               const std::unordered_map<std::string, double>& month_map,
                                               const CommentWeirdnessOptions& opt = {}) {
  return comment_weirdness(
      tokens,
      [&](const std::string& t) -> std::optional<double> {
        auto it = month_map.find(t);
        if (it == month_map.end()) return std::nullopt;
        return it->second;
      },
      opt);
}

inline std::optional<double> comment_weirdness(const WeirdnessModel& model, MonthKey month,
                                               std::span<const std::string> tokens,
                                               const CommentWeirdnessOptions& opt = {}) {
  const auto& vals = model.word_weirdness.at(month);
  return comment_weirdness(
      tokens,
      [&](const std::string& t) -> std::optional<double> {
        auto it = model.vocabulary_index.find(t);
        if (it == model.vocabulary_index.end()) return std::nullopt;
        return vals[it->second];
      },
      opt);
}

// ---------------------------------------------------------------------------
// Serialization

/// "# period=<p> total=<n>" then "word,count", rows by descending count then word.
inline void write_frequency_table(std::ostream& out, const FrequencyTable& t) {
  out << "# period=" << t.period << " total=" << t.total << "\n";
  out << "word,count\n";
  std::vector<std::pair<std::string, std::uint64_t>> rows(t.counts.begin(), t.counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  for (const auto& [w, c] : rows) out << csv_escape(w) << ',' << c << '\n';
}

inline FrequencyTable read_frequency_table(std::istream& in) {
  FrequencyTable t;
  std::string first;
  if (!std::getline(in, first) || first.rfind("# ", 0) != 0) throw InputError("frequency table: missing '# period=... total=...' line");
  std::optional<std::uint64_t> declared;
  for (std::size_t pos = 2; pos < first.size();) {
    auto end = first.find(' ', pos);
    if (end == std::string::npos) end = first.size();
    std::string_view kv(first.data() + pos, end - pos);
    if (kv.rfind("period=", 0) == 0) t.period = std::string(kv.substr(7));
    if (kv.rfind("total=", 0) == 0) declared = std::stoull(std::string(kv.substr(6)));
    pos = end + 1;
  }
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw InputError("frequency table: missing header");
  const CsvHeader header(row);
  const auto wc = header.require("word", "frequency table");
  const auto cc = header.require("count", "frequency table");
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() <= std::max(wc, cc)) throw InputError("frequency table: short row at line " + std::to_string(reader.line()));
    t.add(row[wc], std::stoull(row[cc]));
  }
  if (declared && *declared != t.total) throw InputError("frequency table: total does not match counts");
  return t;
}

/// month,word,weirdness for every month and vocabulary word.
inline void write_word_weirdness(std::ostream& out, const WeirdnessModel& model) {
  out << "month,word,weirdness\n";
  for (const auto& [m, vals] : model.word_weirdness)
    for (std::size_t i = 0; i < vals.size(); ++i)
      out << m.str() << ',' << csv_escape(model.vocabulary[i]) << ',' << format_double(vals[i]) << '\n';
}

inline void write_drift_summary(std::ostream& out, const WeirdnessModel& model) {
  out << "month,vocab_size,drift_indicator\n";
  for (const auto& [m, d] : model.drift_indicator)
    out << m.str() << ',' << model.vocabulary.size() << ',' << format_double(d) << '\n';
}

}  // namespace wdrift
