#pragma once

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "wdrift/core.hpp"
#include "wdrift/csv.hpp"
#include "wdrift/random.hpp"
#include "wdrift/text.hpp"

namespace wdrift {

// ---------------------------------------------------------------------------
// Timestamps

/// RFC 3339 date-time, e.g. 2020-09-01T00:00:00Z or 2020-09-01 12:30:00.25+02:00.
/// Fractional seconds are truncated; the result is UTC.
inline std::optional<Timestamp> parse_rfc3339(std::string_view s) {
  s = trim(s);
  auto digits = [&](std::size_t pos, std::size_t n) -> std::optional<int> {
    if (pos + n > s.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || s[13] != ':' || s[16] != ':') return std::nullopt;
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
  auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
  auto h = digits(11, 2), mi = digits(14, 2), se = digits(17, 2);
  if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
  if (!ymd.ok() || *h > 23 || *mi > 59 || *se > 60) return std::nullopt;

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  seconds offset{0};
  if (pos == s.size()) return std::nullopt;  // offset is mandatory
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    auto oh = digits(pos + 1, 2), om = digits(pos + 4, 2);
    if (!oh || !om || pos + 3 >= s.size() || s[pos + 3] != ':' || *oh > 23 || *om > 59) return std::nullopt;
    offset = hours{*oh} + minutes{*om};
    if (s[pos] == '-') offset = -offset;
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*se} - offset;
}

inline std::optional<Timestamp> parse_epoch_seconds(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return Timestamp{std::chrono::seconds{v}};
}

inline std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

// ---------------------------------------------------------------------------
// Parsing

enum class InputFormat { Jsonl, Csv };
enum class TimestampFormat { Rfc3339, EpochSeconds };

struct FieldMapping {
  std::string id = "id";
  std::string timestamp = "ts";
  std::string text = "text";
  std::optional<std::string> tokens;  // when absent, text goes through tokenize()
  std::optional<std::string> label;
  std::optional<std::string> prob;
  TimestampFormat timestamp_format = TimestampFormat::Rfc3339;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<CommentRecord> records;
  std::size_t skipped = 0;
  std::vector<RowError> errors;
};

namespace detail {

inline std::vector<std::string> split_token_field(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(to_lower(s.substr(i, j - i)));
    i = j;
  }
  return out;
}

inline Timestamp parse_timestamp_field(std::string_view s, TimestampFormat fmt) {
  auto t = fmt == TimestampFormat::Rfc3339 ? parse_rfc3339(s) : parse_epoch_seconds(s);
  if (!t) throw InputError("unparseable timestamp '" + std::string(s) + "'");
  return *t;
}

inline Label parse_label_field(std::string_view s) {
  auto l = parse_label(trim(s));
  if (!l) throw InputError("unknown label '" + std::string(s) + "'");
  return *l;
}

inline double parse_prob_field(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("probability out of [0,1]: " + format_double(p));
  return p;
}

inline CommentRecord record_from_json(const nlohmann::json& row, const FieldMapping& f) {
  if (!row.is_object()) throw InputError("row is not a JSON object");
  auto field = [&](const std::string& name) -> const nlohmann::json& {
    auto it = row.find(name);
    if (it == row.end() || it->is_null()) throw InputError("missing field '" + name + "'");
    return *it;
  };
  CommentRecord r;
  const auto& id = field(f.id);
  r.id = id.is_string() ? id.get<std::string>() : id.dump();
  const auto& ts = field(f.timestamp);
  if (ts.is_number_integer() && f.timestamp_format == TimestampFormat::EpochSeconds)
    r.timestamp = Timestamp{std::chrono::seconds{ts.get<long long>()}};
  else if (ts.is_string())
    r.timestamp = parse_timestamp_field(ts.get_ref<const std::string&>(), f.timestamp_format);
  else
    throw InputError("unparseable timestamp " + ts.dump());
  const auto& text = field(f.text);
  if (!text.is_string()) throw InputError("field '" + f.text + "' is not a string");
  r.text = text.get<std::string>();
  if (f.tokens) {
    const auto& tok = field(*f.tokens);
    if (tok.is_array()) {
      for (const auto& t : tok) {
        if (!t.is_string()) throw InputError("token list contains a non-string");
        r.tokens.push_back(to_lower(t.get_ref<const std::string&>()));
      }
    } else if (tok.is_string()) {
      r.tokens = split_token_field(tok.get_ref<const std::string&>());
    } else {
      throw InputError("field '" + *f.tokens + "' is neither a list nor a string");
    }
  } else {
    r.tokens = tokenize(r.text);
  }
  if (f.label) {
    auto it = row.find(*f.label);
    if (it != row.end() && !it->is_null()) {
      if (it->is_string()) r.label = parse_label_field(it->get_ref<const std::string&>());
      else if (it->is_number_integer()) r.label = parse_label_field(std::to_string(it->get<int>()));
      else throw InputError("unknown label " + it->dump());
    }
  }
  if (f.prob) {
    auto it = row.find(*f.prob);
    if (it != row.end() && !it->is_null()) {
      if (!it->is_number()) throw InputError("probability is not a number");
      r.predicted_prob = parse_prob_field(it->get<double>());
    }
  }
  return r;
}

}  // namespace detail

/// Parses a comment file. A CSV header lacking a mapped column is fatal
/// (InputError naming the column); bad rows are counted, recorded and skipped.
/// Duplicate ids are treated as bad rows (the first occurrence wins).
inline ParseResult parse_comments(std::istream& in, InputFormat format, const FieldMapping& fields) {
  ParseResult result;
  std::unordered_set<std::string> seen;
  auto accept = [&](std::size_t line, auto&& make) {
    try {
      CommentRecord r = make();
      if (r.id.empty()) throw InputError("empty id");
      if (!seen.insert(r.id).second) throw InputError("duplicate id '" + r.id + "'");
      result.records.push_back(std::move(r));
    } catch (const InputError& e) {
      ++result.skipped;
      result.errors.push_back({line, e.what()});
    }
  };

  if (format == InputFormat::Jsonl) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      accept(lineno, [&] {
        nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
        if (row.is_discarded()) throw InputError("malformed JSON");
        try {
          return detail::record_from_json(row, fields);
        } catch (const nlohmann::json::exception& e) {
          // invalid UTF-8 inside strings surfaces here
          throw InputError(e.what());
        }
      });
    }
    return result;
  }

  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) return result;
  const CsvHeader header(row);
  const auto id_col = header.require(fields.id, "comment file");
  const auto ts_col = header.require(fields.timestamp, "comment file");
  const auto text_col = header.require(fields.text, "comment file");
  std::optional<std::size_t> tok_col, label_col, prob_col;
  if (fields.tokens) tok_col = header.require(*fields.tokens, "comment file");
  if (fields.label) label_col = header.require(*fields.label, "comment file");
  if (fields.prob) prob_col = header.require(*fields.prob, "comment file");

  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    accept(reader.line(), [&] {
      auto cell = [&](std::size_t c) -> const std::string& {
        if (c >= row.size()) throw InputError("row has " + std::to_string(row.size()) + " fields");
        return row[c];
      };
      CommentRecord r;
      r.id = std::string(trim(cell(id_col)));
      r.timestamp = detail::parse_timestamp_field(cell(ts_col), fields.timestamp_format);
      r.text = cell(text_col);
      r.tokens = tok_col ? detail::split_token_field(cell(*tok_col)) : tokenize(r.text);
      if (label_col && !trim(cell(*label_col)).empty()) r.label = detail::parse_label_field(cell(*label_col));
      if (prob_col && !trim(cell(*prob_col)).empty()) {
        auto p = parse_double(cell(*prob_col));
        if (!p) throw InputError("probability is not a number");
        r.predicted_prob = detail::parse_prob_field(*p);
      }
      return r;
    });
  }
  return result;
}

/// Writes records in the JSONL layout parse_comments reads with the default
/// mapping ("id", "ts", "text"), plus "tokens", "label" and "prob" when set.
inline void write_comments_jsonl(std::ostream& out, const std::vector<CommentRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["ts"] = format_rfc3339(r.timestamp);
    j["text"] = r.text;
    j["tokens"] = r.tokens;
    if (r.label) j["label"] = std::string(to_string(*r.label));
    if (r.predicted_prob) j["prob"] = *r.predicted_prob;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Keyword filtering

enum class MatchMode { Prefix, Exact };

class KeywordList {
 public:
  KeywordList() = default;

  explicit KeywordList(const std::vector<std::string>& words) {
    for (const auto& w : words) add(w);
  }

  /// One keyword per line; '#' starts a comment; blank lines ignored.
  static KeywordList load(std::istream& in) {
    KeywordList list;
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto w = trim(line);
      if (!w.empty()) list.add(std::string(w));
    }
    return list;
  }

  /// Hungarian vaccination keyword stems used for the anti-vax pre-filter.
  static KeywordList hungarian_antivax() {
    return KeywordList({"olt", "vakcina", "ad", "kap", "orosz", "kína", "astra", "pfizer", "moderna",
                        "szputnyik", "sem", "nem", "%", "megbízható", "hatásos", "veszélyes"});
  }

  void add(std::string_view word) {
    std::string w = to_lower(trim(word));
    if (w.empty()) return;
    lengths_.insert(w.size());
    words_.insert(std::move(w));
  }

  bool empty() const { return words_.empty(); }
  std::size_t size() const { return words_.size(); }
  const std::set<std::string>& words() const { return words_; }

  /// Token is assumed lowercase. Prefix mode: some keyword is a prefix of the token.
  bool matches(std::string_view token, MatchMode mode) const {
    if (mode == MatchMode::Exact) return words_.find(std::string(token)) != words_.end();
    for (std::size_t len : lengths_) {
      if (len > token.size()) break;
      if (words_.find(std::string(token.substr(0, len))) != words_.end()) return true;
    }
    return false;
  }

 private:
  std::set<std::string> words_;
  std::set<std::size_t> lengths_;
};

struct FilterStats {
  std::size_t retained = 0;
  std::size_t removed = 0;
  double removed_fraction = 0.0;

  nlohmann::ordered_json to_json() const {
    return {{"retained", retained}, {"removed", removed}, {"removed_fraction", removed_fraction}};
  }
};

struct FilterResult {
  std::vector<CommentRecord> retained;
  std::vector<CommentRecord> removed;
  FilterStats stats;
};

inline bool comment_matches(const CommentRecord& c, const KeywordList& keywords, MatchMode mode) {
  return std::any_of(c.tokens.begin(), c.tokens.end(),
                     [&](const std::string& t) { return keywords.matches(t, mode); });
}

inline FilterResult keyword_filter(std::vector<CommentRecord> comments, const KeywordList& keywords,
                                   MatchMode mode = MatchMode::Prefix) {
  if (keywords.empty()) throw InputError("keyword list is empty");
  FilterResult out;
  for (auto& c : comments) {
    if (comment_matches(c, keywords, mode)) out.retained.push_back(std::move(c));
    else out.removed.push_back(std::move(c));
  }
  out.stats.retained = out.retained.size();
  out.stats.removed = out.removed.size();
  const auto total = out.stats.retained + out.stats.removed;
  out.stats.removed_fraction = total == 0 ? 0.0 : static_cast<double>(out.stats.removed) / static_cast<double>(total);
  return out;
}

// ---------------------------------------------------------------------------
// Monthly buckets

using MonthBuckets = std::map<MonthKey, std::vector<CommentRecord>>;

inline MonthBuckets bucket_by_month(std::vector<CommentRecord> comments) {
  MonthBuckets buckets;
  for (auto& c : comments) {
    const auto key = MonthKey::of(c.timestamp);
    buckets[key].push_back(std::move(c));
  }
  return buckets;
}

/// Independent uniform downsample of each bucket to min(n, size), without
/// replacement. Each month draws from its own substream of `seed`, so the
/// result does not depend on which months are present or processing order.
/// Selected records keep their input order.
inline MonthBuckets monthly_sample(const MonthBuckets& buckets, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("monthly sample size must be >= 1");
  MonthBuckets out;
  for (const auto& [month, records] : buckets) {
    auto& dst = out[month];
    if (records.size() <= n) {
      dst = records;
      continue;
    }
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(month.year) * 12 + month.month);
    auto idx = sample_indices(records.size(), n, rng);
    std::sort(idx.begin(), idx.end());
    dst.reserve(idx.size());
    for (auto i : idx) dst.push_back(records[i]);
  }
  return out;
}

}  // namespace wdrift
