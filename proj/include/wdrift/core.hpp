#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wdrift {

/// Raised for anything the caller can fix: bad files, bad flags, violated
/// preconditions. The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Timestamp = std::chrono::sys_seconds;

enum class Label { AntiVax, Other };

inline constexpr std::string_view to_string(Label l) {
  return l == Label::AntiVax ? "AntiVax" : "Other";
}

inline Label other_class(Label l) {
  return l == Label::AntiVax ? Label::Other : Label::AntiVax;
}

/// Accepts the spellings seen in annotation exports: AntiVax / anti-vax /
/// antivaxxer / 1 for the positive class, Other / neutral / 0 otherwise.
inline std::optional<Label> parse_label(std::string_view s) {
  std::string k;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    k.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
  }
  if (k == "antivax" || k == "antivaxxer" || k == "1" || k == "true") return Label::AntiVax;
  if (k == "other" || k == "neutral" || k == "provax" || k == "nonantivax" || k == "0" ||
      k == "false")
    return Label::Other;
  return std::nullopt;
}

/// Calendar month, ordered by (year, month).
struct MonthKey {
  int year = 1970;
  unsigned month = 1;

  friend auto operator<=>(const MonthKey&, const MonthKey&) = default;

  static MonthKey of(Timestamp t) {
    const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(t)};
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month())};
  }

  /// Parses "YYYY-MM".
  static MonthKey parse(std::string_view s) {
    auto bad = [&] { return InputError("invalid month '" + std::string(s) + "', expected YYYY-MM"); };
    if (s.size() != 7 || s[4] != '-') throw bad();
    int y = 0;
    unsigned m = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      if (s[i] < '0' || s[i] > '9') throw bad();
      y = y * 10 + (s[i] - '0');
    }
    for (std::size_t i = 5; i < 7; ++i) {
      if (s[i] < '0' || s[i] > '9') throw bad();
      m = m * 10 + static_cast<unsigned>(s[i] - '0');
    }
    if (m < 1 || m > 12) throw bad();
    return {y, m};
  }

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
    return buf;
  }

  MonthKey next() const { return month == 12 ? MonthKey{year + 1, 1} : MonthKey{year, month + 1}; }

  Timestamp first_second() const {
    return std::chrono::sys_days{std::chrono::year{year} / std::chrono::month{month} / 1};
  }

  std::chrono::seconds length() const { return next().first_second() - first_second(); }
};

/// Inclusive month range.
inline std::vector<MonthKey> month_range(MonthKey first, MonthKey last) {
  std::vector<MonthKey> out;
  for (MonthKey m = first; m <= last; m = m.next()) out.push_back(m);
  return out;
}

struct AnnotationRecord {
  Label annotator1 = Label::Other;
  Label annotator2 = Label::Other;
  std::optional<Label> supervisor;
  Label final_label = Label::Other;
};

struct CommentRecord {
  std::string id;
  Timestamp timestamp{};
  std::string text;
  std::vector<std::string> tokens;
  std::optional<Label> label;
  std::optional<double> predicted_prob;  // P(AntiVax)
  std::optional<AnnotationRecord> annotations;
};

}  // namespace wdrift
