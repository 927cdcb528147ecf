#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wdrift/core.hpp"
#include "wdrift/text.hpp"

namespace wdrift {

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record. Returns false at end of input.
  bool next(std::vector<std::string>& row) {
    row.clear();
    int c = in_.get();
    if (c == EOF) return false;
    record_line_ = line_ + 1;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (;; c = in_.get()) {
      if (quoted) {
        if (c == EOF) throw InputError("unterminated quoted field at line " + std::to_string(record_line_));
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == '"' && field.empty() && !was_quoted) {
        quoted = was_quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n' || c == EOF) {
        ++line_;
        if (!field.empty() && field.back() == '\r' && !was_quoted) field.pop_back();
        row.push_back(std::move(field));
        return true;
      } else if (c == '\r' && in_.peek() == '\n') {
        // swallowed, newline follows
      } else {
        field.push_back(static_cast<char>(c));
      }
    }
  }

  /// 1-based line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

/// Header lookup: column name -> index.
class CsvHeader {
 public:
  CsvHeader() = default;
  explicit CsvHeader(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::string n{trim(names[i])};
      if (i == 0 && n.rfind("\xEF\xBB\xBF", 0) == 0) n.erase(0, 3);  // BOM
      index_.emplace(std::move(n), i);
    }
  }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name, std::string_view file_kind) const {
    auto i = find(name);
    if (!i) throw InputError(std::string(file_kind) + ": missing column '" + name + "'");
    return *i;
  }

 private:
  std::map<std::string, std::size_t> index_;
};

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Shortest round-trippable decimal form.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Fixed-point rendering used by the human-readable tables.
inline std::string format_fixed(double v, int decimals = 2) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) return std::nullopt;
  return v;
}

}  // namespace wdrift
