#pragma once

#include <locale>
#include <string>
#include <string_view>
#include <vector>

#include "wdrift/core.hpp"

namespace wdrift {

namespace detail {

inline const std::ctype<wchar_t>& unicode_ctype() {
  static const std::locale loc = [] {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return std::locale(name);
      } catch (const std::runtime_error&) {
      }
    }
    return std::locale::classic();
  }();
  return std::use_facet<std::ctype<wchar_t>>(loc);
}

}  // namespace detail

/// Decodes UTF-8, rejecting overlong forms, surrogates and truncation.
inline bool decode_utf8(std::string_view s, std::u32string& out) {
  out.clear();
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    char32_t cp;
    std::size_t len;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    out.push_back(cp);
    i += len;
  }
  return true;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + ('a' - 'A') : cp;
  return static_cast<char32_t>(detail::unicode_ctype().tolower(static_cast<wchar_t>(cp)));
}

/// Unicode-aware lowercase of a UTF-8 string. Throws InputError on invalid UTF-8.
inline std::string to_lower(std::string_view s) {
  std::u32string cps;
  if (!decode_utf8(s, cps)) throw InputError("invalid UTF-8");
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : cps) append_utf8(out, to_lower(cp));
  return out;
}

/// Default tokenizer: lowercase, split on whitespace and punctuation,
/// punctuation dropped except '%', which becomes a token of its own.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::u32string cps;
  if (!decode_utf8(text, cps)) throw InputError("invalid UTF-8");
  const auto& ct = detail::unicode_ctype();
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (char32_t cp : cps) {
    const auto wc = static_cast<wchar_t>(cp);
    if (cp == U'%') {
      flush();
      tokens.emplace_back("%");
    } else if (ct.is(std::ctype_base::space, wc) || ct.is(std::ctype_base::punct, wc) ||
               ct.is(std::ctype_base::cntrl, wc) || cp == 0xA0) {
      flush();
    } else {
      append_utf8(cur, to_lower(cp));
    }
  }
  flush();
  return tokens;
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace wdrift
