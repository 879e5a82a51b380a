// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "mondegreen/errors.hpp"

namespace mondegreen::detail {

// ---------------------------------------------------------------------------
// UTF-8 codepoint handling. Queries are UTF-8; we lowercase ASCII plus the
// Latin-1 supplement and Latin Extended-A ranges, which covers the locales the
// bundled data targets. Codepoints outside those ranges pass through, as do
// bytes that do not form valid UTF-8.
// ---------------------------------------------------------------------------

inline std::uint32_t lower_codepoint(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x0130) return 0x0069;  // dotted capital I, simple case map
  if (cp == 0x0178) return 0x00FF;  // Y with diaeresis
  if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
  return cp;
}

// Decodes one codepoint starting at s[i]. Returns the codepoint and advances
// i past it. Invalid sequences yield the single raw byte (marked invalid so
// the caller re-emits it untouched).
struct DecodedCp {
  std::uint32_t cp;
  bool valid;
};

inline DecodedCp decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return {b0, true};
  }
  auto cont = [&](std::size_t k) {
    return k < s.size() && (byte(k) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
    std::uint32_t cp = (std::uint32_t(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
    if (cp >= 0x80) {
      i += 2;
      return {cp, true};
    }
  } else if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
    std::uint32_t cp = (std::uint32_t(b0 & 0x0F) << 12) |
                       (std::uint32_t(byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
    if (cp >= 0x800) {
      i += 3;
      return {cp, true};
    }
  } else if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    std::uint32_t cp = (std::uint32_t(b0 & 0x07) << 18) |
                       (std::uint32_t(byte(i + 1) & 0x3F) << 12) |
                       (std::uint32_t(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
    if (cp >= 0x10000 && cp <= 0x10FFFF) {
      i += 4;
      return {cp, true};
    }
  }
  ++i;
  return {b0, false};
}

inline void encode_utf8(std::uint32_t cp, std::string& out) {
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

inline bool is_space_cp(std::uint32_t cp) {
  return cp == 0x20 || (cp >= 0x09 && cp <= 0x0D) || cp == 0x00A0;
}

// ---------------------------------------------------------------------------
// Splitting / joining
// ---------------------------------------------------------------------------

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Splits on spaces, dropping empty tokens. Normalized queries never produce
/// empty tokens, but callers may pass arbitrary text.
inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename Range>
inline std::string join(const Range& parts, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out.append(sep);
    out.append(p);
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// TSV field escaping: tab -> \t, newline -> \n, backslash -> \\ .
// ---------------------------------------------------------------------------

inline std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string unescape_field(std::string_view s, std::size_t line_no) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 1 >= s.size()) throw ParseError("dangling backslash in field", line_no);
    ++i;
    switch (s[i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      default: throw ParseError(std::string("bad escape \\") + s[i], line_no);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strict numeric parsing
// ---------------------------------------------------------------------------

inline std::uint64_t parse_u64(std::string_view s, std::string_view name, std::size_t line_no) {
  if (s.empty()) throw ParseError(std::string(name) + ": empty numeric field", line_no);
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw ParseError(std::string(name) + ": non-numeric value '" + std::string(s) + "'", line_no);
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

inline double parse_double(std::string_view s, std::string_view name, std::size_t line_no) {
  std::string buf(s);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str() || *end != '\0')
    throw ParseError(std::string(name) + ": bad number '" + buf + "'", line_no);
  return v;
}

/// Fixed 9-decimal formatting. Used everywhere a ratio lands in a file so
/// write -> parse -> write is byte-stable.
inline std::string format_ratio(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

}  // namespace mondegreen::detail
