// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mondegreen/detail/text.hpp"
#include "mondegreen/errors.hpp"

namespace mondegreen {

// ---------------------------------------------------------------------------
// NormalizedQuery
// ---------------------------------------------------------------------------

/// Canonical query text: lowercased, trimmed, internal whitespace runs
/// collapsed to single spaces, never empty. Every count table and rewrite
/// table is keyed on this form. Construct via normalize() or, for text that
/// is already canonical (e.g. snapshot entries), from_normalized().
class NormalizedQuery {
 public:
  NormalizedQuery() = default;

  const std::string& text() const { return text_; }
  bool empty() const { return text_.empty(); }

  friend bool operator==(const NormalizedQuery& a, const NormalizedQuery& b) {
    return a.text_ == b.text_;
  }
  friend bool operator!=(const NormalizedQuery& a, const NormalizedQuery& b) {
    return a.text_ != b.text_;
  }
  friend bool operator<(const NormalizedQuery& a, const NormalizedQuery& b) {
    return a.text_ < b.text_;
  }

  /// Wraps text that must already satisfy the invariants; throws
  /// InvariantError otherwise. Use normalize() for raw input.
  static NormalizedQuery from_normalized(std::string text);

 private:
  explicit NormalizedQuery(std::string text) : text_(std::move(text)) {}
  friend NormalizedQuery normalize(std::string_view raw);

  std::string text_;
};

/// Lowercases (ASCII + Latin-1 + Latin Extended-A), trims, and collapses
/// whitespace runs to single spaces. Idempotent. Throws EmptyQueryError if
/// nothing remains.
inline NormalizedQuery normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < raw.size()) {
    auto [cp, valid] = detail::decode_utf8(raw, i);
    if (valid && detail::is_space_cp(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (valid) {
      detail::encode_utf8(detail::lower_codepoint(cp), out);
    } else {
      out.push_back(static_cast<char>(cp));
    }
  }
  if (out.empty()) throw EmptyQueryError();
  return NormalizedQuery(std::move(out));
}

inline bool is_normalized(std::string_view text) {
  if (text.empty()) return false;
  if (text.front() == ' ' || text.back() == ' ') return false;
  std::size_t i = 0;
  bool prev_space = false;
  while (i < text.size()) {
    auto [cp, valid] = detail::decode_utf8(text, i);
    if (valid) {
      if (detail::is_space_cp(cp) && cp != ' ') return false;
      if (detail::lower_codepoint(cp) != cp) return false;
    }
    bool space = valid && cp == ' ';
    if (space && prev_space) return false;
    prev_space = space;
  }
  return true;
}

inline NormalizedQuery NormalizedQuery::from_normalized(std::string text) {
  if (!is_normalized(text))
    throw InvariantError("text is not in normalized form: '" + text + "'");
  NormalizedQuery q;
  q.text_ = std::move(text);
  return q;
}

// ---------------------------------------------------------------------------
// Query log records
// ---------------------------------------------------------------------------

enum class AsrParty : std::uint8_t { FirstParty, ThirdParty };

inline std::string_view to_string(AsrParty p) {
  return p == AsrParty::FirstParty ? "1P" : "3P";
}

/// One voice query event. Immutable by convention once built; value type.
struct QueryLogRecord {
  std::string user_id;
  std::int64_t timestamp = 0;  // seconds since epoch
  std::string raw_text;
  std::string asr_source;
  AsrParty asr_party = AsrParty::FirstParty;
  std::string locale = "en-US";
  std::uint32_t clicks = 0;
  bool extended_interaction = false;

  /// A successful query is one the user clicked at least one result for.
  bool successful() const { return clicks >= 1; }

  friend bool operator==(const QueryLogRecord&, const QueryLogRecord&) = default;
};

/// Validates the record invariants; throws InvariantError naming the first
/// violated one. Fields that land in fixed TSV columns must not contain tab
/// or newline (raw_text may; it is escaped on write).
inline void validate(const QueryLogRecord& r, std::size_t line_no = 0) {
  auto fail = [&](const std::string& msg) {
    if (line_no) throw InvariantError(msg, line_no);
    throw InvariantError(msg);
  };
  if (r.user_id.empty()) fail("user_id is empty");
  if (r.timestamp < 0) fail("timestamp < 0");
  if (r.extended_interaction && r.clicks < 1) fail("extended_interaction with zero clicks");
  if (r.raw_text.empty()) fail("raw_text is empty");
  for (const std::string* f : {&r.user_id, &r.asr_source, &r.locale}) {
    if (f->find('\t') != std::string::npos || f->find('\n') != std::string::npos)
      fail("tab/newline in fixed field");
  }
  if (r.asr_source.empty()) fail("asr_source is empty");
  if (r.locale.empty()) fail("locale is empty");
}

// Log file format, one record per line:
//   user_id \t timestamp \t asr_source \t asr_party(1P|3P) \t locale \t
//   clicks \t extended_interaction(0|1) \t raw_text
// raw_text is escaped (\t, \n, \\); the other fields may not contain tabs or
// newlines at all.

inline std::string write_log_line(const QueryLogRecord& r) {
  validate(r);
  std::string out;
  out.reserve(r.user_id.size() + r.raw_text.size() + 48);
  out += r.user_id;
  out += '\t';
  out += std::to_string(r.timestamp);
  out += '\t';
  out += r.asr_source;
  out += '\t';
  out += to_string(r.asr_party);
  out += '\t';
  out += r.locale;
  out += '\t';
  out += std::to_string(r.clicks);
  out += '\t';
  out += r.extended_interaction ? '1' : '0';
  out += '\t';
  out += detail::escape_field(r.raw_text);
  return out;
}

inline QueryLogRecord parse_log_line(std::string_view line, std::size_t line_no = 0) {
  auto fields = detail::split(line, '\t');
  if (fields.size() != 8)
    throw ParseError("expected 8 tab-separated fields, got " + std::to_string(fields.size()),
                     line_no);
  QueryLogRecord r;
  r.user_id = std::string(fields[0]);
  r.timestamp = static_cast<std::int64_t>(detail::parse_u64(fields[1], "timestamp", line_no));
  r.asr_source = std::string(fields[2]);
  if (fields[3] == "1P") {
    r.asr_party = AsrParty::FirstParty;
  } else if (fields[3] == "3P") {
    r.asr_party = AsrParty::ThirdParty;
  } else {
    throw ParseError("asr_party must be 1P or 3P, got '" + std::string(fields[3]) + "'", line_no);
  }
  r.locale = std::string(fields[4]);
  r.clicks = static_cast<std::uint32_t>(detail::parse_u64(fields[5], "clicks", line_no));
  if (fields[6] == "1") {
    r.extended_interaction = true;
  } else if (fields[6] == "0") {
    r.extended_interaction = false;
  } else {
    throw ParseError("extended_interaction must be 0 or 1", line_no);
  }
  r.raw_text = detail::unescape_field(fields[7], line_no);
  validate(r, line_no);
  return r;
}

// ---------------------------------------------------------------------------
// Log file I/O
// ---------------------------------------------------------------------------

inline void write_log_stream(std::ostream& os, const std::vector<QueryLogRecord>& records) {
  for (const auto& r : records) os << write_log_line(r) << '\n';
}

inline std::vector<QueryLogRecord> read_log_stream(std::istream& is) {
  std::vector<QueryLogRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(parse_log_line(line, line_no));
  }
  return out;
}

inline std::vector<QueryLogRecord> read_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open log file: " + path);
  return read_log_stream(in);
}

}  // namespace mondegreen

template <>
struct std::hash<mondegreen::NormalizedQuery> {
  std::size_t operator()(const mondegreen::NormalizedQuery& q) const noexcept {
    return std::hash<std::string>{}(q.text());
  }
};
