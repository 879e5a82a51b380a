// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mondegreen/detail/text.hpp"
#include "mondegreen/errors.hpp"
#include "mondegreen/query.hpp"
#include "mondegreen/version.hpp"

namespace mondegreen {

/// One offline-computed rewrite: the argmax correction for a query plus the
/// statistics it won with.
struct RewriteEntry {
  std::string correction;
  std::uint64_t pair_count = 0;
  double ratio = 0.0;  // pair_count / query_count at build time

  friend bool operator==(const RewriteEntry&, const RewriteEntry&) = default;
};

struct SnapshotMeta {
  int format_version = kSnapshotFormatVersion;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint32_t tau = 0;
  std::uint32_t t_window = 0;
  std::uint32_t min_query_count = 0;
  std::uint64_t record_count = 0;   // training records behind the table
  std::int64_t build_timestamp = 0; // in-memory only, never serialized
};

/// Immutable map from normalized query to its single best correction.
/// Snapshots are canonical: entries sorted by query, unique keys, fixed ratio
/// formatting, so identical inputs produce byte-identical files.
class RewriteTable {
 public:
  RewriteTable() { refresh_version(); }
  RewriteTable(std::unordered_map<std::string, RewriteEntry> entries, SnapshotMeta meta)
      : entries_(std::move(entries)), meta_(meta) {
    refresh_version();
  }

  const RewriteEntry* find(const NormalizedQuery& q) const {
    auto it = entries_.find(q.text());
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, RewriteEntry>& entries() const { return entries_; }
  const SnapshotMeta& meta() const { return meta_; }

  /// Identifies this table's exact contents; served back with every lookup.
  const std::string& version() const { return version_; }

  std::vector<std::string> sorted_queries() const {
    std::vector<std::string> keys;
    keys.reserve(entries_.size());
    for (const auto& [q, e] : entries_) keys.push_back(q);
    std::sort(keys.begin(), keys.end());
    return keys;
  }

 private:
  void refresh_version() {
    // FNV-1a over the canonical serialized form.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::string_view s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
      }
    };
    mix("v" + std::to_string(meta_.format_version));
    mix("|records=" + std::to_string(meta_.record_count) + "|");
    for (const auto& q : sorted_queries()) {
      const auto& e = entries_.at(q);
      mix(q);
      mix("\t" + e.correction + "\t" + std::to_string(e.pair_count) + "\t" +
          detail::format_ratio(e.ratio) + "\n");
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%d-%016llx", meta_.format_version,
                  static_cast<unsigned long long>(h));
    version_ = buf;
  }

  std::unordered_map<std::string, RewriteEntry> entries_;
  SnapshotMeta meta_;
  std::string version_;
};

// ---------------------------------------------------------------------------
// Snapshot I/O (text form, canonical)
//
//   #version 1
//   #config: alpha=0.500000000 beta=0.200000000 tau=2 t=60 min_count=5
//   #records=150000
//   query \t correction \t pair_count \t ratio      (sorted by query)
// ---------------------------------------------------------------------------

inline void write_snapshot_stream(std::ostream& os, const RewriteTable& table) {
  const auto& m = table.meta();
  os << "#version " << m.format_version << '\n';
  os << "#config: alpha=" << detail::format_ratio(m.alpha)
     << " beta=" << detail::format_ratio(m.beta) << " tau=" << m.tau << " t=" << m.t_window
     << " min_count=" << m.min_query_count << '\n';
  os << "#records=" << m.record_count << '\n';
  for (const auto& q : table.sorted_queries()) {
    const auto& e = table.entries().at(q);
    os << q << '\t' << e.correction << '\t' << e.pair_count << '\t'
       << detail::format_ratio(e.ratio) << '\n';
  }
}

inline std::string snapshot_to_string(const RewriteTable& table) {
  std::ostringstream os;
  write_snapshot_stream(os, table);
  return os.str();
}

inline RewriteTable load_snapshot_stream(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      if (!line.empty()) return true;
    }
    return false;
  };

  auto corrupt = [&](const std::string& msg) -> SnapshotError {
    return SnapshotError(SnapshotError::Kind::CorruptLine,
                         "snapshot line " + std::to_string(line_no) + ": " + msg);
  };

  if (!next_line() || line.rfind("#version ", 0) != 0)
    throw corrupt("missing #version header");
  {
    int v = static_cast<int>(detail::parse_u64(std::string_view(line).substr(9), "version", line_no));
    if (v != kSnapshotFormatVersion)
      throw SnapshotError(SnapshotError::Kind::VersionMismatch,
                          "snapshot format version " + std::to_string(v) + " unsupported, want " +
                              std::to_string(kSnapshotFormatVersion));
  }

  SnapshotMeta meta;
  if (!next_line() || line.rfind("#config: ", 0) != 0) throw corrupt("missing #config header");
  for (auto kv : detail::split_words(std::string_view(line).substr(9))) {
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw corrupt("bad #config token");
    auto key = kv.substr(0, eq);
    auto val = kv.substr(eq + 1);
    if (key == "alpha") meta.alpha = detail::parse_double(val, "alpha", line_no);
    else if (key == "beta") meta.beta = detail::parse_double(val, "beta", line_no);
    else if (key == "tau") meta.tau = static_cast<std::uint32_t>(detail::parse_u64(val, "tau", line_no));
    else if (key == "t") meta.t_window = static_cast<std::uint32_t>(detail::parse_u64(val, "t", line_no));
    else if (key == "min_count")
      meta.min_query_count = static_cast<std::uint32_t>(detail::parse_u64(val, "min_count", line_no));
    else throw corrupt("unknown #config key '" + std::string(key) + "'");
  }

  if (!next_line() || line.rfind("#records=", 0) != 0) throw corrupt("missing #records header");
  meta.record_count = detail::parse_u64(std::string_view(line).substr(9), "records", line_no);

  std::unordered_map<std::string, RewriteEntry> entries;
  std::string prev_query;
  while (next_line()) {
    if (line[0] == '#') throw corrupt("unexpected header line in entry section");
    auto fields = detail::split(line, '\t');
    if (fields.size() != 4) throw corrupt("expected 4 fields");
    std::string query(fields[0]);
    RewriteEntry e;
    e.correction = std::string(fields[1]);
    e.pair_count = detail::parse_u64(fields[2], "pair_count", line_no);
    e.ratio = detail::parse_double(fields[3], "ratio", line_no);
    if (!is_normalized(query)) throw corrupt("query not normalized: '" + query + "'");
    if (!is_normalized(e.correction)) throw corrupt("correction not normalized");
    if (query == e.correction) throw corrupt("self-rewrite entry");
    if (e.ratio < 0.0 || e.ratio > 1.0) throw corrupt("ratio out of [0,1]");
    if (!prev_query.empty() && !(prev_query < query)) {
      if (prev_query == query || entries.count(query))
        throw SnapshotError(SnapshotError::Kind::DuplicateKey,
                            "snapshot line " + std::to_string(line_no) + ": duplicate query '" +
                                query + "'");
      throw corrupt("entries not in canonical sorted order");
    }
    if (!entries.emplace(query, std::move(e)).second)
      throw SnapshotError(SnapshotError::Kind::DuplicateKey,
                          "snapshot line " + std::to_string(line_no) + ": duplicate query '" +
                              query + "'");
    prev_query = std::move(query);
  }
  return RewriteTable(std::move(entries), meta);
}

inline RewriteTable load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw SnapshotError(SnapshotError::Kind::MissingFile, "cannot open snapshot: " + path);
  return load_snapshot_stream(in);
}

}  // namespace mondegreen
