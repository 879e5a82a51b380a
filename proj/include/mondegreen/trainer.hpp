// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mondegreen/errors.hpp"
#include "mondegreen/phonetics.hpp"
#include "mondegreen/query.hpp"
#include "mondegreen/rewrite_table.hpp"

namespace mondegreen {

enum class Outcome { Successful, Abandoned };

/// Successful iff the user clicked at least one result.
inline Outcome classify(const QueryLogRecord& r) {
  return r.successful() ? Outcome::Successful : Outcome::Abandoned;
}

/// Thresholds of the candidate formula plus the pairing window.
struct TrainerConfig {
  double alpha = 0.5;               // min abandonment rate of q1 to train on
  double beta = 0.2;                // min correction-frequency ratio
  std::uint32_t tau = 2;            // max phonetic distance
  std::uint32_t t_window = 60;      // pairing window, seconds
  std::uint32_t min_query_count = 5;

  void validate() const {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0,1]");
    if (beta < 0.0 || beta > 1.0) throw ConfigError("beta must be in [0,1]");
    if (t_window == 0) throw ConfigError("t_window must be positive");
    if (min_query_count == 0) throw ConfigError("min_query_count must be positive");
  }
};

/// An (abandoned, successful correction) pair mined from one user's stream.
struct CorrectionPair {
  NormalizedQuery abandoned;   // q1
  NormalizedQuery correction;  // q2
  std::string user_id;
  std::int64_t dt = 0;  // seconds between the two queries, 0 < dt < t_window
};

/// The three count tables everything downstream reads. Counts are over
/// normalized query text ("exact query matching").
struct CountTables {
  // q1 -> (q2 -> number of times q2 was mined as a correction for q1)
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> pair_count;
  std::unordered_map<std::string, std::uint64_t> query_count;
  std::unordered_map<std::string, std::uint64_t> abandoned_count;

  std::uint64_t pairs(const std::string& q1, const std::string& q2) const {
    auto it = pair_count.find(q1);
    if (it == pair_count.end()) return 0;
    auto jt = it->second.find(q2);
    return jt == it->second.end() ? 0 : jt->second;
  }

  std::uint64_t count(const std::string& q) const {
    auto it = query_count.find(q);
    return it == query_count.end() ? 0 : it->second;
  }

  /// Fraction of q's occurrences that were abandoned (zero clicks).
  double abandonment_rate(const std::string& q) const {
    auto it = query_count.find(q);
    if (it == query_count.end() || it->second == 0) return 0.0;
    auto ab = abandoned_count.find(q);
    std::uint64_t a = ab == abandoned_count.end() ? 0 : ab->second;
    return static_cast<double>(a) / static_cast<double>(it->second);
  }
};

/// Reorders a record stream into contiguous per-user blocks, preserving each
/// user's original (time) order: the shape mine_pairs expects. Blocks appear
/// in order of each user's first appearance.
inline std::vector<QueryLogRecord> group_by_user(std::span<const QueryLogRecord> records) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_user;
  std::vector<const std::string*> user_order;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = by_user.try_emplace(records[i].user_id);
    if (inserted) user_order.push_back(&it->first);
    it->second.push_back(i);
  }
  std::vector<QueryLogRecord> out;
  out.reserve(records.size());
  for (const std::string* user : user_order) {
    for (std::size_t i : by_user[*user]) out.push_back(records[i]);
  }
  return out;
}

/// Mines correction pairs from a record stream that is grouped by user and
/// time-sorted within each group. For each abandoned occurrence of q1, emits
/// at most one pair: the first later record by the same user that is
/// successful, lands within the window (0 < dt < t_window), and normalizes to
/// a different query. One pair per occurrence keeps
/// sum_q2 pair_count(q1,q2) <= query_count(q1).
inline std::vector<CorrectionPair> mine_pairs(std::span<const QueryLogRecord> records,
                                              const TrainerConfig& config) {
  config.validate();
  std::vector<NormalizedQuery> norm;
  norm.reserve(records.size());
  for (const auto& r : records) norm.push_back(normalize(r.raw_text));

  // Contract check: contiguous user blocks, ascending timestamps inside each.
  std::unordered_set<std::string> finished_users;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i == 0 || records[i].user_id != records[i - 1].user_id) {
      if (!finished_users.insert(records[i].user_id).second)
        throw OrderingError("records for user '" + records[i].user_id + "' are not contiguous");
    } else if (records[i].timestamp < records[i - 1].timestamp) {
      throw OrderingError("timestamps for user '" + records[i].user_id + "' are not ascending");
    }
  }

  std::vector<CorrectionPair> pairs;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].successful()) continue;
    for (std::size_t j = i + 1;
         j < records.size() && records[j].user_id == records[i].user_id; ++j) {
      std::int64_t dt = records[j].timestamp - records[i].timestamp;
      if (dt >= static_cast<std::int64_t>(config.t_window)) break;
      if (dt <= 0 || !records[j].successful() || norm[j] == norm[i]) continue;
      pairs.push_back({norm[i], norm[j], records[i].user_id, dt});
      break;
    }
  }
  return pairs;
}

/// Aggregates the count tables: every record occurrence feeds query_count,
/// zero-click occurrences feed abandoned_count, mined pairs feed pair_count.
inline CountTables build_tables(std::span<const QueryLogRecord> records,
                                std::span<const CorrectionPair> pairs) {
  CountTables t;
  for (const auto& r : records) {
    std::string q = normalize(r.raw_text).text();
    ++t.query_count[q];
    if (!r.successful()) ++t.abandoned_count[q];
  }
  for (const auto& p : pairs) ++t.pair_count[p.abandoned.text()][p.correction.text()];
  return t;
}

/// The candidate set C for query q: corrections q' with
///   phonetic_distance(q', q) <= tau,
///   1 - pair_count(q,q')/query_count(q) < abandonment_rate(q),
///   pair_count(q,q')/query_count(q) > beta.
/// Only queries with pair_count(q,q') > 0 can satisfy the beta condition, so
/// those are the search space. Returned sorted for deterministic iteration.
inline std::vector<NormalizedQuery> candidate_set(const NormalizedQuery& q,
                                                  const CountTables& tables,
                                                  const TrainerConfig& config,
                                                  const PronouncingLexicon& lexicon) {
  std::vector<NormalizedQuery> out;
  auto it = tables.pair_count.find(q.text());
  if (it == tables.pair_count.end()) return out;
  std::uint64_t cq = tables.count(q.text());
  if (cq == 0) return out;
  double ab_rate = tables.abandonment_rate(q.text());
  G2pCache g2p_cache(lexicon);
  for (const auto& [cand_text, n] : it->second) {
    if (n == 0) continue;
    double ratio = static_cast<double>(n) / static_cast<double>(cq);
    if (!(ratio > config.beta)) continue;
    if (!(1.0 - ratio < ab_rate)) continue;
    NormalizedQuery cand = NormalizedQuery::from_normalized(cand_text);
    if (g2p_cache.distance(cand, q) > config.tau) continue;
    out.push_back(std::move(cand));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Builds the offline rewrite table: for every query q that clears the alpha
/// and min_query_count filters and has a non-empty candidate set, the entry is
/// the candidate with the highest pair count (ties: lexicographically smallest
/// correction). Deterministic given identical tables and config.
inline RewriteTable build_rewrite_table(const CountTables& tables, const TrainerConfig& config,
                                        const PronouncingLexicon& lexicon,
                                        std::uint64_t record_count = 0) {
  config.validate();
  std::vector<std::string> q1s;
  q1s.reserve(tables.pair_count.size());
  for (const auto& [q1, cands] : tables.pair_count) q1s.push_back(q1);
  std::sort(q1s.begin(), q1s.end());

  std::unordered_map<std::string, RewriteEntry> entries;
  for (const auto& q1 : q1s) {
    std::uint64_t cq = tables.count(q1);
    if (cq < config.min_query_count) continue;
    if (!(tables.abandonment_rate(q1) > config.alpha)) continue;
    NormalizedQuery q = NormalizedQuery::from_normalized(q1);
    auto candidates = candidate_set(q, tables, config, lexicon);
    if (candidates.empty()) continue;
    const NormalizedQuery* best = nullptr;
    std::uint64_t best_n = 0;
    for (const auto& cand : candidates) {  // sorted, so first max wins ties
      std::uint64_t n = tables.pairs(q1, cand.text());
      if (best == nullptr || n > best_n) {
        best = &cand;
        best_n = n;
      }
    }
    entries[q1] = RewriteEntry{best->text(), best_n,
                               static_cast<double>(best_n) / static_cast<double>(cq)};
  }

  SnapshotMeta meta;
  meta.alpha = config.alpha;
  meta.beta = config.beta;
  meta.tau = config.tau;
  meta.t_window = config.t_window;
  meta.min_query_count = config.min_query_count;
  meta.record_count = record_count;
  meta.build_timestamp = static_cast<std::int64_t>(std::time(nullptr));
  return RewriteTable(std::move(entries), meta);
}

}  // namespace mondegreen
