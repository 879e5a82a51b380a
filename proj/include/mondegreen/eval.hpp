// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mondegreen/detail/text.hpp"
#include "mondegreen/errors.hpp"
#include "mondegreen/phonetics.hpp"
#include "mondegreen/query.hpp"
#include "mondegreen/rewrite_table.hpp"
#include "mondegreen/trainer.hpp"

namespace mondegreen {

// ---------------------------------------------------------------------------
// BLEU
//
// Queries average a handful of words, so 4-gram precisions are routinely
// zero. The variant used throughout: n = 1..min(4, candidate length),
// reference-clipped counts, add-one smoothing on numerator and denominator
// for n >= 2 (never unigrams), uniform geometric mean, brevity penalty
// exp(1 - r/c) for c < r. Corpus scores pool raw counts over all pairs and
// smooth once at the pooled level, with a single pooled brevity penalty.
// tests/oracle/bleu_oracle.py is the independent reference for this variant.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::size_t kBleuMaxOrder = 4;

struct BleuStats {
  std::array<std::uint64_t, kBleuMaxOrder> matched{};
  std::array<std::uint64_t, kBleuMaxOrder> total{};
  std::uint64_t cand_len = 0;
  std::uint64_t ref_len = 0;

  void accumulate(std::string_view candidate, std::string_view reference) {
    auto cand = split_words(candidate);
    auto ref = split_words(reference);
    cand_len += cand.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= std::min(kBleuMaxOrder, cand.size()); ++n) {
      // n-gram key: tokens joined with a separator no token can contain
      std::unordered_map<std::string, std::uint64_t> ref_grams;
      for (std::size_t i = 0; i + n <= ref.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < n; ++k) {
          if (k) key.push_back(' ');
          key.append(ref[i + k]);
        }
        ++ref_grams[key];
      }
      std::unordered_map<std::string, std::uint64_t> cand_grams;
      for (std::size_t i = 0; i + n <= cand.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < n; ++k) {
          if (k) key.push_back(' ');
          key.append(cand[i + k]);
        }
        ++cand_grams[key];
      }
      for (const auto& [g, c] : cand_grams) {
        auto it = ref_grams.find(g);
        if (it != ref_grams.end()) matched[n - 1] += std::min(c, it->second);
      }
      total[n - 1] += cand.size() - n + 1;
    }
  }

  double score() const {
    std::size_t max_n = 0;
    while (max_n < kBleuMaxOrder && total[max_n] > 0) ++max_n;
    if (max_n == 0) return 0.0;
    if (matched[0] == 0) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
      std::uint64_t smooth = n == 1 ? 0 : 1;
      log_sum += std::log(static_cast<double>(matched[n - 1] + smooth) /
                          static_cast<double>(total[n - 1] + smooth));
    }
    double geo = std::exp(log_sum / static_cast<double>(max_n));
    double bp = 1.0;
    if (cand_len < ref_len)
      bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
    return bp * geo;
  }
};

}  // namespace detail

inline double sentence_bleu(const NormalizedQuery& candidate, const NormalizedQuery& reference) {
  detail::BleuStats stats;
  stats.accumulate(candidate.text(), reference.text());
  return stats.score();
}

/// (candidate, reference) pairs scored as one corpus. Throws on empty input.
inline double corpus_bleu(std::span<const std::pair<NormalizedQuery, NormalizedQuery>> pairs) {
  if (pairs.empty()) throw Error("corpus_bleu: empty pair list");
  detail::BleuStats stats;
  for (const auto& [cand, ref] : pairs) stats.accumulate(cand.text(), ref.text());
  return stats.score();
}

// ---------------------------------------------------------------------------
// Test-set evaluation (complete set vs triggered set)
// ---------------------------------------------------------------------------

/// One held-out evaluation instance: a (possibly corrupted) input and the
/// successful query it should turn into.
struct EvalPair {
  NormalizedQuery input;
  NormalizedQuery reference;
};

struct SetEvaluation {
  double complete_no_correction = 0.0;
  double complete_model = 0.0;
  std::optional<double> triggered_no_correction;  // absent when nothing triggered
  std::optional<double> triggered_model;
  double trigger_rate_pct = 0.0;
  std::size_t complete_size = 0;
  std::size_t triggered_size = 0;
};

/// Scores the rewrite table on held-out pairs. The triggered set is the
/// subset of inputs the table rewrites; model output is the rewrite when
/// triggered and the input untouched otherwise. "No correction" always uses
/// the input as the candidate.
inline SetEvaluation evaluate_sets(std::span<const EvalPair> test_pairs,
                                   const RewriteTable& table) {
  if (test_pairs.empty()) throw Error("evaluate_sets: empty test set");
  using QQ = std::pair<NormalizedQuery, NormalizedQuery>;
  std::vector<QQ> complete_baseline;
  std::vector<QQ> complete_model;
  std::vector<QQ> trig_baseline;
  std::vector<QQ> trig_model;
  for (const auto& p : test_pairs) {
    NormalizedQuery out = p.input;
    bool triggered = false;
    if (const RewriteEntry* e = table.find(p.input)) {
      out = NormalizedQuery::from_normalized(e->correction);
      triggered = true;
    }
    complete_baseline.emplace_back(p.input, p.reference);
    complete_model.emplace_back(out, p.reference);
    if (triggered) {
      trig_baseline.emplace_back(p.input, p.reference);
      trig_model.emplace_back(out, p.reference);
    }
  }
  SetEvaluation ev;
  ev.complete_size = test_pairs.size();
  ev.triggered_size = trig_model.size();
  ev.complete_no_correction = corpus_bleu(complete_baseline);
  ev.complete_model = corpus_bleu(complete_model);
  if (!trig_model.empty()) {
    ev.triggered_no_correction = corpus_bleu(trig_baseline);
    ev.triggered_model = corpus_bleu(trig_model);
  }
  ev.trigger_rate_pct =
      100.0 * static_cast<double>(ev.triggered_size) / static_cast<double>(ev.complete_size);
  return ev;
}

// ---------------------------------------------------------------------------
// A/B-style log metrics
// ---------------------------------------------------------------------------

/// True iff r2 is a refinement of r1: same user, later by less than `window`
/// seconds, phonetically within `threshold`, and a different query.
inline bool detect_refinement(const QueryLogRecord& r1, const QueryLogRecord& r2,
                              std::uint32_t threshold, std::uint32_t window,
                              const PronouncingLexicon& lexicon) {
  if (r1.user_id != r2.user_id) return false;
  std::int64_t dt = r2.timestamp - r1.timestamp;
  if (dt <= 0 || dt >= static_cast<std::int64_t>(window)) return false;
  NormalizedQuery q1 = normalize(r1.raw_text);
  NormalizedQuery q2 = normalize(r2.raw_text);
  if (q1 == q2) return false;
  return query_phonetic_distance(q1, q2, lexicon) <= threshold;
}

struct AbMetrics {
  double ctr = 0.0;                    // clicks per query x 100
  double user_interaction_rate = 0.0;  // extended-interaction clicks per query
  double abandoned_pct = 0.0;          // zero clicks and no refinement
  double refinement_pct = 0.0;         // has a phonetically similar follow-up
  double trigger_rate_pct = 0.0;       // share of all records the table rewrites
  std::size_t base_queries = 0;        // queries the rates are computed over
};

/// Computes the §-style live metrics over a log. When `table` is given, the
/// rates are computed over the triggered subset (the queries the table would
/// rewrite), which is how treatment and control arms are compared; refinement
/// is still detected against the full per-user stream.
inline AbMetrics ab_metrics(std::span<const QueryLogRecord> records, const RewriteTable* table,
                            const PronouncingLexicon& lexicon, std::uint32_t refine_threshold,
                            std::uint32_t refine_window) {
  if (records.empty()) throw Error("ab_metrics: empty log");

  // Per-user record indices, preserving time order.
  std::unordered_map<std::string, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < records.size(); ++i) by_user[records[i].user_id].push_back(i);

  std::vector<NormalizedQuery> norm;
  norm.reserve(records.size());
  for (const auto& r : records) norm.push_back(normalize(r.raw_text));

  G2pCache g2p_cache(lexicon);
  auto refined = [&](const std::vector<std::size_t>& chain, std::size_t pos) {
    for (std::size_t k = pos + 1; k < chain.size(); ++k) {
      const auto& r1 = records[chain[pos]];
      const auto& r2 = records[chain[k]];
      std::int64_t dt = r2.timestamp - r1.timestamp;
      if (dt >= static_cast<std::int64_t>(refine_window)) break;
      if (dt <= 0) continue;
      if (norm[chain[pos]] == norm[chain[k]]) continue;
      if (g2p_cache.distance(norm[chain[pos]], norm[chain[k]]) <= refine_threshold) return true;
    }
    return false;
  };

  AbMetrics m;
  std::uint64_t clicks = 0, extended = 0, abandoned = 0, refinements = 0, base = 0;
  for (const auto& [user, chain] : by_user) {
    for (std::size_t pos = 0; pos < chain.size(); ++pos) {
      const auto& r = records[chain[pos]];
      if (table != nullptr && table->find(norm[chain[pos]]) == nullptr) continue;
      ++base;
      clicks += r.clicks;
      if (r.extended_interaction) ++extended;
      bool has_refinement = refined(chain, pos);
      if (has_refinement) ++refinements;
      if (r.clicks == 0 && !has_refinement) ++abandoned;
    }
  }
  if (base == 0) throw Error("ab_metrics: no queries in scope (empty triggered subset)");
  m.base_queries = base;
  m.ctr = 100.0 * static_cast<double>(clicks) / static_cast<double>(base);
  m.user_interaction_rate = static_cast<double>(extended) / static_cast<double>(base);
  m.abandoned_pct = 100.0 * static_cast<double>(abandoned) / static_cast<double>(base);
  m.refinement_pct = 100.0 * static_cast<double>(refinements) / static_cast<double>(base);
  m.trigger_rate_pct =
      table ? 100.0 * static_cast<double>(base) / static_cast<double>(records.size()) : 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// Corpus statistics
// ---------------------------------------------------------------------------

struct CorpusStats {
  double avg_length_words = 0.0;
  std::uint64_t query_count = 0;
  std::uint64_t distinct_count = 0;
};

inline CorpusStats corpus_stats(std::span<const NormalizedQuery> queries) {
  if (queries.empty()) throw Error("corpus_stats: empty corpus");
  CorpusStats s;
  std::unordered_set<std::string> distinct;
  std::uint64_t words = 0;
  for (const auto& q : queries) {
    words += detail::split_words(q.text()).size();
    distinct.insert(q.text());
  }
  s.query_count = queries.size();
  s.distinct_count = distinct.size();
  s.avg_length_words = static_cast<double>(words) / static_cast<double>(s.query_count);
  return s;
}

inline CorpusStats corpus_stats(std::span<const QueryLogRecord> records) {
  std::vector<NormalizedQuery> qs;
  qs.reserve(records.size());
  for (const auto& r : records) qs.push_back(normalize(r.raw_text));
  return corpus_stats(std::span<const NormalizedQuery>(qs));
}

// ---------------------------------------------------------------------------
// Held-out split construction
//
// Default test-set recipe: hold out a fraction of users; from their logs take
// every mined correction pair plus an equal number of identity pairs built
// from successful queries (so the set is half corrections, half queries that
// need no correction). Training gets the remaining users' raw records, which
// keeps the test pairs fully out of training.
// ---------------------------------------------------------------------------

struct EvalSplit {
  std::vector<QueryLogRecord> train_records;
  std::vector<EvalPair> test_pairs;
  std::size_t held_out_users = 0;
};

namespace detail {

// Fisher-Yates with our own uniform draw; std::shuffle is implementation-
// defined and would break cross-toolchain determinism.
template <typename T>
inline void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(eng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace detail

inline EvalSplit make_eval_split(std::span<const QueryLogRecord> records,
                                 const TrainerConfig& config, double holdout_frac,
                                 std::uint64_t seed) {
  if (records.empty()) throw Error("make_eval_split: empty log");
  if (holdout_frac <= 0.0 || holdout_frac >= 1.0)
    throw ConfigError("holdout fraction must be in (0,1)");

  std::vector<std::string> users;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.user_id).second) users.push_back(r.user_id);
  }
  std::sort(users.begin(), users.end());
  std::mt19937_64 eng(seed);
  detail::deterministic_shuffle(users, eng);
  std::size_t n_test = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(holdout_frac * static_cast<double>(users.size()))));
  std::unordered_set<std::string> test_users(users.begin(), users.begin() + n_test);

  EvalSplit split;
  split.held_out_users = n_test;
  std::vector<QueryLogRecord> test_records;
  for (const auto& r : records) {
    if (test_users.count(r.user_id)) {
      test_records.push_back(r);
    } else {
      split.train_records.push_back(r);
    }
  }

  auto grouped = group_by_user(test_records);
  auto mined = mine_pairs(grouped, config);
  std::vector<EvalPair> corrections;
  corrections.reserve(mined.size());
  for (const auto& p : mined) corrections.push_back({p.abandoned, p.correction});

  std::vector<EvalPair> identities;
  for (const auto& r : test_records) {
    if (r.successful()) {
      NormalizedQuery q = normalize(r.raw_text);
      identities.push_back({q, q});
    }
  }

  detail::deterministic_shuffle(corrections, eng);
  detail::deterministic_shuffle(identities, eng);
  std::size_t n_each = std::min(corrections.size(), identities.size());
  corrections.resize(std::min(corrections.size(), n_each));
  identities.resize(n_each);
  split.test_pairs = std::move(corrections);
  split.test_pairs.insert(split.test_pairs.end(), identities.begin(), identities.end());
  return split;
}

}  // namespace mondegreen
