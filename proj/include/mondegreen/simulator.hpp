// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
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

namespace mondegreen {

// ---------------------------------------------------------------------------
// Confusion lexicon: curated (true phrase, corrupted phrase) pairs, each
// within a declared phonetic distance bound. This is the synthetic ASR error
// channel: corruption picks a listed mishearing instead of editing phonemes
// freely, so corrupted text is always a plausible transcription.
//
// File format: "#max_distance=<n>" header, then "true_phrase \t corrupted".
// ---------------------------------------------------------------------------

struct ConfusionEntry {
  std::string truth;
  std::string corrupted;
};

class ConfusionLexicon {
 public:
  static ConfusionLexicon load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open confusion lexicon: " + path);
    return load_stream(in);
  }

  static ConfusionLexicon load_stream(std::istream& in) {
    ConfusionLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::unordered_set<std::string> corrupted_seen;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (line.rfind("#max_distance=", 0) == 0) {
        lex.max_distance_ = static_cast<std::uint32_t>(
            detail::parse_u64(std::string_view(line).substr(14), "max_distance", line_no));
        have_header = true;
        continue;
      }
      if (line[0] == '#') continue;
      auto fields = detail::split(line, '\t');
      if (fields.size() != 2)
        throw ParseError("confusion line needs 'true_phrase\\tcorrupted_phrase'", line_no);
      ConfusionEntry e{std::string(fields[0]), std::string(fields[1])};
      if (!is_normalized(e.truth) || !is_normalized(e.corrupted))
        throw ParseError("confusion phrases must be normalized", line_no);
      if (e.truth == e.corrupted)
        throw ParseError("confusion pair with identical phrases", line_no);
      if (!corrupted_seen.insert(e.corrupted).second)
        throw ParseError("corrupted phrase '" + e.corrupted + "' listed twice; ground truth would be ambiguous",
                         line_no);
      lex.entries_.push_back(std::move(e));
    }
    if (!have_header && !lex.entries_.empty())
      throw ParseError("missing #max_distance header");
    return lex;
  }

  std::uint32_t max_distance() const { return max_distance_; }
  const std::vector<ConfusionEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Distinct true phrases in file order; these are the simulator vocabulary.
  std::vector<std::string> distinct_truths() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& e : entries_) {
      if (seen.insert(e.truth).second) out.push_back(e.truth);
    }
    return out;
  }

 private:
  std::uint32_t max_distance_ = 0;
  std::vector<ConfusionEntry> entries_;
};

/// Pairs whose measured phonetic distance exceeds the bound.
struct ConfusionValidationReport {
  struct Violation {
    std::size_t entry_index;
    ConfusionEntry entry;
    std::size_t distance;
  };
  std::size_t checked = 0;
  std::uint32_t bound = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

inline ConfusionValidationReport validate_confusions(const ConfusionLexicon& confusions,
                                                     const PronouncingLexicon& lexicon,
                                                     std::uint32_t bound) {
  ConfusionValidationReport report;
  report.bound = bound;
  G2pCache cache(lexicon);
  for (std::size_t i = 0; i < confusions.entries().size(); ++i) {
    const auto& e = confusions.entries()[i];
    std::size_t d = cache.distance(NormalizedQuery::from_normalized(e.truth),
                                   NormalizedQuery::from_normalized(e.corrupted));
    ++report.checked;
    if (d > bound) report.violations.push_back({i, e, d});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Ground truth: which corrupted query means which true query, for exactly the
// corruptions that occurred in a generated log.
// ---------------------------------------------------------------------------

struct GroundTruth {
  std::map<std::string, std::string> corrupted_to_true;  // sorted for stable output

  void save_stream(std::ostream& os) const {
    for (const auto& [c, t] : corrupted_to_true) os << c << '\t' << t << '\n';
  }

  static GroundTruth load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open ground truth file: " + path);
    GroundTruth gt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      auto fields = detail::split(line, '\t');
      if (fields.size() != 2) throw ParseError("ground truth line needs 'corrupted\\ttrue'", line_no);
      gt.corrupted_to_true.emplace(std::string(fields[0]), std::string(fields[1]));
    }
    return gt;
  }
};

// ---------------------------------------------------------------------------
// Simulator configuration and generation
// ---------------------------------------------------------------------------

struct SimConfig {
  std::uint64_t seed = 1;
  std::uint32_t n_users = 1000;
  std::uint32_t n_sessions = 20000;
  std::uint32_t vocab_size = 400;      // distinct true queries drawn from the confusion lexicon
  double zipf_s = 1.0;                 // popularity skew over the vocabulary
  double p_err_1p = 0.05;              // corruption probability, first-party ASR
  double p_err_3p = 0.15;              // corruption probability, third-party ASR
  double p_retry = 0.7;                // chance an abandoned user retries with the true query
  std::uint32_t retry_dt_max = 30;     // retry lands within this many seconds (< t_window)
  double p_click_true = 0.6;           // click probability when results match the intent
  double p_click_corrupt = 0.05;       // click probability on corrupted-query results

  // Plumbing knobs the behavioral model needs beyond the core parameters.
  double p_third_party = 0.75;         // share of traffic routed through 3P ASR
  double p_extended_given_click = 0.5; // clicked sessions that become extended interactions
  std::uint32_t session_gap_min = 61;  // seconds between a user's sessions (> pairing window)
  std::uint32_t session_gap_max = 361;

  void validate() const {
    for (double p : {p_err_1p, p_err_3p, p_retry, p_click_true, p_click_corrupt, p_third_party,
                     p_extended_given_click}) {
      if (p < 0.0 || p > 1.0) throw ConfigError("probabilities must be in [0,1]");
    }
    if (zipf_s <= 0.0) throw ConfigError("zipf_s must be > 0");
    if (n_users == 0 || n_sessions == 0 || vocab_size == 0)
      throw ConfigError("n_users, n_sessions and vocab_size must be positive");
    if (retry_dt_max == 0) throw ConfigError("retry_dt_max must be positive");
    if (session_gap_min <= retry_dt_max)
      throw ConfigError("session_gap_min must exceed retry_dt_max");
    if (session_gap_max < session_gap_min)
      throw ConfigError("session_gap_max must be >= session_gap_min");
  }
};

namespace detail {

/// Deterministic helpers over mt19937_64; the standard distributions are
/// implementation-defined, these are not.
struct SimRng {
  std::mt19937_64 eng;

  explicit SimRng(std::uint64_t seed) : eng(seed) {}

  double u01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return u01() < p; }
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(eng() % n); }
};

/// Zipf(s) over ranks 0..n-1 via inverse CDF.
class ZipfSampler {
 public:
  ZipfSampler(std::uint32_t n, double s) : cdf_(n) {
    double acc = 0.0;
    for (std::uint32_t k = 0; k < n; ++k) {
      acc += 1.0 / std::pow(static_cast<double>(k + 1), s);
      cdf_[k] = acc;
    }
    for (auto& v : cdf_) v /= acc;
  }

  std::uint32_t sample(SimRng& rng) const {
    double u = rng.u01();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return static_cast<std::uint32_t>(cdf_.size() - 1);
    return static_cast<std::uint32_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace detail

struct SimResult {
  std::vector<QueryLogRecord> records;  // globally time-sorted
  GroundTruth truth;
};

/// Generates a synthetic query log with known ground truth. Each session: a
/// true query is drawn Zipf-style, routed through a 1P or 3P ASR, possibly
/// corrupted by sampling one of its listed confusions, and clicked according
/// to whether the served results match the intent. Abandoned sessions retry
/// with the true query inside the pairing window with probability p_retry.
///
/// When `treatment` is non-null the generated users live behind a deployed
/// rewrite table: lookups that trigger change which results the user sees
/// (and therefore clicks), but raw_text stays the ASR transcription, exactly
/// as a production query log would record it.
///
/// Deterministic: identical config and confusions give byte-identical logs.
inline SimResult generate_logs(const SimConfig& config, const ConfusionLexicon& confusions,
                               const RewriteTable* treatment = nullptr) {
  config.validate();
  std::vector<std::string> truths = confusions.distinct_truths();
  if (config.vocab_size > truths.size())
    throw ConfigError("vocab_size " + std::to_string(config.vocab_size) +
                      " exceeds the " + std::to_string(truths.size()) +
                      " confusable phrases available");
  truths.resize(config.vocab_size);

  // Corruption variants per true phrase, restricted to the active vocabulary.
  std::unordered_map<std::string, std::vector<const std::string*>> variants;
  for (const auto& e : confusions.entries()) variants[e.truth].push_back(&e.corrupted);

  detail::SimRng rng(config.seed);
  detail::ZipfSampler zipf(config.vocab_size, config.zipf_s);

  constexpr std::int64_t kEpochBase = 1'700'000'000;
  std::vector<std::int64_t> user_clock(config.n_users, kEpochBase);

  SimResult result;
  result.records.reserve(config.n_sessions * 2);

  auto served_matches_intent = [&](const std::string& spoken_text,
                                   const std::string& true_text) {
    if (treatment != nullptr) {
      if (const RewriteEntry* e = treatment->find(NormalizedQuery::from_normalized(spoken_text)))
        return e->correction == true_text;
    }
    return spoken_text == true_text;
  };

  auto emit = [&](std::uint32_t user, std::int64_t t, const std::string& text, AsrParty party,
                  bool good_results) {
    QueryLogRecord r;
    r.user_id = "u" + std::to_string(user);
    r.timestamp = t;
    r.raw_text = text;
    r.asr_party = party;
    r.asr_source = party == AsrParty::ThirdParty ? "sim_3p" : "sim_1p";
    r.locale = "en-US";
    bool clicked = rng.chance(good_results ? config.p_click_true : config.p_click_corrupt);
    if (clicked) {
      r.clicks = rng.chance(0.3) ? 2 : 1;
      r.extended_interaction = rng.chance(config.p_extended_given_click);
    }
    result.records.push_back(std::move(r));
    return clicked;
  };

  for (std::uint32_t s = 0; s < config.n_sessions; ++s) {
    std::uint32_t user = rng.below(config.n_users);
    std::uint32_t gap_span = config.session_gap_max - config.session_gap_min + 1;
    std::int64_t t0 = user_clock[user] + config.session_gap_min + rng.below(gap_span);

    const std::string& true_q = truths[zipf.sample(rng)];
    AsrParty party = rng.chance(config.p_third_party) ? AsrParty::ThirdParty : AsrParty::FirstParty;
    double p_err = party == AsrParty::ThirdParty ? config.p_err_3p : config.p_err_1p;

    std::string spoken = true_q;
    if (rng.chance(p_err)) {
      const auto& vs = variants.at(true_q);
      spoken = *vs[vs.size() == 1 ? 0 : rng.below(static_cast<std::uint32_t>(vs.size()))];
      result.truth.corrupted_to_true[spoken] = true_q;
    }

    bool clicked = emit(user, t0, spoken, party, served_matches_intent(spoken, true_q));
    std::int64_t last_t = t0;
    if (!clicked && rng.chance(config.p_retry)) {
      // The retry is the user's own correction: the true query, re-spoken
      // carefully. It may still fail to earn a click.
      std::int64_t t1 = t0 + 1 + rng.below(config.retry_dt_max);
      emit(user, t1, true_q, party, served_matches_intent(true_q, true_q));
      last_t = t1;
    }
    user_clock[user] = last_t;
  }

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const QueryLogRecord& a, const QueryLogRecord& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.user_id < b.user_id;
                   });
  return result;
}

}  // namespace mondegreen
