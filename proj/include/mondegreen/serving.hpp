// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "mondegreen/errors.hpp"
#include "mondegreen/query.hpp"
#include "mondegreen/rewrite_table.hpp"

namespace mondegreen {

/// Answer for one lookup. The original text always rides along so callers can
/// offer a way back to the uncorrected transcription.
struct CorrectionResponse {
  std::string original;
  NormalizedQuery normalized;
  std::optional<NormalizedQuery> corrected;  // present iff triggered
  bool triggered = false;
  std::string table_version;
};

struct ServingStats {
  std::uint64_t total_lookups = 0;
  std::uint64_t triggered_lookups = 0;
};

/// Percentage of lookups that were rewritten; absent before the first lookup.
inline std::optional<double> trigger_rate(const ServingStats& stats) {
  if (stats.total_lookups == 0) return std::nullopt;
  return 100.0 * static_cast<double>(stats.triggered_lookups) /
         static_cast<double>(stats.total_lookups);
}

/// Runtime lookup service over an immutable rewrite snapshot.
///
/// Readers grab a shared_ptr to the active table once per lookup;
/// swap_snapshot atomically replaces the pointer, so in-flight lookups finish
/// against whichever table they started with and no lookup ever sees a
/// half-loaded table. Counters are monotonic atomics.
class CorrectionService {
 public:
  CorrectionService() = default;
  explicit CorrectionService(RewriteTable table)
      : table_(std::make_shared<const RewriteTable>(std::move(table))) {}

  bool has_table() const { return std::atomic_load(&table_) != nullptr; }

  std::shared_ptr<const RewriteTable> active_table() const { return std::atomic_load(&table_); }

  /// Normalizes the input and looks it up. Misses pass the query through
  /// unmodified. Throws EmptyQueryError on empty/whitespace input and Error
  /// if no snapshot has been installed.
  CorrectionResponse correct(std::string_view q_raw) {
    auto table = std::atomic_load(&table_);
    if (!table) throw Error("no rewrite table loaded");
    CorrectionResponse resp;
    resp.original = std::string(q_raw);
    resp.normalized = normalize(q_raw);  // throws EmptyQueryError before any counting
    resp.table_version = table->version();
    total_.fetch_add(1, std::memory_order_relaxed);
    if (const RewriteEntry* e = table->find(resp.normalized)) {
      resp.corrected = NormalizedQuery::from_normalized(e->correction);
      resp.triggered = true;
      triggered_.fetch_add(1, std::memory_order_relaxed);
    }
    return resp;
  }

  /// Atomically replaces the active table. The new table must already be
  /// fully loaded and validated.
  void swap_snapshot(RewriteTable new_table) {
    std::atomic_store(&table_, std::shared_ptr<const RewriteTable>(
                                   std::make_shared<const RewriteTable>(std::move(new_table))));
  }

  ServingStats stats() const {
    return {total_.load(std::memory_order_relaxed), triggered_.load(std::memory_order_relaxed)};
  }

 private:
  std::shared_ptr<const RewriteTable> table_;
  std::atomic<std::uint64_t> total_{0};
  std::atomic<std::uint64_t> triggered_{0};
};

}  // namespace mondegreen
