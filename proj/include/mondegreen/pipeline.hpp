// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mondegreen/errors.hpp"
#include "mondegreen/eval.hpp"
#include "mondegreen/query.hpp"
#include "mondegreen/rewrite_table.hpp"
#include "mondegreen/simulator.hpp"
#include "mondegreen/trainer.hpp"

namespace mondegreen {

/// Writes via a temp file in the same directory and renames into place, so a
/// crash mid-write never leaves a partial output at the target path.
inline void atomic_write_file(const std::string& path,
                              const std::function<void(std::ostream&)>& writer) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write: " + tmp.string());
    writer(out);
    out.flush();
    if (!out) throw FileError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw FileError("cannot rename " + tmp.string() + " -> " + target.string() + ": " +
                    ec.message());
  }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateSummary {
  std::size_t records = 0;
  std::size_t distinct_corruptions = 0;
};

inline SimulateSummary run_simulate(const SimConfig& config, const std::string& confusions_path,
                                    const std::string& out_logs, const std::string& out_truth,
                                    const RewriteTable* treatment = nullptr) {
  ConfusionLexicon confusions = ConfusionLexicon::load(confusions_path);
  SimResult sim = generate_logs(config, confusions, treatment);
  atomic_write_file(out_logs, [&](std::ostream& os) { write_log_stream(os, sim.records); });
  if (!out_truth.empty()) {
    atomic_write_file(out_truth, [&](std::ostream& os) { sim.truth.save_stream(os); });
  }
  return {sim.records.size(), sim.truth.corrupted_to_true.size()};
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainSummary {
  std::size_t records = 0;
  std::size_t pairs = 0;
  std::size_t entries = 0;
  std::string table_version;
};

inline TrainSummary train_table(const std::vector<QueryLogRecord>& records,
                                const TrainerConfig& config, const PronouncingLexicon& lexicon,
                                RewriteTable& out_table) {
  auto grouped = group_by_user(records);
  auto pairs = mine_pairs(grouped, config);
  auto tables = build_tables(grouped, pairs);
  out_table = build_rewrite_table(tables, config, lexicon, records.size());
  return {records.size(), pairs.size(), out_table.size(), out_table.version()};
}

inline TrainSummary run_train(const std::string& logs_path, const std::string& out_snapshot,
                              const TrainerConfig& config, const PronouncingLexicon& lexicon) {
  std::vector<QueryLogRecord> records = read_log_file(logs_path);
  RewriteTable table;
  TrainSummary summary = train_table(records, config, lexicon, table);
  atomic_write_file(out_snapshot, [&](std::ostream& os) { write_snapshot_stream(os, table); });
  return summary;
}

// ---------------------------------------------------------------------------
// eval helpers
// ---------------------------------------------------------------------------

/// Pairs file: "input \t reference" per line, '#' comments.
inline std::vector<EvalPair> read_pairs_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open pairs file: " + path);
  std::vector<EvalPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() != 2) throw ParseError("pairs line needs 'input\\treference'", line_no);
    out.push_back({normalize(fields[0]), normalize(fields[1])});
  }
  return out;
}

inline void write_pairs_file(const std::string& path, const std::vector<EvalPair>& pairs) {
  atomic_write_file(path, [&](std::ostream& os) {
    for (const auto& p : pairs) os << p.input.text() << '\t' << p.reference.text() << '\n';
  });
}

/// Reads a corpus for `stats`: query log if the first data line parses as a
/// log record, otherwise one query per line of plain text.
inline std::vector<NormalizedQuery> read_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open corpus file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  std::vector<NormalizedQuery> out;
  if (!lines.empty()) {
    bool as_log = true;
    try {
      parse_log_line(lines.front(), 1);
    } catch (const Error&) {
      as_log = false;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (as_log) {
        out.push_back(normalize(parse_log_line(lines[i], i + 1).raw_text));
      } else {
        out.push_back(normalize(lines[i]));
      }
    }
  }
  return out;
}

}  // namespace mondegreen
