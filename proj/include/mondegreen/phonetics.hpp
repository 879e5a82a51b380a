// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mondegreen/detail/text.hpp"
#include "mondegreen/errors.hpp"
#include "mondegreen/query.hpp"

namespace mondegreen {

// ---------------------------------------------------------------------------
// Phoneme inventory: 39 ARPAbet symbols, stress markers stripped.
// ---------------------------------------------------------------------------

enum class Phoneme : std::uint8_t {
  AA, AE, AH, AO, AW, AY, B, CH, D, DH, EH, ER, EY, F, G, HH, IH, IY, JH, K,
  L, M, N, NG, OW, OY, P, R, S, SH, T, TH, UH, UW, V, W, Y, Z, ZH,
};

inline constexpr std::size_t kPhonemeCount = 39;

inline constexpr std::array<std::string_view, kPhonemeCount> kPhonemeNames = {
    "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH", "EH", "ER", "EY",
    "F",  "G",  "HH", "IH", "IY", "JH", "K",  "L",  "M",  "N",  "NG", "OW", "OY",
    "P",  "R",  "S",  "SH", "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH"};

inline std::string_view to_string(Phoneme p) {
  return kPhonemeNames[static_cast<std::size_t>(p)];
}

/// Parses an ARPAbet symbol, ignoring a trailing stress digit (AE1 -> AE).
inline std::optional<Phoneme> phoneme_from_symbol(std::string_view s) {
  if (!s.empty() && s.back() >= '0' && s.back() <= '2') s.remove_suffix(1);
  for (std::size_t i = 0; i < kPhonemeCount; ++i) {
    if (kPhonemeNames[i] == s) return static_cast<Phoneme>(i);
  }
  return std::nullopt;
}

using PhonemeSequence = std::vector<Phoneme>;

inline std::string to_string(const PhonemeSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out.push_back(' ');
    out.append(to_string(seq[i]));
  }
  return out;
}

inline PhonemeSequence parse_phoneme_sequence(std::string_view s, std::size_t line_no = 0) {
  PhonemeSequence seq;
  for (auto tok : detail::split_words(s)) {
    auto p = phoneme_from_symbol(tok);
    if (!p) throw ParseError("unknown phoneme symbol '" + std::string(tok) + "'", line_no);
    seq.push_back(*p);
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Pronouncing lexicon: word -> one pronunciation.
// File format: UTF-8 lines "word \t PH PH PH ...", '#' starts a comment.
// ---------------------------------------------------------------------------

class PronouncingLexicon {
 public:
  PronouncingLexicon() = default;

  static PronouncingLexicon load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open lexicon file: " + path);
    return load_stream(in);
  }

  static PronouncingLexicon load_stream(std::istream& in) {
    PronouncingLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      auto fields = detail::split(line, '\t');
      if (fields.size() != 2)
        throw ParseError("lexicon line needs 'word\\tPH PH ...'", line_no);
      std::string word(fields[0]);
      if (word.empty() || word.find(' ') != std::string::npos || !is_normalized(word))
        throw ParseError("lexicon key must be a normalized single word: '" + word + "'", line_no);
      auto seq = parse_phoneme_sequence(fields[1], line_no);
      if (seq.empty()) throw ParseError("empty pronunciation for '" + word + "'", line_no);
      if (!lex.entries_.emplace(std::move(word), std::move(seq)).second)
        throw ParseError("duplicate lexicon entry '" + std::string(fields[0]) + "'", line_no);
    }
    return lex;
  }

  const PhonemeSequence* find(std::string_view word) const {
    auto it = entries_.find(std::string(word));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, PhonemeSequence>& entries() const { return entries_; }

 private:
  std::unordered_map<std::string, PhonemeSequence> entries_;
};

// ---------------------------------------------------------------------------
// Rule fallback for out-of-vocabulary words. Deterministic left-to-right scan
// with a small digraph table; silent final e and doubled consonants are
// collapsed first. Coarse by design: it only has to keep OOV words stable and
// roughly phonetic, the lexicon carries the real pronunciations.
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_vowel_letter(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

inline void append_fallback_digit(char c, PhonemeSequence& out) {
  using P = Phoneme;
  static const std::vector<PhonemeSequence> digits = {
      {P::Z, P::IH, P::R, P::OW},        // 0
      {P::W, P::AH, P::N},               // 1
      {P::T, P::UW},                     // 2
      {P::TH, P::R, P::IY},              // 3
      {P::F, P::AO, P::R},               // 4
      {P::F, P::AY, P::V},               // 5
      {P::S, P::IH, P::K, P::S},         // 6
      {P::S, P::EH, P::V, P::AH, P::N},  // 7
      {P::EY, P::T},                     // 8
      {P::N, P::AY, P::N},               // 9
  };
  const auto& seq = digits[static_cast<std::size_t>(c - '0')];
  out.insert(out.end(), seq.begin(), seq.end());
}

inline PhonemeSequence letter_to_phoneme(std::string_view word) {
  using P = Phoneme;
  std::string w;
  w.reserve(word.size());
  // Collapse doubled consonant letters; "oo"/"ee"/... stay for the digraphs.
  for (char c : word) {
    if (!w.empty() && w.back() == c && c >= 'a' && c <= 'z' && !is_vowel_letter(c)) continue;
    w.push_back(c);
  }
  if (w.size() >= 3 && w.back() == 'e' && !is_vowel_letter(w[w.size() - 2]) &&
      (w[w.size() - 2] < '0' || w[w.size() - 2] > '9')) {
    w.pop_back();  // silent final e
  }

  struct Digraph {
    std::string_view spell;
    PhonemeSequence phones;
  };
  static const std::vector<Digraph> digraphs = {
      {"ch", {P::CH}},      {"sh", {P::SH}},       {"th", {P::TH}},  {"ph", {P::F}},
      {"wh", {P::W}},       {"ck", {P::K}},        {"ng", {P::NG}},  {"qu", {P::K, P::W}},
      {"ee", {P::IY}},      {"oo", {P::UW}},       {"ea", {P::IY}},  {"ai", {P::EY}},
      {"ay", {P::EY}},      {"oa", {P::OW}},       {"ou", {P::AW}},  {"ow", {P::AW}},
      {"oy", {P::OY}},      {"oi", {P::OY}},       {"au", {P::AO}},  {"aw", {P::AO}},
      {"ar", {P::AA, P::R}}, {"or", {P::AO, P::R}}, {"er", {P::ER}},  {"ir", {P::ER}},
      {"ur", {P::ER}},
  };
  static const std::unordered_map<char, PhonemeSequence> singles = {
      {'a', {P::AE}}, {'b', {P::B}},       {'c', {P::K}},  {'d', {P::D}},  {'e', {P::EH}},
      {'f', {P::F}},  {'g', {P::G}},       {'h', {P::HH}}, {'i', {P::IH}}, {'j', {P::JH}},
      {'k', {P::K}},  {'l', {P::L}},       {'m', {P::M}},  {'n', {P::N}},  {'o', {P::AA}},
      {'p', {P::P}},  {'q', {P::K}},       {'r', {P::R}},  {'s', {P::S}},  {'t', {P::T}},
      {'u', {P::AH}}, {'v', {P::V}},       {'w', {P::W}},  {'x', {P::K, P::S}},
      {'z', {P::Z}},
  };

  PhonemeSequence out;
  std::size_t i = 0;
  while (i < w.size()) {
    char c = w[i];
    if (c >= '0' && c <= '9') {
      append_fallback_digit(c, out);
      ++i;
      continue;
    }
    bool matched = false;
    if (i + 1 < w.size()) {
      std::string_view pair = std::string_view(w).substr(i, 2);
      for (const auto& d : digraphs) {
        if (d.spell == pair) {
          out.insert(out.end(), d.phones.begin(), d.phones.end());
          i += 2;
          matched = true;
          break;
        }
      }
    }
    if (matched) continue;
    if (c == 'y') {
      bool consonantal = i == 0 || (i + 1 < w.size() && is_vowel_letter(w[i + 1]));
      out.push_back(consonantal ? P::Y : P::IY);
      ++i;
      continue;
    }
    auto it = singles.find(c);
    if (it != singles.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    // anything else (punctuation, non-ASCII) contributes no phonemes
    ++i;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grapheme-to-phoneme conversion and phonetic distance
// ---------------------------------------------------------------------------

/// Converts a query to its phoneme sequence: per-word lexicon lookup with the
/// rule fallback for OOV words, word sequences concatenated with no boundary
/// token. Dropping the boundaries is what lets resegmentations ("rocks and"
/// vs "roxanne") score as near-identical.
inline PhonemeSequence g2p(const NormalizedQuery& q, const PronouncingLexicon& lexicon) {
  PhonemeSequence out;
  for (auto word : detail::split_words(q.text())) {
    if (const PhonemeSequence* entry = lexicon.find(word)) {
      out.insert(out.end(), entry->begin(), entry->end());
    } else {
      PhonemeSequence fb = detail::letter_to_phoneme(word);
      out.insert(out.end(), fb.begin(), fb.end());
    }
  }
  return out;
}

/// Levenshtein distance over phoneme tokens, unit insert/delete/substitute
/// costs. Satisfies the metric axioms.
inline std::size_t phonetic_distance(const PhonemeSequence& a, const PhonemeSequence& b) {
  const auto& shorter = a.size() <= b.size() ? a : b;
  const auto& longer = a.size() <= b.size() ? b : a;
  std::vector<std::size_t> row(shorter.size() + 1);
  for (std::size_t j = 0; j <= shorter.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= longer.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= shorter.size(); ++j) {
      std::size_t sub = diag + (longer[i - 1] == shorter[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
    }
  }
  return row[shorter.size()];
}

/// Length-normalized variant: distance / max(|a|, |b|), in [0,1]. Not used by
/// the trainer defaults; provided for callers that want a scale-free cutoff.
inline double phonetic_distance_normalized(const PhonemeSequence& a, const PhonemeSequence& b) {
  std::size_t n = std::max(a.size(), b.size());
  if (n == 0) return 0.0;
  return static_cast<double>(phonetic_distance(a, b)) / static_cast<double>(n);
}

inline std::size_t query_phonetic_distance(const NormalizedQuery& q1, const NormalizedQuery& q2,
                                           const PronouncingLexicon& lexicon) {
  return phonetic_distance(g2p(q1, lexicon), g2p(q2, lexicon));
}

/// Memoizes g2p results; handy for the trainer where the same queries are
/// converted many times. Not thread-safe, use one per worker.
class G2pCache {
 public:
  explicit G2pCache(const PronouncingLexicon& lexicon) : lexicon_(lexicon) {}

  const PhonemeSequence& get(const NormalizedQuery& q) {
    auto it = cache_.find(q.text());
    if (it != cache_.end()) return it->second;
    return cache_.emplace(q.text(), g2p(q, lexicon_)).first->second;
  }

  std::size_t distance(const NormalizedQuery& q1, const NormalizedQuery& q2) {
    return phonetic_distance(get(q1), get(q2));
  }

 private:
  const PronouncingLexicon& lexicon_;
  std::unordered_map<std::string, PhonemeSequence> cache_;
};

}  // namespace mondegreen
