// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "mondegreen/query.hpp"

using namespace mondegreen;

TEST_CASE("normalize applies case and whitespace rules") {
  CHECK(normalize("Gaming  Chair ").text() == "gaming chair");
  CHECK(normalize("rocks and").text() == "rocks and");
  CHECK(normalize("  ROCKS\tAnd\n").text() == "rocks and");
  CHECK(normalize("a").text() == "a");
}

TEST_CASE("normalize handles non-ASCII letters") {
  CHECK(normalize("CAF\xC3\x89").text() == "caf\xC3\xA9");        // É -> é
  CHECK(normalize("\xC5\x81\xC3\x93D\xC5\xB9").text() == "\xC5\x82\xC3\xB3d\xC5\xBA");
  // NBSP is whitespace
  CHECK(normalize("a\xC2\xA0ージ b") == normalize("a ージ b"));
}

TEST_CASE("normalize rejects empty and whitespace-only input") {
  CHECK_THROWS_AS(normalize(""), EmptyQueryError);
  CHECK_THROWS_AS(normalize("   \t\n "), EmptyQueryError);
  CHECK_THROWS_AS(normalize("\xC2\xA0"), EmptyQueryError);
}

TEST_CASE("normalize is idempotent on random strings") {
  std::mt19937_64 eng(20260809);
  const std::string alphabet = "aAzZ09 \t\n.-'&";
  for (int iter = 0; iter < 2000; ++iter) {
    std::size_t len = 1 + eng() % 24;
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[eng() % alphabet.size()]);
    if (eng() % 4 == 0) s += "\xC3\x89\xC5\x81";  // sprinkle some multibyte letters
    try {
      NormalizedQuery once = normalize(s);
      NormalizedQuery twice = normalize(once.text());
      CHECK(once == twice);
      CHECK(is_normalized(once.text()));
    } catch (const EmptyQueryError&) {
      // whitespace-only draw; fine
    }
  }
}

TEST_CASE("from_normalized validates") {
  CHECK(NormalizedQuery::from_normalized("rocks and").text() == "rocks and");
  CHECK_THROWS_AS(NormalizedQuery::from_normalized("Rocks and"), InvariantError);
  CHECK_THROWS_AS(NormalizedQuery::from_normalized(" rocks"), InvariantError);
  CHECK_THROWS_AS(NormalizedQuery::from_normalized("rocks  and"), InvariantError);
  CHECK_THROWS_AS(NormalizedQuery::from_normalized(""), InvariantError);
}

namespace {

QueryLogRecord make_record() {
  QueryLogRecord r;
  r.user_id = "u42";
  r.timestamp = 1700000123;
  r.raw_text = "Rocks And";
  r.asr_source = "asr_a";
  r.asr_party = AsrParty::ThirdParty;
  r.locale = "en-US";
  r.clicks = 0;
  r.extended_interaction = false;
  return r;
}

}  // namespace

TEST_CASE("log line round trip and outcome") {
  QueryLogRecord r = make_record();
  std::string line = write_log_line(r);
  CHECK(line == "u42\t1700000123\tasr_a\t3P\ten-US\t0\t0\tRocks And");
  QueryLogRecord back = parse_log_line(line);
  CHECK(back == r);
  CHECK_FALSE(back.successful());

  r.clicks = 2;
  r.extended_interaction = true;
  back = parse_log_line(write_log_line(r));
  CHECK(back == r);
  CHECK(back.successful());
}

TEST_CASE("raw_text escaping") {
  QueryLogRecord r = make_record();
  r.raw_text = "tab\there \\ and\nnewline";
  std::string line = write_log_line(r);
  CHECK(line.find("\\t") != std::string::npos);
  CHECK(parse_log_line(line).raw_text == r.raw_text);
  // the line itself must stay a single record line
  CHECK(line.find('\n') == std::string::npos);
}

TEST_CASE("locale written explicitly") {
  QueryLogRecord r = make_record();
  CHECK(write_log_line(r).find("\ten-US\t") != std::string::npos);
}

TEST_CASE("parse errors carry line context and are distinct") {
  CHECK_THROWS_AS(parse_log_line("too\tfew\tfields", 7), ParseError);
  CHECK_THROWS_AS(parse_log_line("u\tnotanumber\ta\t1P\ten-US\t0\t0\tq", 3), ParseError);
  CHECK_THROWS_AS(parse_log_line("u\t1\ta\t2P\ten-US\t0\t0\tq", 3), ParseError);
  // invariant violation: extended interaction without a click
  CHECK_THROWS_AS(parse_log_line("u\t1\ta\t1P\ten-US\t0\t1\tq", 3), InvariantError);
  try {
    parse_log_line("too\tfew\tfields", 7);
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("record invariants enforced on write") {
  QueryLogRecord r = make_record();
  r.extended_interaction = true;  // clicks still 0
  CHECK_THROWS_AS(write_log_line(r), InvariantError);
  r = make_record();
  r.user_id = "has\ttab";
  CHECK_THROWS_AS(write_log_line(r), InvariantError);
}

TEST_CASE("parse/write round trip on random records") {
  std::mt19937_64 eng(99);
  auto rand_text = [&](bool allow_specials) {
    std::string alphabet = "abcXYZ019 _-";
    if (allow_specials) alphabet += "\t\n\\";
    std::size_t len = 1 + eng() % 20;
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[eng() % alphabet.size()]);
    return s;
  };
  int kept = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    QueryLogRecord r;
    r.user_id = "u" + std::to_string(eng() % 100000);
    r.timestamp = static_cast<std::int64_t>(eng() % 2000000000ULL);
    r.raw_text = rand_text(true);
    if (r.raw_text.empty()) r.raw_text = "q";
    r.asr_source = "src" + std::to_string(eng() % 10);
    r.asr_party = eng() % 2 ? AsrParty::FirstParty : AsrParty::ThirdParty;
    r.locale = eng() % 3 ? "en-US" : "en-GB";
    r.clicks = static_cast<std::uint32_t>(eng() % 4);
    r.extended_interaction = r.clicks >= 1 && eng() % 2 == 0;
    QueryLogRecord back = parse_log_line(write_log_line(r));
    REQUIRE(back == r);
    ++kept;
  }
  CHECK(kept == 10000);
}

TEST_CASE("log stream I/O skips nothing and keeps order") {
  std::vector<QueryLogRecord> records;
  for (int i = 0; i < 5; ++i) {
    QueryLogRecord r = make_record();
    r.timestamp = 1000 + i;
    r.raw_text = "query " + std::to_string(i);
    records.push_back(r);
  }
  std::stringstream ss;
  write_log_stream(ss, records);
  auto back = read_log_stream(ss);
  CHECK(back == records);
}
