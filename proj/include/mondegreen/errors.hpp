// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <stdexcept>
#include <string>

namespace mondegreen {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input query was empty or all whitespace.
class EmptyQueryError : public Error {
 public:
  EmptyQueryError() : Error("empty query: input has no non-whitespace characters") {}
};

/// A log line (or other record-oriented file line) failed to parse.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line_no)
      : Error("line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
  explicit ParseError(const std::string& what) : Error(what), line_no_(0) {}

  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

/// A parsed record violates a declared invariant (e.g. extended interaction
/// without a click).
class InvariantError : public Error {
 public:
  InvariantError(const std::string& what, std::size_t line_no)
      : Error("line " + std::to_string(line_no) + ": invariant violation: " + what) {}
  explicit InvariantError(const std::string& what) : Error("invariant violation: " + what) {}
};

/// Record stream handed to the miner was not grouped by user / time sorted.
class OrderingError : public Error {
 public:
  explicit OrderingError(const std::string& what) : Error("ordering error: " + what) {}
};

/// Bad configuration value or combination.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

/// File could not be opened.
class FileError : public Error {
 public:
  explicit FileError(const std::string& what) : Error(what) {}
};

/// Snapshot loading failures. Kind distinguishes the contract's error cases.
class SnapshotError : public Error {
 public:
  enum class Kind { MissingFile, CorruptLine, VersionMismatch, DuplicateKey };

  SnapshotError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace mondegreen
