#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace patronage {

enum class ErrorCode {
  // usage / configuration
  Config,
  // data
  Parse,
  Integrity,
  DuplicateId,
  NoSpells,
  UnknownNode,
  NotAdjacent,
  LengthMismatch,
  NoNeighbors,
  MissingRank,
  MissingProvince,
  MissingClique,
  MissingGender,
  EmptyCorpus,
  EmptyGraph,
  ColumnMismatch,
  TooFewRows,
  FewerThanThreeRanks,
  DegenerateSample,
  DegenerateOutcome,
  Io,
  // numerical
  RankDeficient,
  Separation,
  NonConvergence,
};

enum class ErrorCategory { Usage, Data, Numerical };

ErrorCategory category_of(ErrorCode code) noexcept;
std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

/// Malformed delimited input. Line and column are 1-based; column 0 means
/// the whole line.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column, std::string reason);

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace patronage
