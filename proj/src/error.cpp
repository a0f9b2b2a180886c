#include "patronage/error.hpp"

#include <fmt/format.h>

namespace patronage {

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config:
      return ErrorCategory::Usage;
    case ErrorCode::RankDeficient:
    case ErrorCode::Separation:
    case ErrorCode::NonConvergence:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Integrity: return "IntegrityError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NoSpells: return "NoSpells";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NotAdjacent: return "NotAdjacent";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoNeighbors: return "NoNeighbors";
    case ErrorCode::MissingRank: return "MissingRank";
    case ErrorCode::MissingProvince: return "MissingProvince";
    case ErrorCode::MissingClique: return "MissingClique";
    case ErrorCode::MissingGender: return "MissingGender";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::FewerThanThreeRanks: return "FewerThanThreeRanks";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::DegenerateOutcome: return "DegenerateOutcome";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Separation: return "Separation";
    case ErrorCode::NonConvergence: return "NonConvergence";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", code_name(code), message)), code_(code) {}

ParseError::ParseError(std::string file, std::size_t line, std::size_t column, std::string reason)
    : Error(ErrorCode::Parse, fmt::format("{}:{}:{}: {}", file, line, column, reason)),
      file_(std::move(file)),
      line_(line),
      column_(column),
      reason_(std::move(reason)) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace patronage
