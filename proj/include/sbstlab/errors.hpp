#pragma once

#include <stdexcept>
#include <string>

namespace sbstlab {

enum class ErrorCode {
    SyntaxError,
    EmptyProgram,
    UnknownCallee,
    ArityMismatch,
    TypeMismatch,
    NoCompatibleSite,
    InsufficientFunctions,
    GenerationExhausted,
    InsufficientNegatives,
    DegenerateTruth,
    LengthMismatch,
    CyclicGraph,
    UnsupportedOperator,
    InvalidTest,
    UnbalancedDesign,
    DegenerateCell,
    ZeroVarianceGroup,
    DegenerateSample,
    CorpusInvalid,
    IncompleteDataset,
    ConfigError,
};

const char* error_code_name(ErrorCode code);

/// Common exception type; `code` identifies the failure class so callers
/// (and tests) can discriminate without string matching.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

/// Parse-time error carrying a source position.
class SyntaxError : public Error {
  public:
    SyntaxError(int line, int column, const std::string& message)
        : Error(ErrorCode::SyntaxError,
                "line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

} // namespace sbstlab
