#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ff {

// Machine-readable error codes shared by every layer. The executor never
// throws these; it folds them into error Values. Everything else (parsers,
// registries, builders) throws ff::Error.
enum class ErrorCode : std::uint8_t {
    None = 0,
    TypeMismatch,
    PrimitiveError,
    StackUnderflow,
    LimitExceeded,
    UnknownPrimitive,
    MalformedLiteral,
    DuplicateName,
    UnknownType,
    UnknownField,
    NotASnippet,
    InsufficientCodebase,
    DegenerateDataset,
    EmptyInput,
    ParseError,
    InvalidColor,
    InvalidDimensions,
    ShapeMismatch,
    IoError,
    VersionMismatch,
    CorruptFile,
    MissingFile,
    FieldMismatch,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Compile errors carry a 1-based source position.
class CompileError : public Error {
public:
    CompileError(ErrorCode code, const std::string& message, std::size_t line, std::size_t column)
        : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                          message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace ff
