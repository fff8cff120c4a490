#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input text. `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
        : Error(format(what, line, column)), message_(what), line_(line), column_(column) {}

    /// The message without the position suffix.
    const std::string& message() const noexcept { return message_; }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        std::string out = what;
        if (line != 0) {
            out += " (line " + std::to_string(line);
            if (column != 0) out += ", column " + std::to_string(column);
            out += ")";
        }
        return out;
    }

    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// Failure of an external selector process.
class ExternalError : public Error {
public:
    enum class Kind { launch, exit_status, malformed_output, wrong_count, timeout };

    ExternalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace fsbench
