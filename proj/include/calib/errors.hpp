#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace calib {

/// Raised when an input value violates a documented precondition or invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a file cannot be opened, read, or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a numerical search encounters a non-finite objective value.
class OptimizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Content-level failure while parsing an input file. Carries the file path
/// and the 1-based line number where the problem was found (0 for
/// whole-file problems such as a bad header on an empty file).
class ParseError : public ValidationError {
public:
    enum class Kind {
        BadHeader,
        NonNumericCell,
        LabelOutOfRange,
        MalformedRow,
        BadJson,
    };

    ParseError(Kind kind, std::string path, std::size_t line, const std::string& message)
        : ValidationError(format(path, line, message)), kind_(kind), path_(std::move(path)), line_(line) {}

    Kind kind() const { return kind_; }
    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    static std::string format(const std::string& path, std::size_t line, const std::string& message);

    Kind kind_;
    std::string path_;
    std::size_t line_;
};

} // namespace calib
