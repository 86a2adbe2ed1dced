#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covote {

// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file.  Carries the position that failed.
class parse_error : public error {
public:
    parse_error(std::string file, std::size_t line, std::size_t column, const std::string& what)
        : error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          file_(std::move(file)), line_(line), column_(column) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string file_;
    std::size_t line_;
    std::size_t column_;
};

// Input is well formed but violates a documented constraint.
class validation_error : public error {
public:
    using error::error;
};

// Lookup of an id, group, or attribute that does not exist.
class not_found_error : public error {
public:
    using error::error;
};

// An operation was called outside its documented preconditions.
class precondition_error : public error {
public:
    using error::error;
};

// An iterative estimate failed to converge; partial results may exist.
class non_convergence_error : public error {
public:
    using error::error;
};

} // namespace covote
