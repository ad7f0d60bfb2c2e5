#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plpca {

/// Broad failure classes. Each maps to a distinct CLI exit code.
enum class ErrorCategory {
    config = 2,
    io = 3,
    parse = 4,
    labeling = 5,
    range = 6,
    shape = 7,
    numerical = 8,
    inclusion = 9,
};

constexpr std::string_view category_name(ErrorCategory c)
{
    switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::io: return "io";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::labeling: return "labeling";
    case ErrorCategory::range: return "range";
    case ErrorCategory::shape: return "shape";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::inclusion: return "inclusion";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category)
    {
    }

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Raised by the CSV reader. Row and column are 1-based file coordinates.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long row, long col = 0)
        : Error(ErrorCategory::parse, what), row_(row), col_(col)
    {
    }

    long row() const noexcept { return row_; }
    long col() const noexcept { return col_; }

private:
    long row_;
    long col_;
};

} // namespace plpca
