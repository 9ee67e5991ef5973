#pragma once

#include <stdexcept>
#include <string>

namespace capenc {

/// Raised for invalid input data, domain violations and numerical failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input could not be parsed; carries the 1-based data row and field name.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t row, std::string field)
        : Error(std::move(message)), row_(row), field_(std::move(field)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t row_;
    std::string field_;
};

}  // namespace capenc
