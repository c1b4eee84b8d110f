#ifndef RLBAYES_ERROR_HPP
#define RLBAYES_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rlbayes {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on arguments was violated (bad index, bad size, bad config).
class ContractViolation : public Error {
public:
    using Error::Error;
};

// A library invariant was found broken. Always a bug.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent input data (CSV, schema, result files).
class DataError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : DataError(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace rlbayes

#endif  // RLBAYES_ERROR_HPP
