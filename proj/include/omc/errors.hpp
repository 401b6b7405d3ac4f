#ifndef OMC_ERRORS_HPP
#define OMC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace omc {

/// Raised when a text input (CSV, JSON config) cannot be parsed.
/// Carries the 1-based line number when one is known (0 otherwise).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raised when a numerical routine fails to meet its tolerance
/// (quadrature non-convergence, series cap exceeded, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace omc

#endif  // OMC_ERRORS_HPP
