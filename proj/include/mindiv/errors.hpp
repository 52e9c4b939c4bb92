#pragma once

#include <stdexcept>
#include <string>

#include "mindiv/types.hpp"

namespace mindiv {

/// Argument outside the mathematical domain of a kernel or density.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed caller input (empty sample, bad epsilon, bad spec).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite integrand value; carries the node where it happened.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double node)
        : std::runtime_error(what), node_(node) {}
    double node() const noexcept { return node_; }

private:
    double node_;
};

/// Unparsable line in a sample file; line numbers are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, Mat m)
        : std::runtime_error(what), matrix_(std::move(m)) {}
    const Mat& matrix() const noexcept { return matrix_; }

private:
    Mat matrix_;
};

/// Objective returned NaN inside the search box.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An estimation needed by a derived quantity did not converge.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mindiv
