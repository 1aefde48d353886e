#pragma once

#include <stdexcept>
#include <string>

namespace mcd {

// Base of every error the library throws. The kind maps onto the CLI exit
// code contract (usage/parse = 2, degenerate data = 3, internal = 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column = 0)
        : Error(what), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

// Data that the model cannot be evaluated on (constant grid without sigma,
// all-zero Poisson counts, ...).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

// Statistic field is constant; there is no threshold ladder to scan.
class NoSignal : public Error {
public:
    using Error::Error;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace mcd
