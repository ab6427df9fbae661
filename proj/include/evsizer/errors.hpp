#pragma once

#include <stdexcept>
#include <string>

namespace evsizer {

/// Failure categories shared by the C++ core and the C boundary.
enum class ErrorKind {
    Argument,
    Parse,
    Validation,
    Config,
    Domain,
    InfeasiblePoint,
    Solver,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorKind::Argument, what) {}
};

/// Malformed input text; `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// Config schema violation; `field()` is the dotted key path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(ErrorKind::Config, field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A design factor outside its bounds.
class DomainError : public Error {
public:
    DomainError(const std::string& factor, const std::string& what)
        : Error(ErrorKind::Domain, factor + ": " + what), factor_(factor) {}
    const std::string& factor() const noexcept { return factor_; }

private:
    std::string factor_;
};

/// Operating point outside the motor envelope.
class InfeasiblePointError : public Error {
public:
    explicit InfeasiblePointError(const std::string& what) : Error(ErrorKind::InfeasiblePoint, what) {}
};

class SolverError : public Error {
public:
    explicit SolverError(const std::string& what) : Error(ErrorKind::Solver, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

} // namespace evsizer
