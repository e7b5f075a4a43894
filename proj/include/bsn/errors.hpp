#pragma once

#include <stdexcept>
#include <string>

namespace bsn {

/// Invalid argument to a library operation (bad duration, rate, index, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or corrupted wire frame.
class FrameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario is syntactically valid but semantically unusable.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text input could not be parsed. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Battery life requested for a load that draws no current.
class UndefinedLifeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace bsn
