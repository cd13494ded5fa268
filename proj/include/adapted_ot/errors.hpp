#pragma once

#include <stdexcept>
#include <string>

namespace aot {

/// Invalid configuration or argument (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A table or transform was queried outside its tabulated range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A numerical scheme produced a non-finite or exploding value (CLI exit code 3).
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int stage)
        : std::runtime_error(what + " (stage " + std::to_string(stage) + ")"), stage_(stage) {}

    int stage() const noexcept { return stage_; }

private:
    int stage_;
};

/// Violated internal invariant; never expected on valid input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace aot
