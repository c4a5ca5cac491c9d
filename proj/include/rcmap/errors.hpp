// errors.hpp — Exception hierarchy shared by all rcmap modules

#pragma once

#include <stdexcept>
#include <string>

namespace rcmap {

// Caller broke a documented precondition (shape, symmetry, index range).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The physical model is invalid: non positive-definite potential,
// degenerate normal modes, undamped mode, unstable susceptibility.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure did not reach the requested accuracy or hit a
// conditioning problem. The message carries the diagnostics.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad experiment configuration (bench / CLI layer).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rcmap
