#pragma once

#include <stdexcept>
#include <string>

namespace gsched {

// Argument validation failures use std::invalid_argument directly.

class SizeLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gsched
