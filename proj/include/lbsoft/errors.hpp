// Exception types that map onto process exit codes in the runner.

#pragma once

#include <stdexcept>
#include <string>

namespace lbsoft {

// Invalid configuration; the message names the offending key or line.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Quadrature non-convergence, positivity loss, mass drift.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace lbsoft
