#pragma once

#include <stdexcept>
#include <string>

namespace swm {

// invalid configuration / precondition (CLI exit code 2)
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& m) : std::invalid_argument(m) {}
};

// blow-up, non-convergence, weighted-norm overflow (CLI exit code 3)
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace swm
