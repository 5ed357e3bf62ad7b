#pragma once

#include <stdexcept>
#include <string>

namespace mdred {

// Malformed or inconsistent input: bad files, shape mismatches, invalid
// parameters derived from data. CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown: rank-deficient problems, non-convergence, undefined
// spectral quantities. CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mdred
