#pragma once

#include <stdexcept>
#include <string>

namespace ginv {

// Bad user input: malformed spectra, out-of-range parameters, shape mismatches.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: solver divergence, singular Gram matrices, poles.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / parsing failure on external data.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ginv
