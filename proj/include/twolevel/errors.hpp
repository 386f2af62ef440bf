#pragma once

#include <stdexcept>
#include <string>

namespace twolevel {

// Bad physics input or config file; the CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A refinement loop hit its step cap before reaching tolerance; exit code 2.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_delta)
        : std::runtime_error(what), last_delta(last_delta) {}
    double last_delta;
};

} // namespace twolevel
