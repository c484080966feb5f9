#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace fplab {

struct ShapeError : std::invalid_argument {
    ShapeError(const std::string& what, std::size_t expected, std::size_t actual)
        : std::invalid_argument(what + ": expected " + std::to_string(expected) +
                                ", got " + std::to_string(actual)),
          expected(expected), actual(actual) {}
    std::size_t expected, actual;
};

struct PackingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when training loss blows past the divergence bound; carries the
// loss history seen so far.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), loss_trace(std::move(trace)) {}
    std::vector<double> loss_trace;
};

}  // namespace fplab
