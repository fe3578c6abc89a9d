#pragma once

#include <stdexcept>
#include <string>

namespace cogarch {

// Shape/order violations: wrong dimensions, empty coefficient vectors.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the operation's domain (T <= 0, m <= 0, c > 1, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The variance process left the admissible region during simulation.
struct NonnegativityError : std::runtime_error {
    NonnegativityError(const std::string& what, double t)
        : std::runtime_error(what), time(t) {}
    double time;
};

// Parameter set fails a stationarity requirement (b_q - a_1*mu <= 0, ...).
struct StationarityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ill-conditioned or singular linear algebra, bound violations.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The filter hit a nonpositive conditional variance denominator.
struct FilterDegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No feasible starting point found by the optimizer.
struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV/config input that cannot be parsed; carries the 1-based line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line_no)
        : std::runtime_error(what), line(line_no) {}
    std::size_t line;
};

}  // namespace cogarch
