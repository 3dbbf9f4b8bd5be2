#pragma once

#include <stdexcept>
#include <string>

namespace npspec {

/// Malformed or invalid input data (bad CSV, wrong shape, non-finite cells).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sample on which a statistic is undefined, e.g. a perfect fit with SSR = 0.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature exhausted its interval budget before meeting tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace npspec
