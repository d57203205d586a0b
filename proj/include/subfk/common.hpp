/*
 * Shared value types and error classes.
 */
#pragma once

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace subfk {

using cplx = std::complex<double>;

// Points in R^d for d <= 3; unused trailing components are zero.
using Vec = std::array<double, 3>;

inline constexpr int kMaxDim = 3;

inline double dot(const Vec& a, const Vec& b, int d)
{
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested feature not available for this family or representation.
struct UnsupportedError : Error {
    using Error::Error;
};

// Quadrature failed to converge; message carries partial sums.
struct QuadratureError : Error {
    using Error::Error;
};

// A modelling assumption failed (CLI maps this to exit code 2).
struct AssumptionError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace subfk
