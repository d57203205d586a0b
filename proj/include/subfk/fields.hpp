/*
 * Built-in vector potentials a (with div a and b = curl a when known) and
 * scalar potentials V.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "subfk/common.hpp"

namespace subfk {

struct FieldSpec {
    VectorField a;
    std::optional<ScalarField> div_a;
    std::optional<VectorField> curl_b;  // d = 3 only
    std::string name = "custom";
    bool is_zero = false;
};

struct Potential {
    ScalarField V;
    std::string name = "custom";
    bool is_zero = false;
    // V constant everywhere, when known (exact shortcuts in tests and checks).
    std::optional<double> constant_value;
};

namespace fields {

FieldSpec zero();
FieldSpec constant(const Vec& c);
// a(x) = s x, a pure gauge with div a = d s.
FieldSpec gradient_linear(double s, int d);
// a = (1/2) B x x, constant magnetic field B.
FieldSpec uniform_b(const Vec& B);
// a = k (sin w x2, cos w x1, 0)
FieldSpec solenoidal_2d(double kappa, double omega);
// ABC (Beltrami) field, curl a = w a.
FieldSpec solenoidal_3d(double kappa, double omega);
// a = curl (0, 0, phi) with phi = strength R^2 exp(-1/(1-|x|^2/R^2)) on |x| < R:
// a and b are smooth and compactly supported.
FieldSpec bump_b(double strength, double radius);
// Random trigonometric field, periodic on [-L, L)^3 (integer modes times pi/L).
FieldSpec random_fourier(std::uint64_t seed, double amplitude, int n_modes, double L, int d);

// Composition with the box wrap x -> [-L, L)^d.
FieldSpec wrapped(const FieldSpec& f, double L, int d);

}  // namespace fields

namespace potentials {

Potential zero();
Potential constant(double c);
// (1/2) w^2 |x|^2
Potential harmonic(double omega);
// V0 exp(-|x - c|^2 / (2 R^2))
Potential bump(double V0, double R, const Vec& center = {0, 0, 0});
// Z / sqrt(|x|^2 + eps^2)
Potential coulomb_mollified(double Z, double eps);
// Smooth random periodic potential for operator-level suites.
Potential random_fourier(std::uint64_t seed, double amplitude, int n_modes, double L, int d);

Potential wrapped(const Potential& p, double L, int d);

}  // namespace potentials

// Componentwise wrap into [-L, L).
Vec wrap_box(const Vec& x, double L, int d);

// Centered finite-difference divergence (used to validate div_a).
double fd_divergence(const VectorField& a, const Vec& x, int d, double h = 1e-5);
Vec fd_curl(const VectorField& a, const Vec& x, double h = 1e-5);

}  // namespace subfk
