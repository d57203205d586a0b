#include "subfk/fields.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace subfk {

Vec wrap_box(const Vec& x, double L, int d)
{
    Vec y = x;
    const double P = 2.0 * L;
    for (int i = 0; i < d; ++i) {
        double v = x[i] + L;
        v -= P * std::floor(v / P);
        if (v >= P) v -= P;
        y[i] = v - L;
    }
    return y;
}

double fd_divergence(const VectorField& a, const Vec& x, int d, double h)
{
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        Vec p = x, m = x;
        p[i] += h;
        m[i] -= h;
        s += (a(p)[i] - a(m)[i]) / (2.0 * h);
    }
    return s;
}

Vec fd_curl(const VectorField& a, const Vec& x, double h)
{
    auto der = [&](int comp, int dir) {
        Vec p = x, m = x;
        p[dir] += h;
        m[dir] -= h;
        return (a(p)[comp] - a(m)[comp]) / (2.0 * h);
    };
    return {der(2, 1) - der(1, 2), der(0, 2) - der(2, 0), der(1, 0) - der(0, 1)};
}

namespace fields {

FieldSpec zero()
{
    FieldSpec f;
    f.a = [](const Vec&) { return Vec{0, 0, 0}; };
    f.div_a = [](const Vec&) { return 0.0; };
    f.curl_b = [](const Vec&) { return Vec{0, 0, 0}; };
    f.name = "zero";
    f.is_zero = true;
    return f;
}

FieldSpec constant(const Vec& c)
{
    FieldSpec f;
    f.a = [c](const Vec&) { return c; };
    f.div_a = [](const Vec&) { return 0.0; };
    f.curl_b = [](const Vec&) { return Vec{0, 0, 0}; };
    f.name = "constant";
    f.is_zero = (c == Vec{0, 0, 0});
    return f;
}

FieldSpec gradient_linear(double s, int d)
{
    FieldSpec f;
    f.a = [s](const Vec& x) { return Vec{s * x[0], s * x[1], s * x[2]}; };
    f.div_a = [s, d](const Vec&) { return s * d; };
    f.curl_b = [](const Vec&) { return Vec{0, 0, 0}; };
    f.name = "linear";
    return f;
}

FieldSpec uniform_b(const Vec& B)
{
    FieldSpec f;
    f.a = [B](const Vec& x) {
        return Vec{0.5 * (B[1] * x[2] - B[2] * x[1]), 0.5 * (B[2] * x[0] - B[0] * x[2]),
                   0.5 * (B[0] * x[1] - B[1] * x[0])};
    };
    f.div_a = [](const Vec&) { return 0.0; };
    f.curl_b = [B](const Vec&) { return B; };
    f.name = "uniform_b";
    return f;
}

FieldSpec solenoidal_2d(double k, double w)
{
    FieldSpec f;
    f.a = [k, w](const Vec& x) { return Vec{k * std::sin(w * x[1]), k * std::cos(w * x[0]), 0.0}; };
    f.div_a = [](const Vec&) { return 0.0; };
    f.curl_b = [k, w](const Vec& x) {
        return Vec{0.0, 0.0, -k * w * std::sin(w * x[0]) - k * w * std::cos(w * x[1])};
    };
    f.name = "solenoidal-2d";
    return f;
}

FieldSpec solenoidal_3d(double k, double w)
{
    FieldSpec f;
    auto a = [k, w](const Vec& x) {
        return Vec{k * (std::sin(w * x[2]) + std::cos(w * x[1])),
                   k * (std::sin(w * x[0]) + std::cos(w * x[2])),
                   k * (std::sin(w * x[1]) + std::cos(w * x[0]))};
    };
    f.a = a;
    f.div_a = [](const Vec&) { return 0.0; };
    f.curl_b = [a, w](const Vec& x) {
        Vec v = a(x);
        return Vec{w * v[0], w * v[1], w * v[2]};
    };
    f.name = "solenoidal-3d";
    return f;
}

FieldSpec bump_b(double strength, double R)
{
    // phi(x) = c psi(s), s = |x|^2, psi = exp(-w), w = 1/(1 - s/R^2).
    // psi' = -psi w^2 / R^2, psi'' = psi (w^4 - 2 w^3) / R^4.
    const double c = strength * R * R;
    struct D {
        double p1, p2;  // psi', psi''
        bool inside;
    };
    auto derivs = [R](const Vec& x) {
        double s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        double q = s / (R * R);
        if (q >= 1.0) return D{0.0, 0.0, false};
        double w = 1.0 / (1.0 - q);
        double psi = std::exp(-w);
        return D{-psi * w * w / (R * R), psi * (w * w * w * w - 2.0 * w * w * w) / (R * R * R * R), true};
    };
    FieldSpec f;
    // a = (d_y phi, -d_x phi, 0), d_i phi = c psi' 2 x_i
    f.a = [c, derivs](const Vec& x) {
        D d = derivs(x);
        if (!d.inside) return Vec{0, 0, 0};
        return Vec{2.0 * c * d.p1 * x[1], -2.0 * c * d.p1 * x[0], 0.0};
    };
    f.div_a = [](const Vec&) { return 0.0; };
    // curl curl (0,0,phi) = (d_x d_z phi, d_y d_z phi, -(d_xx + d_yy) phi)
    // d_i d_j phi = c (4 psi'' x_i x_j + 2 psi' delta_ij)
    f.curl_b = [c, derivs](const Vec& x) {
        D d = derivs(x);
        if (!d.inside) return Vec{0, 0, 0};
        double bx = c * 4.0 * d.p2 * x[0] * x[2];
        double by = c * 4.0 * d.p2 * x[1] * x[2];
        double bz = -c * (4.0 * d.p2 * (x[0] * x[0] + x[1] * x[1]) + 4.0 * d.p1);
        return Vec{bx, by, bz};
    };
    f.name = "bump-b";
    return f;
}

namespace detail_modes {

struct Mode {
    Vec k;
    double phase;
    Vec amp;
};

std::vector<Mode> random_modes(std::uint64_t seed, double amplitude, int n_modes, double L, int d)
{
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> ki(-2, 2);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    std::normal_distribution<double> nrm(0.0, amplitude / std::sqrt(double(n_modes)));
    std::vector<Mode> modes;
    while (static_cast<int>(modes.size()) < n_modes) {
        Mode m{};
        bool nonzero = false;
        for (int i = 0; i < d; ++i) {
            int kk = ki(gen);
            m.k[i] = kk * M_PI / L;
            nonzero |= kk != 0;
        }
        if (!nonzero) continue;
        m.phase = ph(gen);
        for (int i = 0; i < d; ++i) m.amp[i] = nrm(gen);
        modes.push_back(m);
    }
    return modes;
}

}  // namespace detail_modes

using detail_modes::random_modes;

FieldSpec random_fourier(std::uint64_t seed, double amplitude, int n_modes, double L, int d)
{
    auto modes = random_modes(seed, amplitude, n_modes, L, d);
    FieldSpec f;
    // a_mu = sum_j A_mu cos(k.x + phase)
    f.a = [modes](const Vec& x) {
        Vec a{0, 0, 0};
        for (const auto& m : modes) {
            double c = std::cos(m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2] + m.phase);
            for (int i = 0; i < 3; ++i) a[i] += m.amp[i] * c;
        }
        return a;
    };
    f.div_a = [modes](const Vec& x) {
        double s = 0.0;
        for (const auto& m : modes) {
            double sn = std::sin(m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2] + m.phase);
            s -= sn * (m.amp[0] * m.k[0] + m.amp[1] * m.k[1] + m.amp[2] * m.k[2]);
        }
        return s;
    };
    // d_nu a_mu = -A_mu k_nu sin(.), curl = k x A scaled by -sin
    f.curl_b = [modes](const Vec& x) {
        Vec b{0, 0, 0};
        for (const auto& m : modes) {
            double sn = -std::sin(m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2] + m.phase);
            b[0] += sn * (m.k[1] * m.amp[2] - m.k[2] * m.amp[1]);
            b[1] += sn * (m.k[2] * m.amp[0] - m.k[0] * m.amp[2]);
            b[2] += sn * (m.k[0] * m.amp[1] - m.k[1] * m.amp[0]);
        }
        return b;
    };
    f.name = "random-fourier";
    return f;
}

FieldSpec wrapped(const FieldSpec& f, double L, int d)
{
    if (f.is_zero) return f;
    FieldSpec w;
    w.name = f.name;
    auto a = f.a;
    w.a = [a, L, d](const Vec& x) { return a(wrap_box(x, L, d)); };
    if (f.div_a) {
        auto g = *f.div_a;
        w.div_a = [g, L, d](const Vec& x) { return g(wrap_box(x, L, d)); };
    }
    if (f.curl_b) {
        auto g = *f.curl_b;
        w.curl_b = [g, L, d](const Vec& x) { return g(wrap_box(x, L, d)); };
    }
    return w;
}

}  // namespace fields

namespace potentials {

Potential zero()
{
    Potential p;
    p.V = [](const Vec&) { return 0.0; };
    p.name = "zero";
    p.is_zero = true;
    p.constant_value = 0.0;
    return p;
}

Potential constant(double c)
{
    Potential p;
    p.V = [c](const Vec&) { return c; };
    p.name = "constant";
    p.is_zero = (c == 0.0);
    p.constant_value = c;
    return p;
}

Potential harmonic(double w)
{
    Potential p;
    p.V = [w](const Vec& x) { return 0.5 * w * w * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); };
    p.name = "harmonic";
    return p;
}

Potential bump(double V0, double R, const Vec& c)
{
    Potential p;
    p.V = [V0, R, c](const Vec& x) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
        return V0 * std::exp(-s / (2.0 * R * R));
    };
    p.name = "bump";
    return p;
}

Potential coulomb_mollified(double Z, double eps)
{
    Potential p;
    p.V = [Z, eps](const Vec& x) {
        return Z / std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + eps * eps);
    };
    p.name = "coulomb-mollified";
    return p;
}

Potential random_fourier(std::uint64_t seed, double amplitude, int n_modes, double L, int d)
{
    auto modes = fields::random_modes(seed ^ 0x9e3779b97f4a7c15ULL, amplitude, n_modes, L, d);
    Potential p;
    p.V = [modes](const Vec& x) {
        double v = 0.0;
        for (const auto& m : modes)
            v += m.amp[0] * std::cos(m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2] + m.phase);
        return v;
    };
    p.name = "random-fourier";
    return p;
}

Potential wrapped(const Potential& p, double L, int d)
{
    if (p.constant_value) return p;
    Potential w = p;
    auto V = p.V;
    w.V = [V, L, d](const Vec& x) { return V(wrap_box(x, L, d)); };
    return w;
}

}  // namespace potentials

}  // namespace subfk
