#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "subfk/oracle.hpp"

using namespace subfk;

namespace {

std::vector<double> sorted(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<double> values(const Eigen::MatrixXcd& m)
{
    auto e = eigh(m);
    return {e.values.data(), e.values.data() + e.values.size()};
}

GridOperator raw(const Eigen::MatrixXcd& m)
{
    GridOperator op;
    op.matrix = m;
    return op;
}

}  // namespace

TEST_CASE("free spectral Laplacian has the Fourier symbol")
{
    GridSpec g(1, 64, std::numbers::pi);  // wavenumbers are integers
    auto op = discretize_h(g, fields::zero());
    std::vector<double> expect;
    for (int m = -32; m < 32; ++m) expect.push_back(0.5 * m * m);
    auto got = values(op.matrix);
    expect = sorted(expect);
    for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-10).scale(1.0));
    CHECK(hermiticity_defect(op.matrix) == 0.0);
    CHECK(ground_energy(op) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));

    GridSpec g2(2, 8, std::numbers::pi);
    auto op2 = discretize_h(g2, fields::zero());
    auto v2 = values(op2.matrix);
    std::vector<double> e2;
    for (int a = -4; a < 4; ++a)
        for (int b = -4; b < 4; ++b) e2.push_back(0.5 * (a * a + b * b));
    e2 = sorted(e2);
    for (size_t i = 0; i < v2.size(); ++i) CHECK(std::abs(v2[i] - e2[i]) < 1e-10);
}

TEST_CASE("constant vector potential shifts the wavenumbers")
{
    const double a = 0.3;
    GridSpec g(1, 33, std::numbers::pi);  // odd n: no Nyquist mode
    auto op = discretize_h(g, fields::constant({a, 0, 0}));
    std::vector<double> expect;
    for (int m = -16; m <= 16; ++m) expect.push_back(0.5 * (m - a) * (m - a));
    expect = sorted(expect);
    auto got = values(op.matrix);
    for (size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-10);

    // link phases: eigenvalues (1 - cos(k h - a h)) / h^2 exactly
    GridSpec gl(1, 20, 2.0);
    auto lp = discretize_h(gl, fields::constant({a, 0, 0}), KineticScheme::LinkPhase);
    const double h = gl.spacing();
    std::vector<double> el;
    for (int m = 0; m < 20; ++m) {
        double k = 2.0 * std::numbers::pi * m / (2.0 * gl.L);
        el.push_back((1.0 - std::cos((k - a) * h)) / (h * h));
    }
    el = sorted(el);
    auto gotl = values(lp.matrix);
    for (size_t i = 0; i < gotl.size(); ++i) CHECK(std::abs(gotl[i] - el[i]) < 1e-10);
}

TEST_CASE("random smooth fields give Hermitian operators")
{
    for (auto scheme : {KineticScheme::Spectral, KineticScheme::LinkPhase}) {
        GridSpec g(2, 10, 3.0);
        auto op = discretize_h(g, fields::random_fourier(11, 1.0, 4, 3.0, 2), scheme);
        CHECK(hermiticity_defect(op.matrix) < 1e-12);
        CHECK(ground_energy(op) > -1e-10);  // (p - a)^2 >= 0
    }
}

TEST_CASE("spin operators")
{
    GridSpec g(1, 16, 3.0);
    auto h = discretize_h(g, fields::zero());
    auto hv = values(h.matrix);

    // constant b = (0,0,1): two copies of h shifted by -1/2 and +1/2
    auto op = discretize_spin(g, spin12_coupling(fields::uniform_b({0, 0, 1})), fields::zero());
    std::vector<double> expect;
    for (double v : hv) {
        expect.push_back(v - 0.5);
        expect.push_back(v + 0.5);
    }
    expect = sorted(expect);
    auto got = values(op.matrix);
    for (size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-10);

    // U_beta = -1: h -/+ 1
    auto op2 = discretize_spin(g, constant_coupling(2, {0, 0}, {{-1.0, -1.0}}), fields::zero());
    expect.clear();
    for (double v : hv) {
        expect.push_back(v - 1.0);
        expect.push_back(v + 1.0);
    }
    expect = sorted(expect);
    got = values(op2.matrix);
    for (size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-10);

    // inconsistent pairing
    CHECK_THROWS_AS(discretize_spin(g, constant_coupling(2, {0, 0}, {{-1.0, -2.0}}), fields::zero()), Error);

    // |U_beta| variant: real nonpositive off-diagonals
    GridSpec g3(3, 4, 2.0);
    auto field = fields::random_fourier(5, 1.0, 3, 2.0, 3);
    auto c = spin12_coupling(field);
    auto full = discretize_spin(g3, c, field);
    auto zero_op = discretize_spin(g3, absolute_offdiag(c), fields::zero());
    const auto N = static_cast<Eigen::Index>(g3.sites());
    auto blk = zero_op.matrix.block(0, N, N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        CHECK(blk(i, i).real() <= 0.0);
        CHECK(blk(i, i).imag() == 0.0);
    }
    CHECK(ground_energy(full) >= ground_energy(zero_op) - 1e-10);

    // p = 3 couplings built from W are Hermitian
    SpinConfig s3(3);
    auto W = [&](const Vec& x, int a) { return cplx(std::cos(x[0]), 0.4) * s3.root(a); };
    auto c3 = offdiag_from_W(3, {W, W});
    auto op3 = discretize_spin(g, c3, fields::zero());
    CHECK(op3.dim() == 48);
}

TEST_CASE("functional calculus")
{
    Eigen::MatrixXcd d = Eigen::VectorXcd::Map(std::vector<cplx>{0.0, 1.0, 4.0}.data(), 3).asDiagonal();
    auto s = psi_of_operator(raw(d), BernsteinFunction::stable(0.5));
    CHECK(std::abs(s.matrix(0, 0)) < 1e-14);
    CHECK(s.matrix(1, 1).real() == doctest::Approx(1.0));
    CHECK(s.matrix(2, 2).real() == doctest::Approx(2.0));

    Eigen::MatrixXcd d2 = Eigen::MatrixXcd::Zero(2, 2);
    d2(1, 1) = 8.0;
    auto r = psi_of_operator(raw(d2), BernsteinFunction::relativistic(3.0));
    CHECK(r.matrix(1, 1).real() == doctest::Approx(2.0));

    GridSpec g(1, 16, 3.0);
    auto h = discretize_h(g, fields::solenoidal_2d(0.5, std::numbers::pi / 3.0));
    auto lin = psi_of_operator(h, BernsteinFunction::linear(1.0));
    CHECK((lin.matrix - h.matrix).cwiseAbs().maxCoeff() < 1e-10);
    auto st = psi_of_operator(h, BernsteinFunction::stable(0.5));
    CHECK((st.matrix * h.matrix - h.matrix * st.matrix).cwiseAbs().maxCoeff() < 1e-10);

    // negative spectrum needs the shift
    auto sp = discretize_spin(g, constant_coupling(2, {0, 0}, {{-1.0, -1.0}}), fields::zero());
    CHECK_THROWS_AS(psi_of_operator(sp, BernsteinFunction::stable(0.5)), AssumptionError);
    auto shifted = psi_of_operator(sp, BernsteinFunction::stable(0.5), ShiftMode::InfSpecIfNegative);
    CHECK(shifted.shift == doctest::Approx(-1.0));
    CHECK(ground_energy(shifted) == doctest::Approx(0.0).scale(1.0));
    auto fixed = psi_of_operator(sp, BernsteinFunction::linear(1.0), ShiftMode::Fixed, -1.5);
    CHECK(ground_energy(fixed) == doctest::Approx(0.5));
}

TEST_CASE("semigroup matrices")
{
    GridSpec g(1, 24, 4.0);
    auto h = psi_of_operator(discretize_h(g, fields::solenoidal_2d(0.7, std::numbers::pi / 4.0)),
                             BernsteinFunction::relativistic(1.0));
    auto V = sample_potential(g, potentials::harmonic(1.0).V);
    GridSemigroup S(h, V);
    auto I = S.matrix(0.0);
    CHECK((I - Eigen::MatrixXcd::Identity(24, 24)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((S.matrix(0.3) * S.matrix(0.5) - S.matrix(0.8)).cwiseAbs().maxCoeff() < 1e-10);

    auto f = sample_function(g, [](const Vec& x) { return cplx(std::exp(-x[0] * x[0]), 0.3 * x[0]); });
    auto gg = sample_function(g, [](const Vec& x) { return cplx(std::exp(-(x[0] - 1) * (x[0] - 1)), 0.0); });
    cplx a = grid_inner(g, f, S.apply(gg, 0.7));
    cplx b = grid_inner(g, S.apply(f, 0.7), gg);
    CHECK(std::abs(a - b) < 1e-12);
    CHECK(std::abs(S.matrix_element(f, gg, 0.7) - a) < 1e-14);

    // positive semidefinite
    auto M = S.matrix(0.4);
    CHECK(eigh(M).values.minCoeff() > -1e-12);
}

TEST_CASE("harmonic oscillator and spectral convergence")
{
    GridSpec g(1, 64, 8.0);
    auto h = discretize_h(g, fields::zero());
    GridSemigroup S(h, sample_potential(g, potentials::harmonic(1.0).V));
    CHECK(S.eigen().values(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(S.eigen().values(1) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(S.eigen().values(2) == doctest::Approx(2.5).epsilon(1e-9));

    // refining 16 -> 32 -> 64 shrinks the change in the low spectrum of Psi(h) + V
    auto psi = BernsteinFunction::relativistic(1.0);
    std::vector<Eigen::VectorXd> low;
    for (int n : {16, 32, 64}) {
        GridSpec gn(1, n, 6.0);
        auto ph = psi_of_operator(discretize_h(gn, fields::solenoidal_2d(0.5, std::numbers::pi / 6.0)), psi);
        GridSemigroup Sn(ph, sample_potential(gn, potentials::bump(-1.0, 1.0, {0, 0, 0}).V));
        low.push_back(Sn.eigen().values.head(5));
    }
    double d1 = (low[1] - low[0]).cwiseAbs().maxCoeff();
    double d2 = (low[2] - low[1]).cwiseAbs().maxCoeff();
    CHECK(d2 < d1);
}

TEST_CASE("operator-level diamagnetic inequality")
{
    GridSpec g(2, 10, 3.0);
    auto h0 = discretize_h(g, fields::zero());
    auto V = sample_potential(g, potentials::bump(-2.0, 0.8, {0.3, 0, 0}).V);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto ha = discretize_h(g, fields::random_fourier(seed, 1.5, 4, 3.0, 2));
        for (const auto& psi : {BernsteinFunction::linear(1.0), BernsteinFunction::stable(0.5)}) {
            double e_a = ground_energy(psi_of_operator(ha, psi), V);
            double e_0 = ground_energy(psi_of_operator(h0, psi), V);
            CHECK(e_a >= e_0 - 1e-10);
        }
    }
}
