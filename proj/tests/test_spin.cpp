#include <cmath>
#include <vector>

#include "doctest.h"
#include "subfk/spin.hpp"
#include "subfk/stats.hpp"

using namespace subfk;

TEST_CASE("roots and index arithmetic")
{
    SpinConfig s2(2), s4(4), s3(3);
    CHECK(s2.root(1) == cplx(-1.0, 0.0));
    CHECK(s2.root(2) == cplx(1.0, 0.0));
    CHECK(s4.root(1) == cplx(0.0, 1.0));
    CHECK(s4.root(4) == cplx(1.0, 0.0));
    CHECK(std::abs(s3.root(1) - std::polar(1.0, 2.0 * M_PI / 3.0)) < 1e-15);
    CHECK(s3.add(3, 1) == 1);
    CHECK(s3.add(1, -1) == 3);
    CHECK(s3.add(2, 7) == 3);
    for (int a = 1; a <= 3; ++a)
        for (int b = 0; b < 6; ++b) CHECK(std::abs(s3.root(s3.add(a, b)) - s3.root(a) * std::pow(s3.root(1), b)) < 1e-12);
}

TEST_CASE("spin-1/2 coupling from a magnetic field")
{
    Vec x{0.3, -0.1, 0.2};
    auto c = spin12_coupling(fields::uniform_b({0, 0, 1}));
    CHECK(c.U(x, 2) == doctest::Approx(-0.5));  // sigma = +1
    CHECK(c.U(x, 1) == doctest::Approx(0.5));   // sigma = -1
    CHECK(std::abs(c.offdiag(1, x, 1)) == 0.0);

    auto c1 = spin12_coupling(fields::uniform_b({1, 0, 0}));
    for (int a : {1, 2}) {
        CHECK(c1.U(x, a) == 0.0);
        CHECK(c1.offdiag(1, x, a) == cplx(-0.5, 0.0));
    }
    auto c0 = spin12_coupling(fields::zero());
    CHECK(c0.offdiag_zero);
    CHECK(c0.U(x, 1) == 0.0);

    // general b: U_1(sigma) = -(b1 - i sigma b2)/2
    auto cb = spin12_coupling(fields::uniform_b({0.4, -0.7, 0.2}));
    CHECK(std::abs(cb.offdiag(1, x, 2) - cplx(-0.2, -0.35)) < 1e-15);
    CHECK(std::abs(cb.offdiag(1, x, 1) - cplx(-0.2, 0.35)) < 1e-15);
    CHECK_THROWS(spin12_coupling(FieldSpec{fields::zero().a, std::nullopt, std::nullopt, "a", false}));
}

TEST_CASE("off-diagonal couplings from W")
{
    Vec x{0.1, 0.2, 0.3};
    const double b1 = 0.8, b2 = -0.3;
    SpinConfig s2(2);
    auto W2 = [&](const Vec&, int a) { return -0.5 * (b1 + cplx(0, 1) * s2.root(a) * b2); };
    auto c = offdiag_from_W(2, {W2});
    for (int a : {1, 2}) CHECK(std::abs(c.offdiag(1, x, a) + 0.5 * (b1 - cplx(0, 1) * s2.root(a) * b2)) < 1e-15);

    // p = 3, constant W_beta(sigma) = -(b1 + i sigma b2)/2 for every beta
    SpinConfig s3(3);
    auto W3 = [&](const Vec&, int a) { return -0.5 * (b1 + cplx(0, 1) * s3.root(a) * b2); };
    auto c3 = offdiag_from_W(3, {W3, W3});
    for (int beta = 1; beta <= 2; ++beta)
        for (int a = 1; a <= 3; ++a) {
            cplx expect = 0.5 * (W3(x, s3.add(a, beta)) + std::conj(W3(x, a)));
            CHECK(std::abs(c3.offdiag(beta, x, a) - expect) < 1e-15);
            // Hermitian pairing U_{p-beta}(alpha+beta) = conj U_beta(alpha)
            CHECK(std::abs(c3.offdiag(3 - beta, x, s3.add(a, beta)) - std::conj(c3.offdiag(beta, x, a))) < 1e-15);
        }

    auto z = offdiag_from_W(3, {[](const Vec&, int) { return cplx(0); }, [](const Vec&, int) { return cplx(0); }});
    for (int a = 1; a <= 3; ++a) CHECK(z.offdiag(2, x, a) == cplx(0.0));
}

TEST_CASE("spin trajectories")
{
    Rng rng(1, 0);
    auto t0 = sample_spin_trajectory(3, 0.0, 2, rng);
    CHECK(t0.all_times().empty());
    CHECK(t0.N(0.0) == 0);
    CHECK(t0.state(0.0) == 2);

    RunningStats cnt;
    for (int i = 0; i < 100000; ++i) cnt.add(double(sample_spin_trajectory(2, 3.0, 1, rng).all_times().size()));
    CHECK(std::abs(cnt.mean - 3.0) <= 4.0 * cnt.std_error());

    // p = 4: the three counts are uncorrelated
    const int n = 100000;
    std::vector<std::vector<double>> k(3, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
        auto tr = sample_spin_trajectory(4, 1.5, 1, rng);
        for (int b = 0; b < 3; ++b) k[b][i] = double(tr.jump_times[b].size());
    }
    auto corr = [&](const std::vector<double>& a, const std::vector<double>& b) {
        RunningStats ma, mb, mab;
        for (int i = 0; i < n; ++i) {
            ma.add(a[i]);
            mb.add(b[i]);
        }
        for (int i = 0; i < n; ++i) mab.add((a[i] - ma.mean) * (b[i] - mb.mean));
        return mab.mean / std::sqrt(ma.variance() * mb.variance());
    };
    CHECK(std::abs(corr(k[0], k[1])) < 0.02);
    CHECK(std::abs(corr(k[0], k[2])) < 0.02);
    CHECK(std::abs(corr(k[1], k[2])) < 0.02);

    // right-continuity of N
    SpinTrajectory tr;
    tr.p = 3;
    tr.horizon = 2.0;
    tr.alpha0 = 1;
    tr.jump_times = {{0.5, 1.5}, {1.0}};
    CHECK(tr.N(0.49) == 0);
    CHECK(tr.N(0.5) == 1);
    CHECK(tr.N(1.0) == 3);
    CHECK(tr.N(2.0) == 4);
    CHECK(tr.state(1.0) == 1);  // 1 + 3 wraps to 1
    CHECK(tr.state(2.0) == 2);
}

namespace {

// Brownian path whose grid contains the trajectory's jump times.
BrownianPath path_with_jumps(const SpinTrajectory& tr, double T, int n, Rng& rng)
{
    auto p = sample_brownian({0, 0, 0}, 3, T, n, rng);
    insert_nodes(p, tr.all_times(), rng);
    return p;
}

}  // namespace

TEST_CASE("spin action examples")
{
    Rng rng(2, 0);
    auto c = constant_coupling(2, {0.0, 0.0}, {{-1.0, -1.0}});
    for (int i = 0; i < 20; ++i) {
        auto tr = sample_spin_trajectory(2, 2.0, 1, rng);
        auto p = path_with_jumps(tr, 2.0, 10, rng);
        CHECK(spin_action(tr, p, c, 2.0, 0.0) == cplx(0.0, 0.0));
    }
    SpinTrajectory none;
    none.p = 2;
    none.horizon = 1.5;
    none.jump_times = {{}};
    auto p = sample_brownian({0, 0, 0}, 1, 1.5, 7, rng);
    auto cc = constant_coupling(2, {0.7, 0.7}, {{-1.0, -1.0}});
    CHECK(spin_action(none, p, cc, 1.5, 0.0).real() == doctest::Approx(-0.7 * 1.5).epsilon(1e-14));

    // shift enters as -int (U - shift)
    CHECK(spin_action(none, p, cc, 1.5, -0.2).real() == doctest::Approx(-0.9 * 1.5).epsilon(1e-14));

    // jump factor uses the state before the jump: p = 2, U_1(sigma_1) = -2, U_1(sigma_2) = -3
    SpinTrajectory one;
    one.p = 2;
    one.horizon = 1.0;
    one.alpha0 = 1;
    one.jump_times = {{0.25, 0.75}};
    auto c2 = constant_coupling(2, {0.0, 0.0}, {{-2.0, -3.0}});
    auto q = path_with_jumps(one, 1.0, 4, rng);
    CHECK(spin_action(one, q, c2, 1.0, 0.0).real() == doctest::Approx(std::log(6.0)));
    auto all = spin_actions_all(one, q, c2, 1.0, 0.0);
    CHECK(all.final_state[0] == 1);
    CHECK(all.S[1].real() == doctest::Approx(std::log(6.0)));
    // diagonal term follows the state: sigma_1 on [0,.25) and [.75,1], sigma_2 on [.25,.75)
    auto c3 = constant_coupling(2, {1.0, 3.0}, {{-1.0, -1.0}});
    CHECK(spin_action(one, q, c3, 1.0, 0.0).real() == doctest::Approx(-(0.5 * 1.0 + 0.5 * 3.0)));

    // a jump time that is not a path node is rejected
    auto bare = sample_brownian({0, 0, 0}, 1, 1.0, 3, rng);
    CHECK_THROWS(spin_action(one, bare, c2, 1.0, 0.0));
}

TEST_CASE("jump sums against time integrals")
{
    Rng rng(3, 0);
    std::vector<std::function<double(long long)>> gs = {
        [](long long n) { return double(n); }, [](long long n) { return double(n * n); },
        [](long long n) { return std::cos(0.7 * n); }};
    for (const auto& g : gs) {
        RunningStats diff;
        for (int i = 0; i < 100000; ++i) {
            auto tr = sample_spin_trajectory(2, 1.0, 1, rng);
            diff.add(jump_sum(tr, g, 1.0) - time_integral(tr, g, 1.0));
        }
        CHECK(std::abs(diff.mean) <= 4.0 * diff.std_error());
    }
}

TEST_CASE("regularization")
{
    CHECK(chi_eps(cplx(0.3, 0.0), 0.1) == cplx(0.3, 0.0));
    CHECK(chi_eps(cplx(0.05, 0.0), 0.1) == cplx(0.05, 0.0));
    CHECK(chi_eps(cplx(0.0, 0.0), 0.1) == cplx(0.1, 0.0));
    CHECK(std::abs(chi_eps(cplx(0.0, 0.04), 0.1)) > 0.05);

    auto field = fields::bump_b(3.0, 1.0);
    auto raw = spin12_coupling(field);
    CHECK_FALSE(raw.offdiag_zero);
    Rng rng(4, 0);
    bool threw = false;
    for (int i = 0; i < 50 && !threw; ++i) {
        auto tr = sample_spin_trajectory(2, 2.0, 1, rng);
        auto p = path_with_jumps(tr, 2.0, 10, rng);
        try {
            spin_action(tr, p, raw, 2.0, 0.0);
        } catch (const std::domain_error&) {
            threw = true;
        }
    }
    CHECK(threw);
    for (double eps : {0.1, 0.01}) {
        auto reg = regularize(raw, eps);
        for (int i = 0; i < 500; ++i) {
            auto tr = sample_spin_trajectory(2, 2.0, 1 + i % 2, rng);
            auto p = path_with_jumps(tr, 2.0, 10, rng);
            cplx S = spin_action(tr, p, reg, 2.0, 0.0);
            CHECK(std::isfinite(S.real()));
            CHECK(std::isfinite(S.imag()));
            for (const auto& x : p.positions)
                for (int a : {1, 2}) CHECK(std::abs(reg.offdiag(1, x, a)) > eps / 2);
        }
    }
}

TEST_CASE("magnitude bounds for constant couplings")
{
    const double T = 1.0, u_diag = 0.4;
    const cplx u1 = std::polar(1.6, 0.3);
    auto c = constant_coupling(2, {-u_diag, u_diag}, {{-u1, -std::conj(u1)}});
    Rng rng(5, 0);
    for (double cexp : {1.0, 2.0}) {
        RunningStats m;
        for (int i = 0; i < 100000; ++i) {
            auto tr = sample_spin_trajectory(2, T, 1, rng);
            auto p = path_with_jumps(tr, T, 2, rng);
            cplx S = spin_action(tr, p, c, T, 0.0);
            double mag = std::exp(S.real());
            double n = double(tr.all_times().size());
            // pathwise bound with ||u_p|| = 0.4, ||u_1|| = 1.6
            CHECK(mag <= std::exp(T * u_diag + n * std::log(std::abs(u1))) * (1.0 + 1e-12));
            m.add(std::pow(mag, cexp));
        }
        double bound = std::exp(cexp * T * u_diag + T * (std::pow(std::abs(u1), cexp) - 1.0));
        CHECK(m.mean <= bound + 4.0 * m.std_error());
        CHECK(std::isfinite(m.mean));
    }
}

TEST_CASE("identically zero off-diagonal gives weight zero, not an error")
{
    auto c = scaled(constant_coupling(2, {0.3, -0.3}, {{-1.0, -1.0}}), 0.0);
    CHECK(c.offdiag_zero);
    SpinTrajectory one;
    one.p = 2;
    one.horizon = 1.0;
    one.jump_times = {{0.5}};
    Rng rng(6, 0);
    auto p = path_with_jumps(one, 1.0, 4, rng);
    cplx S = spin_action(one, p, c, 1.0, 0.0);
    CHECK(std::exp(S) == cplx(0.0, 0.0));
}
