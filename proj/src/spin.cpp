#include "subfk/spin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace subfk {

SpinConfig::SpinConfig(int p_) : p(p_)
{
    if (p < 2) throw std::invalid_argument("spin p must be >= 2");
}

cplx SpinConfig::root(int alpha) const
{
    if (alpha == p) return 1.0;
    double th = 2.0 * std::numbers::pi * alpha / p;
    // exact values where they exist
    if (2 * alpha == p) return -1.0;
    if (4 * alpha == p) return cplx(0.0, 1.0);
    if (4 * alpha == 3 * p) return cplx(0.0, -1.0);
    return std::polar(1.0, th);
}

int SpinConfig::add(int alpha, long long beta) const
{
    long long v = (static_cast<long long>(alpha) - 1 + beta) % p;
    if (v < 0) v += p;
    return static_cast<int>(v) + 1;
}

SpinCoupling spin12_coupling(const FieldSpec& field)
{
    if (!field.curl_b) throw std::invalid_argument("spin12_coupling needs curl_b (d = 3 field)");
    auto b = *field.curl_b;
    SpinConfig sc(2);
    SpinCoupling c;
    c.p = 2;
    c.U = [b, sc](const Vec& x, int alpha) { return -0.5 * sc.root(alpha).real() * b(x)[2]; };
    c.Ub = {[b, sc](const Vec& x, int alpha) {
        Vec v = b(x);
        double s = sc.root(alpha).real();
        return cplx(-0.5 * v[0], 0.5 * s * v[1]);
    }};
    c.offdiag_zero = field.is_zero;
    return c;
}

SpinCoupling offdiag_from_W(int p, const std::vector<OffDiagCoupling>& W, DiagCoupling U)
{
    SpinConfig sc(p);
    if (static_cast<int>(W.size()) != p - 1) throw std::invalid_argument("offdiag_from_W needs p-1 functions");
    SpinCoupling c;
    c.p = p;
    c.U = U ? U : DiagCoupling([](const Vec&, int) { return 0.0; });
    for (int beta = 1; beta < p; ++beta) {
        auto Wb = W[beta - 1];
        auto Wc = W[p - beta - 1];
        c.Ub.push_back([Wb, Wc, sc, beta](const Vec& x, int alpha) {
            return 0.5 * (Wb(x, sc.add(alpha, beta)) + std::conj(Wc(x, alpha)));
        });
    }
    return c;
}

SpinCoupling constant_coupling(int p, const std::vector<double>& diag, const std::vector<std::vector<cplx>>& off)
{
    if (static_cast<int>(diag.size()) != p || static_cast<int>(off.size()) != p - 1)
        throw std::invalid_argument("constant_coupling: need p diagonal values and p-1 off-diagonal rows");
    SpinCoupling c;
    c.p = p;
    c.U = [diag](const Vec&, int alpha) { return diag[alpha - 1]; };
    bool all_zero = true;
    for (const auto& row : off) {
        if (static_cast<int>(row.size()) != p) throw std::invalid_argument("constant_coupling: rows need p values");
        for (auto z : row) all_zero &= (z == 0.0);
        c.Ub.push_back([row](const Vec&, int alpha) { return row[alpha - 1]; });
    }
    c.offdiag_zero = all_zero;
    bool uniform = std::all_of(diag.begin(), diag.end(), [&](double v) { return v == diag[0]; });
    for (const auto& row : off) uniform &= std::all_of(row.begin(), row.end(), [&](cplx z) { return z == row[0]; });
    if (uniform) {
        SpinCoupling::Uniform u;
        u.u = diag[0];
        for (const auto& row : off) u.ub.push_back(row[0]);
        c.uniform = u;
    }
    return c;
}

SpinCoupling scaled(const SpinCoupling& c, double s)
{
    SpinCoupling r = c;
    auto U = c.U;
    r.U = [U, s](const Vec& x, int a) { return s * U(x, a); };
    r.Ub.clear();
    for (const auto& f : c.Ub) r.Ub.push_back([f, s](const Vec& x, int a) { return s * f(x, a); });
    r.offdiag_zero = c.offdiag_zero || s == 0.0;
    if (r.uniform) {
        r.uniform->u *= s;
        for (auto& z : r.uniform->ub) z *= s;
    }
    return r;
}

cplx chi_eps(cplx z, double eps)
{
    return std::abs(z) < 0.5 * eps ? z + eps : z;
}

SpinCoupling regularize(const SpinCoupling& c, double eps)
{
    if (!(eps > 0.0)) throw std::invalid_argument("regularize needs eps > 0");
    SpinCoupling r = c;
    r.Ub.clear();
    for (const auto& f : c.Ub)
        r.Ub.push_back([f, eps](const Vec& x, int a) { return -chi_eps(-f(x, a), eps); });
    r.epsilon = eps;
    r.offdiag_zero = false;
    if (r.uniform)
        for (auto& z : r.uniform->ub) z = -chi_eps(-z, eps);
    return r;
}

SpinCoupling absolute_offdiag(const SpinCoupling& c)
{
    SpinCoupling r = c;
    r.Ub.clear();
    for (const auto& f : c.Ub) r.Ub.push_back([f](const Vec& x, int a) { return cplx(-std::abs(f(x, a)), 0.0); });
    if (r.uniform)
        for (auto& z : r.uniform->ub) z = -std::abs(z);
    return r;
}

std::vector<SpinJump> SpinTrajectory::events() const
{
    std::vector<SpinJump> ev;
    for (size_t b = 0; b < jump_times.size(); ++b)
        for (double t : jump_times[b]) ev.push_back({t, static_cast<int>(b) + 1});
    std::sort(ev.begin(), ev.end(), [](const SpinJump& a, const SpinJump& b) {
        return a.time < b.time || (a.time == b.time && a.beta < b.beta);
    });
    return ev;
}

std::vector<double> SpinTrajectory::all_times() const
{
    std::vector<double> ts;
    for (const auto& v : jump_times) ts.insert(ts.end(), v.begin(), v.end());
    std::sort(ts.begin(), ts.end());
    return ts;
}

long long SpinTrajectory::N(double s) const
{
    long long n = 0;
    for (size_t b = 0; b < jump_times.size(); ++b) {
        const auto& v = jump_times[b];
        n += static_cast<long long>(b + 1) * (std::upper_bound(v.begin(), v.end(), s) - v.begin());
    }
    return n;
}

int SpinTrajectory::state(double s) const
{
    return SpinConfig(p).add(alpha0, N(s));
}

SpinTrajectory sample_spin_trajectory(int p, double horizon, int alpha0, Rng& rng)
{
    if (horizon < 0.0) throw std::invalid_argument("spin horizon must be >= 0");
    if (alpha0 < 1 || alpha0 > p) throw std::invalid_argument("alpha0 must lie in 1..p");
    SpinTrajectory tr;
    tr.p = p;
    tr.horizon = horizon;
    tr.alpha0 = alpha0;
    tr.jump_times.resize(p - 1);
    for (int b = 0; b < p - 1; ++b) {
        auto k = rng.poisson(horizon);
        auto& v = tr.jump_times[b];
        v.resize(k);
        for (auto& t : v) t = horizon * rng.uniform();
        std::sort(v.begin(), v.end());
    }
    return tr;
}

SpinActions spin_actions_all(const SpinTrajectory& traj, const BrownianPath& path, const SpinCoupling& c,
                             double horizon, double shift)
{
    const int p = c.p;
    if (traj.p != p) throw std::invalid_argument("trajectory and coupling disagree on p");
    SpinConfig sc(p);
    SpinActions out;
    out.S.assign(p, cplx(0.0, 0.0));
    out.final_state.resize(p);
    auto ev = traj.events();
    if (horizon == 0.0) {
        for (int a = 1; a <= p; ++a) out.final_state[a - 1] = a;
        return out;
    }
    const size_t K = path.node_of(horizon);
    for (const auto& e : ev) {
        if (e.time > horizon) throw std::invalid_argument("spin jump beyond the horizon");
        path.node_of(e.time);  // throws when the jump is not a path node
    }
    std::vector<double> u0(p), u1(p);
    auto fill = [&](std::vector<double>& u, const Vec& x) {
        for (int s = 1; s <= p; ++s) u[s - 1] = c.U ? c.U(x, s) : 0.0;
    };
    fill(u0, path.positions[0]);
    long long N = 0;
    size_t e = 0;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k <= K; ++k) {
        const double tk = path.times[k];
        while (e < ev.size() && ev[e].time <= tk) {
            const Vec& x = path.positions[k];
            for (int a = 1; a <= p; ++a) {
                int st = sc.add(a, N);
                cplx z = -c.offdiag(ev[e].beta, x, st);
                if (z == 0.0) {
                    if (!c.offdiag_zero)
                        throw std::domain_error(
                            "off-diagonal coupling vanishes at a spin jump; use regularize(coupling, eps)");
                    out.S[a - 1] = cplx(neg_inf, 0.0);
                } else if (std::isfinite(out.S[a - 1].real())) {
                    out.S[a - 1] += std::log(z);
                }
            }
            N += ev[e].beta;
            ++e;
        }
        if (k == K) break;
        const double dt = path.times[k + 1] - tk;
        fill(u1, path.positions[k + 1]);
        if (dt > 0.0) {
            for (int a = 1; a <= p; ++a) {
                int st = sc.add(a, N) - 1;
                out.S[a - 1] -= dt * (0.5 * (u0[st] + u1[st]) - shift);
            }
        }
        std::swap(u0, u1);
    }
    for (int a = 1; a <= p; ++a) out.final_state[a - 1] = sc.add(a, N);
    return out;
}

cplx spin_action(const SpinTrajectory& traj, const BrownianPath& path, const SpinCoupling& coupling,
                 double horizon, double spectral_shift)
{
    return spin_actions_all(traj, path, coupling, horizon, spectral_shift).S[traj.alpha0 - 1];
}

cplx spin_action(const SpinTrajectory& traj, const SubordinatedPath& spath, const SpinCoupling& coupling,
                 double horizon, double spectral_shift)
{
    return spin_action(traj, spath.brownian, coupling, horizon, spectral_shift);
}

double jump_sum(const SpinTrajectory& traj, const std::function<double(long long)>& g, double w)
{
    double s = 0.0;
    long long N = 0;
    for (const auto& e : traj.events()) {
        if (e.time > w) break;
        s += g(N);
        N += e.beta;
    }
    return s;
}

double time_integral(const SpinTrajectory& traj, const std::function<double(long long)>& g, double w)
{
    double s = 0.0, last = 0.0;
    long long N = 0;
    for (const auto& e : traj.events()) {
        if (e.time > w) break;
        s += (e.time - last) * g(N);
        last = e.time;
        N += e.beta;
    }
    return s + (w - last) * g(N);
}

}  // namespace subfk
