#include "subfk/semigroup.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>
#include <thread>

#include "subfk/stats.hpp"

namespace subfk {

double GaussianProfile::base(const Vec& x, int d) const
{
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
    return amplitude * std::exp(-s / (2.0 * sigma * sigma));
}

double GaussianProfile::l1_norm(int d) const
{
    return std::abs(amplitude) * std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * d);
}

TestFunction gaussian_function(const Vec& center, double sigma, int d, double amplitude)
{
    if (!(sigma > 0.0)) throw std::invalid_argument("Gaussian width must be positive");
    GaussianProfile g{center, sigma, amplitude, 0.0};
    TestFunction f;
    f.name = "gaussian";
    f.eval = [g, d](const Vec& x) { return cplx(g.base(x, d), 0.0); };
    f.gaussian = g;
    f.fixed_sign = true;
    return f;
}

TestFunction periodic_gaussian_function(const Vec& center, double sigma, double L, int d, double amplitude)
{
    if (!(sigma > 0.0) || !(L > 0.0)) throw std::invalid_argument("periodic Gaussian needs sigma > 0 and L > 0");
    GaussianProfile g{center, sigma, amplitude, L};
    // images out to 12 sigma
    const int K = static_cast<int>(std::ceil(12.0 * sigma / (2.0 * L)));
    TestFunction f;
    f.name = "periodic-gaussian";
    f.eval = [g, d, K, L](const Vec& x) {
        Vec y = wrap_box(x, L, d);
        double s = 0.0;
        int k[3] = {0, 0, 0};
        const int span = 2 * K + 1;
        int total = 1;
        for (int i = 0; i < d; ++i) total *= span;
        for (int idx = 0; idx < total; ++idx) {
            int r = idx;
            Vec z = y;
            for (int i = 0; i < d; ++i) {
                k[i] = r % span - K;
                r /= span;
                z[i] += 2.0 * L * k[i];
            }
            s += g.base(z, d);
        }
        return cplx(s, 0.0);
    };
    f.gaussian = g;
    f.fixed_sign = true;
    return f;
}

TestFunction custom_function(std::function<cplx(const Vec&)> f, std::string name)
{
    TestFunction t;
    t.name = std::move(name);
    t.eval = std::move(f);
    return t;
}

namespace {

struct GaussHermiteRule {
    std::vector<double> nodes, prob, cdf;  // prob = w_i / sqrt(pi)
};

// Golub-Welsch for the weight exp(-y^2).
GaussHermiteRule gauss_hermite(int n)
{
    if (n < 1) throw std::invalid_argument("Gauss-Hermite needs at least one node");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermiteRule r;
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
        double v0 = es.eigenvectors()(0, i);
        r.nodes.push_back(es.eigenvalues()(i));
        r.prob.push_back(v0 * v0);
        c += v0 * v0;
        r.cdf.push_back(c);
    }
    for (auto& q : r.cdf) q /= c;
    r.cdf.back() = 1.0;
    return r;
}

struct XDraw {
    Vec x;
    cplx weight;  // E[weight H(x)] = int conj(f) H
};

class XSampler {
public:
    XSampler(const TestFunction& f, const EstimatorConfig& cfg) : f_(f), d_(cfg.d), L_(cfg.box_L)
    {
        if (std::holds_alternative<xsampling::UniformBox>(cfg.x_sampling)) {
            if (!(L_ > 0.0)) throw std::invalid_argument("UniformBox sampling needs torus mode (box_L > 0)");
            mode_ = 0;
            return;
        }
        if (!f.gaussian)
            throw std::invalid_argument("Gauss-Hermite and ImportanceFromF sampling need a Gaussian test function f");
        prof_ = *f.gaussian;
        if (std::holds_alternative<xsampling::ImportanceFromF>(cfg.x_sampling)) {
            if (!f.fixed_sign)
                throw std::invalid_argument("ImportanceFromF needs a fixed-sign f (density |f|/||f||_1)");
            mode_ = 1;
        } else {
            mode_ = 2;
            rule_ = gauss_hermite(std::get<xsampling::GaussHermite>(cfg.x_sampling).nodes);
        }
        w_ = prof_.amplitude * std::pow(2.0 * std::numbers::pi * prof_.sigma * prof_.sigma, 0.5 * d_);
    }

    XDraw draw(Rng& rng) const
    {
        XDraw out{{0, 0, 0}, 0.0};
        if (mode_ == 0) {
            for (int i = 0; i < d_; ++i) out.x[i] = -L_ + 2.0 * L_ * rng.uniform();
            out.weight = std::pow(2.0 * L_, d_) * std::conj(f_(out.x));
            return out;
        }
        for (int i = 0; i < d_; ++i) {
            double y;
            if (mode_ == 1) {
                y = rng.normal() / std::sqrt(2.0);
            } else {
                double u = rng.uniform();
                size_t k = std::lower_bound(rule_.cdf.begin(), rule_.cdf.end(), u) - rule_.cdf.begin();
                y = rule_.nodes[std::min(k, rule_.nodes.size() - 1)];
            }
            out.x[i] = prof_.center[i] + std::sqrt(2.0) * prof_.sigma * y;
        }
        out.weight = w_;
        return out;
    }

private:
    TestFunction f_;
    int d_;
    double L_;
    int mode_ = 0;
    GaussianProfile prof_;
    GaussHermiteRule rule_;
    double w_ = 0.0;
};

// Deterministic quadrature of int conj(f) H for t = 0.
template <class H>
cplx inner_quadrature(const TestFunction& f, const EstimatorConfig& cfg, H&& h, double* abs_sum)
{
    const int d = cfg.d;
    cplx s = 0.0;
    double a = 0.0;
    if (f.gaussian) {
        auto rule = gauss_hermite(48);
        const auto& prof = *f.gaussian;
        const double w = prof.amplitude * std::pow(2.0 * std::numbers::pi * prof.sigma * prof.sigma, 0.5 * d);
        const int n = static_cast<int>(rule.nodes.size());
        int total = 1;
        for (int i = 0; i < d; ++i) total *= n;
        for (int idx = 0; idx < total; ++idx) {
            Vec x{0, 0, 0};
            double p = 1.0;
            int r = idx;
            for (int i = 0; i < d; ++i) {
                int k = r % n;
                r /= n;
                x[i] = prof.center[i] + std::sqrt(2.0) * prof.sigma * rule.nodes[k];
                p *= rule.prob[k];
            }
            cplx z = p * w * h(x);
            s += z;
            a += p * std::abs(w) * std::abs(h(x));
        }
    } else {
        if (!(cfg.box_L > 0.0)) throw std::invalid_argument("t = 0 with a non-Gaussian f needs torus mode");
        const int m = d == 1 ? 512 : (d == 2 ? 96 : 40);
        const double hstep = 2.0 * cfg.box_L / m;
        int total = 1;
        for (int i = 0; i < d; ++i) total *= m;
        const double vol = std::pow(hstep, d);
        for (int idx = 0; idx < total; ++idx) {
            Vec x{0, 0, 0};
            int r = idx;
            for (int i = 0; i < d; ++i) {
                x[i] = -cfg.box_L + (r % m + 0.5) * hstep;
                r /= m;
            }
            cplx z = vol * std::conj(f(x)) * h(x);
            s += z;
            a += vol * std::abs(f(x)) * std::abs(h(x));
        }
    }
    *abs_sum = a;
    return s;
}

struct Accumulator {
    RunningStats re, im, abs;

    void add(cplx z, double a)
    {
        re.add(z.real());
        im.add(z.imag());
        abs.add(a);
    }
};

// Runs body(rng, acc, n) per chunk on a worker pool and merges in chunk order.
template <class Body>
Estimate run_chunks(const EstimatorConfig& cfg, Body&& body)
{
    if (cfg.n_chunks < 1) throw std::invalid_argument("n_chunks must be >= 1");
    if (cfg.n_paths % static_cast<std::uint64_t>(cfg.n_chunks) != 0)
        throw std::invalid_argument("n_paths must be divisible by n_chunks");
    const std::uint64_t per = cfg.n_paths / cfg.n_chunks;
    std::vector<Accumulator> acc(cfg.n_chunks);
    std::vector<std::exception_ptr> errs(cfg.n_chunks);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int c = next++; c < cfg.n_chunks; c = next++) {
            try {
                Rng rng(cfg.seed, static_cast<std::uint64_t>(c));
                for (std::uint64_t i = 0; i < per; ++i) body(rng, acc[c]);
            } catch (...) {
                errs[c] = std::current_exception();
            }
        }
    };
    const int nt = std::max(1, std::min(cfg.threads, cfg.n_chunks));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    Accumulator total;
    Estimate est;
    for (const auto& a : acc) {
        total.re.merge(a.re);
        total.im.merge(a.im);
        total.abs.merge(a.abs);
        est.chunks.push_back({a.re.n, cplx(a.re.mean, a.im.mean), a.abs.mean});
    }
    est.mean = cplx(total.re.mean, total.im.mean);
    est.std_error = std::hypot(total.re.std_error(), total.im.std_error());
    est.n = total.re.n;
    est.companion_abs_mean = total.abs.mean;
    est.companion_std_error = total.abs.std_error();
    return est;
}

Potential prepared_potential(const Potential& V, const EstimatorConfig& cfg)
{
    Potential w = cfg.box_L > 0.0 ? potentials::wrapped(V, cfg.box_L, cfg.d) : V;
    if (cfg.v_plus_cap || cfg.v_minus_cap) {
        auto base = w.V;
        double hi = cfg.v_plus_cap.value_or(INFINITY);
        double lo = cfg.v_minus_cap ? -*cfg.v_minus_cap : -INFINITY;
        w.V = [base, hi, lo](const Vec& x) { return std::clamp(base(x), lo, hi); };
        if (w.constant_value) w.constant_value = std::clamp(*w.constant_value, lo, hi);
    }
    return w;
}

FieldSpec prepared_field(const FieldSpec& a, const EstimatorConfig& cfg)
{
    return cfg.box_L > 0.0 ? fields::wrapped(a, cfg.box_L, cfg.d) : a;
}

Vec endpoint(const Vec& x, const EstimatorConfig& cfg)
{
    return cfg.box_L > 0.0 ? wrap_box(x, cfg.box_L, cfg.d) : x;
}

// int_0^t V(X_s) ds, trapezoid on the outer grid
double potential_trapezoid(const SubordinatedPath& sp, const Potential& V, double t)
{
    if (V.is_zero) return 0.0;
    if (V.constant_value) return *V.constant_value * t;
    const size_t n = sp.subordinator.times.size() - 1;
    double s = 0.0;
    for (size_t j = 0; j <= n; ++j) {
        double v = V.V(sp.at_node(j));
        if (!std::isfinite(v)) throw std::domain_error("potential is not finite along the path");
        s += (j == 0 || j == n) ? 0.5 * v : v;
    }
    return s * t / n;
}

void check_config(const EstimatorConfig& cfg)
{
    if (cfg.t < 0.0) throw std::invalid_argument("t must be >= 0");
    if (cfg.d < 1 || cfg.d > kMaxDim) throw std::invalid_argument("d must be 1..3");
    if (cfg.n_time_steps < 1 || cfg.n_inner < 1) throw std::invalid_argument("time steps must be >= 1");
}

SpinCoupling wrapped_coupling(const SpinCoupling& c, double L, int d)
{
    if (!(L > 0.0)) return c;
    SpinCoupling w = c;
    auto U = c.U;
    if (U) w.U = [U, L, d](const Vec& x, int a) { return U(wrap_box(x, L, d), a); };
    w.Ub.clear();
    for (const auto& f : c.Ub) w.Ub.push_back([f, L, d](const Vec& x, int a) { return f(wrap_box(x, L, d), a); });
    return w;
}

}  // namespace

namespace {

constexpr double kMaxSpinJumps = 1e6;

// Poisson(mean) count as a double; a normal draw once the mean is beyond
// what the integer sampler handles.
double sample_count(double mean, Rng& rng)
{
    if (mean < 1e12) return static_cast<double>(rng.poisson(mean));
    return std::max(0.0, std::round(mean + std::sqrt(mean) * rng.normal()));
}

}  // namespace

Estimate estimate_spinless(const SubordinatorSpec& sub, const FieldSpec& field, const Potential& V,
                           const TestFunction& f, const TestFunction& g, const EstimatorConfig& cfg)
{
    check_config(cfg);
    if (cfg.t == 0.0) {
        Estimate e;
        double a = 0.0;
        e.mean = inner_quadrature(f, cfg, [&](const Vec& x) { return g(endpoint(x, cfg)); }, &a);
        e.companion_abs_mean = a;
        e.n = 0;
        return e;
    }
    const XSampler xs(f, cfg);
    const FieldSpec a = prepared_field(field, cfg);
    const Potential Vw = prepared_potential(V, cfg);
    const auto times = uniform_times(cfg.t, cfg.n_time_steps);
    return run_chunks(cfg, [&](Rng& rng, Accumulator& acc) {
        XDraw xd = xs.draw(rng);
        auto sp = subordinate_given(xd.x, cfg.d, sample_path(sub, times, rng), cfg.n_inner, rng);
        double phase = a.is_zero ? 0.0 : stratonovich_midpoint(sp.brownian, a.a);
        double damp = std::exp(-potential_trapezoid(sp, Vw, cfg.t));
        cplx gv = g(endpoint(sp.brownian.positions.back(), cfg));
        cplx z = xd.weight * gv * std::polar(damp, -phase);
        acc.add(z, std::abs(xd.weight) * std::abs(gv) * damp);
    });
}

Estimate estimate_spinless(const BernsteinFunction& psi, const FieldSpec& field, const Potential& V,
                           const TestFunction& f, const TestFunction& g, const EstimatorConfig& cfg)
{
    return estimate_spinless(SubordinatorSpec::automatic(psi), field, V, f, g, cfg);
}

Estimate estimate_spin(const SubordinatorSpec& sub, const FieldSpec& field, const SpinCoupling& coupling,
                       const Potential& V, const SpinTestFunction& f, const SpinTestFunction& g,
                       const EstimatorConfig& cfg)
{
    check_config(cfg);
    const int p = coupling.p;
    if (f.p() != p || g.p() != p) throw std::invalid_argument("test functions and coupling disagree on p");
    if (cfg.spectral_shift > 0.0) throw std::invalid_argument("spectral shift must be <= 0");
    if (cfg.t == 0.0) {
        Estimate e;
        double a = 0.0;
        e.mean = inner_quadrature(
            f.profile, cfg,
            [&](const Vec& x) {
                cplx s = 0.0;
                for (int al = 1; al <= p; ++al) s += std::conj(f.coef[al - 1]) * g(endpoint(x, cfg), al);
                return s;
            },
            &a);
        // companion with |f| per component
        double b = 0.0;
        inner_quadrature(
            f.profile, cfg,
            [&](const Vec& x) {
                double s = 0.0;
                for (int al = 1; al <= p; ++al) s += std::abs(f.coef[al - 1]) * std::abs(g(endpoint(x, cfg), al));
                return cplx(s, 0.0);
            },
            &b);
        e.companion_abs_mean = b;
        return e;
    }
    const XSampler xs(f.profile, cfg);
    const FieldSpec a = prepared_field(field, cfg);
    const Potential Vw = prepared_potential(V, cfg);
    const SpinCoupling cw = wrapped_coupling(coupling, cfg.box_L, cfg.d);
    const bool rao_blackwell = coupling.offdiag_zero && cfg.condition_on_no_jumps;
    const auto times = uniform_times(cfg.t, cfg.n_time_steps);
    return run_chunks(cfg, [&](Rng& rng, Accumulator& acc) {
        XDraw xd = xs.draw(rng);
        auto sp_sub = sample_path(sub, times, rng);
        const double T = sp_sub.terminal();
        if (cw.uniform && !rao_blackwell) {
            // only the counts N^beta_T matter
            const auto& un = *cw.uniform;
            cplx S = -(un.u - cfg.spectral_shift) * T;
            long long shift_idx = 0;
            bool dead = false;
            for (int beta = 1; beta < p; ++beta) {
                const double k = sample_count(T, rng);
                if (k == 0.0) continue;
                if (un.ub[beta - 1] == 0.0) {
                    dead = true;
                    continue;
                }
                S += k * std::log(-un.ub[beta - 1]);
                shift_idx += static_cast<long long>(std::fmod(k * beta, static_cast<double>(p)));
            }
            auto sp = subordinate_given(xd.x, cfg.d, std::move(sp_sub), cfg.n_inner, rng);
            double phase = a.is_zero ? 0.0 : stratonovich_midpoint(sp.brownian, a.a);
            // e^{(p-1)T} folded into the action so that large T cannot overflow
            double common = std::exp(-potential_trapezoid(sp, Vw, cfg.t));
            const Vec xe = endpoint(sp.brownian.positions.back(), cfg);
            cplx z = 0.0;
            double za = 0.0;
            SpinConfig sc(p);
            const cplx eS = dead ? cplx(0.0) : std::exp(S + static_cast<double>(p - 1) * T);
            for (int al = 1; al <= p; ++al) {
                if (f.coef[al - 1] == 0.0) continue;
                cplx term = std::conj(f.coef[al - 1]) * g(xe, sc.add(al, shift_idx)) * eS;
                z += term;
                za += std::abs(term);
            }
            z *= xd.weight * std::polar(common, -phase);
            za *= std::abs(xd.weight) * common;
            acc.add(z, za);
            return;
        }
        SpinTrajectory traj;
        double log_weight = 0.0;
        if (rao_blackwell) {
            traj.p = p;
            traj.horizon = T;
            traj.jump_times.assign(p - 1, {});
        } else {
            if ((p - 1) * T > kMaxSpinJumps)
                throw Error("expected spin jump count " + std::to_string((p - 1) * T) +
                            " exceeds the per-path budget; the subordinator is too heavy-tailed for the spin weight");
            traj = sample_spin_trajectory(p, T, 1, rng);
            log_weight = (p - 1) * T;
        }
        auto sp = subordinate_given(xd.x, cfg.d, std::move(sp_sub), cfg.n_inner, rng, traj.all_times());
        auto acts = spin_actions_all(traj, sp.brownian, cw, T, cfg.spectral_shift);
        double phase = a.is_zero ? 0.0 : stratonovich_midpoint(sp.brownian, a.a);
        double common = std::exp(log_weight - potential_trapezoid(sp, Vw, cfg.t));
        const Vec xe = endpoint(sp.brownian.positions.back(), cfg);
        cplx z = 0.0;
        double za = 0.0;
        for (int al = 1; al <= p; ++al) {
            if (f.coef[al - 1] == 0.0) continue;
            cplx gv = g(xe, acts.final_state[al - 1]);
            if (gv == 0.0) continue;
            cplx term = std::conj(f.coef[al - 1]) * gv * std::exp(acts.S[al - 1]);
            z += term;
            za += std::abs(term);
        }
        z *= xd.weight * std::polar(common, -phase);
        za *= std::abs(xd.weight) * common;
        acc.add(z, za);
    });
}

Estimate estimate_relativistic_spin_half(double m, const FieldSpec& field, const Potential& V,
                                         const SpinTestFunction& f, const SpinTestFunction& g,
                                         const EstimatorConfig& cfg, double epsilon)
{
    if (cfg.d != 3) throw std::invalid_argument("the spin-1/2 relativistic estimator needs d = 3");
    if (!field.curl_b) throw std::invalid_argument("the spin-1/2 relativistic estimator needs curl_b");
    auto c = spin12_coupling(field);
    if (epsilon > 0.0) c = regularize(c, epsilon);
    SubordinatorSpec sub(BernsteinFunction::relativistic(m), strategy::RelativisticExact{});
    return estimate_spin(sub, field, c, V, f, g, cfg);
}

double z_score(const Estimate& e, cplx reference)
{
    double d = std::abs(e.mean - reference);
    if (e.std_error == 0.0) return d == 0.0 ? 0.0 : INFINITY;
    return d / e.std_error;
}

double z_score(const Estimate& e1, const Estimate& e2)
{
    return z_score(e1, 1.0, e2);
}

double z_score(const Estimate& e, double factor, const Estimate& ref)
{
    double d = std::abs(e.mean - factor * ref.mean);
    double s = std::hypot(e.std_error, factor * ref.std_error);
    if (s == 0.0) return d == 0.0 ? 0.0 : INFINITY;
    return d / s;
}

double gaussian_free_value(const BernsteinFunction& psi, double t, int d, double sigma)
{
    if (d < 1 || d > 3) throw std::invalid_argument("d must be 1..3");
    const double surface[] = {2.0, 2.0 * std::numbers::pi, 4.0 * std::numbers::pi};
    boost::math::quadrature::exp_sinh<double> q;
    auto integrand = [&](double r) {
        if (r == 0.0) return d == 1 ? 1.0 : 0.0;
        double v = std::exp(-sigma * sigma * r * r - t * psi(0.5 * r * r));
        return std::pow(r, d - 1) * v;
    };
    double I = q.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
    return std::pow(sigma, 2 * d) * surface[d - 1] * I;
}

cplx oracle_spinless(const GridSpec& grid, const BernsteinFunction& psi, const FieldSpec& field, const Potential& V,
                     const TestFunction& f, const TestFunction& g, double t, KineticScheme scheme)
{
    auto h = psi_of_operator(discretize_h(grid, field, scheme), psi);
    GridSemigroup S(h, V.is_zero ? Eigen::VectorXd() : sample_potential(grid, V.V));
    return S.matrix_element(sample_function(grid, f.eval), sample_function(grid, g.eval), t);
}

cplx oracle_spin(const GridSpec& grid, const BernsteinFunction& psi, const FieldSpec& field,
                 const SpinCoupling& coupling, const Potential& V, const SpinTestFunction& f,
                 const SpinTestFunction& g, double t, double spectral_shift, KineticScheme scheme)
{
    const int p = coupling.p;
    auto op = psi_of_operator(discretize_spin(grid, coupling, field, scheme), psi, ShiftMode::Fixed, spectral_shift);
    GridSemigroup S(op, V.is_zero ? Eigen::VectorXd() : sample_potential(grid, V.V, p));
    auto fv = sample_spin_function(grid, p, [&](const Vec& x, int a) { return f(x, a); });
    auto gv = sample_spin_function(grid, p, [&](const Vec& x, int a) { return g(x, a); });
    return S.matrix_element(fv, gv, t);
}

double spin_spectral_shift(const GridSpec& grid, const SpinCoupling& coupling, const FieldSpec& field,
                           KineticScheme scheme)
{
    return std::min(0.0, ground_energy(discretize_spin(grid, coupling, field, scheme)));
}

DiamagneticReport diamagnetic_check(const Estimate& e)
{
    DiamagneticReport r;
    r.abs_mean = std::abs(e.mean);
    r.companion_abs_mean = e.companion_abs_mean;
    r.gap = r.companion_abs_mean - r.abs_mean;
    r.holds = r.abs_mean <= r.companion_abs_mean * (1.0 + 1e-12);
    return r;
}

GroundEnergyReport ground_energy_estimate(const std::vector<double>& t_grid, const std::function<Estimate(double)>& run)
{
    GroundEnergyReport rep;
    const double norm = run(0.0).mean.real();
    if (!(norm > 0.0)) throw std::invalid_argument("ground energy needs (f, f) > 0");
    for (double t : t_grid) {
        if (!(t > 0.0)) {
            rep.warnings.push_back("t = " + std::to_string(t) + " skipped (needs t > 0)");
            continue;
        }
        Estimate e = run(t);
        double re = e.mean.real() / norm;
        if (!(re > 0.0)) {
            rep.warnings.push_back("t = " + std::to_string(t) + " dropped: non-positive estimate");
            continue;
        }
        rep.points.push_back({t, -std::log(re) / t, e.std_error / (t * norm * re)});
    }
    const size_t n = rep.points.size();
    if (n == 1) rep.extrapolated = rep.points[0].energy;
    if (n >= 2) {
        // least squares E = a + b / t
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& p : rep.points) {
            double x = 1.0 / p.t;
            sx += x;
            sy += p.energy;
            sxx += x * x;
            sxy += x * p.energy;
        }
        double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.extrapolated = (sy - b * sx) / n;
    }
    return rep;
}

namespace {

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    const size_t n = lx.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Mean and stderr of h(path) over paths started at x.
template <class H>
RunningStats path_average(const SubordinatorSpec& sub, int d, double t, const Vec& x, std::uint64_t n,
                          std::uint64_t seed, std::uint64_t stream, int n_steps, H&& h)
{
    RunningStats st;
    Rng rng(seed, stream);
    const auto times = uniform_times(t, n_steps);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto sp = subordinate_given(x, d, sample_path(sub, times, rng), 1, rng);
        st.add(h(sp));
    }
    return st;
}

}  // namespace

KatoReport kato_condition1_check(const Potential& V, const SubordinatorSpec& sub, int d,
                                 const std::vector<double>& t_grid, const std::vector<Vec>& probes,
                                 std::uint64_t n_paths, std::uint64_t seed, int n_time_steps)
{
    KatoReport rep;
    std::vector<double> ts = t_grid;
    std::sort(ts.begin(), ts.end());
    std::uint64_t stream = 0;
    for (double t : ts) {
        KatoPoint kp;
        kp.t = t;
        if (V.is_zero || V.constant_value) {
            kp.sup_value = V.is_zero ? 0.0 : *V.constant_value * t;
            if (!probes.empty()) kp.argmax = probes[0];
        } else {
            bool first = true;
            for (const auto& x : probes) {
                auto st = path_average(sub, d, t, x, n_paths, seed, stream++, n_time_steps,
                                       [&](const SubordinatedPath& sp) { return potential_trapezoid(sp, V, t); });
                if (first || st.mean > kp.sup_value) {
                    kp.sup_value = st.mean;
                    kp.std_error = st.std_error();
                    kp.argmax = x;
                    first = false;
                }
            }
        }
        rep.points.push_back(kp);
    }
    std::vector<double> xs, ys;
    rep.monotone = true;
    for (size_t i = 0; i < rep.points.size(); ++i) {
        xs.push_back(rep.points[i].t);
        ys.push_back(rep.points[i].sup_value);
        if (i > 0) {
            const auto& a = rep.points[i - 1];
            const auto& b = rep.points[i];
            if (b.sup_value < a.sup_value - 3.0 * std::hypot(a.std_error, b.std_error)) rep.monotone = false;
        }
    }
    rep.log_slope = fit_log_slope(xs, ys);
    bool all_zero = std::all_of(ys.begin(), ys.end(), [](double v) { return v == 0.0; });
    rep.decays = all_zero || (rep.monotone && rep.log_slope > 0.1);
    return rep;
}

ExponentialMomentReport exponential_moment_check(const Potential& V, const SubordinatorSpec& sub, int d, double t,
                                                 const std::vector<Vec>& probes, std::uint64_t n_paths,
                                                 std::uint64_t seed, double s_block, int n_time_steps)
{
    ExponentialMomentReport rep;
    rep.t = t;
    rep.kato_s = s_block;
    if (V.is_zero || V.constant_value) {
        double c = V.is_zero ? 0.0 : *V.constant_value;
        rep.sup_estimate = std::exp(c * t);
        rep.kato_eps = c * s_block;
    } else {
        std::uint64_t stream = 1000;
        bool first = true;
        for (const auto& x : probes) {
            auto st = path_average(sub, d, t, x, n_paths, seed, stream++, n_time_steps, [&](const SubordinatedPath& sp) {
                return std::exp(potential_trapezoid(sp, V, t));
            });
            if (first || st.mean > rep.sup_estimate) {
                rep.sup_estimate = st.mean;
                rep.std_error = st.std_error();
                first = false;
            }
        }
        Potential Vp = V;
        auto base = V.V;
        Vp.V = [base](const Vec& x) { return std::max(base(x), 0.0); };
        auto kr = kato_condition1_check(Vp, sub, d, {s_block}, probes, n_paths, seed + 1, n_time_steps);
        rep.kato_eps = kr.points[0].sup_value;
    }
    if (rep.kato_eps < 1.0) rep.khasminskii_bound = std::pow(1.0 - rep.kato_eps, -std::ceil(t / s_block));
    return rep;
}

FermionicReport fermionic_generator_check(const SubordinatorSpec& sub, const GridSpec& grid,
                                          const SpinTestFunction& f, const SpinTestFunction& g,
                                          const EstimatorConfig& cfg)
{
    if (f.p() != 2 || g.p() != 2) throw std::invalid_argument("the fermionic check is for p = 2");
    if (cfg.box_L > 0.0 && cfg.box_L != grid.L) throw std::invalid_argument("torus box and oracle grid differ");
    FermionicReport r;
    EstimatorConfig c = cfg;
    c.spectral_shift = 0.0;
    // U = 1 cancels the e^{T} weight, U_1 = -1 is sigma_F
    auto cp = constant_coupling(2, {1.0, 1.0}, {{-1.0, -1.0}});
    r.mc = estimate_spin(sub, fields::zero(), cp, potentials::zero(), f, g, c);
    r.oracle = oracle_spin(grid, sub.psi(), fields::zero(), cp, potentials::zero(), f, g, cfg.t, 0.0);
    r.z = z_score(r.mc, r.oracle);
    auto cl = constant_coupling(2, {2.0, 2.0}, {{-1.0, -1.0}});
    r.mc_literal = estimate_spin(sub, fields::zero(), cl, potentials::zero(), f, g, c);
    r.oracle_literal = oracle_spin(grid, sub.psi(), fields::zero(), cl, potentials::zero(), f, g, cfg.t, 0.0);
    r.z_literal = z_score(r.mc_literal, r.oracle_literal);
    r.pass = r.z <= 4.0;
    return r;
}

}  // namespace subfk
