/*
 * Subordinator samplers.
 *
 * Stable: Kanter's representation. Relativistic m > 0: inverse Gaussian by
 * Michael-Schucany-Haas; m = 0: t^2 / Z^2. Everything else: compound Poisson
 * over jumps >= cutoff with the small jumps folded into the drift.
 */
#include "subfk/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "subfk/stats.hpp"

namespace subfk {

namespace {

bool is_pure_stable(const BernsteinFunction& psi, double& alpha, double& scale)
{
    if (psi.closed_form()) {
        if (const auto* s = std::get_if<closed::Stable>(&*psi.closed_form())) {
            alpha = s->alpha;
            scale = 1.0;
            return true;
        }
        return false;
    }
    if (psi.drift() == 0.0 && psi.measure()) {
        if (const auto* s = std::get_if<StableDensity>(&*psi.measure())) {
            alpha = s->alpha;
            scale = s->scale;
            return true;
        }
    }
    return false;
}

}  // namespace

SubordinatorSpec::SubordinatorSpec(BernsteinFunction psi, SubordinatorStrategy strat)
    : psi_(std::move(psi)), strat_(strat)
{
    if (std::holds_alternative<strategy::StableExact>(strat_)) {
        if (!is_pure_stable(psi_, alpha_, scale_))
            throw UnsupportedError("StableExact sampler needs a stable Psi, got " + psi_.name());
    } else if (std::holds_alternative<strategy::RelativisticExact>(strat_)) {
        const closed::Relativistic* r =
            psi_.closed_form() ? std::get_if<closed::Relativistic>(&*psi_.closed_form()) : nullptr;
        if (!r) throw UnsupportedError("RelativisticExact sampler needs a relativistic Psi, got " + psi_.name());
        mass_ = r->m;
    } else if (std::holds_alternative<strategy::DriftOnly>(strat_)) {
        if (!psi_.has_triplet() || psi_.measure())
            throw UnsupportedError("DriftOnly sampler needs Psi(u) = b u, got " + psi_.name());
        drift_ = psi_.drift();
    } else {
        cutoff_ = std::get<strategy::CompoundPoissonPlusDrift>(strat_).cutoff;
        if (!(cutoff_ > 0.0)) throw ConfigError("compound Poisson cutoff must be positive");
        if (!psi_.has_triplet())
            throw UnsupportedError("no sampler for " + psi_.name() + " (no Levy triplet)");
        drift_ = psi_.drift();
        if (psi_.measure()) {
            const LevyMeasure& m = *psi_.measure();
            drift_ += small_jump_mean(m, cutoff_);
            if (const auto* s = std::get_if<StableDensity>(&m)) {
                alpha_ = s->alpha;
                lambda_ = tail_mass(m, cutoff_);
            } else if (std::holds_alternative<CompoundExp>(m)) {
                lambda_ = tail_mass(m, cutoff_);
            } else {
                const auto& nd = std::get<NumericDensity>(m);
                double y_hi = std::max(nd.y_max, 2.0 * cutoff_);
                const int K = 4000;
                auto logy = std::make_shared<std::vector<double>>(K + 1);
                auto cdf = std::make_shared<std::vector<double>>(K + 1, 0.0);
                double a = std::log(cutoff_), b = std::log(y_hi), h = (b - a) / K;
                auto g = [&m](double s) {
                    double y = std::exp(s);
                    return levy_density(m, y) * y;
                };
                for (int k = 0; k <= K; ++k) (*logy)[k] = a + k * h;
                for (int k = 0; k < K; ++k) {
                    double s0 = (*logy)[k];
                    (*cdf)[k + 1] = (*cdf)[k] + h / 6.0 * (g(s0) + 4.0 * g(s0 + 0.5 * h) + g(s0 + h));
                }
                jump_logy_ = logy;
                jump_cdf_ = cdf;
                double r1 = levy_density(m, y_hi), r0 = levy_density(m, 0.5 * y_hi);
                if (r1 > 0.0 && r0 > 0.0) {
                    beyond_kappa_ = -1.0 - std::log(r1 / r0) / std::log(2.0);
                    if (beyond_kappa_ <= 0.0) throw UnsupportedError("Levy tail mass is infinite");
                    beyond_mass_ = r1 * y_hi / beyond_kappa_;
                }
                beyond_y_ = y_hi;
                lambda_ = cdf->back() + beyond_mass_;
            }
        }
    }
}

SubordinatorSpec SubordinatorSpec::automatic(const BernsteinFunction& psi, double cutoff)
{
    if (psi.closed_form()) {
        const ClosedForm& cf = *psi.closed_form();
        if (std::holds_alternative<closed::Stable>(cf)) return {psi, strategy::StableExact{}};
        if (std::holds_alternative<closed::Relativistic>(cf)) return {psi, strategy::RelativisticExact{}};
        if (std::holds_alternative<closed::Linear>(cf)) return {psi, strategy::DriftOnly{}};
        if (const auto* e = std::get_if<closed::OneMinusExp>(&cf))
            return {psi, strategy::CompoundPoissonPlusDrift{e->a > 0.0 ? std::min(cutoff, e->a) : cutoff}};
        throw UnsupportedError("no sampler for " + psi.name() + " (sampling this family is out of scope)");
    }
    double a, s;
    if (is_pure_stable(psi, a, s)) return {psi, strategy::StableExact{}};
    if (!psi.measure()) return {psi, strategy::DriftOnly{}};
    return {psi, strategy::CompoundPoissonPlusDrift{cutoff}};
}

std::string SubordinatorSpec::name() const
{
    if (std::holds_alternative<strategy::StableExact>(strat_)) return "stable_exact";
    if (std::holds_alternative<strategy::RelativisticExact>(strat_)) return "relativistic_exact";
    if (std::holds_alternative<strategy::DriftOnly>(strat_)) return "drift_only";
    return "compound_poisson";
}

double SubordinatorSpec::sample_jump(Rng& rng) const
{
    const LevyMeasure& m = *psi_.measure();
    if (std::holds_alternative<StableDensity>(m)) return cutoff_ * std::pow(rng.uniform_pos(), -1.0 / alpha_);
    if (const auto* c = std::get_if<CompoundExp>(&m)) return c->a;
    double v = rng.uniform() * lambda_;
    const auto& cdf = *jump_cdf_;
    const auto& ly = *jump_logy_;
    if (v >= cdf.back()) return beyond_y_ * std::pow(rng.uniform_pos(), -1.0 / beyond_kappa_);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), v);
    size_t k = std::clamp<size_t>(static_cast<size_t>(it - cdf.begin()), 1, cdf.size() - 1);
    double w = (v - cdf[k - 1]) / std::max(cdf[k] - cdf[k - 1], 1e-300);
    return std::exp(ly[k - 1] + w * (ly[k] - ly[k - 1]));
}

double SubordinatorSpec::sample_increment(double dt, Rng& rng) const
{
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment needs dt > 0");
    switch (strat_.index()) {
    case 0: {  // stable, Kanter
        double U = std::numbers::pi * rng.uniform_pos();
        double E = rng.exponential();
        double a = alpha_;
        double S = std::sin(a * U) / std::pow(std::sin(U), 1.0 / a) *
                   std::pow(std::sin((1.0 - a) * U) / E, (1.0 - a) / a);
        return std::pow(scale_ * dt, 1.0 / a) * S;
    }
    case 1: {
        double z = rng.normal();
        if (mass_ == 0.0) return dt * dt / (z * z);
        // inverse Gaussian with mean dt/m and shape dt^2
        double mu = dt / mass_, lam = dt * dt;
        double r = mu * z * z / (2.0 * lam);
        double x = mu / (1.0 + r + std::sqrt(r * r + 2.0 * r));
        return rng.uniform() <= mu / (mu + x) ? x : mu * mu / x;
    }
    case 2:
        return drift_ * dt;
    default: {
        double v = drift_ * dt;
        std::uint64_t k = rng.poisson(lambda_ * dt);
        for (std::uint64_t i = 0; i < k; ++i) v += sample_jump(rng);
        return v;
    }
    }
}

std::vector<double> uniform_times(double t, int n)
{
    std::vector<double> ts(n + 1);
    for (int j = 0; j <= n; ++j) ts[j] = t * j / n;
    ts[n] = t;
    return ts;
}

SubordinatorPath sample_path(const SubordinatorSpec& spec, const std::vector<double>& times, Rng& rng)
{
    if (times.empty() || times[0] != 0.0) throw std::invalid_argument("sample_path needs times[0] = 0");
    SubordinatorPath p;
    p.times = times;
    p.values.assign(times.size(), 0.0);
    for (size_t k = 1; k < times.size(); ++k) {
        double dt = times[k] - times[k - 1];
        if (dt < 0.0) throw std::invalid_argument("sample_path needs ascending times");
        p.values[k] = p.values[k - 1] + (dt > 0.0 ? spec.sample_increment(dt, rng) : 0.0);
    }
    return p;
}

LaplaceReport laplace_check(const SubordinatorSpec& spec, double u, double t, std::uint64_t n,
                            std::uint64_t seed)
{
    LaplaceReport r;
    r.u = u;
    r.t = t;
    r.n = n;
    r.analytic = std::exp(-t * spec.psi()(u));
    Rng rng(seed, 0);
    RunningStats st;
    for (std::uint64_t i = 0; i < n; ++i) {
        double T = spec.sample_increment(t, rng);
        st.add(u == 0.0 ? 1.0 : std::exp(-u * T));
    }
    r.mc_mean = st.mean;
    r.std_error = st.std_error();
    double diff = r.mc_mean - r.analytic;
    if (r.std_error > 0.0) r.z_score = diff / r.std_error;
    else r.z_score = (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    return r;
}

}  // namespace subfk
