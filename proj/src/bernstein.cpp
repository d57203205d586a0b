/*
 * Bernstein functions: closed forms, triplet quadrature, linear bounds and
 * finite-difference complete-monotonicity checks.
 */
#include "subfk/bernstein.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace subfk {

namespace {

constexpr double kQuadRelTol = 1e-8;

// Power-law continuation rho(y) ~ A y^{-1-kappa} beyond a cutoff.
struct PowerTail {
    double A = 0.0;
    double kappa = 0.0;
};

struct DensityModel {
    std::function<double(double)> rho;
    double y_min, y_max;
    PowerTail low, high;
    bool exact_tails;  // the continuation is the density itself
};

PowerTail fit_tail(const std::function<double(double)>& rho, double y_near, double y_far)
{
    double r0 = rho(y_near);
    double r1 = rho(y_far);
    PowerTail t;
    if (!(r0 > 0.0) || !(r1 > 0.0)) return t;
    double slope = std::log(r1 / r0) / std::log(y_far / y_near);
    t.kappa = -1.0 - slope;
    t.A = r0 * std::pow(y_near, 1.0 + t.kappa);
    return t;
}

DensityModel density_model(const LevyMeasure& m)
{
    if (const auto* s = std::get_if<StableDensity>(&m)) {
        double c = s->scale * s->alpha / std::tgamma(1.0 - s->alpha);
        double a = s->alpha;
        DensityModel dm;
        dm.rho = [c, a](double y) { return c * std::pow(y, -1.0 - a); };
        dm.y_min = 1e-12;
        dm.y_max = 1e4;
        dm.low = {c, a};
        dm.high = {c, a};
        dm.exact_tails = true;
        return dm;
    }
    const auto& nd = std::get<NumericDensity>(m);
    DensityModel dm;
    dm.rho = nd.density;
    dm.y_min = nd.y_min;
    dm.y_max = nd.y_max;
    dm.low = fit_tail(nd.density, nd.y_min, 2.0 * nd.y_min);
    dm.high = fit_tail(nd.density, nd.y_max, 0.5 * nd.y_max);
    dm.exact_tails = false;
    if (dm.low.A > 0.0 && dm.low.kappa >= 1.0)
        throw QuadratureError("Levy density not integrable against (y ^ 1) near 0: fitted exponent " +
                              std::to_string(-1.0 - dm.low.kappa));
    if (dm.high.A > 0.0 && dm.high.kappa <= 0.0)
        throw QuadratureError("Levy density has infinite mass at infinity: fitted exponent " +
                              std::to_string(-1.0 - dm.high.kappa));
    return dm;
}

double extended_rho(const DensityModel& dm, double y)
{
    if (y < dm.y_min) return dm.low.A * std::pow(y, -1.0 - dm.low.kappa);
    if (y > dm.y_max) return dm.high.A * std::pow(y, -1.0 - dm.high.kappa);
    return dm.rho(y);
}

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// int_lo^hi h(y) dy in the variable s = log y, split at y = 1.
QuadResult integrate_log(const std::function<double(double)>& h, double lo, double hi)
{
    using boost::math::quadrature::gauss_kronrod;
    QuadResult r;
    if (!(hi > lo)) return r;
    auto g = [&h](double s) {
        double y = std::exp(s);
        return h(y) * y;
    };
    std::vector<std::pair<double, double>> pieces;
    double a = std::log(lo), b = std::log(hi);
    if (a < 0.0 && b > 0.0) {
        pieces = {{a, 0.0}, {0.0, b}};
    } else {
        pieces = {{a, b}};
    }
    for (auto [p, q] : pieces) {
        double err = 0.0;
        double v = gauss_kronrod<double, 61>::integrate(g, p, q, 20, 1e-11, &err);
        r.value += v;
        r.error += err;
    }
    return r;
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace

NumericDensity numeric_density_from_table(std::vector<double> y, std::vector<double> rho)
{
    if (y.size() < 2 || y.size() != rho.size())
        throw ConfigError("numeric density table needs >= 2 rows of (y, density)");
    std::vector<double> ly(y.size()), lr(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !(rho[i] > 0.0))
            throw ConfigError("numeric density table needs positive y and density values");
        if (i > 0 && !(y[i] > y[i - 1])) throw ConfigError("numeric density table y not increasing");
        ly[i] = std::log(y[i]);
        lr[i] = std::log(rho[i]);
    }
    NumericDensity nd;
    nd.y_min = y.front();
    nd.y_max = y.back();
    nd.label = "table";
    nd.density = [ly, lr](double yy) {
        double s = std::log(yy);
        auto it = std::upper_bound(ly.begin(), ly.end(), s);
        size_t k = std::clamp<size_t>(static_cast<size_t>(it - ly.begin()), 1, ly.size() - 1);
        double w = (s - ly[k - 1]) / (ly[k] - ly[k - 1]);
        return std::exp(lr[k - 1] + w * (lr[k] - lr[k - 1]));
    };
    return nd;
}

NumericDensity numeric_density_from_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open density table " + path);
    std::vector<double> y, rho;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) continue;  // header row
        y.push_back(a);
        rho.push_back(b);
    }
    return numeric_density_from_table(std::move(y), std::move(rho));
}

double levy_density(const LevyMeasure& m, double y)
{
    if (std::holds_alternative<CompoundExp>(m))
        throw UnsupportedError("point-mass Levy measure has no density");
    return extended_rho(density_model(m), y);
}

double tail_mass(const LevyMeasure& m, double y0)
{
    if (const auto* c = std::get_if<CompoundExp>(&m)) return c->a >= y0 ? 1.0 : 0.0;
    if (const auto* s = std::get_if<StableDensity>(&m))
        return s->scale / std::tgamma(1.0 - s->alpha) * std::pow(y0, -s->alpha);
    DensityModel dm = density_model(m);
    double hi = std::max(dm.y_max, y0);
    QuadResult q = integrate_log([&dm](double y) { return extended_rho(dm, y); }, y0, hi);
    double tail = dm.high.A > 0.0 ? dm.high.A * std::pow(hi, -dm.high.kappa) / dm.high.kappa : 0.0;
    return q.value + tail;
}

double small_jump_mean(const LevyMeasure& m, double y0)
{
    if (const auto* c = std::get_if<CompoundExp>(&m)) return c->a < y0 ? c->a : 0.0;
    if (const auto* s = std::get_if<StableDensity>(&m))
        return s->scale * s->alpha / std::tgamma(1.0 - s->alpha) * std::pow(y0, 1.0 - s->alpha) /
               (1.0 - s->alpha);
    DensityModel dm = density_model(m);
    double lo = std::min(dm.y_min, y0);
    QuadResult q = integrate_log([&dm](double y) { return y * extended_rho(dm, y); }, lo, y0);
    double tail = dm.low.A * std::pow(lo, 1.0 - dm.low.kappa) / (1.0 - dm.low.kappa);
    return q.value + tail;
}

LaplaceIntegral laplace_integral(const LevyMeasure& m, double u)
{
    LaplaceIntegral out;
    if (u == 0.0) return out;
    if (const auto* c = std::get_if<CompoundExp>(&m)) {
        out.value = -std::expm1(-u * c->a);
        return out;
    }
    DensityModel dm = density_model(m);
    double lo = std::min(dm.y_min, 1e-2 / u);
    double hi = std::max(dm.y_max, 50.0 / u);
    QuadResult q = integrate_log(
        [&dm, u](double y) { return -std::expm1(-u * y) * extended_rho(dm, y); }, lo, hi);

    // Below lo: (1 - e^{-uy}) expanded in uy <= 1e-2.
    double small = 0.0;
    if (dm.low.A > 0.0) {
        double k = dm.low.kappa, term = 1.0;
        for (int n = 1; n <= 6; ++n) {
            term *= u / n;
            double piece = term * std::pow(lo, n - k) / (n - k);
            small += (n % 2 == 1 ? piece : -piece);
        }
        small *= dm.low.A;
    }
    // Above hi: e^{-uy} <= e^{-50}, so only the mass remains.
    double large = dm.high.A > 0.0 ? dm.high.A * std::pow(hi, -dm.high.kappa) / dm.high.kappa : 0.0;

    out.small_tail = small;
    out.large_tail = large;
    out.value = q.value + small + large;
    out.abs_error = q.error;
    if (!std::isfinite(out.value) || q.error > kQuadRelTol * std::max(1e-300, std::abs(out.value))) {
        throw QuadratureError("Levy quadrature did not converge at u=" + fmt(u) +
                              ": body=" + fmt(q.value) + " err=" + fmt(q.error) +
                              " small_tail=" + fmt(small) + " large_tail=" + fmt(large));
    }
    if (!dm.exact_tails) {
        double total = std::max(std::abs(out.value), 1e-300);
        if (large > 1e-6 * total)
            out.warnings.push_back("extrapolated tail above y_max contributes " + fmt(large / total) +
                                   " of the integral");
        if (small > 1e-6 * total)
            out.warnings.push_back("extrapolated tail below y_min contributes " + fmt(small / total) +
                                   " of the integral");
    }
    return out;
}

BernsteinFunction::BernsteinFunction(double drift, std::optional<LevyMeasure> measure)
    : drift_(drift), measure_(std::move(measure))
{
    if (drift < 0.0) throw ConfigError("drift b must be nonnegative");
    if (measure_) {
        if (const auto* s = std::get_if<StableDensity>(&*measure_)) {
            if (!(s->alpha > 0.0 && s->alpha < 1.0)) throw ConfigError("stable alpha must lie in (0,1)");
            if (s->scale < 0.0) throw ConfigError("stable scale must be nonnegative");
        }
        if (const auto* c = std::get_if<CompoundExp>(&*measure_))
            if (c->a < 0.0) throw ConfigError("point mass location must be nonnegative");
    }
}

BernsteinFunction BernsteinFunction::stable(double alpha)
{
    BernsteinFunction f(0.0, StableDensity{alpha, 1.0});
    f.closed_ = closed::Stable{alpha};
    return f;
}

BernsteinFunction BernsteinFunction::relativistic(double m)
{
    if (m < 0.0) throw ConfigError("relativistic mass must be nonnegative");
    NumericDensity nd;
    nd.density = [m](double y) {
        return std::pow(y, -1.5) * std::exp(-0.5 * m * m * y) / std::sqrt(2.0 * std::numbers::pi);
    };
    nd.label = "relativistic";
    if (m > 0.0) nd.y_max = std::max(1e4, 80.0 / (m * m));
    BernsteinFunction f(0.0, nd);
    f.closed_ = closed::Relativistic{m};
    return f;
}

BernsteinFunction BernsteinFunction::one_minus_exp(double a)
{
    BernsteinFunction f(0.0, CompoundExp{a});
    f.closed_ = closed::OneMinusExp{a};
    return f;
}

BernsteinFunction BernsteinFunction::hyperbolic_k1(double a, double b)
{
    if (!(a > 0.0 && b > 0.0)) throw ConfigError("hyperbolic_k1 needs a > 0 and b > 0");
    BernsteinFunction f(0.0, std::nullopt);
    f.closed_ = closed::HyperbolicK1{a, b};
    f.has_triplet_ = false;
    return f;
}

BernsteinFunction BernsteinFunction::linear(double b)
{
    BernsteinFunction f(b, std::nullopt);
    f.closed_ = closed::Linear{b};
    return f;
}

BernsteinFunction BernsteinFunction::from_closed_form(const ClosedForm& cf)
{
    return std::visit(
        [](const auto& c) -> BernsteinFunction {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, closed::Stable>) return stable(c.alpha);
            else if constexpr (std::is_same_v<T, closed::Relativistic>) return relativistic(c.m);
            else if constexpr (std::is_same_v<T, closed::OneMinusExp>) return one_minus_exp(c.a);
            else if constexpr (std::is_same_v<T, closed::HyperbolicK1>) return hyperbolic_k1(c.a, c.b);
            else return linear(c.b);
        },
        cf);
}

namespace {

double log_k1(double z)
{
    if (z < 600.0) return std::log(std::cyl_bessel_k(1.0, z));
    double iz = 1.0 / (8.0 * z);
    return -z + 0.5 * std::log(std::numbers::pi / (2.0 * z)) +
           std::log1p(3.0 * iz - 7.5 * iz * iz + 52.5 * iz * iz * iz);
}

double eval_closed(const ClosedForm& cf, double u)
{
    return std::visit(
        [u](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, closed::Stable>) {
                return std::pow(u, c.alpha);
            } else if constexpr (std::is_same_v<T, closed::Relativistic>) {
                // sqrt(2u+m^2) - m without cancellation
                return 2.0 * u / (std::sqrt(2.0 * u + c.m * c.m) + c.m);
            } else if constexpr (std::is_same_v<T, closed::OneMinusExp>) {
                return -std::expm1(-c.a * u);
            } else if constexpr (std::is_same_v<T, closed::HyperbolicK1>) {
                double z = std::sqrt(c.a * c.a + c.b * c.b * u);
                double v = std::log(z / c.a) + log_k1(c.a) - log_k1(z);
                return std::max(v, 0.0);
            } else {
                return c.b * u;
            }
        },
        cf);
}

}  // namespace

double BernsteinFunction::eval(double u) const
{
    if (u < 0.0 || std::isnan(u)) throw std::invalid_argument("eval_psi needs u >= 0");
    if (u == 0.0) return 0.0;
    if (closed_) return eval_closed(*closed_, u);
    return eval_triplet(u);
}

LaplaceIntegral BernsteinFunction::eval_triplet_detailed(double u) const
{
    if (!has_triplet_) throw UnsupportedError("no Levy triplet for " + name());
    if (u < 0.0 || std::isnan(u)) throw std::invalid_argument("eval_psi needs u >= 0");
    LaplaceIntegral li;
    if (measure_) li = laplace_integral(*measure_, u);
    li.value += drift_ * u;
    return li;
}

double BernsteinFunction::eval_triplet(double u) const
{
    if (u == 0.0) return 0.0;
    return eval_triplet_detailed(u).value;
}

BernsteinFunction BernsteinFunction::triplet_only() const
{
    if (!has_triplet_) throw UnsupportedError("no Levy triplet for " + name());
    return BernsteinFunction(drift_, measure_);
}

std::string BernsteinFunction::name() const
{
    if (closed_) {
        return std::visit(
            [](const auto& c) -> std::string {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, closed::Stable>) return "stable(alpha=" + fmt(c.alpha) + ")";
                else if constexpr (std::is_same_v<T, closed::Relativistic>) return "relativistic(m=" + fmt(c.m) + ")";
                else if constexpr (std::is_same_v<T, closed::OneMinusExp>) return "one_minus_exp(a=" + fmt(c.a) + ")";
                else if constexpr (std::is_same_v<T, closed::HyperbolicK1>)
                    return "hyperbolic_k1(a=" + fmt(c.a) + ",b=" + fmt(c.b) + ")";
                else return "linear(b=" + fmt(c.b) + ")";
            },
            *closed_);
    }
    std::string m = "none";
    if (measure_) {
        if (std::holds_alternative<StableDensity>(*measure_)) m = "stable_density";
        else if (std::holds_alternative<CompoundExp>(*measure_)) m = "point_mass";
        else m = std::get<NumericDensity>(*measure_).label;
    }
    return "triplet(b=" + fmt(drift_) + "," + m + ")";
}

LinearBound linear_bound_constants(const BernsteinFunction& psi)
{
    if (!psi.has_triplet()) throw UnsupportedError("linear_bound_constants needs a triplet: " + psi.name());
    LinearBound lb{psi.drift(), 0.0};
    if (psi.measure()) {
        lb.c1 += small_jump_mean(*psi.measure(), 1.0);
        lb.c2 += tail_mass(*psi.measure(), 1.0);
    }
    return lb;
}

std::optional<MonotonicityCheck> MonotonicityReport::first_violation() const
{
    for (const auto& c : checks)
        if (c.violations > 0) return c;
    return std::nullopt;
}

MonotonicityReport check_complete_monotonicity(const std::function<double(double)>& psi,
                                               const std::vector<double>& grid,
                                               const std::vector<double>& t_list, int max_order,
                                               double eval_rel_error)
{
    if (max_order < 1 || max_order > 4) throw std::invalid_argument("max_order must be in 1..4");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw std::invalid_argument("grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("grid must be strictly increasing");
    }
    const size_t n = grid.size();
    std::vector<double> pv(n);
    for (size_t i = 0; i < n; ++i) pv[i] = psi(grid[i]);

    MonotonicityReport rep;
    // sign = +1: require (-1)^k D^k <= 0 (Psi); sign = -1: require >= 0 (g_t).
    auto run = [&](const std::string& target, double t, const std::vector<double>& f,
                   const std::vector<double>& rel, double sign, int k_lo) {
        for (int k = k_lo; k <= max_order; ++k) {
            MonotonicityCheck c;
            c.target = target;
            c.t = t;
            c.order = k;
            c.worst_margin = -INFINITY;
            for (size_t s = 0; s + k < n; ++s) {
                double dd = 0.0, tol = 0.0;
                for (int i = 0; i <= k; ++i) {
                    double den = 1.0;
                    for (int j = 0; j <= k; ++j)
                        if (j != i) den *= grid[s + i] - grid[s + j];
                    dd += f[s + i] / den;
                    tol += 8.0 * rel[s + i] * std::abs(f[s + i]) / std::abs(den);
                }
                double signed_v = (k % 2 == 0 ? dd : -dd) * sign;
                double margin = signed_v - tol;
                c.worst_margin = std::max(c.worst_margin, margin);
                ++c.windows;
                if (margin > 0.0) ++c.violations;
            }
            if (c.violations > 0) rep.pass = false;
            rep.checks.push_back(c);
        }
    };

    std::vector<double> rel(n, eval_rel_error + 1e-16);
    // order 0 for Psi: Psi >= 0, i.e. -Psi <= 0
    {
        MonotonicityCheck c;
        c.target = "psi";
        c.order = 0;
        c.worst_margin = -INFINITY;
        for (size_t i = 0; i < n; ++i) {
            double margin = -pv[i] - rel[i] * std::abs(pv[i]);
            c.worst_margin = std::max(c.worst_margin, margin);
            ++c.windows;
            if (margin > 0.0) ++c.violations;
        }
        if (c.violations > 0) rep.pass = false;
        rep.checks.push_back(c);
    }
    run("psi", 0.0, pv, rel, 1.0, 1);
    for (double t : t_list) {
        std::vector<double> g(n), grel(n);
        for (size_t i = 0; i < n; ++i) {
            g[i] = std::exp(-t * pv[i]);
            grel[i] = eval_rel_error * (1.0 + t * std::abs(pv[i])) + 1e-16;
        }
        run("g_t", t, g, grel, -1.0, 0);
    }
    return rep;
}

MonotonicityReport check_complete_monotonicity(const BernsteinFunction& psi,
                                               const std::vector<double>& grid,
                                               const std::vector<double>& t_list, int max_order)
{
    double rel = 1e-14;
    if (!psi.closed_form()) rel = 1e-8;
    else if (std::holds_alternative<closed::HyperbolicK1>(*psi.closed_form())) rel = 1e-12;
    return check_complete_monotonicity([&psi](double u) { return psi(u); }, grid, t_list, max_order,
                                       rel);
}

}  // namespace subfk
