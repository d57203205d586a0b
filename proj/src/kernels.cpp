#include "subfk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

// pchip.hpp in Boost 1.74 calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace subfk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr size_t kMaxNodes = 4'000'000;

double sphere_area(int d)
{
    // |S^{d-1}|
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

void check_dim(int d)
{
    if (d < 1 || d > 3) throw std::invalid_argument("d must be 1, 2 or 3");
}

RadialMethod resolve(RadialMethod m, int d)
{
    if (m == RadialMethod::Auto) return d == 1 ? RadialMethod::CosineTransform1D
                                        : d == 3 ? RadialMethod::SinFormula3D
                                                 : RadialMethod::HankelRadial;
    if (m == RadialMethod::CosineTransform1D && d != 1) throw std::invalid_argument("cosine transform needs d = 1");
    if (m == RadialMethod::SinFormula3D && d != 3) throw std::invalid_argument("sin formula needs d = 3");
    return m;
}

struct Rule {
    std::vector<double> x, w;  // on [-1, 1]
};

template <unsigned N>
Rule rule_from_boost()
{
    using G = boost::math::quadrature::gauss<double, N>;
    Rule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (size_t i = 0; i < a.size(); ++i) {
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
        if (a[i] != 0.0) {
            r.x.push_back(-a[i]);
            r.w.push_back(w[i]);
        }
    }
    return r;
}

const Rule& gl_rule(int n)
{
    static const Rule r10 = rule_from_boost<10>();
    static const Rule r20 = rule_from_boost<20>();
    static const Rule r30 = rule_from_boost<30>();
    switch (n) {
    case 10: return r10;
    case 20: return r20;
    case 30: return r30;
    default: throw std::invalid_argument("n_nodes must be 10, 20 or 30");
    }
}

// Radial transform (2 pi)^{-d} int e^{-i x.xi} m(|xi|) dxi on a fixed frequency
// grid [0, K], resolved for radii up to r_max.
class RadialTransform {
public:
    RadialTransform(const std::function<double(double)>& m, int d, RadialMethod method, double K, double r_max,
                    int n_nodes)
        : d_(d), method_(resolve(method, d))
    {
        const double width = std::min(K / 64.0, kPi / std::max(r_max, 1e-12));
        const auto panels = static_cast<size_t>(std::ceil(K / width));
        const Rule& rule = gl_rule(n_nodes);
        if (panels * rule.x.size() > kMaxNodes) {
            std::ostringstream os;
            os << "frequency grid too large: K=" << K << " r_max=" << r_max << " needs " << panels << " panels";
            throw QuadratureError(os.str());
        }
        const double h = K / static_cast<double>(panels);
        k_.reserve(panels * rule.x.size());
        for (size_t p = 0; p < panels; ++p) {
            const double a = h * static_cast<double>(p);
            for (size_t i = 0; i < rule.x.size(); ++i) {
                double k = a + 0.5 * h * (rule.x[i] + 1.0);
                k_.push_back(k);
                wm_.push_back(0.5 * h * rule.w[i] * m(k));
            }
        }
    }

    double operator()(double r) const
    {
        double s = 0.0;
        const size_t n = k_.size();
        switch (method_) {
        case RadialMethod::CosineTransform1D:
            for (size_t i = 0; i < n; ++i) s += wm_[i] * std::cos(k_[i] * r);
            return s / kPi;
        case RadialMethod::SinFormula3D:
            if (r == 0.0) {
                for (size_t i = 0; i < n; ++i) s += wm_[i] * k_[i] * k_[i];
                return s / (2.0 * kPi * kPi);
            }
            for (size_t i = 0; i < n; ++i) s += wm_[i] * k_[i] * std::sin(k_[i] * r);
            return s / (2.0 * kPi * kPi * r);
        default: {
            const double nu = 0.5 * d_ - 1.0;
            const double norm = std::pow(2.0 * kPi, -0.5 * d_);
            if (r == 0.0) {
                for (size_t i = 0; i < n; ++i) s += wm_[i] * std::pow(k_[i], d_ - 1);
                return norm * std::pow(2.0, -nu) / std::tgamma(0.5 * d_) * s;
            }
            for (size_t i = 0; i < n; ++i)
                s += wm_[i] * std::pow(k_[i], 0.5 * d_) * boost::math::cyl_bessel_j(nu, k_[i] * r);
            return norm * std::pow(r, 1.0 - 0.5 * d_) * s;
        }
        }
    }

private:
    int d_;
    RadialMethod method_;
    std::vector<double> k_, wm_;
};

struct Cutoff {
    double K = 0.0;
    double tail = 0.0;  // normalized bound on the discarded frequency integral
};

// Smallest K past the envelope peak where k^{d-1} e^{-t Psi} drops below tol
// times its peak.
Cutoff choose_cutoff(const BernsteinFunction& psi, double t, int d, double tol)
{
    auto env = [&](double k) { return std::pow(k, d - 1) * std::exp(-t * psi(0.5 * k * k)); };
    double peak = d == 1 ? 1.0 : 0.0;
    double k = 1e-6, argmax = 0.0;
    for (;; k *= 1.05) {
        if (k > 1e8) {
            std::ostringstream os;
            os << "e^{-t Psi(k^2/2)} with t=" << t << " for " << psi.name()
               << " has not decayed by k=1e8; the heat kernel is not a bounded function";
            throw AssumptionError(os.str());
        }
        double e = env(k);
        if (e > peak) {
            peak = e;
            argmax = k;
        }
        if (k > 2.0 * argmax && k > 1e-2 && e < tol * peak) break;
    }
    Cutoff c;
    c.K = k;
    boost::math::quadrature::exp_sinh<double> q;
    double tail = 0.0;
    try {
        tail = q.integrate(env, k, kInf, 1e-8);
    } catch (const std::exception&) {
        tail = kInf;
    }
    c.tail = sphere_area(d) * std::pow(2.0 * kPi, -d) * tail;
    return c;
}

void require_finite(const BernsteinFunction& psi, double t, int d)
{
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
    auto a = assumption_a_check(psi, t, d);
    if (!a.finite) throw AssumptionError("e^{-t Psi(|xi|^2/2)} is not integrable: " + a.diagnostic);
}

double power_tail(double r1, double v1, double r2, double v2, double r)
{
    // A r^{-q} through (r1, v1), (r2, v2) with r1 < r2 <= r
    if (!(v1 > 0.0 && v2 > 0.0 && v2 < v1)) return 0.0;
    double q = std::log(v1 / v2) / std::log(r2 / r1);
    return v2 * std::pow(r / r2, -q);
}

void build_interp(KernelTable& tab)
{
    std::vector<double> lx, y;
    for (size_t i = 0; i < tab.radii.size(); ++i)
        if (tab.radii[i] > 0.0) {
            lx.push_back(std::log(tab.radii[i]));
            y.push_back(tab.values[i]);
        }
    if (lx.size() < 4) {
        tab.interp_.reset();
        return;
    }
    auto p = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(lx), std::move(y));
    tab.interp_ = std::make_shared<const std::function<double(double)>>([p](double lr) { return (*p)(lr); });
}

}  // namespace

std::vector<double> radial_grid(double r_min, double r_max, int n)
{
    if (!(r_min > 0.0 && r_max > r_min && n >= 2)) throw std::invalid_argument("radial_grid needs 0 < r_min < r_max");
    std::vector<double> r{0.0};
    for (int i = 0; i < n; ++i) r.push_back(r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n - 1)));
    return r;
}

double KernelTable::eval(double r) const
{
    r = std::abs(r);
    const bool has_zero = !radii.empty() && radii.front() == 0.0;
    const size_t first = has_zero ? 1 : 0;
    if (radii.size() < first + 4 || !interp_) throw std::logic_error("kernel table needs 4 positive radii");
    const double r1 = radii[first];
    const double rn = radii.back();
    if (r > rn) return power_tail(radii[radii.size() - 2], values[values.size() - 2], rn, values.back(), r);
    if (r < r1) {
        if (has_zero) {
            double p0 = values[0], p1 = values[first];
            return p0 + (p1 - p0) * (r * r) / (r1 * r1);
        }
        // singular at 0: power law through the first two radii
        double r2 = radii[first + 1], v1 = values[first], v2 = values[first + 1];
        if (v1 > 0.0 && v2 > 0.0) return v1 * std::pow(r / r1, std::log(v2 / v1) / std::log(r2 / r1));
        return v1;
    }
    return (*interp_)(std::log(r));
}

double KernelTable::mass() const
{
    const bool has_zero = !radii.empty() && radii.front() == 0.0;
    if (!has_zero || radii.size() < 3) throw std::logic_error("mass needs a table starting at r = 0");
    const double S = sphere_area(d);
    const double r1 = radii[1];
    // quadratic model on [0, r1]
    double m = S * (values[0] * std::pow(r1, d) / d + (values[1] - values[0]) * std::pow(r1, d) / (d + 2));
    // trapezoid in log r on the rest
    for (size_t i = 1; i + 1 < radii.size(); ++i) {
        double a = std::pow(radii[i], d) * values[i];
        double b = std::pow(radii[i + 1], d) * values[i + 1];
        m += S * 0.5 * (a + b) * std::log(radii[i + 1] / radii[i]);
    }
    const size_t n = radii.size();
    double v1 = values[n - 2], v2 = values[n - 1];
    if (v1 > 0.0 && v2 > 0.0 && v2 < v1) {
        double q = std::log(v1 / v2) / std::log(radii[n - 1] / radii[n - 2]);
        if (q <= d) return kInf;
        m += S * v2 * std::pow(radii[n - 1], d) / (q - d);
    }
    return m;
}

KernelTable heat_kernel(const BernsteinFunction& psi, double t, const std::vector<double>& radii, int d,
                        const QuadratureSpec& quad)
{
    check_dim(d);
    if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()) || radii.front() < 0.0)
        throw std::invalid_argument("radii must be ascending and nonnegative");
    require_finite(psi, t, d);
    Cutoff c = choose_cutoff(psi, t, d, quad.tail_tolerance);
    if (quad.max_frequency > 0.0) c.K = quad.max_frequency;
    RadialTransform tr([&](double k) { return std::exp(-t * psi(0.5 * k * k)); }, d, quad.method, c.K,
                       std::max(radii.back(), 1.0), quad.n_nodes);
    KernelTable tab;
    tab.radii = radii;
    tab.parameter = t;
    tab.d = d;
    tab.psi_name = psi.name();
    tab.max_frequency = c.K;
    tab.tail_bound = c.tail;
    tab.values.reserve(radii.size());
    for (double r : radii) tab.values.push_back(tr(r));
    build_interp(tab);
    return tab;
}

double heat_kernel_value(const BernsteinFunction& psi, double t, double r, int d, const QuadratureSpec& quad)
{
    auto tab = heat_kernel(psi, t, {std::abs(r)}, d, quad);
    return tab.values[0];
}

std::vector<SemigroupCheck> kernel_semigroup_check(const BernsteinFunction& psi, double s, double t,
                                                   const std::vector<double>& xs)
{
    double R = 400.0;
    double x_max = 0.0;
    for (double x : xs) x_max = std::max(x_max, std::abs(x));
    struct Kernel {
        RadialTransform tr;
        double v_half, v_end;
        double operator()(double r, double R) const
        {
            r = std::abs(r);
            return r <= R ? tr(r) : power_tail(0.5 * R, v_half, R, v_end, r);
        }
    };
    auto make = [&](double tau, double rmax) {
        require_finite(psi, tau, 1);
        Cutoff c = choose_cutoff(psi, tau, 1, 1e-14);
        RadialTransform tr([&](double k) { return std::exp(-tau * psi(0.5 * k * k)); }, 1, RadialMethod::Auto, c.K,
                           rmax, 10);
        double vh = tr(0.5 * rmax), ve = tr(rmax);
        return Kernel{std::move(tr), vh, ve};
    };
    // Exponentially decaying kernels reach quadrature noise long before
    // r = 400; cut the range there and drop the tails.
    bool tails = true;
    {
        Kernel probe = make(std::min(s, t), R);
        const double peak = probe(0.0, R);
        for (double r = 8.0; r < R; r *= 2.0)
            if (std::abs(probe(r, R)) < 1e-15 * peak) {
                R = r;
                tails = false;
                break;
            }
    }
    const double Rs = R + x_max;
    Kernel ps = make(s, Rs), pt = make(t, R), pst = make(s + t, std::max(x_max, 1.0));

    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    boost::math::quadrature::exp_sinh<double> es;
    std::vector<SemigroupCheck> out;
    for (double x : xs) {
        auto f = [&](double y) { return ps(x - y, Rs) * pt(y, R); };
        std::vector<double> cuts{-R, R, x};
        for (double c : {-100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0})
            if (std::abs(c) < R) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
        double conv = 0.0;
        for (size_t i = 0; i + 1 < cuts.size(); ++i)
            if (cuts[i + 1] > cuts[i]) conv += GK::integrate(f, cuts[i], cuts[i + 1], 8, 1e-12);
        if (tails) {
            conv += es.integrate([&](double u) { return f(R + u); }, 0.0, kInf, 1e-10);
            conv += es.integrate([&](double u) { return f(-R - u); }, 0.0, kInf, 1e-10);
        }
        SemigroupCheck c;
        c.x = x;
        c.convolution = conv;
        c.direct = pst(x, std::max(x_max, 1.0));
        c.abs_error = std::abs(conv - c.direct);
        out.push_back(c);
    }
    return out;
}

namespace {

// Wynn epsilon algorithm on partial sums; returns the last even-column entry.
double wynn_epsilon(const std::vector<double>& s)
{
    const size_t n = s.size();
    if (n < 3) return s.back();
    // eps_{-1} = 0, eps_0 = s
    double best = s.back();
    std::vector<double> em1(n, 0.0);
    std::vector<double> e0 = s;
    for (size_t k = 1; k < n; ++k) {
        std::vector<double> e1(n - k);
        for (size_t j = 0; j + k < n; ++j) {
            double diff = e0[j + 1] - e0[j];
            if (diff == 0.0) return e0[j + 1];
            e1[j] = em1[j + 1] + 1.0 / diff;
        }
        if (k % 2 == 0 && !e1.empty() && std::isfinite(e1.back())) best = e1.back();
        em1 = std::move(e0);
        e0 = std::move(e1);
    }
    return best;
}

double bessel_zero(double nu, int j)
{
    if (nu == -0.5) return (j - 0.5) * kPi;
    if (nu == 0.5) return j * kPi;
    return boost::math::cyl_bessel_j_zero(nu, j);
}

}  // namespace

double resolvent_value(const BernsteinFunction& psi, double lambda, double r, int d, RadialMethod method,
                       ResolventDiagnostics* diag)
{
    check_dim(d);
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("the resolvent kernel is evaluated at r > 0");
    method = resolve(method, d);
    auto m = [&](double k) { return 1.0 / (lambda + psi(0.5 * k * k)); };
    std::function<double(double)> integrand;
    double nu = 0.5 * d - 1.0;
    double norm = 1.0;
    switch (method) {
    case RadialMethod::CosineTransform1D:
        nu = -0.5;
        norm = 1.0 / kPi;
        integrand = [&](double k) { return m(k) * std::cos(k * r); };
        break;
    case RadialMethod::SinFormula3D:
        nu = 0.5;
        norm = 1.0 / (2.0 * kPi * kPi * r);
        integrand = [&](double k) { return k * m(k) * std::sin(k * r); };
        break;
    default:
        norm = std::pow(2.0 * kPi, -0.5 * d) * std::pow(r, 1.0 - 0.5 * d);
        integrand = [&, nu](double k) {
            return std::pow(k, 0.5 * d) * m(k) * boost::math::cyl_bessel_j(nu, k * r);
        };
    }
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    std::vector<double> partial;
    double a = 0.0, sum = 0.0, prev_est = std::numeric_limits<double>::quiet_NaN(), est = 0.0;
    int panels = 0;
    const double tol = 1e-10;
    for (int target = 40; target <= 640; target *= 2) {
        while (panels < target) {
            double b = bessel_zero(nu, panels + 1) / r;
            sum += GK::integrate(integrand, a, b, 12, 1e-13);
            partial.push_back(sum);
            a = b;
            ++panels;
        }
        // drop the first quarter, where the weight may not yet be monotone
        std::vector<double> tail(partial.begin() + static_cast<long>(partial.size() / 4), partial.end());
        est = wynn_epsilon(tail);
        std::vector<double> tail2(tail.begin(), tail.end() - 2);
        prev_est = wynn_epsilon(tail2);
        double change = std::abs(est - prev_est);
        if (diag) *diag = {panels, sum * norm, est * norm, change * std::abs(norm)};
        if (std::isfinite(est) && change <= tol * std::max(std::abs(est), 1e-300) + 1e-15 / std::abs(norm))
            return norm * est;
    }
    std::ostringstream os;
    os << "resolvent panel sums did not converge for " << psi.name() << " lambda=" << lambda << " r=" << r
       << " after " << panels << " panels; partial sums:";
    for (size_t i = partial.size() >= 6 ? partial.size() - 6 : 0; i < partial.size(); ++i) os << ' ' << norm * partial[i];
    os << "; accelerated " << norm * est << " vs " << norm * prev_est;
    throw QuadratureError(os.str());
}

KernelTable resolvent_kernel(const BernsteinFunction& psi, double lambda, const std::vector<double>& radii, int d,
                             RadialMethod method)
{
    if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0.0)
        throw std::invalid_argument("resolvent radii must be ascending and positive");
    KernelTable tab;
    tab.radii = radii;
    tab.parameter = lambda;
    tab.d = d;
    tab.psi_name = psi.name();
    for (double r : radii) tab.values.push_back(resolvent_value(psi, lambda, r, d, method));
    build_interp(tab);
    return tab;
}

double resolvent_by_time_integral(const BernsteinFunction& psi, double lambda, double r, int d)
{
    // p_t(r) = O(t) as t -> 0 for r > 0; [0, t0] is taken as a triangle.
    const double t0 = 1e-4;
    auto p = [&](double t) {
        Cutoff c = choose_cutoff(psi, t, d, 1e-13);
        RadialTransform tr([&](double k) { return std::exp(-t * psi(0.5 * k * k)); }, d, RadialMethod::Auto, c.K,
                           std::max(r, 1.0), 10);
        return tr(r);
    };
    require_finite(psi, t0, d);
    boost::math::quadrature::exp_sinh<double> es;
    double head = 0.5 * t0 * p(t0);
    double body = es.integrate(
        [&](double u) {
            double w = std::exp(-lambda * (t0 + u));
            return w < 1e-300 ? 0.0 : w * p(t0 + u);
        },
        0.0, kInf, 1e-9);
    return head + body;
}

double riesz_c(int d, double beta)
{
    return std::tgamma(0.5 * (d - beta)) /
           (std::pow(2.0, beta) * std::pow(kPi, 0.5 * d) * std::abs(std::tgamma(0.5 * beta)));
}

double RieszAsymptote::kernel(double r) const
{
    const double scale = std::pow(2.0, alpha);
    if (branch == Branch::Log) return scale * constant * std::log(r);
    return scale * constant * std::pow(r, exponent);
}

RieszAsymptote stable_riesz_constant(int d, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("stable index must lie in (0, 1)");
    check_dim(d);
    RieszAsymptote a;
    a.alpha = alpha;
    const double beta = 2.0 * alpha;
    if (beta < d) {
        a.branch = RieszAsymptote::Branch::Power;
        a.constant = riesz_c(d, beta);
        a.exponent = beta - d;
    } else if (beta == d) {
        // only d = 1, alpha = 1/2 reaches this inside (0, 1)
        a.branch = RieszAsymptote::Branch::Log;
        a.constant = -1.0 / kPi;
    } else if (d == 1) {
        a.branch = RieszAsymptote::Branch::PowerPositive;
        a.constant = riesz_c(1, beta);  // negative: Gamma((1 - beta)/2) < 0
        a.exponent = beta - 1.0;
    } else {
        std::ostringstream os;
        os << "2 alpha = " << beta << " > d = " << d << " has no small-|x| branch; use 2 alpha < d, 2 alpha = d in {1, 2}"
           << " or 2 alpha > d = 1";
        throw std::invalid_argument(os.str());
    }
    return a;
}

Kato3Report kato_condition3_check(const Potential& V, const BernsteinFunction& psi, int d,
                                  const std::vector<double>& deltas, const std::vector<Vec>& probes)
{
    check_dim(d);
    if (deltas.empty() || probes.empty()) throw std::invalid_argument("kato3 needs deltas and probes");
    std::vector<double> ds = deltas;
    std::sort(ds.begin(), ds.end());
    const double dmax = ds.back();
    std::vector<double> radii;
    const int nr = 40;
    for (int i = 0; i < nr; ++i) radii.push_back(dmax * 1e-3 * std::pow(1e3, static_cast<double>(i) / (nr - 1)));
    KernelTable pi1 = resolvent_kernel(psi, 1.0, radii, d);

    // angular integral int_{S^{d-1}} V(x + r w) dw
    const Rule& ct = gl_rule(10);
    const int nphi = 24;
    auto angular = [&](const Vec& x, double r) {
        if (V.constant_value) return *V.constant_value * sphere_area(d);
        if (V.is_zero) return 0.0;
        if (d == 1) return V.V({x[0] + r, 0, 0}) + V.V({x[0] - r, 0, 0});
        double s = 0.0;
        if (d == 2) {
            for (int j = 0; j < nphi; ++j) {
                double ph = 2.0 * kPi * j / nphi;
                s += V.V({x[0] + r * std::cos(ph), x[1] + r * std::sin(ph), 0});
            }
            return s * 2.0 * kPi / nphi;
        }
        for (size_t i = 0; i < ct.x.size(); ++i) {
            double c = ct.x[i], sn = std::sqrt(1.0 - c * c);
            double ring = 0.0;
            for (int j = 0; j < nphi; ++j) {
                double ph = 2.0 * kPi * j / nphi;
                ring += V.V({x[0] + r * sn * std::cos(ph), x[1] + r * sn * std::sin(ph), x[2] + r * c});
            }
            s += ct.w[i] * ring * 2.0 * kPi / nphi;
        }
        return s;
    };
    // r = delta u^4 tames the r^{2 alpha - 1} behaviour at the origin
    const Rule& ur = gl_rule(30);
    auto ball = [&](const Vec& x, double delta) {
        double s = 0.0;
        for (size_t i = 0; i < ur.x.size(); ++i) {
            double u = 0.5 * (ur.x[i] + 1.0);
            double r = delta * std::pow(u, 4);
            double jac = 4.0 * delta * std::pow(u, 3);
            s += 0.5 * ur.w[i] * jac * std::pow(r, d - 1) * pi1.eval(r) * angular(x, r);
        }
        return s;
    };

    Kato3Report rep;
    for (double delta : ds) {
        KatoPoint3 pt;
        pt.delta = delta;
        pt.sup_value = -kInf;
        for (const auto& x : probes) {
            double v = ball(x, delta);
            if (v > pt.sup_value) {
                pt.sup_value = v;
                pt.argmax = x;
            }
        }
        rep.points.push_back(pt);
    }
    rep.monotone = true;
    for (size_t i = 1; i < rep.points.size(); ++i)
        if (rep.points[i].sup_value < rep.points[i - 1].sup_value) rep.monotone = false;
    const auto& lo = rep.points.front();
    const auto& hi = rep.points.back();
    bool all_zero = std::all_of(rep.points.begin(), rep.points.end(),
                                [](const KatoPoint3& p) { return std::abs(p.sup_value) < 1e-300; });
    if (lo.sup_value > 0.0 && hi.sup_value > 0.0 && hi.delta > lo.delta)
        rep.log_slope = std::log(hi.sup_value / lo.sup_value) / std::log(hi.delta / lo.delta);
    rep.decays = all_zero || (rep.monotone && rep.log_slope > 0.1);
    return rep;
}

AssumptionAReport assumption_a_check(const BernsteinFunction& psi, double t, int d)
{
    check_dim(d);
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto env = [&](double k) { return std::pow(k, d - 1) * std::exp(-t * psi(0.5 * k * k)); };
    AssumptionAReport rep;
    double total = GK::integrate(env, 0.0, 1.0, 10, 1e-12);
    int small_run = 0;
    for (int j = 0; j < 64; ++j) {
        double a = std::ldexp(1.0, j), b = 2.0 * a;
        double term = GK::integrate(env, a, b, 10, 1e-12);
        rep.dyadic_terms.push_back(term);
        total += term;
        size_t n = rep.dyadic_terms.size();
        bool shrinking = n >= 2 && term <= 0.5 * rep.dyadic_terms[n - 2];
        small_run = (shrinking && term <= 1e-15 * total) ? small_run + 1 : 0;
        if (small_run >= 3 || term == 0.0) {
            rep.finite = true;
            rep.value = sphere_area(d) * total;
            std::ostringstream os;
            os << "dyadic terms vanish after k=2^" << j << "; integral " << rep.value;
            rep.diagnostic = os.str();
            return rep;
        }
    }
    const auto& tt = rep.dyadic_terms;
    std::ostringstream os;
    os << "dyadic terms do not decay: last ratios";
    for (size_t i = tt.size() - 3; i < tt.size(); ++i) os << ' ' << tt[i] / tt[i - 1];
    os << " (Psi bounded or growing too slowly, e.g. e^{-t Psi} -> e^{-t Psi(inf)} > 0)";
    rep.diagnostic = os.str();
    rep.finite = false;
    rep.value = kInf;
    return rep;
}

L1LinfReport l1_linf_diagnostic(const KernelTable& kernel, double delta)
{
    const int d = kernel.d;
    check_dim(d);
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    L1LinfReport rep;
    // radial monotonicity on the table beyond delta
    double ref = std::abs(kernel.eval(delta));
    double worst = 0.0;
    for (size_t i = 0; i + 1 < kernel.radii.size(); ++i)
        if (kernel.radii[i] >= delta) worst = std::max(worst, kernel.values[i + 1] - kernel.values[i]);
    rep.worst_increase = worst;
    rep.radially_nonincreasing = worst <= 1e-9 * std::max(ref, 1e-300);

    // Cubes [k, k+1]^d: the nearest corner to 0 has coordinates n_i >= 0,
    // each value of n_i occurring for two k_i.
    const int M = static_cast<int>(std::min(100.0, std::ceil(kernel.radii.back())));
    const double sq = std::sqrt(static_cast<double>(d));
    double sum = 0.0;
    std::array<int, 3> n{0, 0, 0};
    const int n1 = M, n2 = d >= 2 ? M : 0, n3 = d >= 3 ? M : 0;
    for (n[0] = 0; n[0] <= n1; ++n[0])
        for (n[1] = 0; n[1] <= n2; ++n[1])
            for (n[2] = 0; n[2] <= n3; ++n[2]) {
                double near2 = 0.0, far2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    near2 += double(n[i]) * n[i];
                    far2 += double(n[i] + 1) * (n[i] + 1);
                }
                double near = std::sqrt(near2), far = std::sqrt(far2);
                if (near > M) continue;
                if (far <= delta) continue;
                sum += kernel.eval(std::max(delta, near));
            }
    sum *= std::pow(2.0, d);
    // cubes beyond radius M: sup <= p(|x| - sqrt d)
    const size_t nn = kernel.radii.size();
    double v1 = kernel.values[nn - 2], v2 = kernel.values[nn - 1];
    if (v1 > 0.0 && v2 > 0.0 && v2 < v1) {
        double q = std::log(v1 / v2) / std::log(kernel.radii[nn - 1] / kernel.radii[nn - 2]);
        if (q <= d) {
            rep.value = kInf;
            return rep;
        }
        boost::math::quadrature::exp_sinh<double> es;
        double tail = es.integrate(
            [&](double u) {
                double r = M + u;
                return std::pow(r, d - 1) * kernel.eval(std::max(delta, r - sq));
            },
            0.0, kInf, 1e-8);
        sum += sphere_area(d) * tail;
    }
    rep.value = sum;
    return rep;
}

HypercontractivityReport hypercontractivity_bound_check(const GridSpec& grid, const BernsteinFunction& psi,
                                                        const Potential& V, double t,
                                                        const std::function<cplx(const Vec&)>& f)
{
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
    const int d = grid.d;
    auto H = psi_of_operator(discretize_h(grid, fields::zero()), psi);
    Eigen::VectorXd v = V.is_zero ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.sites()))
                                  : sample_potential(grid, V.V);
    GridSemigroup S(H, v);
    GridSemigroup S2(H, 2.0 * v);
    auto fv = sample_function(grid, f);
    HypercontractivityReport rep;
    rep.sup_Ptf = S.apply(fv, t).cwiseAbs().maxCoeff();
    Eigen::VectorXcd one = Eigen::VectorXcd::Ones(fv.size());
    rep.C_t = S2.apply(one, t).real().maxCoeff();
    rep.C_half = S2.apply(one, 0.5 * t).real().maxCoeff();
    const double cell = grid.cell_volume();
    rep.f_l2 = std::sqrt(fv.squaredNorm() * cell);
    rep.f_l1 = fv.cwiseAbs().sum() * cell;

    // sup of the periodized kernel: sum over images 2L k, |k_i| <= 20
    const int K = 20;
    const double Lp = 2.0 * grid.L;
    auto periodized = [&](double tau) {
        auto tab = heat_kernel(psi, tau, radial_grid(1e-2, Lp * K * std::sqrt(double(d)) * 1.01, 400), d);
        double s = 0.0;
        std::array<int, 3> k{0, 0, 0};
        const int k2 = d >= 2 ? K : 0, k3 = d >= 3 ? K : 0;
        for (k[0] = -K; k[0] <= K; ++k[0])
            for (k[1] = -k2; k[1] <= k2; ++k[1])
                for (k[2] = -k3; k[2] <= k3; ++k[2]) {
                    double r2 = 0.0;
                    for (int i = 0; i < d; ++i) r2 += double(k[i]) * k[i];
                    s += tab.eval(Lp * std::sqrt(r2));
                }
        return s;
    };
    rep.pt_sup = periodized(t);
    rep.pt_half_sup = periodized(0.5 * t);
    rep.bound_2_inf = std::sqrt(rep.C_t * rep.pt_sup) * rep.f_l2;
    rep.bound_1_inf = rep.C_half * rep.pt_half_sup * rep.f_l1;
    const double slack = 1e-9 * (1.0 + rep.sup_Ptf);
    rep.holds_2_inf = rep.sup_Ptf <= rep.bound_2_inf + slack;
    rep.holds_1_inf = rep.sup_Ptf <= rep.bound_1_inf + slack;
    return rep;
}

}  // namespace subfk
