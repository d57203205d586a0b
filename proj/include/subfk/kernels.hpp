/*
 * Deterministic radial quadrature for the subordinated heat kernel p_t, the
 * resolvent kernel Pi_lambda and the integrability checks built on them.
 *
 * Convention: p_t(x) = (2 pi)^{-d} int e^{-i x.xi} e^{-t Psi(|xi|^2/2)} dxi and
 * Pi_lambda(x) = (2 pi)^{-d} int e^{-i x.xi} / (lambda + Psi(|xi|^2/2)) dxi.
 */
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subfk/bernstein.hpp"
#include "subfk/fields.hpp"
#include "subfk/oracle.hpp"

namespace subfk {

enum class RadialMethod {
    Auto,             // cosine for d = 1, sin formula for d = 3, Hankel for d = 2
    CosineTransform1D,
    HankelRadial,     // J_{(d-2)/2}, any d
    SinFormula3D,
};

struct QuadratureSpec {
    RadialMethod method = RadialMethod::Auto;
    double max_frequency = 0.0;  // 0: chosen from the tail tolerance
    int n_nodes = 10;            // Gauss-Legendre nodes per panel
    double tail_tolerance = 1e-13;
};

struct KernelTable {
    std::vector<double> radii;   // ascending, may start at 0
    std::vector<double> values;
    double parameter = 0.0;      // t or lambda
    int d = 1;
    std::string psi_name;
    double max_frequency = 0.0;
    double tail_bound = 0.0;     // bound on the truncated frequency integral

    // Monotone cubic interpolation in log r; power-law extrapolation past
    // the last radius, even extension below the first.
    double eval(double r) const;
    // trapezoid mass over R^d including a power-law tail estimate
    double mass() const;

    std::shared_ptr<const std::function<double(double)>> interp_;
};

// Log-spaced radii r_min..r_max with 0 prepended.
std::vector<double> radial_grid(double r_min, double r_max, int n);

// Heat kernel on the given radii; throws AssumptionError when the frequency
// integral of e^{-t Psi} diverges.
KernelTable heat_kernel(const BernsteinFunction& psi, double t, const std::vector<double>& radii, int d,
                        const QuadratureSpec& quad = {});

// Single heat-kernel value (own frequency grid resolved for r).
double heat_kernel_value(const BernsteinFunction& psi, double t, double r, int d, const QuadratureSpec& quad = {});

// (p_s * p_t)(x) - p_{s+t}(x) in d = 1 by quadrature over y.
struct SemigroupCheck {
    double x = 0.0;
    double convolution = 0.0;
    double direct = 0.0;
    double abs_error = 0.0;
};
std::vector<SemigroupCheck> kernel_semigroup_check(const BernsteinFunction& psi, double s, double t,
                                                   const std::vector<double>& xs);

struct ResolventDiagnostics {
    int panels = 0;
    double last_partial_sum = 0.0;
    double accelerated = 0.0;
    double change = 0.0;  // between the last two accelerated estimates
};

// Pi_lambda(r) by panel sums between Bessel zeros with Wynn epsilon
// acceleration; QuadratureError with partial-sum diagnostics on failure.
double resolvent_value(const BernsteinFunction& psi, double lambda, double r, int d,
                       RadialMethod method = RadialMethod::Auto, ResolventDiagnostics* diag = nullptr);
KernelTable resolvent_kernel(const BernsteinFunction& psi, double lambda, const std::vector<double>& radii, int d,
                             RadialMethod method = RadialMethod::Auto);
// int_0^inf e^{-lambda t} p_t(r) dt by time quadrature (cross-check)
double resolvent_by_time_integral(const BernsteinFunction& psi, double lambda, double r, int d);

// c(d, beta) = Gamma((d - beta)/2) / (2^beta pi^{d/2} |Gamma(beta/2)|), beta = 2 alpha.
double riesz_c(int d, double beta);

struct RieszAsymptote {
    enum class Branch { Power, Log, PowerPositive } branch = Branch::Power;
    double constant = 0.0;  // c(d, 2 alpha), or -1/pi on the log branch
    double exponent = 0.0;  // 2 alpha - d
    // small-|x| value of Pi_lambda for Psi(u) = u^alpha: includes the 2^alpha
    // factor from Psi(|xi|^2/2) = 2^{-alpha} |xi|^{2 alpha}
    double kernel(double r) const;
    double alpha = 0.0;
};
// Branch per 2 alpha vs d; throws std::invalid_argument naming the applicable case.
RieszAsymptote stable_riesz_constant(int d, double alpha);

struct KatoPoint3 {
    double delta = 0.0;
    double sup_value = 0.0;
    Vec argmax{0, 0, 0};
};
struct Kato3Report {
    std::vector<KatoPoint3> points;  // ascending delta
    double log_slope = 0.0;
    bool monotone = false;
    bool decays = false;
};
// sup over probes of int_{|y-x|<delta} Pi_1(x - y) V(y) dy
Kato3Report kato_condition3_check(const Potential& V, const BernsteinFunction& psi, int d,
                                  const std::vector<double>& deltas, const std::vector<Vec>& probes);

struct AssumptionAReport {
    bool finite = false;
    double value = 0.0;               // int_{R^d} e^{-t Psi(|xi|^2/2)} dxi when finite
    std::vector<double> dyadic_terms; // int over [2^j, 2^{j+1}) for the diagnostic
    std::string diagnostic;
};
AssumptionAReport assumption_a_check(const BernsteinFunction& psi, double t, int d = 1);

struct L1LinfReport {
    double value = 0.0;
    bool radially_nonincreasing = false;  // on the table beyond delta
    double worst_increase = 0.0;
};
L1LinfReport l1_linf_diagnostic(const KernelTable& kernel, double delta);

struct HypercontractivityReport {
    double sup_Ptf = 0.0;       // ||P_t f||_inf on the grid
    double C_t = 0.0;           // sup_x E[e^{-2 int V}] = max (e^{-t(Psi(h) + 2V)} 1)(x)
    double C_half = 0.0;        // the same at t/2
    double pt_sup = 0.0;        // ||p_t||_inf, periodized over the box
    double pt_half_sup = 0.0;
    double f_l2 = 0.0, f_l1 = 0.0;
    double bound_2_inf = 0.0;   // (C_t ||p_t||_inf)^{1/2} ||f||_2
    double bound_1_inf = 0.0;   // C_{t/2} ||p_{t/2}||_inf ||f||_1
    bool holds_2_inf = false;
    bool holds_1_inf = false;
};
HypercontractivityReport hypercontractivity_bound_check(const GridSpec& grid, const BernsteinFunction& psi,
                                                        const Potential& V, double t,
                                                        const std::function<cplx(const Vec&)>& f);

}  // namespace subfk
