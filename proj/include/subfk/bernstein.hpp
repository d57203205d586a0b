/*
 * Bernstein functions Psi(u) = b u + int (1 - e^{-uy}) lambda(dy) and their
 * Levy triplets (b, lambda).
 */
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "subfk/common.hpp"

namespace subfk {

// Density scale * alpha / Gamma(1-alpha) * y^{-1-alpha}; Laplace exponent scale * u^alpha.
struct StableDensity {
    double alpha;
    double scale = 1.0;
};

// Unit point mass at y = a; Laplace exponent 1 - e^{-au}.
struct CompoundExp {
    double a;
};

// Tabulated or analytic density on (0, inf). Outside [y_min, y_max] it is
// continued by the power law fitted at the nearest cutoff.
struct NumericDensity {
    std::function<double(double)> density;
    double y_min = 1e-12;
    double y_max = 1e4;
    std::string label = "numeric";
};

using LevyMeasure = std::variant<StableDensity, CompoundExp, NumericDensity>;

// Loads (y, density) pairs from CSV (header optional) and interpolates
// linearly in (log y, log density).
NumericDensity numeric_density_from_csv(const std::string& path);
NumericDensity numeric_density_from_table(std::vector<double> y, std::vector<double> rho);

// Levy density value (throws for point masses).
double levy_density(const LevyMeasure& m, double y);
// int_{y0}^inf lambda(dy)
double tail_mass(const LevyMeasure& m, double y0);
// int_0^{y0} y lambda(dy)
double small_jump_mean(const LevyMeasure& m, double y0);

struct LaplaceIntegral {
    double value = 0.0;
    double abs_error = 0.0;
    double small_tail = 0.0;   // analytic piece below the quadrature range
    double large_tail = 0.0;   // extrapolated piece above it
    std::vector<std::string> warnings;
};

// int (1 - e^{-uy}) lambda(dy) with relative tolerance 1e-8.
LaplaceIntegral laplace_integral(const LevyMeasure& m, double u);

namespace closed {
struct Stable { double alpha; };
struct Relativistic { double m; };
struct OneMinusExp { double a; };
struct HyperbolicK1 { double a; double b; };
struct Linear { double b; };
}  // namespace closed

using ClosedForm = std::variant<closed::Stable, closed::Relativistic, closed::OneMinusExp,
                                closed::HyperbolicK1, closed::Linear>;

class BernsteinFunction {
public:
    BernsteinFunction(double drift, std::optional<LevyMeasure> measure);

    static BernsteinFunction stable(double alpha);
    static BernsteinFunction relativistic(double m);
    static BernsteinFunction one_minus_exp(double a);
    static BernsteinFunction hyperbolic_k1(double a, double b);
    static BernsteinFunction linear(double b);
    static BernsteinFunction from_closed_form(const ClosedForm& cf);

    // eval_psi: closed form when present, otherwise the triplet quadrature.
    double operator()(double u) const { return eval(u); }
    double eval(double u) const;
    // Always the triplet route; throws UnsupportedError without a triplet.
    double eval_triplet(double u) const;
    LaplaceIntegral eval_triplet_detailed(double u) const;

    bool has_triplet() const { return has_triplet_; }
    double drift() const { return drift_; }
    const std::optional<LevyMeasure>& measure() const { return measure_; }
    const std::optional<ClosedForm>& closed_form() const { return closed_; }
    // Copy with the closed form removed, so eval() runs the quadrature.
    BernsteinFunction triplet_only() const;
    std::string name() const;

private:
    double drift_ = 0.0;
    std::optional<LevyMeasure> measure_;
    std::optional<ClosedForm> closed_;
    bool has_triplet_ = true;
};

struct LinearBound {
    double c1;
    double c2;
};

// c1 = b + int_0^1 y lambda(dy), c2 = int_1^inf lambda(dy).
LinearBound linear_bound_constants(const BernsteinFunction& psi);

struct MonotonicityCheck {
    std::string target;  // "psi" or "g_t"
    double t = 0.0;      // only for g_t
    int order = 0;
    double worst_margin = 0.0;  // most positive signed value minus tolerance
    int violations = 0;
    int windows = 0;
};

struct MonotonicityReport {
    std::vector<MonotonicityCheck> checks;
    bool pass = true;
    // First failing check, if any.
    std::optional<MonotonicityCheck> first_violation() const;
};

// Signed divided differences of Psi (orders 1..n must satisfy (-1)^k D^k <= 0)
// and of g_t = e^{-t Psi} ((-1)^k D^k >= 0). Tolerance per window is the
// propagated rounding bound of the divided difference. eval_rel_error is the
// relative accuracy of Psi evaluations.
MonotonicityReport check_complete_monotonicity(const std::function<double(double)>& psi,
                                               const std::vector<double>& grid,
                                               const std::vector<double>& t_list, int max_order,
                                               double eval_rel_error = 1e-14);
MonotonicityReport check_complete_monotonicity(const BernsteinFunction& psi,
                                               const std::vector<double>& grid,
                                               const std::vector<double>& t_list, int max_order);

}  // namespace subfk
