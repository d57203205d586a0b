/*
 * Monte-Carlo estimators of (f, e^{-tH} g) for the spinless, Z_p spin and
 * relativistic spin-1/2 Feynman-Kac formulas, with the checks built on them.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "subfk/fields.hpp"
#include "subfk/oracle.hpp"
#include "subfk/pathkit.hpp"
#include "subfk/spin.hpp"
#include "subfk/subordinator.hpp"

namespace subfk {

// amplitude * exp(-|x - center|^2 / (2 sigma^2)), periodized over the box
// [-L, L)^d when period_L > 0.
struct GaussianProfile {
    Vec center{0, 0, 0};
    double sigma = 1.0;
    double amplitude = 1.0;
    double period_L = 0.0;

    double base(const Vec& x, int d) const;  // unperiodized
    double l1_norm(int d) const;
};

struct TestFunction {
    std::string name = "custom";
    std::function<cplx(const Vec&)> eval;
    std::optional<GaussianProfile> gaussian;  // f equals this profile exactly
    bool fixed_sign = false;                  // real-valued, one sign

    cplx operator()(const Vec& x) const { return eval(x); }
};

TestFunction gaussian_function(const Vec& center, double sigma, int d, double amplitude = 1.0);
TestFunction periodic_gaussian_function(const Vec& center, double sigma, double L, int d, double amplitude = 1.0);
TestFunction custom_function(std::function<cplx(const Vec&)> f, std::string name = "custom");

// f(x, alpha) = coef[alpha-1] * profile(x)
struct SpinTestFunction {
    TestFunction profile;
    std::vector<cplx> coef;

    int p() const { return static_cast<int>(coef.size()); }
    cplx operator()(const Vec& x, int alpha) const { return coef[alpha - 1] * profile(x); }
};

namespace xsampling {
// Gauss-Hermite nodes matched to the Gaussian profile of f; nodes drawn with
// probability proportional to their weights.
struct GaussHermite {
    int nodes = 24;
};
// x uniform on the box [-L, L)^d (torus mode only).
struct UniformBox {};
// x drawn from |f| / ||f||_1; needs a fixed-sign Gaussian f.
struct ImportanceFromF {};
}  // namespace xsampling

using XSampling = std::variant<xsampling::GaussHermite, xsampling::UniformBox, xsampling::ImportanceFromF>;

struct EstimatorConfig {
    double t = 1.0;
    std::uint64_t n_paths = 100000;
    int n_time_steps = 32;  // outer steps on [0, t]
    int n_inner = 4;        // Brownian substeps per outer step
    XSampling x_sampling = xsampling::GaussHermite{};
    std::uint64_t seed = 1;
    int n_chunks = 16;
    int threads = 1;
    int d = 1;
    // Torus mode: paths wrapped into [-L, L)^d before f, g, V, a and the
    // couplings are evaluated. 0 means free space.
    double box_L = 0.0;
    // Truncation V -> min(V, v_plus_cap), max(., -v_minus_cap) for singular V.
    std::optional<double> v_plus_cap, v_minus_cap;
    // Spin only: the spectral shift s <= 0 in -int (U - s).
    double spectral_shift = 0.0;
    // Spin only: when the off-diagonal coupling vanishes identically, average
    // the Poisson clocks out exactly (e^{(p-1)T} P(no jump | T) = 1) instead
    // of sampling them.
    bool condition_on_no_jumps = true;
};

struct ChunkSummary {
    std::uint64_t n = 0;
    cplx mean;
    double abs_mean = 0.0;
};

struct Estimate {
    cplx mean;
    double std_error = 0.0;  // of the complex mean, sqrt(se_re^2 + se_im^2)
    std::uint64_t n = 0;
    double companion_abs_mean = 0.0;
    double companion_std_error = 0.0;
    std::vector<ChunkSummary> chunks;
};

Estimate estimate_spinless(const SubordinatorSpec& sub, const FieldSpec& field, const Potential& V,
                           const TestFunction& f, const TestFunction& g, const EstimatorConfig& cfg);
Estimate estimate_spinless(const BernsteinFunction& psi, const FieldSpec& field, const Potential& V,
                           const TestFunction& f, const TestFunction& g, const EstimatorConfig& cfg);

Estimate estimate_spin(const SubordinatorSpec& sub, const FieldSpec& field, const SpinCoupling& coupling,
                       const Potential& V, const SpinTestFunction& f, const SpinTestFunction& g,
                       const EstimatorConfig& cfg);

// Psi(u) = sqrt(2u + m^2) - m with the spin-1/2 coupling from curl a;
// epsilon > 0 applies the regularization. field must carry curl_b.
Estimate estimate_relativistic_spin_half(double m, const FieldSpec& field, const Potential& V,
                                         const SpinTestFunction& f, const SpinTestFunction& g,
                                         const EstimatorConfig& cfg, double epsilon = 0.0);

// |z| / stderr against a reference value
double z_score(const Estimate& e, cplx reference);
// |e1 - e2| / sqrt(se1^2 + se2^2)
double z_score(const Estimate& e1, const Estimate& e2);
double z_score(const Estimate& e, double factor, const Estimate& reference);

// (f, e^{-t Psi(|p|^2/2)} f) in free space for f = exp(-|x|^2 / (2 sigma^2)),
// by radial Fourier quadrature.
double gaussian_free_value(const BernsteinFunction& psi, double t, int d, double sigma);

// Grid truth for the same inputs the estimators take. In torus mode the grid
// box must equal cfg.box_L.
cplx oracle_spinless(const GridSpec& grid, const BernsteinFunction& psi, const FieldSpec& field,
                     const Potential& V, const TestFunction& f, const TestFunction& g, double t,
                     KineticScheme scheme = KineticScheme::Spectral);
cplx oracle_spin(const GridSpec& grid, const BernsteinFunction& psi, const FieldSpec& field,
                 const SpinCoupling& coupling, const Potential& V, const SpinTestFunction& f,
                 const SpinTestFunction& g, double t, double spectral_shift,
                 KineticScheme scheme = KineticScheme::Spectral);
// min(0, inf spec) of the spin operator on the grid
double spin_spectral_shift(const GridSpec& grid, const SpinCoupling& coupling, const FieldSpec& field,
                           KineticScheme scheme = KineticScheme::Spectral);

struct DiamagneticReport {
    double abs_mean = 0.0;           // |(f, e^{-tH} g)| estimate
    double companion_abs_mean = 0.0; // (|f|, e^{-tH_0} |g|) estimate on the same paths
    double gap = 0.0;                // companion - |mean|
    bool holds = false;
};
// The sample inequality |avg z| <= avg |z| checked with a relative slack of
// 1e-12 for summation rounding.
DiamagneticReport diamagnetic_check(const Estimate& e);

struct EnergyPoint {
    double t = 0.0;
    double energy = 0.0;
    double std_error = 0.0;
};
struct GroundEnergyReport {
    std::vector<EnergyPoint> points;
    std::vector<std::string> warnings;
    // E(t) = E_inf + c / t fitted on the retained points
    double extrapolated = 0.0;
};
// E(t) = -(1/t) log(Re run(t) / Re run(0)); run(0) is the deterministic (f, f).
GroundEnergyReport ground_energy_estimate(const std::vector<double>& t_grid,
                                          const std::function<Estimate(double)>& run);

struct KatoPoint {
    double t = 0.0;
    double sup_value = 0.0;  // sup over probes of int_0^t E^x[V(X_s)] ds
    double std_error = 0.0;
    Vec argmax{0, 0, 0};
};
struct KatoReport {
    std::vector<KatoPoint> points;  // ascending t
    double log_slope = 0.0;         // fitted d log sup / d log t
    bool monotone = false;
    bool decays = false;            // verdict: sup -> 0 as t -> 0
};
KatoReport kato_condition1_check(const Potential& V, const SubordinatorSpec& sub, int d,
                                 const std::vector<double>& t_grid, const std::vector<Vec>& probes,
                                 std::uint64_t n_paths, std::uint64_t seed, int n_time_steps = 32);

struct ExponentialMomentReport {
    double t = 0.0;
    double sup_estimate = 0.0;  // sup over probes of E^x[e^{int_0^t V}]
    double std_error = 0.0;
    double kato_s = 0.0;        // block length used for the chaining bound
    double kato_eps = 0.0;      // measured sup int_0^s E[V]
    std::optional<double> khasminskii_bound;  // (1 - eps)^{-ceil(t/s)} when eps < 1
};
ExponentialMomentReport exponential_moment_check(const Potential& V, const SubordinatorSpec& sub, int d, double t,
                                                 const std::vector<Vec>& probes, std::uint64_t n_paths,
                                                 std::uint64_t seed, double s_block, int n_time_steps = 32);

struct FermionicReport {
    Estimate mc;             // sum_alpha int E[fbar(xi_0) g(xi_T)]
    cplx oracle;             // (f, e^{-t Psi(p^2/2 + sigma_F + 1)} g)
    double z = 0.0;
    Estimate mc_literal;     // with the extra e^{-T} weight
    cplx oracle_literal;     // against Psi(p^2/2 + sigma_F + 2)
    double z_literal = 0.0;
    bool pass = false;
};
FermionicReport fermionic_generator_check(const SubordinatorSpec& sub, const GridSpec& grid,
                                          const SpinTestFunction& f, const SpinTestFunction& g,
                                          const EstimatorConfig& cfg);

}  // namespace subfk
