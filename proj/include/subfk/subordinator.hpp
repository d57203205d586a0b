/*
 * Levy subordinators T_t with E[e^{-u T_t}] = e^{-t Psi(u)}.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "subfk/bernstein.hpp"
#include "subfk/rng.hpp"

namespace subfk {

namespace strategy {
struct StableExact {};
struct RelativisticExact {};
struct DriftOnly {};
// Jumps >= cutoff are simulated; smaller ones are replaced by their mean.
struct CompoundPoissonPlusDrift {
    double cutoff = 1e-3;
};
}  // namespace strategy

using SubordinatorStrategy = std::variant<strategy::StableExact, strategy::RelativisticExact,
                                          strategy::DriftOnly, strategy::CompoundPoissonPlusDrift>;

class SubordinatorSpec {
public:
    SubordinatorSpec(BernsteinFunction psi, SubordinatorStrategy strat);
    // Exact sampler where one exists, otherwise compound Poisson with the given cutoff.
    static SubordinatorSpec automatic(const BernsteinFunction& psi, double cutoff = 1e-3);

    double sample_increment(double dt, Rng& rng) const;

    const BernsteinFunction& psi() const { return psi_; }
    const SubordinatorStrategy& strategy() const { return strat_; }
    // Compound Poisson pieces; zero for the exact strategies.
    double jump_intensity() const { return lambda_; }
    double effective_drift() const { return drift_; }
    std::string name() const;

private:
    double sample_jump(Rng& rng) const;

    BernsteinFunction psi_;
    SubordinatorStrategy strat_;
    double alpha_ = 0.0;   // stable index
    double scale_ = 1.0;   // stable scale
    double mass_ = 0.0;    // relativistic m
    double drift_ = 0.0;
    double lambda_ = 0.0;
    double cutoff_ = 0.0;
    // Inverse-CDF table for numeric jump laws: log y against cumulative mass.
    std::shared_ptr<const std::vector<double>> jump_logy_, jump_cdf_;
    double beyond_mass_ = 0.0;   // mass above the table, sampled as a power law
    double beyond_y_ = 0.0, beyond_kappa_ = 0.0;
};

struct SubordinatorPath {
    std::vector<double> times;
    std::vector<double> values;
    double terminal() const { return values.back(); }
};

SubordinatorPath sample_path(const SubordinatorSpec& spec, const std::vector<double>& times, Rng& rng);
std::vector<double> uniform_times(double t, int n);

struct LaplaceReport {
    double u = 0.0, t = 0.0;
    double mc_mean = 0.0;
    double std_error = 0.0;
    double analytic = 0.0;
    double z_score = 0.0;
    std::uint64_t n = 0;
};

LaplaceReport laplace_check(const SubordinatorSpec& spec, double u, double t, std::uint64_t n,
                            std::uint64_t seed);

}  // namespace subfk
