/*
 * Z_p spin: roots of unity, couplings U / U_beta, Poisson spin trajectories
 * and the spin action.
 *
 * Spin indices run over alpha = 1..p with sigma_alpha = exp(2 pi i alpha / p);
 * for p = 2 this gives sigma_1 = -1, sigma_2 = +1.
 */
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "subfk/common.hpp"
#include "subfk/fields.hpp"
#include "subfk/pathkit.hpp"
#include "subfk/rng.hpp"

namespace subfk {

struct SpinConfig {
    int p = 2;

    explicit SpinConfig(int p_);
    cplx root(int alpha) const;
    // alpha + beta wrapped into 1..p (beta may be any integer)
    int add(int alpha, long long beta) const;
};

using DiagCoupling = std::function<double(const Vec&, int)>;
using OffDiagCoupling = std::function<cplx(const Vec&, int)>;

struct SpinCoupling {
    int p = 2;
    DiagCoupling U;                   // U(x, alpha)
    std::vector<OffDiagCoupling> Ub;  // Ub[beta-1](x, alpha), matrix entry (alpha, alpha+beta)
    double epsilon = 0.0;
    // Off-diagonal part vanishes identically: paths with a jump carry weight 0
    // (this is the decoupled limit, not a regularization failure).
    bool offdiag_zero = false;
    // Set when U and every U_beta are constant in x and alpha: the spin
    // weight then depends on the jump counts only.
    struct Uniform {
        double u = 0.0;
        std::vector<cplx> ub;  // [beta-1]
    };
    std::optional<Uniform> uniform;

    cplx offdiag(int beta, const Vec& x, int alpha) const { return Ub[beta - 1](x, alpha); }
};

// b-field coupling for p = 2: U = -(1/2) sigma b3, U_1 = -(1/2)(b1 - i sigma b2).
SpinCoupling spin12_coupling(const FieldSpec& field);

// U_beta(x, alpha) = (1/2)(W_beta(x, alpha+beta) + conj(W_{p-beta}(x, alpha))).
// W[beta-1] for beta = 1..p-1; U is the diagonal part (zero when empty).
SpinCoupling offdiag_from_W(int p, const std::vector<OffDiagCoupling>& W, DiagCoupling U = {});

// Constant couplings: diag[alpha-1], off[beta-1][alpha-1].
SpinCoupling constant_coupling(int p, const std::vector<double>& diag,
                               const std::vector<std::vector<cplx>>& off);

// Multiplies every coupling by s.
SpinCoupling scaled(const SpinCoupling& c, double s);

// chi_eps(z) = z + eps 1{|z| < eps/2}
cplx chi_eps(cplx z, double eps);

// -U_beta replaced by chi_eps(-U_beta), so |U_beta| > eps/2 everywhere.
SpinCoupling regularize(const SpinCoupling& c, double eps);

// h^0 variant: U_beta -> -|U_beta| (real, nonpositive off-diagonals).
SpinCoupling absolute_offdiag(const SpinCoupling& c);

struct SpinJump {
    double time;
    int beta;
};

struct SpinTrajectory {
    int p = 2;
    double horizon = 0.0;
    int alpha0 = 1;
    std::vector<std::vector<double>> jump_times;  // [beta-1], ascending

    // all jumps sorted by time
    std::vector<SpinJump> events() const;
    // N(s) = sum_beta beta N^beta_s, right-continuous, not reduced mod p
    long long N(double s) const;
    int state(double s) const;
    std::vector<double> all_times() const;
};

SpinTrajectory sample_spin_trajectory(int p, double horizon, int alpha0, Rng& rng);

// S_spin = -int_0^T (U(B_s, sigma_{N_s}) - shift) ds + sum_jumps log(-U_beta(B_r, sigma_{N_{r-}})).
// The Brownian path must carry every jump time as a node; the time integral
// uses the trapezoid rule on the path grid with the state constant on each
// segment. Throws when -U_beta = 0 at a jump unless the coupling is flagged
// offdiag_zero (then the real part is -inf and e^S = 0).
cplx spin_action(const SpinTrajectory& traj, const BrownianPath& path, const SpinCoupling& coupling,
                 double horizon, double spectral_shift);
cplx spin_action(const SpinTrajectory& traj, const SubordinatedPath& spath, const SpinCoupling& coupling,
                 double horizon, double spectral_shift);

// Same action for every starting index alpha0 = 1..p at once (index alpha0-1),
// plus the final state for each start.
struct SpinActions {
    std::vector<cplx> S;
    std::vector<int> final_state;
};
SpinActions spin_actions_all(const SpinTrajectory& traj, const BrownianPath& path,
                             const SpinCoupling& coupling, double horizon, double spectral_shift);

// sum over jumps r <= w of g(N_{r-}) and int_0^w g(N_s) ds (raw N).
double jump_sum(const SpinTrajectory& traj, const std::function<double(long long)>& g, double w);
double time_integral(const SpinTrajectory& traj, const std::function<double(long long)>& g, double w);

}  // namespace subfk
