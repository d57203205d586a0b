/*
 * Brownian paths, subordinated paths X_s = B_{T_s}, the Stratonovich
 * magnetic integral and the potential time integral.
 */
#pragma once

#include <optional>
#include <vector>

#include "subfk/fields.hpp"
#include "subfk/rng.hpp"
#include "subfk/subordinator.hpp"

namespace subfk {

struct BrownianPath {
    int d = 1;
    std::vector<double> times;
    std::vector<Vec> positions;

    double horizon() const { return times.back(); }
    // Index of the node at exactly time s; throws if s is not a node.
    size_t node_of(double s) const;
};

BrownianPath sample_brownian(const Vec& x0, int d, double horizon, int n_steps, Rng& rng);
// Brownian path on an arbitrary ascending grid starting at 0 (duplicates allowed).
BrownianPath sample_brownian_on(const Vec& x0, int d, const std::vector<double>& times, Rng& rng);
// Adds nodes inside existing segments by Brownian bridge interpolation.
void insert_nodes(BrownianPath& path, std::vector<double> new_times, Rng& rng);

struct SubordinatedPath {
    BrownianPath brownian;
    SubordinatorPath subordinator;
    // brownian index of T_{s_j} for each subordinator node s_j
    std::vector<size_t> node_index;

    // X_s = B_{T_s}, with T piecewise constant between subordinator nodes.
    Vec lookup(double s) const;
    const Vec& at_node(size_t j) const { return brownian.positions[node_index[j]]; }
};

// Subordinator on n_outer uniform steps of [0,t], Brownian path on a grid
// holding every T_{s_j}, n_inner substeps per segment and any extra times
// inside [0, T_t].
SubordinatedPath subordinate(const Vec& x0, int d, double t, const SubordinatorSpec& spec, int n_outer,
                             int n_inner, Rng& rng, const std::vector<double>& extra_times = {});

// Builds the Brownian part for a given subordinator path (the sampling core of subordinate).
SubordinatedPath subordinate_given(const Vec& x0, int d, SubordinatorPath sub, int n_inner, Rng& rng,
                                   const std::vector<double>& extra_times = {});

struct StratonovichResult {
    double midpoint = 0.0;
    std::optional<double> ito_plus_half_div;
};

// sum 1/2 (a(B_k) + a(B_{k+1})) . (B_{k+1} - B_k); with div_a also the Ito form
// plus (1/2) int div a ds.
StratonovichResult stratonovich_integral(const BrownianPath& path, const FieldSpec& field);
double stratonovich_midpoint(const BrownianPath& path, const VectorField& a);

// sum_{j=1}^{n} (t/n) V(X_{jt/n})
double potential_integral(const SubordinatedPath& spath, const ScalarField& V, double t, int n_steps);

}  // namespace subfk
