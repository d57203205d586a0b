#include "subfk/pathkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subfk {

size_t BrownianPath::node_of(double s) const
{
    auto it = std::lower_bound(times.begin(), times.end(), s);
    if (it == times.end() || *it != s) {
        std::ostringstream os;
        os << "time " << s << " is not a node of the Brownian path";
        throw std::invalid_argument(os.str());
    }
    return static_cast<size_t>(it - times.begin());
}

BrownianPath sample_brownian_on(const Vec& x0, int d, const std::vector<double>& times, Rng& rng)
{
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("dimension must be 1..3");
    if (times.empty() || times[0] != 0.0) throw std::invalid_argument("Brownian grid must start at 0");
    BrownianPath p;
    p.d = d;
    p.times = times;
    p.positions.resize(times.size());
    p.positions[0] = x0;
    for (size_t k = 1; k < times.size(); ++k) {
        double dt = times[k] - times[k - 1];
        if (dt < 0.0) throw std::invalid_argument("Brownian grid must be ascending");
        Vec x = p.positions[k - 1];
        if (dt > 0.0) {
            double s = std::sqrt(dt);
            for (int i = 0; i < d; ++i) x[i] += s * rng.normal();
        }
        p.positions[k] = x;
    }
    return p;
}

BrownianPath sample_brownian(const Vec& x0, int d, double horizon, int n_steps, Rng& rng)
{
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (horizon == 0.0) {
        BrownianPath p;
        p.d = d;
        p.times = {0.0};
        p.positions = {x0};
        return p;
    }
    return sample_brownian_on(x0, d, uniform_times(horizon, n_steps), rng);
}

void insert_nodes(BrownianPath& path, std::vector<double> new_times, Rng& rng)
{
    std::sort(new_times.begin(), new_times.end());
    std::vector<double> times;
    std::vector<Vec> pos;
    times.reserve(path.times.size() + new_times.size());
    pos.reserve(times.capacity());
    size_t j = 0;
    for (size_t k = 0; k < path.times.size(); ++k) {
        // new nodes strictly inside (times[k-1], times[k])
        while (j < new_times.size() && new_times[j] < path.times[k]) {
            double s = new_times[j++];
            if (k == 0 || s <= times.back()) {
                if (k == 0) throw std::invalid_argument("cannot insert nodes before time 0");
                continue;  // duplicate of an inserted node
            }
            // bridge from (times.back(), pos.back()) to (times[k], positions[k])
            double t0 = times.back(), t1 = path.times[k];
            double w = (s - t0) / (t1 - t0);
            double var = (s - t0) * (t1 - s) / (t1 - t0);
            double sd = std::sqrt(std::max(var, 0.0));
            Vec x{0, 0, 0};
            for (int i = 0; i < path.d; ++i)
                x[i] = pos.back()[i] + w * (path.positions[k][i] - pos.back()[i]) + sd * rng.normal();
            times.push_back(s);
            pos.push_back(x);
        }
        while (j < new_times.size() && new_times[j] == path.times[k]) ++j;
        times.push_back(path.times[k]);
        pos.push_back(path.positions[k]);
    }
    if (j < new_times.size()) throw std::invalid_argument("cannot insert nodes beyond the path horizon");
    path.times = std::move(times);
    path.positions = std::move(pos);
}

Vec SubordinatedPath::lookup(double s) const
{
    const auto& ts = subordinator.times;
    auto it = std::upper_bound(ts.begin(), ts.end(), s);
    size_t j = it == ts.begin() ? 0 : static_cast<size_t>(it - ts.begin()) - 1;
    return at_node(j);
}

SubordinatedPath subordinate_given(const Vec& x0, int d, SubordinatorPath sub, int n_inner, Rng& rng,
                                   const std::vector<double>& extra_times)
{
    if (n_inner < 1) throw std::invalid_argument("n_inner must be >= 1");
    const auto& T = sub.values;
    std::vector<double> grid;
    grid.reserve(T.size() * n_inner + extra_times.size() + 1);
    grid.push_back(0.0);
    for (size_t j = 1; j < T.size(); ++j) {
        double a = T[j - 1], b = T[j];
        if (b <= a) continue;
        for (int k = 1; k < n_inner; ++k) grid.push_back(a + (b - a) * k / n_inner);
        grid.push_back(b);
    }
    if (!extra_times.empty()) {
        std::vector<double> ex(extra_times);
        std::sort(ex.begin(), ex.end());
        if (ex.front() < 0.0 || ex.back() > T.back())
            throw std::invalid_argument("extra Brownian times must lie in [0, T_t]");
        std::vector<double> merged;
        merged.reserve(grid.size() + ex.size());
        std::merge(grid.begin(), grid.end(), ex.begin(), ex.end(), std::back_inserter(merged));
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        grid.swap(merged);
    }
    SubordinatedPath sp;
    sp.brownian = sample_brownian_on(x0, d, grid, rng);
    sp.node_index.resize(T.size());
    for (size_t j = 0; j < T.size(); ++j) sp.node_index[j] = sp.brownian.node_of(T[j]);
    sp.subordinator = std::move(sub);
    return sp;
}

SubordinatedPath subordinate(const Vec& x0, int d, double t, const SubordinatorSpec& spec, int n_outer,
                             int n_inner, Rng& rng, const std::vector<double>& extra_times)
{
    if (n_outer < 1) throw std::invalid_argument("n_outer must be >= 1");
    auto sub = sample_path(spec, uniform_times(t, n_outer), rng);
    return subordinate_given(x0, d, std::move(sub), n_inner, rng, extra_times);
}

double stratonovich_midpoint(const BrownianPath& path, const VectorField& a)
{
    if (path.times.size() < 2) return 0.0;
    const int d = path.d;
    double s = 0.0;
    Vec a0 = a(path.positions[0]);
    for (size_t k = 1; k < path.positions.size(); ++k) {
        const Vec& x0 = path.positions[k - 1];
        const Vec& x1 = path.positions[k];
        if (x0 == x1) continue;
        Vec a1 = a(x1);
        for (int i = 0; i < d; ++i) s += 0.5 * (a0[i] + a1[i]) * (x1[i] - x0[i]);
        a0 = a1;
    }
    return s;
}

StratonovichResult stratonovich_integral(const BrownianPath& path, const FieldSpec& field)
{
    StratonovichResult r;
    r.midpoint = stratonovich_midpoint(path, field.a);
    if (field.div_a) {
        const int d = path.d;
        double ito = 0.0, corr = 0.0;
        for (size_t k = 1; k < path.positions.size(); ++k) {
            const Vec& x0 = path.positions[k - 1];
            const Vec& x1 = path.positions[k];
            Vec a0 = field.a(x0);
            for (int i = 0; i < d; ++i) ito += a0[i] * (x1[i] - x0[i]);
            corr += (*field.div_a)(x0) * (path.times[k] - path.times[k - 1]);
        }
        r.ito_plus_half_div = ito + 0.5 * corr;
    }
    return r;
}

double potential_integral(const SubordinatedPath& spath, const ScalarField& V, double t, int n_steps)
{
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    const double h = t / n_steps;
    const size_t n_outer = spath.subordinator.times.size() - 1;
    double s = 0.0;
    for (int j = 1; j <= n_steps; ++j) {
        // exact node when the grids coincide
        const Vec& x = (static_cast<size_t>(n_steps) == n_outer) ? spath.at_node(j)
                                                                 : spath.lookup(j * h * (1.0 + 1e-12));
        double v = V(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "potential is not finite at (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
            throw std::domain_error(os.str());
        }
        s += v;
    }
    return s * t / n_steps;
}

}  // namespace subfk
