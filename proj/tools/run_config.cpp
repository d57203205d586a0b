#include "run_config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace subfk::cli {

Section::Section(const json& j, std::string path) : j_(j), path_(std::move(path))
{
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
}

const json& Section::raw(const std::string& key)
{
    read_.push_back(key);
    return j_.at(key);
}

namespace {

std::string where(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

}  // namespace

double Section::num(const std::string& key, std::optional<double> def)
{
    double v;
    if (!j_.contains(key)) {
        if (!def) throw ConfigError("missing key " + where(path_, key));
        v = *def;
    } else {
        const auto& x = raw(key);
        if (!x.is_number()) throw ConfigError(where(path_, key) + ": expected a number");
        v = x.get<double>();
    }
    resolved_[key] = v;
    return v;
}

std::int64_t Section::integer(const std::string& key, std::optional<std::int64_t> def)
{
    std::int64_t v;
    if (!j_.contains(key)) {
        if (!def) throw ConfigError("missing key " + where(path_, key));
        v = *def;
    } else {
        const auto& x = raw(key);
        if (!x.is_number_integer()) throw ConfigError(where(path_, key) + ": expected an integer");
        v = x.get<std::int64_t>();
    }
    resolved_[key] = v;
    return v;
}

bool Section::flag(const std::string& key, bool def)
{
    bool v = def;
    if (j_.contains(key)) {
        const auto& x = raw(key);
        if (!x.is_boolean()) throw ConfigError(where(path_, key) + ": expected true or false");
        v = x.get<bool>();
    }
    resolved_[key] = v;
    return v;
}

std::string Section::str(const std::string& key, std::optional<std::string> def)
{
    std::string v;
    if (!j_.contains(key)) {
        if (!def) throw ConfigError("missing key " + where(path_, key));
        v = *def;
    } else {
        const auto& x = raw(key);
        if (!x.is_string()) throw ConfigError(where(path_, key) + ": expected a string");
        v = x.get<std::string>();
    }
    resolved_[key] = v;
    return v;
}

std::vector<double> Section::nums(const std::string& key, std::optional<std::vector<double>> def)
{
    std::vector<double> v;
    if (!j_.contains(key)) {
        if (!def) throw ConfigError("missing key " + where(path_, key));
        v = *def;
    } else {
        const auto& x = raw(key);
        if (!x.is_array()) throw ConfigError(where(path_, key) + ": expected an array of numbers");
        for (const auto& e : x) {
            if (!e.is_number()) throw ConfigError(where(path_, key) + ": expected an array of numbers");
            v.push_back(e.get<double>());
        }
    }
    resolved_[key] = v;
    return v;
}

std::vector<cplx> Section::cplxs(const std::string& key, std::optional<std::vector<cplx>> def)
{
    std::vector<cplx> v;
    if (!j_.contains(key)) {
        if (!def) throw ConfigError("missing key " + where(path_, key));
        v = *def;
    } else {
        const auto& x = raw(key);
        if (!x.is_array()) throw ConfigError(where(path_, key) + ": expected an array");
        for (const auto& e : x) {
            if (e.is_number())
                v.emplace_back(e.get<double>(), 0.0);
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                v.emplace_back(e[0].get<double>(), e[1].get<double>());
            else
                throw ConfigError(where(path_, key) + ": entries must be numbers or [re, im]");
        }
    }
    json out = json::array();
    for (auto c : v) out.push_back({c.real(), c.imag()});
    resolved_[key] = out;
    return v;
}

Section Section::sub(const std::string& key)
{
    if (!j_.contains(key)) throw ConfigError("missing key " + where(path_, key));
    return Section(raw(key), where(path_, key));
}

json Section::finish() const
{
    for (const auto& [k, v] : j_.items())
        if (std::find(read_.begin(), read_.end(), k) == read_.end())
            throw ConfigError("unknown key " + where(path_, k));
    return resolved_;
}

namespace {

Vec vec3(const std::vector<double>& v, const std::string& what)
{
    if (v.size() > 3) throw ConfigError(what + ": at most 3 components");
    Vec out{0, 0, 0};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

}  // namespace

BernsteinFunction read_psi(Section& s)
{
    const std::string fam = s.str("family");
    std::optional<BernsteinFunction> psi;
    if (fam == "stable")
        psi = BernsteinFunction::stable(s.num("alpha"));
    else if (fam == "relativistic")
        psi = BernsteinFunction::relativistic(s.num("m"));
    else if (fam == "linear")
        psi = BernsteinFunction::linear(s.num("b", 1.0));
    else if (fam == "one_minus_exp")
        psi = BernsteinFunction::one_minus_exp(s.num("a", 1.0));
    else if (fam == "hyperbolic_k1")
        psi = BernsteinFunction::hyperbolic_k1(s.num("a"), s.num("b"));
    else if (fam == "numeric")
        psi = BernsteinFunction(s.num("drift", 0.0), LevyMeasure(numeric_density_from_csv(s.str("csv"))));
    else
        throw ConfigError(s.path() + ".family: unknown family '" + fam +
                          "' (stable, relativistic, linear, one_minus_exp, hyperbolic_k1, numeric)");
    if (s.flag("triplet_only", false)) psi = psi->triplet_only();
    return *psi;
}

SubordinatorSpec read_subordinator(Section& s, const BernsteinFunction& psi)
{
    const std::string st = s.str("strategy", "auto");
    const double cutoff = s.num("cutoff", 1e-3);
    if (st == "auto") return SubordinatorSpec::automatic(psi, cutoff);
    if (st == "stable_exact") return SubordinatorSpec(psi, strategy::StableExact{});
    if (st == "relativistic_exact") return SubordinatorSpec(psi, strategy::RelativisticExact{});
    if (st == "drift_only") return SubordinatorSpec(psi, strategy::DriftOnly{});
    if (st == "compound_poisson") return SubordinatorSpec(psi, strategy::CompoundPoissonPlusDrift{cutoff});
    throw ConfigError(s.path() + ".strategy: unknown strategy '" + st +
                      "' (auto, stable_exact, relativistic_exact, drift_only, compound_poisson)");
}

FieldSpec read_field(Section& s, int d)
{
    const std::string fam = s.str("family", "zero");
    FieldSpec f;
    if (fam == "zero")
        f = fields::zero();
    else if (fam == "constant")
        f = fields::constant(vec3(s.nums("value"), s.path() + ".value"));
    else if (fam == "linear")
        f = fields::gradient_linear(s.num("s"), d);
    else if (fam == "uniform_b")
        f = fields::uniform_b(vec3(s.nums("B"), s.path() + ".B"));
    else if (fam == "solenoidal-2d")
        f = fields::solenoidal_2d(s.num("kappa"), s.num("omega"));
    else if (fam == "solenoidal-3d")
        f = fields::solenoidal_3d(s.num("kappa"), s.num("omega"));
    else if (fam == "bump_b")
        f = fields::bump_b(s.num("strength"), s.num("radius"));
    else if (fam == "random")
        f = fields::random_fourier(static_cast<std::uint64_t>(s.integer("seed")), s.num("amplitude"),
                                   static_cast<int>(s.integer("modes", 4)), s.num("L"), d);
    else
        throw ConfigError(s.path() + ".family: unknown field '" + fam +
                          "' (zero, constant, linear, uniform_b, solenoidal-2d, solenoidal-3d, bump_b, random)");
    return f;
}

Potential read_potential(Section& s)
{
    const std::string fam = s.str("family", "zero");
    Potential p;
    if (fam == "zero")
        p = potentials::zero();
    else if (fam == "constant")
        p = potentials::constant(s.num("value"));
    else if (fam == "harmonic")
        p = potentials::harmonic(s.num("omega", 1.0));
    else if (fam == "bump")
        p = potentials::bump(s.num("V0"), s.num("R"), vec3(s.nums("center", std::vector<double>{}), "center"));
    else if (fam == "coulomb-mollified")
        p = potentials::coulomb_mollified(s.num("Z"), s.num("eps"));
    else
        throw ConfigError(s.path() + ".family: unknown potential '" + fam +
                          "' (zero, constant, harmonic, bump, coulomb-mollified)");
    return p;
}

TestFunction read_test_function(Section& s, int d, double box_L)
{
    const std::string fam = s.str("family", "gaussian");
    if (fam != "gaussian") throw ConfigError(s.path() + ".family: only 'gaussian' test functions are built in");
    Vec c = vec3(s.nums("center", std::vector<double>{}), s.path() + ".center");
    const double sigma = s.num("sigma", 1.0);
    const double amp = s.num("amplitude", 1.0);
    return box_L > 0.0 ? periodic_gaussian_function(c, sigma, box_L, d, amp) : gaussian_function(c, sigma, d, amp);
}

std::optional<SpinBlock> read_spin(Section& parent, const FieldSpec& field)
{
    if (!parent.has("spin")) return std::nullopt;
    Section s = parent.sub("spin");
    SpinBlock b;
    const int p = static_cast<int>(s.integer("p", 2));
    if (p < 2) throw ConfigError(s.path() + ".p: needs p >= 2");
    const std::string mode = s.str("mode");
    if (mode == "from_curl") {
        if (p != 2) throw ConfigError(s.path() + ".p: from_curl is the spin-1/2 coupling, p = 2");
        if (!field.curl_b) throw ConfigError(s.path() + ".mode: from_curl needs a d = 3 field with known curl");
        b.coupling = spin12_coupling(field);
    } else if (mode == "constant") {
        auto diag = s.nums("diag", std::vector<double>(p, 0.0));
        auto off = s.cplxs("offdiag");  // row-major [beta-1][alpha-1]
        if (diag.size() != static_cast<size_t>(p)) throw ConfigError(s.path() + ".diag: needs p entries");
        if (off.size() != static_cast<size_t>(p * (p - 1)))
            throw ConfigError(s.path() + ".offdiag: needs (p - 1) * p entries");
        std::vector<std::vector<cplx>> rows(p - 1);
        for (int beta = 0; beta < p - 1; ++beta) rows[beta].assign(off.begin() + beta * p, off.begin() + (beta + 1) * p);
        b.coupling = constant_coupling(p, diag, rows);
    } else if (mode == "constant_W") {
        auto vals = s.cplxs("values");  // W_beta for beta = 1..p-1
        if (vals.size() != static_cast<size_t>(p - 1)) throw ConfigError(s.path() + ".values: needs p - 1 entries");
        SpinConfig sc(p);
        std::vector<OffDiagCoupling> W;
        for (cplx w : vals) W.push_back([w, sc](const Vec&, int alpha) { return w * sc.root(alpha); });
        b.coupling = offdiag_from_W(p, W);
    } else {
        throw ConfigError(s.path() + ".mode: unknown mode '" + mode + "' (from_curl, constant, constant_W)");
    }
    const double eps = s.num("epsilon", 0.0);
    if (eps > 0.0) b.coupling = regularize(b.coupling, eps);
    if (s.flag("absolute_offdiag", false)) b.coupling = absolute_offdiag(b.coupling);
    std::vector<cplx> unit(p, 0.0);
    unit[0] = 1.0;
    b.f_coef = s.cplxs("f_coef", unit);
    b.g_coef = s.cplxs("g_coef", unit);
    if (b.f_coef.size() != static_cast<size_t>(p) || b.g_coef.size() != static_cast<size_t>(p))
        throw ConfigError(s.path() + ": f_coef and g_coef need p entries");
    if (s.has("shift")) b.shift = s.num("shift");
    parent.put_sub("spin", s.finish());
    return b;
}

EstimatorConfig read_estimator(Section& s, int d)
{
    EstimatorConfig c;
    c.d = d;
    c.t = s.num("t", 1.0);
    c.n_paths = static_cast<std::uint64_t>(s.integer("n_paths", 100000));
    c.n_time_steps = static_cast<int>(s.integer("n_time_steps", 32));
    c.n_inner = static_cast<int>(s.integer("n_inner", 4));
    c.n_chunks = static_cast<int>(s.integer("n_chunks", 16));
    c.box_L = s.num("box_L", 0.0);
    const std::string xs = s.str("x_sampling", "gauss_hermite");
    if (xs == "gauss_hermite")
        c.x_sampling = xsampling::GaussHermite{static_cast<int>(s.integer("gh_nodes", 24))};
    else if (xs == "uniform_box")
        c.x_sampling = xsampling::UniformBox{};
    else if (xs == "importance")
        c.x_sampling = xsampling::ImportanceFromF{};
    else
        throw ConfigError(s.path() + ".x_sampling: unknown '" + xs + "' (gauss_hermite, uniform_box, importance)");
    if (s.has("v_plus_cap")) c.v_plus_cap = s.num("v_plus_cap");
    if (s.has("v_minus_cap")) c.v_minus_cap = s.num("v_minus_cap");
    c.condition_on_no_jumps = s.flag("condition_on_no_jumps", true);
    if (c.n_paths == 0 || c.n_chunks < 1 || c.n_time_steps < 1 || c.n_inner < 1)
        throw ConfigError(s.path() + ": n_paths, n_chunks, n_time_steps and n_inner must be positive");
    return c;
}

OracleBlock read_oracle(Section& s, int d)
{
    OracleBlock o;
    o.grid = GridSpec(d, static_cast<int>(s.integer("n", 32)), s.num("L", 8.0));
    const std::string sc = s.str("scheme", "spectral");
    if (sc == "spectral")
        o.scheme = KineticScheme::Spectral;
    else if (sc == "link_phase")
        o.scheme = KineticScheme::LinkPhase;
    else
        throw ConfigError(s.path() + ".scheme: unknown '" + sc + "' (spectral, link_phase)");
    return o;
}

RunConfig parse_run_config(const json& j, std::optional<std::uint64_t> seed, int threads)
{
    Section root(j, "");
    RunConfig rc;
    rc.d = static_cast<int>(root.integer("d", 1));
    if (rc.d < 1 || rc.d > 3) throw ConfigError("d: must be 1, 2 or 3");

    auto take = [&](const std::string& key, auto&& fn) {
        Section s = root.has(key) ? root.sub(key) : Section(json::object(), key);
        auto out = fn(s);
        root.put_sub(key, s.finish());
        return out;
    };
    rc.psi = take("psi", [](Section& s) { return read_psi(s); });
    if (root.has("subordinator"))
        rc.sub = take("subordinator", [&](Section& s) { return read_subordinator(s, rc.psi); });
    rc.field = take("field", [&](Section& s) { return read_field(s, rc.d); });
    rc.potential = take("potential", [](Section& s) { return read_potential(s); });
    rc.cfg = take("estimator", [&](Section& s) { return read_estimator(s, rc.d); });
    rc.f = take("f", [&](Section& s) { return read_test_function(s, rc.d, rc.cfg.box_L); });
    rc.g = take("g", [&](Section& s) { return read_test_function(s, rc.d, rc.cfg.box_L); });
    rc.spin = read_spin(root, rc.field);
    if (root.has("oracle")) rc.oracle = take("oracle", [&](Section& s) { return read_oracle(s, rc.d); });
    if (root.has("output")) rc.chunks_csv = take("output", [](Section& s) { return s.flag("chunks_csv", true); });

    rc.cfg.seed = static_cast<std::uint64_t>(root.integer("seed", 1));
    if (seed) rc.cfg.seed = *seed;
    rc.cfg.threads = std::max(1, threads);
    if (rc.spin) {
        if (rc.spin->shift)
            rc.cfg.spectral_shift = *rc.spin->shift;
        else if (rc.oracle)
            rc.cfg.spectral_shift = spin_spectral_shift(rc.oracle->grid, rc.spin->coupling, rc.field, rc.oracle->scheme);
    }
    rc.resolved = root.finish();
    rc.resolved["seed"] = rc.cfg.seed;
    if (rc.spin) rc.resolved["spin"]["shift"] = rc.cfg.spectral_shift;
    return rc;
}

json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace subfk::cli
