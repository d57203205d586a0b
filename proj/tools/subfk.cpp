// subfk: command-line front end. Each subcommand writes <out-dir>/<name>.json
// (also echoed to stdout) and, where there is tabular detail, <name>.csv.
// Exit codes: 0 success, 2 assumption or check failure, 1 any other error.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "subfk/bernstein.hpp"
#include "subfk/kernels.hpp"
#include "subfk/semigroup.hpp"
#include "subfk/stats.hpp"
#include "subfk/subordinator.hpp"

using namespace subfk;
using namespace subfk::cli;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string out_dir = ".";
    bool timing = false;
};

struct PsiFlags {
    std::string family;
    std::optional<double> alpha, m, a, b;
};

void add_common(CLI::App* sub, Common& c, bool needs_config)
{
    auto* opt = sub->add_option("--config", c.config, "JSON run configuration");
    if (needs_config) opt->required();
    sub->add_option("--seed", c.seed, "master seed (overrides the config)");
    sub->add_option("--threads", c.threads, "worker threads (fallback: SUBFK_THREADS, then 1)");
    sub->add_option("--out-dir", c.out_dir, "directory for JSON and CSV outputs");
    sub->add_flag("--timing", c.timing, "add wallclock seconds to the JSON summary");
}

void add_psi_flags(CLI::App* sub, PsiFlags& p, const std::string& name)
{
    sub->add_option(name, p.family, "stable, relativistic, linear, one_minus_exp, hyperbolic_k1");
    sub->add_option("--alpha", p.alpha, "stable index");
    sub->add_option("--m", p.m, "relativistic mass");
    sub->add_option("--a", p.a, "one_minus_exp / hyperbolic_k1 parameter");
    sub->add_option("--b", p.b, "linear / hyperbolic_k1 parameter");
}

json psi_json(const PsiFlags& p)
{
    json j{{"family", p.family}};
    if (p.alpha) j["alpha"] = *p.alpha;
    if (p.m) j["m"] = *p.m;
    if (p.a) j["a"] = *p.a;
    if (p.b) j["b"] = *p.b;
    return j;
}

int resolve_threads(int flag)
{
    if (flag > 0) return flag;
    if (const char* env = std::getenv("SUBFK_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

class Output {
public:
    Output(const Common& c, std::string name) : c_(c), name_(std::move(name)), start_(std::chrono::steady_clock::now())
    {
    }

    void csv(const std::string& text) { csv_ = text; }

    void write(json summary, const json& resolved)
    {
        const std::string dump = resolved.dump();
        summary["command"] = name_;
        summary["subfk_version"] = kVersion;
        summary["config_hash"] = hex64(fnv1a(dump));
        summary["config"] = resolved;
        if (c_.timing)
            summary["wallclock"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::filesystem::create_directories(c_.out_dir);
        const auto base = std::filesystem::path(c_.out_dir) / name_;
        std::ofstream(base.string() + ".json") << summary.dump(2) << '\n';
        if (!csv_.empty()) {
            std::ofstream out(base.string() + ".csv");
            out << "# subfk " << kVersion << " config " << hex64(fnv1a(dump)) << '\n' << csv_;
        }
        std::cout << summary.dump(2) << '\n';
    }

private:
    const Common& c_;
    std::string name_;
    std::string csv_;
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// ---- bernstein-check -------------------------------------------------------

int run_bernstein(const Common& c, const PsiFlags& pf)
{
    json cfg = c.config.empty() ? json{{"psi", psi_json(pf)}} : load_json_file(c.config);
    Section root(cfg, "");
    Section ps = root.sub("psi");
    auto psi = read_psi(ps);
    root.put_sub("psi", ps.finish());
    const int order = static_cast<int>(root.integer("max_order", 4));
    auto t_list = root.nums("t_list", std::vector<double>{0.5, 1.0, 2.0});
    json resolved = root.finish();

    Output out(c, "bernstein-check");
    std::vector<double> grid;
    for (int i = 0; i <= 48; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 48.0));
    std::ostringstream csv;
    csv << "u,psi,psi_triplet\n";
    double worst_rel = 0.0;
    for (double u : grid) {
        double v = psi(u);
        csv << fmt(u) << ',' << fmt(v) << ',';
        if (psi.has_triplet() && psi.closed_form()) {
            double tr = psi.eval_triplet(u);
            worst_rel = std::max(worst_rel, std::abs(tr - v) / std::max(std::abs(v), 1e-300));
            csv << fmt(tr);
        }
        csv << '\n';
    }
    auto mono = check_complete_monotonicity(psi, grid, t_list, order);
    json checks = json::array();
    for (const auto& ch : mono.checks)
        checks.push_back({{"target", ch.target}, {"t", ch.t}, {"order", ch.order}, {"violations", ch.violations},
                          {"windows", ch.windows}, {"worst_margin", ch.worst_margin}});
    json s{{"psi", psi.name()}, {"monotonicity_pass", mono.pass}, {"checks", checks}};
    if (psi.has_triplet()) {
        auto lb = linear_bound_constants(psi);
        s["linear_bound"] = {{"c1", lb.c1}, {"c2", lb.c2}};
        if (psi.closed_form()) s["closed_vs_triplet_max_rel_diff"] = worst_rel;
    }
    out.csv(csv.str());
    out.write(s, resolved);
    return mono.pass ? 0 : 2;
}

// ---- sample-subordinator ---------------------------------------------------

int run_sample(const Common& c, const PsiFlags& pf, double t, std::uint64_t n, const std::string& strat)
{
    json cfg = c.config.empty()
                   ? json{{"psi", psi_json(pf)}, {"subordinator", {{"strategy", strat}}}, {"t", t}, {"n", n}}
                   : load_json_file(c.config);
    Section root(cfg, "");
    Section ps = root.sub("psi");
    auto psi = read_psi(ps);
    root.put_sub("psi", ps.finish());
    Section ss = root.has("subordinator") ? root.sub("subordinator") : Section(json::object(), "subordinator");
    auto spec = read_subordinator(ss, psi);
    root.put_sub("subordinator", ss.finish());
    t = root.num("t", 1.0);
    n = static_cast<std::uint64_t>(root.integer("n", 100000));
    auto us = root.nums("laplace_u", std::vector<double>{0.5, 1.0, 2.0});
    std::uint64_t seed = static_cast<std::uint64_t>(root.integer("seed", 1));
    if (c.seed) seed = *c.seed;
    json resolved = root.finish();
    resolved["seed"] = seed;

    Output out(c, "sample-subordinator");
    Rng rng(seed, 0);
    RunningStats st;
    std::vector<RunningStats> lap(us.size());
    std::ostringstream csv;
    csv << "T\n";
    for (std::uint64_t i = 0; i < n; ++i) {
        double T = spec.sample_increment(t, rng);
        st.add(T);
        for (size_t k = 0; k < us.size(); ++k) lap[k].add(std::exp(-us[k] * T));
        csv << fmt(T) << '\n';
    }
    json checks = json::array();
    for (size_t k = 0; k < us.size(); ++k) {
        double exact = std::exp(-t * psi(us[k]));
        double se = lap[k].std_error();
        checks.push_back({{"u", us[k]}, {"mc", lap[k].mean}, {"std_error", se}, {"analytic", exact},
                          {"z", se > 0 ? (lap[k].mean - exact) / se : 0.0}});
    }
    out.csv(csv.str());
    out.write({{"sampler", spec.name()}, {"t", t}, {"n", n}, {"mean", st.mean}, {"var", st.variance()},
               {"laplace_checks", checks}},
              resolved);
    return 0;
}

// ---- estimate / oracle-compare / diamagnetic -------------------------------

struct RunResult {
    Estimate e;
    std::optional<cplx> oracle;
};

Estimate run_estimate(const RunConfig& rc)
{
    if (rc.spin) {
        SpinTestFunction f{rc.f, rc.spin->f_coef}, g{rc.g, rc.spin->g_coef};
        auto sub = rc.sub ? *rc.sub : SubordinatorSpec::automatic(rc.psi);
        return estimate_spin(sub, rc.field, rc.spin->coupling, rc.potential, f, g, rc.cfg);
    }
    if (rc.sub) return estimate_spinless(*rc.sub, rc.field, rc.potential, rc.f, rc.g, rc.cfg);
    return estimate_spinless(rc.psi, rc.field, rc.potential, rc.f, rc.g, rc.cfg);
}

cplx run_oracle(const RunConfig& rc)
{
    if (!rc.oracle) throw ConfigError("missing key oracle");
    const auto& o = *rc.oracle;
    if (rc.spin) {
        SpinTestFunction f{rc.f, rc.spin->f_coef}, g{rc.g, rc.spin->g_coef};
        return oracle_spin(o.grid, rc.psi, rc.field, rc.spin->coupling, rc.potential, f, g, rc.cfg.t,
                           rc.cfg.spectral_shift, o.scheme);
    }
    return oracle_spinless(o.grid, rc.psi, rc.field, rc.potential, rc.f, rc.g, rc.cfg.t, o.scheme);
}

json estimate_json(const Estimate& e)
{
    return {{"mean_re", e.mean.real()}, {"mean_im", e.mean.imag()}, {"stderr", e.std_error},
            {"abs_mean", e.companion_abs_mean}, {"abs_stderr", e.companion_std_error}, {"n", e.n}};
}

std::string chunks_csv(const Estimate& e)
{
    std::ostringstream csv;
    csv << "chunk,n,mean_re,mean_im,abs_mean\n";
    for (size_t i = 0; i < e.chunks.size(); ++i)
        csv << i << ',' << e.chunks[i].n << ',' << fmt(e.chunks[i].mean.real()) << ',' << fmt(e.chunks[i].mean.imag())
            << ',' << fmt(e.chunks[i].abs_mean) << '\n';
    return csv.str();
}

int run_estimate_cmd(const Common& c)
{
    auto rc = parse_run_config(load_json_file(c.config), c.seed, resolve_threads(c.threads));
    Output out(c, "estimate");
    auto e = run_estimate(rc);
    if (rc.chunks_csv) out.csv(chunks_csv(e));
    out.write(estimate_json(e), rc.resolved);
    return 0;
}

int run_oracle_compare(const Common& c)
{
    auto rc = parse_run_config(load_json_file(c.config), c.seed, resolve_threads(c.threads));
    Output out(c, "oracle-compare");
    auto e = run_estimate(rc);
    cplx truth = run_oracle(rc);
    double z = z_score(e, truth);
    json s = estimate_json(e);
    s["oracle"] = cplx_json(truth);
    s["z"] = z;
    s["pass"] = z <= 4.0;
    if (rc.chunks_csv) out.csv(chunks_csv(e));
    out.write(s, rc.resolved);
    return z <= 4.0 ? 0 : 2;
}

int run_diamagnetic(const Common& c)
{
    auto rc = parse_run_config(load_json_file(c.config), c.seed, resolve_threads(c.threads));
    Output out(c, "diamagnetic");
    auto e = run_estimate(rc);
    auto d = diamagnetic_check(e);
    json s = estimate_json(e);
    s["sample"] = {{"abs_mean", d.abs_mean}, {"companion_abs_mean", d.companion_abs_mean}, {"gap", d.gap},
                   {"holds", d.holds}};
    bool ok = d.holds;
    if (rc.oracle && !rc.spin) {
        const auto& o = *rc.oracle;
        auto V = rc.potential.is_zero ? Eigen::VectorXd() : sample_potential(o.grid, rc.potential.V);
        double ea = ground_energy(psi_of_operator(discretize_h(o.grid, rc.field, o.scheme), rc.psi), V);
        double e0 = ground_energy(psi_of_operator(discretize_h(o.grid, fields::zero(), o.scheme), rc.psi), V);
        bool holds = ea >= e0 - 1e-10;
        s["operator"] = {{"ground_energy_a", ea}, {"ground_energy_0", e0}, {"holds", holds}};
        ok = ok && holds;
    }
    out.write(s, rc.resolved);
    return ok ? 0 : 2;
}

// ---- kernel ----------------------------------------------------------------

int run_kernel(const Common& c, const PsiFlags& pf, std::optional<double> t, std::optional<double> lambda, int d,
               double r_min, double r_max, int n_r, const std::string& out_path)
{
    json cfg;
    if (c.config.empty()) {
        cfg = {{"psi", psi_json(pf)}, {"d", d}, {"r_min", r_min}, {"r_max", r_max}, {"n_r", n_r}};
        if (t) cfg["t"] = *t;
        if (lambda) cfg["lambda"] = *lambda;
    } else {
        cfg = load_json_file(c.config);
    }
    Section root(cfg, "");
    Section ps = root.sub("psi");
    auto psi = read_psi(ps);
    root.put_sub("psi", ps.finish());
    d = static_cast<int>(root.integer("d", 1));
    r_min = root.num("r_min", 1e-3);
    r_max = root.num("r_max", 50.0);
    n_r = static_cast<int>(root.integer("n_r", 200));
    if (root.has("t")) t = root.num("t");
    if (root.has("lambda")) lambda = root.num("lambda");
    json resolved = root.finish();
    if (t.has_value() == lambda.has_value()) throw ConfigError("give exactly one of t (heat kernel) or lambda (resolvent)");

    Output out(c, "kernel");
    KernelTable tab;
    json s{{"psi", psi.name()}, {"d", d}};
    if (t) {
        auto a = assumption_a_check(psi, *t, d);
        s["assumption_a"] = {{"finite", a.finite}, {"diagnostic", a.diagnostic}};
        tab = heat_kernel(psi, *t, radial_grid(r_min, r_max, n_r), d);
        s["kind"] = "heat";
        s["t"] = *t;
        s["max_frequency"] = tab.max_frequency;
        s["tail_bound"] = tab.tail_bound;
        s["mass"] = tab.mass();
    } else {
        auto radii = radial_grid(r_min, r_max, n_r);
        radii.erase(radii.begin());  // Pi_lambda is evaluated off the origin
        tab = resolvent_kernel(psi, *lambda, radii, d);
        s["kind"] = "resolvent";
        s["lambda"] = *lambda;
    }
    std::ostringstream csv;
    csv << "r,value\n";
    for (size_t i = 0; i < tab.radii.size(); ++i) csv << fmt(tab.radii[i]) << ',' << fmt(tab.values[i]) << '\n';
    if (!out_path.empty()) {
        const auto parent = std::filesystem::path(out_path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        std::ofstream f(out_path);
        f << "# subfk " << kVersion << " config " << hex64(fnv1a(resolved.dump())) << '\n' << csv.str();
        if (!f) throw Error("cannot write " + out_path);
        s["table"] = out_path;
    }
    out.csv(csv.str());
    out.write(s, resolved);
    return 0;
}

// ---- kato ------------------------------------------------------------------

std::vector<Vec> read_probes(Section& root, int d)
{
    std::vector<Vec> probes;
    if (!root.has("probes")) return {Vec{0, 0, 0}};
    // probes are a flat list of d-tuples
    auto flat = root.nums("probes");
    if (flat.size() % static_cast<size_t>(d) != 0) throw ConfigError("probes: length must be a multiple of d");
    for (size_t i = 0; i < flat.size(); i += d) {
        Vec v{0, 0, 0};
        for (int k = 0; k < d; ++k) v[k] = flat[i + k];
        probes.push_back(v);
    }
    return probes;
}

int run_kato(const Common& c)
{
    json cfg = load_json_file(c.config);
    Section root(cfg, "");
    Section ps = root.sub("psi");
    auto psi = read_psi(ps);
    root.put_sub("psi", ps.finish());
    const int d = static_cast<int>(root.integer("d", 3));
    Section vs = root.sub("potential");
    auto V = read_potential(vs);
    root.put_sub("potential", vs.finish());
    auto probes = read_probes(root, d);
    auto t_grid = root.nums("t_grid", std::vector<double>{0.005, 0.01, 0.02, 0.04});
    auto deltas = root.nums("deltas", std::vector<double>{0.05, 0.1, 0.2});
    auto n_paths = static_cast<std::uint64_t>(root.integer("n_paths", 20000));
    auto steps = static_cast<int>(root.integer("n_time_steps", 16));
    std::uint64_t seed = static_cast<std::uint64_t>(root.integer("seed", 1));
    if (c.seed) seed = *c.seed;
    json resolved = root.finish();
    resolved["seed"] = seed;

    Output out(c, "kato");
    auto k1 = kato_condition1_check(V, SubordinatorSpec::automatic(psi), d, t_grid, probes, n_paths, seed, steps);
    auto k3 = kato_condition3_check(V, psi, d, deltas, probes);
    std::ostringstream csv;
    csv << "condition,scale,sup_value,std_error\n";
    json p1 = json::array(), p3 = json::array();
    for (const auto& p : k1.points) {
        p1.push_back({{"t", p.t}, {"sup", p.sup_value}, {"std_error", p.std_error}});
        csv << "1," << fmt(p.t) << ',' << fmt(p.sup_value) << ',' << fmt(p.std_error) << '\n';
    }
    for (const auto& p : k3.points) {
        p3.push_back({{"delta", p.delta}, {"sup", p.sup_value}});
        csv << "3," << fmt(p.delta) << ',' << fmt(p.sup_value) << ",0\n";
    }
    json s{{"psi", psi.name()},
           {"potential", V.name},
           {"condition1", {{"points", p1}, {"log_slope", k1.log_slope}, {"decays", k1.decays}}},
           {"condition3", {{"points", p3}, {"log_slope", k3.log_slope}, {"decays", k3.decays}}},
           {"verdicts_agree", k1.decays == k3.decays}};
    out.csv(csv.str());
    out.write(s, resolved);
    return (k1.decays && k3.decays) ? 0 : 2;
}

// ---- hyper-check -----------------------------------------------------------

int run_hyper(const Common& c)
{
    json cfg = load_json_file(c.config);
    Section root(cfg, "");
    Section ps = root.sub("psi");
    auto psi = read_psi(ps);
    root.put_sub("psi", ps.finish());
    const int d = static_cast<int>(root.integer("d", 1));
    Section os = root.sub("oracle");
    auto o = read_oracle(os, d);
    root.put_sub("oracle", os.finish());
    Section vs = root.has("potential") ? root.sub("potential") : Section(json::object(), "potential");
    auto V = read_potential(vs);
    root.put_sub("potential", vs.finish());
    Section fs = root.has("f") ? root.sub("f") : Section(json::object(), "f");
    auto f = read_test_function(fs, d, 0.0);
    root.put_sub("f", fs.finish());
    const double t = root.num("t", 1.0);
    json resolved = root.finish();

    Output out(c, "hyper-check");
    auto r = hypercontractivity_bound_check(o.grid, psi, V, t, f.eval);
    json s{{"sup_Ptf", r.sup_Ptf},       {"C_t", r.C_t},
           {"C_half", r.C_half},         {"pt_sup", r.pt_sup},
           {"pt_half_sup", r.pt_half_sup}, {"f_l2", r.f_l2},
           {"f_l1", r.f_l1},             {"bound_2_inf", r.bound_2_inf},
           {"bound_1_inf", r.bound_1_inf}, {"holds_2_inf", r.holds_2_inf},
           {"holds_1_inf", r.holds_1_inf}};
    out.write(s, resolved);
    return (r.holds_2_inf && r.holds_1_inf) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"subordinated Feynman-Kac toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;
    PsiFlags pf;

    auto* bern = app.add_subcommand("bernstein-check", "closed form vs triplet and complete monotonicity");
    add_common(bern, common, false);
    add_psi_flags(bern, pf, "--family");

    double t = 1.0;
    std::uint64_t n = 100000;
    std::string strat = "auto";
    auto* samp = app.add_subcommand("sample-subordinator", "draw T_t and check the Laplace identity");
    add_common(samp, common, false);
    add_psi_flags(samp, pf, "--family");
    samp->add_option("--t", t, "time");
    samp->add_option("--n", n, "samples");
    samp->add_option("--strategy", strat, "auto, stable_exact, relativistic_exact, drift_only, compound_poisson");

    auto* est = app.add_subcommand("estimate", "Monte-Carlo (f, e^{-tH} g)");
    add_common(est, common, true);
    auto* cmp = app.add_subcommand("oracle-compare", "estimate against the grid oracle");
    add_common(cmp, common, true);
    auto* dia = app.add_subcommand("diamagnetic", "sample and operator diamagnetic inequalities");
    add_common(dia, common, true);

    std::optional<double> kt, klambda;
    int kd = 1, n_r = 200;
    double r_min = 1e-3, r_max = 50.0;
    std::string kout;
    auto* ker = app.add_subcommand("kernel", "heat or resolvent kernel table");
    add_common(ker, common, false);
    add_psi_flags(ker, pf, "--psi");
    ker->add_option("--t", kt, "heat kernel time");
    ker->add_option("--lambda", klambda, "resolvent parameter");
    ker->add_option("--d", kd, "dimension 1..3");
    ker->add_option("--r-min", r_min, "smallest positive radius");
    ker->add_option("--r-max", r_max, "largest radius");
    ker->add_option("--n-r", n_r, "number of positive radii");
    ker->add_option("--out", kout, "CSV path for the (r, value) table");

    auto* kato = app.add_subcommand("kato", "Kato conditions (1) and (3)");
    add_common(kato, common, true);
    auto* hyp = app.add_subcommand("hyper-check", "L2 -> Linf and L1 -> Linf bounds on the grid");
    add_common(hyp, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*bern) return run_bernstein(common, pf);
        if (*samp) return run_sample(common, pf, t, n, strat);
        if (*est) return run_estimate_cmd(common);
        if (*cmp) return run_oracle_compare(common);
        if (*dia) return run_diamagnetic(common);
        if (*ker) return run_kernel(common, pf, kt, klambda, kd, r_min, r_max, n_r, kout);
        if (*kato) return run_kato(common);
        if (*hyp) return run_hyper(common);
    } catch (const AssumptionError& e) {
        std::cerr << "assumption failed: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
