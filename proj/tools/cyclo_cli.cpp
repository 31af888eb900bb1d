// Command-line front end. Talks to the library only through its C interface.
#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cli_support.hpp"
#include "cyclo/cyclo.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct LibError : std::runtime_error {
    cyclo_status status;
    LibError(cyclo_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

void check(cyclo_status s)
{
    if (s != CYCLO_OK) throw LibError(s, cyclo_last_error());
}

template <class T, void (*Destroy)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : p(std::exchange(o.p, nullptr)) {}
    ~Handle() { Destroy(p); }
};

using FilterH = Handle<cyclo_filter, cyclo_filter_destroy>;
using ModelH = Handle<cyclo_model, cyclo_model_destroy>;
using SchemeH = Handle<cyclo_scheme, cyclo_scheme_destroy>;
using SeriesH = Handle<cyclo_series, cyclo_series_destroy>;
using ReportH = Handle<cyclo_mc_report, cyclo_mc_report_destroy>;

std::string take(char* s)
{
    std::string out(s);
    cyclo_string_free(s);
    return out;
}

// Library warnings go to stderr and into the manifest.
std::vector<std::string> g_warnings;

void on_warning(const char* msg, void*)
{
    g_warnings.emplace_back(msg);
    std::fprintf(stderr, "warning: %s\n", msg);
}

// ---- key sets ----

using cli::KeySpec;

std::vector<KeySpec> model_keys()
{
    return {{"model", "s0", "2", "singularity location s0 > 1"},
            {"model", "alpha", "0.25", "memory parameter in (0, 1/2)"}};
}

std::vector<KeySpec> gegenbauer_keys()
{
    return {{"gegenbauer", "u", "0.3", "Gegenbauer u in (-1, 1); s0 = arccos(u)"},
            {"gegenbauer", "d", "0.1", "Gegenbauer d in (0, 1/2)"},
            {"gegenbauer", "sigma_eps", "1", "innovation standard deviation"}};
}

std::vector<KeySpec> filter_keys(const std::string& dflt)
{
    return {{"filter", "filter", dflt, "shannon, meyer, mexican_hat or tabulated"},
            {"filter", "sigma", "1", "mexican_hat width"},
            {"filter", "filter_table", "", "CSV with columns eta,psi_hat for a tabulated filter"}};
}

std::vector<KeySpec> scheme_keys(const std::string& m_default)
{
    return {{"scheme", "scale", "geometric", "geometric (a_j = base^j), linear (a_j = step j) or explicit"},
            {"scheme", "base", "2", "geometric base"},
            {"scheme", "step", "1", "linear step"},
            {"scheme", "a_list", "", "explicit a_1,a_2,..."},
            {"scheme", "shift", "proportional", "proportional (gamma_j = a_j / c) or constant"},
            {"scheme", "c", "1", "limit of a_j / gamma_j"},
            {"scheme", "gamma", "1", "constant shift step"},
            {"scheme", "m_rule", "constant", "constant, power (m_coef a_j^m_power) or explicit"},
            {"scheme", "m", m_default, "constant coefficient count"},
            {"scheme", "m_coef", "1", "power rule coefficient"},
            {"scheme", "m_power", "3", "power rule exponent"},
            {"scheme", "m_list", "", "explicit m_1,m_2,..."},
            {"scheme", "M_cap", "4194304", "cap on M_j (0: none)"}};
}

std::vector<KeySpec> output_keys(const std::string& dflt)
{
    return {{"output", "out", dflt, "output directory"}, {"output", "svg", "false", "also render SVG plots"}};
}

template <class... Vs>
std::vector<KeySpec> join(Vs&&... parts)
{
    std::vector<KeySpec> out;
    (out.insert(out.end(), parts.begin(), parts.end()), ...);
    return out;
}

// ---- builders ----

void make_filter(const cli::Config& c, FilterH& f)
{
    const auto name = c.str("filter");
    if (name == "tabulated") {
        const auto path = c.str("filter_table");
        if (path.empty()) throw cli::ConfigError("filter = tabulated needs filter_table");
        const auto t = cli::read_csv(path);
        const auto& eta = t.column("eta");
        const auto& val = t.column("psi_hat");
        check(cyclo_filter_create_tabulated(fs::path(path).stem().string().c_str(), eta.data(), val.data(), eta.size(),
                                            &f.p));
        return;
    }
    check(cyclo_filter_create(name.c_str(), c.real("sigma"), &f.p));
}

void make_scheme(const cli::Config& c, SchemeH& s)
{
    cyclo_scheme_spec spec;
    cyclo_scheme_spec_default(&spec);
    const auto scale = c.str("scale");
    if (scale == "geometric") spec.scale_kind = CYCLO_SCALE_GEOMETRIC;
    else if (scale == "linear") spec.scale_kind = CYCLO_SCALE_LINEAR;
    else if (scale == "explicit") spec.scale_kind = CYCLO_SCALE_EXPLICIT;
    else throw cli::ConfigError("key 'scale': unknown value '" + scale + "'");
    const auto shift = c.str("shift");
    if (shift == "proportional") spec.shift_kind = CYCLO_SHIFT_PROPORTIONAL;
    else if (shift == "constant") spec.shift_kind = CYCLO_SHIFT_CONSTANT;
    else throw cli::ConfigError("key 'shift': unknown value '" + shift + "'");
    const auto rule = c.str("m_rule");
    if (rule == "constant") spec.count_kind = CYCLO_COUNT_CONSTANT;
    else if (rule == "power") spec.count_kind = CYCLO_COUNT_POWER;
    else if (rule == "explicit") spec.count_kind = CYCLO_COUNT_EXPLICIT;
    else throw cli::ConfigError("key 'm_rule': unknown value '" + rule + "'");
    spec.base = c.real("base");
    spec.step = c.real("step");
    const auto a_list = c.reals("a_list");
    std::vector<int64_t> m_list;
    for (long long v : c.integers("m_list")) m_list.push_back(v);
    spec.a_list = a_list.data();
    spec.a_count = a_list.size();
    spec.c = c.real("c");
    spec.gamma = c.real("gamma");
    spec.m = c.integer("m");
    spec.m_coef = c.real("m_coef");
    spec.m_power = c.real("m_power");
    spec.m_list = m_list.data();
    spec.m_count = m_list.size();
    spec.M_cap = c.integer("M_cap");
    check(cyclo_scheme_create(&spec, &s.p));
}

struct Level {
    double a, gamma;
    int64_t m;
};

Level level(const SchemeH& s, int j)
{
    Level l{};
    check(cyclo_scheme_level(s.p, j, &l.a, &l.gamma, &l.m));
    return l;
}

std::vector<std::pair<double, double>> zip(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<std::pair<double, double>> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = {x[i], y[i]};
    return out;
}

std::vector<double> series_values(const SeriesH& s, double* t0, double* dt)
{
    size_t n = 0;
    const double* v = nullptr;
    check(cyclo_series_info(s.p, t0, dt, &n));
    check(cyclo_series_values(s.p, &v));
    return {v, v + n};
}

std::string series_csv(const SeriesH& s)
{
    double t0, dt;
    const auto x = series_values(s, &t0, &dt);
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = t0 + dt * static_cast<double>(i);
    return cli::csv({"t", "x"}, {t, x});
}

// Simulates a series from the [simulation] keys on t0 + i dt, i < n.
void simulate_series(const cli::Config& c, double t0, std::size_t n, SeriesH& out)
{
    const auto sim = c.str("simulator");
    const auto seed = static_cast<uint64_t>(c.integer("seed"));
    const auto rep = static_cast<uint64_t>(c.integer("replicate"));
    if (sim == "gegenbauer-ma" || sim == "gegenbauer") {
        if (c.real("dt") != 1.0) throw cli::ConfigError("key 'dt': the gegenbauer-ma simulator is on the integer grid");
        SeriesH raw;
        check(cyclo_simulate_gegenbauer(c.real("u"), c.real("d"), c.real("sigma_eps"), n, seed, rep,
                                        static_cast<int>(c.integer("truncation_N")), &raw.p));
        double r0, rdt;
        const auto v = series_values(raw, &r0, &rdt);
        check(cyclo_series_create(t0, 1.0, v.data(), v.size(), &out.p));
    } else if (sim == "spectral-bin" || sim == "spectral") {
        ModelH m;
        check(cyclo_model_create(c.real("s0"), c.real("alpha"), &m.p));
        const double s0 = c.real("s0");
        const double band = c.real("band") > 0.0 ? c.real("band") : std::max(2.0 * s0, s0 + 1.0);
        check(cyclo_simulate_spectral(m.p, t0, c.real("dt"), n, band, static_cast<int>(c.integer("bins")), seed,
                                      rep, &out.p));
    } else {
        throw cli::ConfigError("key 'simulator': unknown value '" + sim + "' (expected gegenbauer-ma or spectral-bin)");
    }
}

std::vector<KeySpec> simulation_keys(const std::string& sim, const std::string& n)
{
    return {{"simulation", "simulator", sim, "gegenbauer-ma or spectral-bin"},
            {"simulation", "n", n, "number of samples"},
            {"simulation", "dt", "1", "sampling step"},
            {"simulation", "t0", "0", "first sample time"},
            {"simulation", "band", "0", "spectral-bin band (0: max(2 s0, s0 + 1))"},
            {"simulation", "bins", "4096", "spectral-bin frequency bins"},
            {"simulation", "truncation_N", "1000", "gegenbauer-ma truncation order"},
            {"simulation", "seed", "1", "RNG seed"},
            {"simulation", "replicate", "0", "replicate index of the RNG stream"}};
}

// ---- artifacts ----

struct Run {
    std::string command;
    cli::Config config;
    fs::path out;
    std::vector<std::string> artifacts;
    ordered_json extra = ordered_json::object();
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void emit(const std::string& name, const std::string& content)
    {
        cli::write_file((out / name).string(), content);
        artifacts.push_back(name);
    }

    void manifest()
    {
        ordered_json m;
        m["command"] = command;
        m["version"] = cyclo_version();
        m["config"] = ordered_json::parse(config.to_json());
        m["artifacts"] = artifacts;
        m["warnings"] = g_warnings;
        for (const auto& [k, v] : extra.items()) m[k] = v;
        m["timings"] = {{"total_seconds",
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()}};
        cli::write_file((out / "manifest.json").string(), m.dump(2) + "\n");
    }
};

fs::path prepare_out(const cli::Config& c)
{
    const fs::path out = c.str("out");
    if (out.empty()) throw cli::ConfigError("key 'out' must name a directory");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw cli::RuntimeError("cannot create " + out.string() + ": " + ec.message());
    return out;
}

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

// ---- subcommands ----

void cmd_simulate(Run& run)
{
    const auto& c = run.config;
    run.out = prepare_out(c);
    const auto n = static_cast<std::size_t>(c.integer("n"));
    if (n < 2) throw cli::ConfigError("key 'n' must be at least 2");
    SeriesH s;
    simulate_series(c, c.real("t0"), n, s);
    run.emit("series.csv", series_csv(s));
    if (c.flag("svg")) {
        double t0, dt;
        const auto x = series_values(s, &t0, &dt);
        std::vector<double> t(x.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = t0 + dt * static_cast<double>(i);
        run.emit("series.svg", cli::svg_scatter(zip(t, x), {"Realization", "t", "X(t)", 800, 360, false, true}));
    }
    run.manifest();
}

SeriesH load_series(const std::string& path)
{
    const auto t = cli::read_csv(path);
    const auto& ts = t.column("t");
    const auto& xs = t.column("x");
    if (ts.size() < 2) throw cli::RuntimeError(path + ": need at least two samples");
    const double t0 = ts[0], dt = ts[1] - ts[0];
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (std::abs(ts[i] - (t0 + dt * static_cast<double>(i))) > 1e-9 * std::max(1.0, std::abs(ts[i])))
            throw cli::RuntimeError(path + ": t is not a uniform grid (row " + std::to_string(i + 2) + ")");
    SeriesH s;
    check(cyclo_series_create(t0, dt, xs.data(), xs.size(), &s.p));
    return s;
}

void cmd_transform(Run& run)
{
    const auto& c = run.config;
    if (c.str("series").empty()) throw cli::ConfigError("key 'series' must name a CSV file");
    run.out = prepare_out(c);
    const auto series = load_series(c.str("series"));
    FilterH f;
    make_filter(c, f);
    SchemeH s;
    make_scheme(c, s);
    const int lo = static_cast<int>(c.integer("j_lo")), hi = static_cast<int>(c.integer("j_hi"));
    if (lo < 1 || hi < lo) throw cli::ConfigError("keys 'j_lo', 'j_hi': need 1 <= j_lo <= j_hi");
    char* js = nullptr;
    if (cyclo_validate_scheme_json(s.p, f.p, lo, hi, &js) == CYCLO_OK)
        run.extra["validation"] = ordered_json::parse(take(js));
    else
        run.extra["validation"] = {{"error", cyclo_last_error()}};
    ordered_json levels = ordered_json::array();
    for (int j = lo; j <= hi; ++j) {
        const auto l = level(s, j);
        const int64_t count = c.integer("count") > 0 ? c.integer("count") : l.m;
        std::vector<double> delta(static_cast<std::size_t>(count)), k(delta.size()), b(delta.size());
        check(cyclo_filter_coefficients(series.p, f.p, s.p, j, count, delta.data(), nullptr, nullptr));
        for (std::size_t i = 0; i < delta.size(); ++i) {
            k[i] = static_cast<double>(i + 1);
            b[i] = l.gamma * k[i];
        }
        const std::string name = "level_" + std::to_string(j) + ".csv";
        run.emit(name, cli::csv({"k", "b_jk", "delta"}, {k, b, delta}));
        levels.push_back({{"j", j}, {"a", l.a}, {"gamma", l.gamma}, {"count", count}, {"file", name}});
    }
    run.extra["levels"] = levels;
    run.manifest();
}

void cmd_estimate(Run& run)
{
    const auto& c = run.config;
    FilterH f;
    make_filter(c, f);
    SchemeH s;
    make_scheme(c, s);
    const int j = static_cast<int>(c.integer("level"));
    std::array<std::vector<double>, 3> d;
    const std::array<std::string, 3> keys{"coef_j", "coef_j1", "coef_j2"};
    for (int i = 0; i < 3; ++i) {
        if (c.str(keys[i]).empty()) throw cli::ConfigError("key '" + keys[i] + "' must name a coefficient CSV");
        d[i] = cli::read_csv(c.str(keys[i])).column("delta");
    }
    const auto rows_j = static_cast<int64_t>(d[0].size());
    const auto rows_next = static_cast<int64_t>(std::min(d[1].size(), d[2].size()));
    const int64_t m = c.integer("use_m") > 0 ? c.integer("use_m") : rows_j;
    const int64_t M = c.integer("use_M") > 0 ? c.integer("use_M") : rows_next;
    if (m > rows_j) throw cli::ConfigError("key 'use_m': level j has only " + std::to_string(rows_j) + " coefficients");
    if (M > rows_next) throw cli::ConfigError("key 'use_M': levels j+1, j+2 have only " + std::to_string(rows_next) + " coefficients");
    double cl;
    check(cyclo_scheme_c(s.p, &cl));
    if (!std::isfinite(cl)) throw cli::ConfigError("scheme has no finite c = lim a_j / gamma_j");
    double dbar, d1, d2, dincr;
    check(cyclo_mean_square_stat(d[0].data(), static_cast<size_t>(m), &dbar));
    check(cyclo_mean_square_stat(d[1].data(), static_cast<size_t>(M), &d1));
    check(cyclo_mean_square_stat(d[2].data(), static_cast<size_t>(M), &d2));
    check(cyclo_increment_stat(d1, d2, level(s, j + 1).a, level(s, j + 2).a, &dincr));
    cyclo_estimate e;
    check(cyclo_adjusted_estimate(dbar, dincr, f.p, m, M, cl, &e));
    ordered_json r;
    r["delta_bar"] = number(e.delta_bar);
    r["delta_incr"] = number(e.delta_incr);
    r["y1"] = number(e.y1);
    r["y2"] = number(e.y2);
    r["eps"] = number(e.eps);
    r["truncated"] = {number(e.t1), number(e.t2)};
    r["truncation_active"] = e.truncation_active != 0;
    r["s0_hat"] = number(e.s0_hat);
    r["alpha_hat"] = number(e.alpha_hat);
    r["V"] = {number(e.V[0]), number(e.V[1]), number(e.V[2]), number(e.V[3])};
    r["m_j"] = e.m;
    r["M_j"] = e.M;
    std::cout << r.dump(2) << "\n";
    if (!c.str("out").empty()) {
        run.out = prepare_out(c);
        run.emit("estimate.json", r.dump(2) + "\n");
        run.manifest();
    }
}

void cmd_mc(Run& run)
{
    const auto& c = run.config;
    run.out = prepare_out(c);
    FilterH f;
    make_filter(c, f);
    SchemeH s;
    make_scheme(c, s);
    cyclo_mc_config mc;
    cyclo_mc_config_default(&mc);
    const auto sim = c.str("simulator");
    mc.replicates = c.integer("replicates");
    mc.s0 = c.real("s0");
    mc.alpha = c.real("alpha");
    mc.filter = f.p;
    mc.scheme = s.p;
    mc.level = static_cast<int>(c.integer("level"));
    mc.simulator = sim.c_str();
    mc.seed = static_cast<uint64_t>(c.integer("seed"));
    mc.workers = static_cast<int>(c.integer("workers"));
    mc.gegenbauer_u = c.real("u");
    mc.gegenbauer_d = c.real("d");
    mc.gegenbauer_sigma = c.real("sigma_eps");
    mc.band = c.real("band");
    mc.bins = static_cast<int>(c.integer("bins"));
    mc.truncation_N = static_cast<int>(c.integer("truncation_N"));
    ReportH rep;
    check(cyclo_mc_run(&mc, &rep.p));

    char* js = nullptr;
    check(cyclo_mc_report_json(rep.p, c.flag("include_samples") ? 1 : 0, &js));
    run.emit("report.json", take(js) + "\n");

    const double *s1p, *s2p;
    size_t n;
    check(cyclo_mc_report_samples(rep.p, &s1p, &s2p, &n));
    const std::vector<double> s1(s1p, s1p + n), s2(s2p, s2p + n);
    std::vector<double> idx(n), sh(n), ah(n), tr(n);
    for (size_t i = 0; i < n; ++i) {
        int t;
        check(cyclo_mc_report_estimate(rep.p, i, &sh[i], &ah[i], &t));
        idx[i] = static_cast<double>(i);
        tr[i] = t;
    }
    run.emit("s1_s2.csv", cli::csv({"replicate", "S1", "S2"}, {idx, s1, s2}));
    run.emit("estimates.csv", cli::csv({"replicate", "s0_hat", "alpha_hat", "truncated"}, {idx, sh, ah, tr}));
    std::array<std::vector<double>, 2> qt, qs;
    for (int i = 0; i < 2; ++i) {
        qt[i].resize(n);
        qs[i].resize(n);
        check(cyclo_qq_data(i == 0 ? s1.data() : s2.data(), n, qt[i].data(), qs[i].data()));
        run.emit(i == 0 ? "qq_s1.csv" : "qq_s2.csv", cli::csv({"theoretical", "sample"}, {qt[i], qs[i]}));
    }
    double center[2], axes[2], angle;
    if (cyclo_ellipse(s1.data(), s2.data(), n, 0.95, center, axes, &angle) == CYCLO_OK)
        run.extra["ellipse_95"] = {{"center", {center[0], center[1]}}, {"axes", {axes[0], axes[1]}}, {"angle", angle}};
    if (c.flag("svg")) {
        run.emit("s1_s2.svg", cli::svg_scatter(zip(s1, s2), {"(S1, S2)", "S1", "S2", 560, 560, false, false}));
        run.emit("qq_s1.svg", cli::svg_scatter(zip(qt[0], qs[0]), {"Q-Q plot of S1", "normal quantile", "standardized S1",
                                                                    560, 560, true, false}));
        run.emit("qq_s2.svg", cli::svg_scatter(zip(qt[1], qs[1]), {"Q-Q plot of S2", "normal quantile", "standardized S2",
                                                                    560, 560, true, false}));
    }
    double seconds;
    check(cyclo_mc_report_runtime(rep.p, &seconds));
    run.extra["seed"] = mc.seed;
    run.extra["mc_seconds"] = seconds;
    check(cyclo_mc_report_json(rep.p, 0, &js));
    std::cout << take(js) << "\n";
    run.manifest();
}

void cmd_asymptotics(Run& run)
{
    const auto& c = run.config;
    FilterH f;
    make_filter(c, f);
    const double s0 = c.real("s0"), alpha = c.real("alpha"), cc = c.real("c");
    cyclo_asymptotics a;
    check(cyclo_asymptotics_compute(s0, alpha, f.p, cc, &a));
    const char* name;
    check(cyclo_filter_name(f.p, &name));
    ordered_json r;
    r["filter"] = name;
    r["s0"] = s0;
    r["alpha"] = alpha;
    r["c"] = cc;
    r["L0"] = a.L0;
    r["L2"] = a.L2;
    r["I_c"] = a.I_c;
    r["V1"] = a.V1;
    r["var_S1"] = a.V1 / (a.L0 * a.L0);
    r["var_S2"] = a.V1 / (2.0 * a.L2 * a.L2);
    r["V"] = {a.V[0], a.V[1], a.V[2], a.V[3]};
    r["V_sandwich"] = {a.V_sandwich[0], a.V_sandwich[1], a.V_sandwich[2], a.V_sandwich[3]};
    r["rho"] = number(a.rho);
    r["jacobian"] = {a.jacobian[0], a.jacobian[1], a.jacobian[2], a.jacobian[3]};
    std::cout << r.dump(2) << "\n";
}

// Names a value as a multiple of pi when it is one to 1e-10.
std::string describe(double v)
{
    const std::string num = cli::format_real(v);
    for (int den : {1, 2, 3, 6}) {
        const double k = v * den / kPi;
        const double r = std::round(k);
        if (r >= 1.0 && r <= 60.0 && std::abs(k - r) <= 1e-10 * std::abs(k)) {
            std::string frac = (r == 1.0 ? "" : cli::format_real(r)) + "π";
            if (den != 1) frac += "/" + std::to_string(den);
            return frac + " = " + num;
        }
    }
    return num;
}

void cmd_filters_info(Run& run, const std::string& name, bool json)
{
    auto& c = run.config;
    c.set("filter", name);
    FilterH f;
    make_filter(c, f);
    const auto cs = c.reals("c_values");
    char* js = nullptr;
    check(cyclo_filter_info_json(f.p, cs.data(), cs.size(), &js));
    const auto info = ordered_json::parse(take(js));
    if (json) {
        std::cout << info.dump(2) << "\n";
        return;
    }
    std::cout << "filter: " << info["name"].get<std::string>() << "\n";
    std::cout << "support: [" << cli::format_real(info["support"]["B"].get<double>()) << ", "
              << cli::format_real(info["support"]["A"].get<double>()) << "]\n";
    for (const char* key : {"L0", "L2", "quartic"}) {
        const auto& e = info[key];
        const std::string label = std::string(key) == "quartic" ? "int |psi_hat|^4" : key;
        std::cout << label << " = " << describe(e["computed"].get<double>());
        if (!e["reference"].is_null())
            std::cout << "  (reference " << describe(e["reference"].get<double>()) << ": "
                      << (e["agrees"].get<bool>() ? "agrees" : "differs") << ", relative difference "
                      << cli::format_real(e["relative_difference"].get<double>()) << ")";
        std::cout << "\n";
    }
    const auto& tf = info["time_form"];
    std::cout << "time form: "
              << (tf["available"].get<bool>() ? (tf["approximate"].get<bool>() ? "numerical inversion" : "closed form")
                                              : "none")
              << "\n";
    for (const auto& e : info["I_of_c"])
        std::cout << "I(c = " << cli::format_real(e["c"].get<double>()) << ") = " << describe(e["I"].get<double>())
                  << "\n";
}

void cmd_diagnose(Run& run)
{
    const auto& c = run.config;
    run.out = prepare_out(c);
    FilterH f;
    make_filter(c, f);
    SchemeH s;
    make_scheme(c, s);
    cyclo_filter_info info;
    check(cyclo_filter_get_info(f.p, &info));
    if (!info.has_time_form) throw cli::ConfigError("filter has no time-domain form; diagnose needs one");
    const int lo = static_cast<int>(c.integer("j_lo")), hi = static_cast<int>(c.integer("j_hi"));
    const int64_t count = c.integer("count");
    if (lo < 1 || hi < lo) throw cli::ConfigError("keys 'j_lo', 'j_hi': need 1 <= j_lo <= j_hi");
    if (count < 1) throw cli::ConfigError("key 'count' must be positive");
    // widen the realization until every coefficient window is covered
    const double dt = c.real("dt");
    double t_lo = c.real("t0"), t_hi = c.real("t0") + dt * static_cast<double>(c.integer("n") - 1);
    for (int j = lo; j <= hi; ++j) {
        const auto l = level(s, j);
        t_lo = std::min(t_lo, l.gamma - info.time_radius * l.a);
        t_hi = std::max(t_hi, l.gamma * static_cast<double>(count) + info.time_radius * l.a);
    }
    const double t0 = c.real("t0") - std::ceil((c.real("t0") - t_lo) / dt) * dt;
    const auto n = static_cast<std::size_t>(std::ceil((t_hi - t0) / dt)) + 1;
    SeriesH x;
    simulate_series(c, t0, n, x);
    run.extra["realization"] = {{"t0", t0}, {"n", n}};

    double st0, sdt;
    const auto xs = series_values(x, &st0, &sdt);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = st0 + sdt * static_cast<double>(i);
    run.emit("realization.csv", cli::csv({"t", "x"}, {t, xs}));

    std::vector<double> freq(n / 2 + 1), power(n / 2 + 1);
    check(cyclo_periodogram(x.p, freq.data(), power.data()));
    run.emit("periodogram.csv", cli::csv({"frequency", "power"}, {freq, power}));

    const auto maxlag = static_cast<std::size_t>(c.integer("maxlag"));
    std::vector<double> ac(maxlag + 1), lag(maxlag + 1);
    check(cyclo_sample_autocovariance(x.p, maxlag, ac.data()));
    for (std::size_t h = 0; h <= maxlag; ++h) lag[h] = static_cast<double>(h);
    run.emit("autocovariance.csv", cli::csv({"lag", "autocovariance"}, {lag, ac}));

    std::vector<double> cj, ck, cb, cd;
    for (int j = lo; j <= hi; ++j) {
        const auto l = level(s, j);
        std::vector<double> d(static_cast<std::size_t>(count));
        check(cyclo_filter_coefficients(x.p, f.p, s.p, j, count, d.data(), nullptr, nullptr));
        for (int64_t k = 1; k <= count; ++k) {
            cj.push_back(j);
            ck.push_back(static_cast<double>(k));
            cb.push_back(l.gamma * static_cast<double>(k));
            cd.push_back(d[static_cast<std::size_t>(k - 1)]);
        }
    }
    run.emit("coefficients.csv", cli::csv({"j", "k", "b_jk", "delta"}, {cj, ck, cb, cd}));
    if (c.flag("svg")) {
        run.emit("realization.svg", cli::svg_scatter(zip(t, xs), {"Realization", "t", "X(t)", 800, 360, false, true}));
        run.emit("periodogram.svg",
                 cli::svg_scatter(zip(freq, power), {"Periodogram", "frequency", "power", 800, 360, false, true}));
        run.emit("autocovariance.svg", cli::svg_scatter(zip(lag, ac), {"Sample autocovariance", "lag", "autocovariance",
                                                                         800, 360, false, true}));
    }
    run.manifest();
}

// ---- wiring ----

struct Command {
    std::string name;
    CLI::App* app = nullptr;
    std::unique_ptr<cli::Config> config;
    std::map<std::string, std::string> overrides;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
};

Command& add_command(std::deque<Command>& cmds, CLI::App& parent, const std::string& name, const std::string& help,
                     std::vector<KeySpec> keys, bool config_file = true)
{
    auto& cmd = cmds.emplace_back();
    cmd.name = name;
    cmd.app = parent.add_subcommand(name, help);
    cmd.config = std::make_unique<cli::Config>(std::move(keys));
    if (config_file)
        cmd.app->add_option("--config", cmd.config_path, "key = value config file, or a manifest.json to rerun");
    for (const auto& k : cmd.config->keys()) {
        const std::string dflt = k.default_value.empty() ? "" : " (default " + k.default_value + ")";
        cmd.options[k.key] = cmd.app->add_option("--" + k.key, cmd.overrides[k.key], k.help + dflt);
    }
    return cmd;
}

void resolve(Command& cmd)
{
    if (!cmd.config_path.empty()) cmd.config->load_file(cmd.config_path);
    for (const auto& [key, opt] : cmd.options)
        if (opt->count() > 0) cmd.config->set(key, cmd.overrides[key]);
}

int fail(int code, const std::string& kind, const std::string& message)
{
    ordered_json e;
    e["error"] = {{"kind", kind}, {"message", message}, {"exit_status", code}};
    std::cerr << e.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Filtered method-of-moments estimation for cyclic long-memory processes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cyclo_version()));

    std::deque<Command> cmds;
    add_command(cmds, app, "simulate", "Simulate a series and write series.csv",
                join(model_keys(), gegenbauer_keys(), simulation_keys("gegenbauer-ma", "4096"), output_keys("out")));
    add_command(cmds, app, "transform", "Filter coefficients of a series CSV, one CSV per level",
                join(std::vector<KeySpec>{{"transform", "series", "", "input CSV with columns t,x"},
                                          {"transform", "j_lo", "1", "first level"},
                                          {"transform", "j_hi", "3", "last level"},
                                          {"transform", "count", "0", "coefficients per level (0: m_j)"}},
                     filter_keys("mexican_hat"), scheme_keys("64"), output_keys("out")));
    add_command(cmds, app, "estimate", "Adjusted (s0, alpha) estimate from coefficient CSVs of levels j, j+1, j+2",
                join(std::vector<KeySpec>{{"estimate", "coef_j", "", "level j CSV (column delta)"},
                                          {"estimate", "coef_j1", "", "level j+1 CSV"},
                                          {"estimate", "coef_j2", "", "level j+2 CSV"},
                                          {"estimate", "level", "1", "level j"},
                                          {"estimate", "use_m", "0", "coefficients used at level j (0: all rows)"},
                                          {"estimate", "use_M", "0", "coefficients used at levels j+1, j+2 (0: all rows)"}},
                     filter_keys("mexican_hat"), scheme_keys("64"),
                     std::vector<KeySpec>{{"output", "out", "", "also write estimate.json and a manifest here"}}));
    add_command(cmds, app, "mc", "Monte Carlo study of the normalized statistics and the adjusted estimator",
                join(std::vector<KeySpec>{{"mc", "replicates", "2000", "replicates R"},
                                          {"mc", "level", "5", "level j"},
                                          {"mc", "simulator", "exact-covariance",
                                           "exact-covariance, spectral-bin or gegenbauer-ma"},
                                          {"mc", "seed", "1", "RNG seed"},
                                          {"mc", "workers", "1", "worker threads"},
                                          {"mc", "band", "0", "spectral-bin band (0: automatic)"},
                                          {"mc", "bins", "4096", "spectral-bin frequency bins"},
                                          {"mc", "truncation_N", "100", "gegenbauer-ma truncation order"}},
                     model_keys(), gegenbauer_keys(), filter_keys("shannon"), scheme_keys("4096"),
                     output_keys("out"),
                     std::vector<KeySpec>{{"output", "include_samples", "true", "keep per-replicate arrays in report.json"}}));
    add_command(cmds, app, "asymptotics", "Limit variance, covariance matrix and correlation as JSON",
                join(model_keys(), filter_keys("shannon"),
                     std::vector<KeySpec>{{"asymptotics", "c", "1", "limit of a_j / gamma_j"}}));
    add_command(cmds, app, "diagnose",
                "Realization, periodogram, sample autocovariance and coefficient grid of one simulated series",
                join(model_keys(), gegenbauer_keys(), simulation_keys("gegenbauer-ma", "2048"), filter_keys("mexican_hat"),
                     scheme_keys("64"),
                     std::vector<KeySpec>{{"diagnose", "maxlag", "200", "largest autocovariance lag"},
                                          {"diagnose", "j_lo", "1", "first level of the coefficient grid"},
                                          {"diagnose", "j_hi", "5", "last level of the coefficient grid"},
                                          {"diagnose", "count", "64", "coefficients per level"}},
                     output_keys("out")));

    auto* filters = app.add_subcommand("filters", "Filter constants");
    filters->require_subcommand(1);
    auto& info = add_command(cmds, *filters, "info", "Support, L0, L2, quartic integral and I(c) of a filter",
                             {{"filter", "sigma", "1", "mexican_hat width"},
                              {"filter", "filter_table", "", "CSV with columns eta,psi_hat (name: tabulated)"},
                              {"filter", "filter", "shannon", "filter name"},
                              {"filters", "c_values", "0.5,1,2", "values of c for I(c)"}},
                             false);
    std::string info_name = "shannon";
    bool info_json = false;
    info.app->add_option("name", info_name, "shannon, meyer, mexican_hat or tabulated");
    info.app->add_flag("--json", info_json, "print JSON instead of text");
    info.app->remove_option(info.options["filter"]);
    info.options.erase("filter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "config", e.what());
    }

    cyclo_set_warning_handler(on_warning, nullptr);
    try {
        for (auto& cmd : cmds) {
            if (!cmd.app->parsed()) continue;
            resolve(cmd);
            Run run{cmd.name, *cmd.config, {}, {}};
            if (cmd.name == "simulate") cmd_simulate(run);
            else if (cmd.name == "transform") cmd_transform(run);
            else if (cmd.name == "estimate") cmd_estimate(run);
            else if (cmd.name == "mc") cmd_mc(run);
            else if (cmd.name == "asymptotics") cmd_asymptotics(run);
            else if (cmd.name == "diagnose") cmd_diagnose(run);
            else if (cmd.name == "info") cmd_filters_info(run, info_name, info_json);
            return 0;
        }
    } catch (const cli::ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const LibError& e) {
        return fail(e.status == CYCLO_ERR_CONFIG ? 2 : 1, cyclo_status_name(e.status), e.what());
    } catch (const std::exception& e) {
        return fail(1, "runtime", e.what());
    }
    return fail(2, "config", "no subcommand given");
}
