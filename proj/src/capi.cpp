#include "cyclo/cyclo.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <new>
#include <string>

#include "cyclo/error.hpp"
#include "cyclo/estimate.hpp"
#include "cyclo/filters.hpp"
#include "cyclo/log.hpp"
#include "cyclo/mc.hpp"
#include "cyclo/simulate.hpp"
#include "cyclo/spectral_model.hpp"
#include "cyclo/transform.hpp"

struct cyclo_filter {
    cyclo::FilterPtr filter;
};
struct cyclo_model {
    cyclo::ModelParams model;
};
struct cyclo_scheme {
    cyclo::LevelScheme scheme;
};
struct cyclo_series {
    cyclo::SeriesGrid series;
};
struct cyclo_mc_report {
    cyclo::MCReport report;
};

namespace {

thread_local std::string g_last_error;

struct NullArgument {
    const char* name;
};

template <class T>
T* need(T* p, const char* name)
{
    if (p == nullptr) throw NullArgument{name};
    return p;
}

template <class F>
cyclo_status guard(F&& body)
{
    try {
        body();
        return CYCLO_OK;
    } catch (const cyclo::Error& e) {
        g_last_error = e.what();
        return static_cast<cyclo_status>(static_cast<int>(e.kind()));
    } catch (const NullArgument& e) {
        g_last_error = std::string("null argument: ") + e.name;
        return CYCLO_ERR_NULL;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CYCLO_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CYCLO_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return CYCLO_ERR_INTERNAL;
    }
}

char* duplicate(const std::string& s)
{
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

nlohmann::ordered_json num(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); }

nlohmann::ordered_json reference_entry(std::optional<double> reference, double computed)
{
    nlohmann::ordered_json j;
    j["computed"] = computed;
    if (reference) {
        const double rel = std::abs(computed - *reference) / std::abs(*reference);
        j["reference"] = *reference;
        j["relative_difference"] = rel;
        j["agrees"] = rel <= 1e-8;
    } else {
        j["reference"] = nullptr;
    }
    return j;
}

void copy_matrix(const Eigen::Matrix2d& m, double* out)
{
    out[0] = m(0, 0);
    out[1] = m(0, 1);
    out[2] = m(1, 0);
    out[3] = m(1, 1);
}

}  // namespace

extern "C" {

const char* cyclo_version(void) { return "1.0.0"; }

const char* cyclo_last_error(void) { return g_last_error.c_str(); }

const char* cyclo_status_name(cyclo_status status)
{
    switch (status) {
    case CYCLO_OK: return "ok";
    case CYCLO_ERR_DOMAIN: return "domain";
    case CYCLO_ERR_CONFIG: return "config";
    case CYCLO_ERR_NUMERICAL: return "numerical";
    case CYCLO_ERR_COVERAGE: return "coverage";
    case CYCLO_ERR_SINGULARITY: return "singularity";
    case CYCLO_ERR_NULL: return "null-argument";
    case CYCLO_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

void cyclo_string_free(char* s) { std::free(s); }

void cyclo_set_warning_handler(cyclo_warning_fn fn, void* user)
{
    if (fn == nullptr)
        cyclo::set_warning_handler({});
    else
        cyclo::set_warning_handler([fn, user](const std::string& msg) { fn(msg.c_str(), user); });
}

/* ---- filters ---- */

cyclo_status cyclo_filter_create(const char* name, double sigma, cyclo_filter** out)
{
    return guard([&] {
        need(out, "out");
        *out = new cyclo_filter{cyclo::filter_by_name(need(name, "name"), sigma)};
    });
}

cyclo_status cyclo_filter_create_tabulated(const char* name, const double* eta, const double* values, size_t n,
                                           cyclo_filter** out)
{
    return guard([&] {
        need(out, "out");
        need(eta, "eta");
        need(values, "values");
        *out = new cyclo_filter{cyclo::tabulated_filter(need(name, "name"), std::vector<double>(eta, eta + n),
                                                        std::vector<double>(values, values + n))};
    });
}

void cyclo_filter_destroy(cyclo_filter* filter) { delete filter; }

cyclo_status cyclo_filter_get_info(const cyclo_filter* filter, cyclo_filter_info* out)
{
    return guard([&] {
        const auto& f = *need(filter, "filter")->filter;
        need(out, "out");
        *out = {f.support_lo(), f.support_hi(), f.L0(), f.L2(), f.has_time_form() ? 1 : 0,
                f.time_form_approximate() ? 1 : 0, f.time_radius()};
    });
}

cyclo_status cyclo_filter_name(const cyclo_filter* filter, const char** out)
{
    return guard([&] { *need(out, "out") = need(filter, "filter")->filter->name().c_str(); });
}

cyclo_status cyclo_filter_psi_hat(const cyclo_filter* filter, double eta, double* out)
{
    return guard([&] { *need(out, "out") = need(filter, "filter")->filter->psi_hat(eta); });
}

cyclo_status cyclo_filter_psi_time(const cyclo_filter* filter, double t, double* out)
{
    return guard([&] { *need(out, "out") = need(filter, "filter")->filter->psi_time(t); });
}

cyclo_status cyclo_filter_moment(const cyclo_filter* filter, int power, int use_simpson, double* out)
{
    return guard([&] { *need(out, "out") = need(filter, "filter")->filter->moment(power, use_simpson != 0); });
}

cyclo_status cyclo_filter_quartic(const cyclo_filter* filter, int use_simpson, double* out)
{
    return guard([&] { *need(out, "out") = need(filter, "filter")->filter->quartic_integral(use_simpson != 0); });
}

cyclo_status cyclo_filter_effective_support(const cyclo_filter* filter, double tol, double* b_eff, double* a_eff)
{
    return guard([&] {
        const auto [b, a] = cyclo::effective_support(*need(filter, "filter")->filter, tol);
        *need(b_eff, "b_eff") = b;
        *need(a_eff, "a_eff") = a;
    });
}

cyclo_status cyclo_periodized_energy(const cyclo_filter* filter, double eta, double c, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::periodized_energy(*need(filter, "filter")->filter, eta, c); });
}

cyclo_status cyclo_i_of_c(const cyclo_filter* filter, double c, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::i_of_c(*need(filter, "filter")->filter, c); });
}

cyclo_status cyclo_i_of_c_quadrature(const cyclo_filter* filter, double c, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::i_of_c_quadrature(*need(filter, "filter")->filter, c); });
}

cyclo_status cyclo_shannon_i_closed(double c, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::shannon_i_closed(c); });
}

cyclo_status cyclo_filter_info_json(const cyclo_filter* filter, const double* c_values, size_t n_c, char** json)
{
    return guard([&] {
        const auto& f = *need(filter, "filter")->filter;
        need(json, "json");
        if (n_c > 0) need(c_values, "c_values");
        nlohmann::ordered_json j;
        j["name"] = f.name();
        j["support"] = {{"B", f.support_lo()}, {"A", f.support_hi()}};
        j["L0"] = reference_entry(f.reference().L0, f.L0());
        j["L2"] = reference_entry(f.reference().L2, f.L2());
        j["L0_simpson"] = f.moment(0, true);
        j["L2_simpson"] = f.moment(2, true);
        j["quartic"] = reference_entry(f.reference().quartic, f.quartic_integral());
        j["time_form"] = {{"available", f.has_time_form()},
                          {"approximate", f.time_form_approximate()},
                          {"radius", f.time_radius()}};
        auto list = nlohmann::ordered_json::array();
        for (size_t i = 0; i < n_c; ++i) list.push_back({{"c", c_values[i]}, {"I", cyclo::i_of_c(f, c_values[i])}});
        j["I_of_c"] = std::move(list);
        *json = duplicate(j.dump(2));
    });
}

/* ---- spectral model ---- */

cyclo_status cyclo_model_create(double s0, double alpha, cyclo_model** out)
{
    return guard([&] {
        need(out, "out");
        *out = new cyclo_model{cyclo::make_model(s0, alpha)};
    });
}

cyclo_status cyclo_model_create_with_taper(double s0, double alpha, cyclo_taper_fn taper, void* user,
                                           const char* name, cyclo_model** out)
{
    return guard([&] {
        need(out, "out");
        need(taper, "taper");
        *out = new cyclo_model{
            cyclo::make_model(s0, alpha, [taper, user](double lam) { return taper(lam, user); }, need(name, "name"))};
    });
}

cyclo_status cyclo_model_from_gegenbauer(double u, double d, double sigma_eps, cyclo_model** out)
{
    return guard([&] {
        need(out, "out");
        *out = new cyclo_model{cyclo::gegenbauer_to_model({u, d, sigma_eps})};
    });
}

void cyclo_model_destroy(cyclo_model* model) { delete model; }

cyclo_status cyclo_model_params(const cyclo_model* model, double* s0, double* alpha)
{
    return guard([&] {
        need(model, "model");
        *need(s0, "s0") = model->model.s0;
        *need(alpha, "alpha") = model->model.alpha;
    });
}

cyclo_status cyclo_default_taper(double lambda, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::default_taper(lambda); });
}

cyclo_status cyclo_spectral_density(const cyclo_model* model, double lambda, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::spectral_density(need(model, "model")->model, lambda); });
}

cyclo_status cyclo_spectral_mass(const cyclo_model* model, double lo, double hi, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::spectral_mass(need(model, "model")->model, lo, hi); });
}

cyclo_status cyclo_i_zeta(const cyclo_model* model, const cyclo_filter* filter, double zeta, double x, double* out)
{
    return guard([&] {
        *need(out, "out") = cyclo::i_zeta(need(model, "model")->model, *need(filter, "filter")->filter, zeta, x);
    });
}

cyclo_status cyclo_coefficient_covariance(const cyclo_model* model, const cyclo_filter* filter, double a,
                                          double lag_distance, double* out)
{
    return guard([&] {
        *need(out, "out") =
            cyclo::coefficient_covariance(need(model, "model")->model, *need(filter, "filter")->filter, a, lag_distance);
    });
}

cyclo_status cyclo_coefficient_variance_direct(const cyclo_model* model, const cyclo_filter* filter, double a,
                                               double* out)
{
    return guard([&] {
        *need(out, "out") =
            cyclo::coefficient_variance_direct(need(model, "model")->model, *need(filter, "filter")->filter, a);
    });
}

cyclo_status cyclo_quadratic_variance(const cyclo_model* model, const cyclo_filter* filter, double a, double gamma,
                                      int64_t m, double* out)
{
    return guard([&] {
        *need(out, "out") =
            cyclo::quadratic_variance(need(model, "model")->model, *need(filter, "filter")->filter, a, gamma, m);
    });
}

/* ---- level schemes ---- */

void cyclo_scheme_spec_default(cyclo_scheme_spec* spec)
{
    if (spec == nullptr) return;
    *spec = cyclo_scheme_spec{};
    spec->scale_kind = CYCLO_SCALE_GEOMETRIC;
    spec->base = 2.0;
    spec->step = 1.0;
    spec->shift_kind = CYCLO_SHIFT_PROPORTIONAL;
    spec->c = 1.0;
    spec->gamma = 1.0;
    spec->count_kind = CYCLO_COUNT_CONSTANT;
    spec->m = 4096;
    spec->m_coef = 1.0;
    spec->m_power = 3.0;
    spec->M_cap = int64_t{1} << 22;
}

cyclo_status cyclo_scheme_create(const cyclo_scheme_spec* spec, cyclo_scheme** out)
{
    return guard([&] {
        need(spec, "spec");
        need(out, "out");
        using S = cyclo::LevelScheme;
        S s;
        switch (spec->scale_kind) {
        case CYCLO_SCALE_GEOMETRIC: s.scale = S::Scale::Geometric; break;
        case CYCLO_SCALE_LINEAR: s.scale = S::Scale::Linear; break;
        case CYCLO_SCALE_EXPLICIT:
            s.scale = S::Scale::Explicit;
            if (spec->a_count > 0) need(spec->a_list, "a_list");
            s.a_list.assign(spec->a_list, spec->a_list + spec->a_count);
            break;
        default: cyclo::fail(cyclo::ErrorKind::Config, "scheme: unknown scale kind");
        }
        s.base = spec->base;
        s.step = spec->step;
        switch (spec->shift_kind) {
        case CYCLO_SHIFT_PROPORTIONAL: s.shift = S::Shift::Proportional; break;
        case CYCLO_SHIFT_CONSTANT: s.shift = S::Shift::Constant; break;
        default: cyclo::fail(cyclo::ErrorKind::Config, "scheme: unknown shift kind");
        }
        s.c = spec->c;
        s.gamma_const = spec->gamma;
        switch (spec->count_kind) {
        case CYCLO_COUNT_CONSTANT: s.count = S::Count::Constant; break;
        case CYCLO_COUNT_POWER: s.count = S::Count::Power; break;
        case CYCLO_COUNT_EXPLICIT:
            s.count = S::Count::Explicit;
            if (spec->m_count > 0) need(spec->m_list, "m_list");
            s.m_list.assign(spec->m_list, spec->m_list + spec->m_count);
            break;
        default: cyclo::fail(cyclo::ErrorKind::Config, "scheme: unknown count kind");
        }
        s.m_const = spec->m;
        s.m_coef = spec->m_coef;
        s.m_power = spec->m_power;
        if (spec->M_cap > 0)
            s.M_cap = spec->M_cap;
        else
            s.M_cap.reset();
        cyclo::check_scheme(s, 1, std::min(s.max_level(), 1));
        *out = new cyclo_scheme{std::move(s)};
    });
}

void cyclo_scheme_destroy(cyclo_scheme* scheme) { delete scheme; }

cyclo_status cyclo_scheme_level(const cyclo_scheme* scheme, int j, double* a, double* gamma, int64_t* m)
{
    return guard([&] {
        const auto& s = need(scheme, "scheme")->scheme;
        cyclo::check_scheme(s, j, j);
        if (a) *a = s.a(j);
        if (gamma) *gamma = s.gamma(j);
        if (m) *m = s.m(j);
    });
}

cyclo_status cyclo_scheme_c(const cyclo_scheme* scheme, double* c)
{
    return guard([&] { *need(c, "c") = need(scheme, "scheme")->scheme.c_limit(); });
}

cyclo_status cyclo_compute_M(const cyclo_scheme* scheme, int j, int64_t* M, double* uncapped, int* capped)
{
    return guard([&] {
        const auto r = cyclo::compute_M(need(scheme, "scheme")->scheme, j);
        if (M) *M = r.value;
        if (uncapped) *uncapped = r.uncapped;
        if (capped) *capped = r.capped ? 1 : 0;
    });
}

cyclo_status cyclo_validate_scheme_json(const cyclo_scheme* scheme, const cyclo_filter* filter, int j_lo, int j_hi,
                                        char** json)
{
    return guard([&] {
        need(json, "json");
        const auto rep = cyclo::validate_scheme(need(scheme, "scheme")->scheme, *need(filter, "filter")->filter, j_lo, j_hi);
        nlohmann::ordered_json j;
        j["A_eff"] = rep.A_eff;
        j["B_eff"] = rep.B_eff;
        j["support_ratio"] = num(rep.support_ratio);
        j["conforms_ratio_limit"] = rep.conforms_3prime;
        auto levels = nlohmann::ordered_json::array();
        for (const auto& l : rep.levels)
            levels.push_back({{"j", l.j},
                              {"m_over_a4", l.m_over_a4},
                              {"m_over_a4_decreasing", l.m_over_a4_decreasing},
                              {"scale_ratio", l.scale_ratio},
                              {"scale_ratio_ok", l.ratio_ok},
                              {"c_gap", num(l.c_gap)},
                              {"c_gap_nonincreasing", l.c_gap_nonincreasing},
                              {"disjoint_next_supports", l.disjoint_next}});
        j["levels"] = std::move(levels);
        j["warnings"] = rep.warnings;
        *json = duplicate(j.dump(2));
    });
}

/* ---- series and simulation ---- */

cyclo_status cyclo_series_create(double t0, double dt, const double* values, size_t n, cyclo_series** out)
{
    return guard([&] {
        need(out, "out");
        if (n > 0) need(values, "values");
        cyclo::require(dt > 0.0 && n >= 1, cyclo::ErrorKind::Domain, "series: need dt > 0 and at least one sample");
        for (size_t i = 0; i < n; ++i)
            cyclo::require(std::isfinite(values[i]), cyclo::ErrorKind::Domain, "series: values must be finite");
        *out = new cyclo_series{{t0, dt, std::vector<double>(values, values + n)}};
    });
}

void cyclo_series_destroy(cyclo_series* series) { delete series; }

cyclo_status cyclo_series_info(const cyclo_series* series, double* t0, double* dt, size_t* n)
{
    return guard([&] {
        const auto& s = need(series, "series")->series;
        if (t0) *t0 = s.t0;
        if (dt) *dt = s.dt;
        if (n) *n = s.n();
    });
}

cyclo_status cyclo_series_values(const cyclo_series* series, const double** values)
{
    return guard([&] { *need(values, "values") = need(series, "series")->series.values.data(); });
}

cyclo_status cyclo_gegenbauer_coeffs(double u, double d, int N, double* out)
{
    return guard([&] {
        need(out, "out");
        const auto c = cyclo::gegenbauer_coeffs(u, d, N);
        std::copy(c.begin(), c.end(), out);
    });
}

cyclo_status cyclo_gegenbauer_coeff_explicit(double u, double d, int n, double* out, double* cancellation)
{
    return guard([&] { *need(out, "out") = cyclo::gegenbauer_coeff_explicit(u, d, n, cancellation); });
}

cyclo_status cyclo_simulate_gegenbauer(double u, double d, double sigma_eps, size_t len, uint64_t seed,
                                       uint64_t replicate, int truncation_N, cyclo_series** out)
{
    return guard([&] {
        need(out, "out");
        cyclo::SimulationConfig cfg;
        cfg.seed = seed;
        cfg.replicate_index = replicate;
        cfg.truncation_N = truncation_N;
        *out = new cyclo_series{cyclo::simulate_gegenbauer({u, d, sigma_eps}, len, cfg)};
    });
}

cyclo_status cyclo_simulate_spectral(const cyclo_model* model, double t0, double dt, size_t n, double band, int bins,
                                     uint64_t seed, uint64_t replicate, cyclo_series** out)
{
    return guard([&] {
        need(out, "out");
        cyclo::SimulationConfig cfg;
        cfg.seed = seed;
        cfg.replicate_index = replicate;
        *out = new cyclo_series{cyclo::simulate_spectral(need(model, "model")->model, t0, dt, n, band, bins, cfg)};
    });
}

cyclo_status cyclo_simulate_coefficients_exact(const cyclo_model* model, const cyclo_filter* filter, double a,
                                               double gamma, int64_t m, uint64_t seed, uint64_t replicate,
                                               uint64_t stream, double* out)
{
    return guard([&] {
        need(out, "out");
        cyclo::SimulationConfig cfg;
        cfg.seed = seed;
        cfg.replicate_index = replicate;
        cfg.stream = stream;
        const auto block = cyclo::simulate_coefficients_exact(need(model, "model")->model,
                                                              *need(filter, "filter")->filter, a, gamma, m, cfg);
        std::copy(block.values.begin(), block.values.end(), out);
    });
}

/* ---- transform ---- */

cyclo_status cyclo_filter_coefficients(const cyclo_series* series, const cyclo_filter* filter,
                                       const cyclo_scheme* scheme, int j, int64_t count, double* out, double* a_out,
                                       double* gamma_out)
{
    return guard([&] {
        need(out, "out");
        const auto block = cyclo::filter_coefficients(need(series, "series")->series, *need(filter, "filter")->filter,
                                                      need(scheme, "scheme")->scheme, j, count);
        std::copy(block.values.begin(), block.values.end(), out);
        if (a_out) *a_out = block.a;
        if (gamma_out) *gamma_out = block.gamma;
    });
}

/* ---- estimation ---- */

cyclo_status cyclo_mean_square_stat(const double* values, size_t n, double* out)
{
    return guard([&] {
        need(values, "values");
        *need(out, "out") = cyclo::mean_square_stat(std::span<const double>(values, n));
    });
}

cyclo_status cyclo_increment_stat(double dbar_j1, double dbar_j2, double a_j1, double a_j2, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::increment_stat(dbar_j1, dbar_j2, a_j1, a_j2); });
}

cyclo_status cyclo_normalized_stats(double dbar, double dincr, const cyclo_filter* filter, int64_t m,
                                    double increment_weight, const cyclo_model* truth, double* s1, double* s2)
{
    return guard([&] {
        std::optional<double> w;
        if (increment_weight > 0.0) w = increment_weight;
        const auto r = cyclo::normalized_stats(dbar, dincr, *need(filter, "filter")->filter, m,
                                               need(truth, "truth")->model, w);
        *need(s1, "s1") = r.S1;
        *need(s2, "s2") = r.S2;
    });
}

cyclo_status cyclo_phi(double s0, double alpha, double* y1, double* y2)
{
    return guard([&] {
        const auto p = cyclo::phi(s0, alpha);
        *need(y1, "y1") = p.y1;
        *need(y2, "y2") = p.y2;
    });
}

cyclo_status cyclo_phi_inverse(double y1, double y2, double* s0, double* alpha)
{
    return guard([&] {
        const auto p = cyclo::phi_inverse({y1, y2});
        *need(s0, "s0") = p.s0;
        *need(alpha, "alpha") = p.alpha;
    });
}

cyclo_status cyclo_lambert_w0(double y, double* out)
{
    return guard([&] { *need(out, "out") = cyclo::lambert_w0(y); });
}

cyclo_status cyclo_truncate(double y1, double y2, double eps, double* t1, double* t2, int* active, int* degenerate)
{
    return guard([&] {
        const auto t = cyclo::truncate_T(y1, y2, eps);
        *need(t1, "t1") = t.point.y1;
        *need(t2, "t2") = t.point.y2;
        if (active) *active = t.active ? 1 : 0;
        if (degenerate) *degenerate = t.degenerate ? 1 : 0;
    });
}

cyclo_status cyclo_jacobian_phi(double s0, double alpha, double out[4])
{
    return guard([&] { copy_matrix(cyclo::jacobian_phi(s0, alpha), need(out, "out")); });
}

cyclo_status cyclo_adjusted_estimate(double dbar, double dincr, const cyclo_filter* filter, int64_t m, int64_t M,
                                     double c, cyclo_estimate* out)
{
    return guard([&] {
        need(out, "out");
        cyclo::EstimateOptions opts;
        opts.c = c;
        opts.M = M;
        const auto r = cyclo::adjusted_estimate(dbar, dincr, *need(filter, "filter")->filter, m, opts);
        out->delta_bar = r.delta_bar;
        out->delta_incr = r.delta_incr;
        out->y1 = r.moment.y1;
        out->y2 = r.moment.y2;
        out->eps = r.epsilon;
        out->t1 = r.truncated.y1;
        out->t2 = r.truncated.y2;
        out->truncation_active = r.truncation_active ? 1 : 0;
        out->truncation_degenerate = r.truncation_degenerate ? 1 : 0;
        out->s0_hat = r.s0_hat;
        out->alpha_hat = r.alpha_hat;
        copy_matrix(r.V, out->V);
        out->m = r.m;
        out->M = r.M;
    });
}

cyclo_status cyclo_asymptotics_compute(double s0, double alpha, const cyclo_filter* filter, double c,
                                       cyclo_asymptotics* out)
{
    return guard([&] {
        need(out, "out");
        const auto& f = *need(filter, "filter")->filter;
        const auto model = cyclo::make_model(s0, alpha);
        out->L0 = f.L0();
        out->L2 = f.L2();
        out->I_c = cyclo::i_of_c(f, c);
        out->V1 = cyclo::asymptotic_V1(model, f, c);
        copy_matrix(cyclo::asymptotic_covariance(s0, alpha, f.L0(), f.L2(), out->I_c, c), out->V);
        copy_matrix(cyclo::asymptotic_covariance_sandwich(s0, alpha, f.L0(), f.L2(), out->I_c, c), out->V_sandwich);
        out->rho = cyclo::asymptotic_correlation(s0, alpha, f, c);
        copy_matrix(cyclo::jacobian_phi(s0, alpha), out->jacobian);
    });
}

/* ---- Monte Carlo ---- */

void cyclo_mc_config_default(cyclo_mc_config* cfg)
{
    if (cfg == nullptr) return;
    *cfg = cyclo_mc_config{};
    cfg->replicates = 2000;
    cfg->s0 = 2.0;
    cfg->alpha = 0.25;
    cfg->level = 5;
    cfg->simulator = "exact-covariance";
    cfg->seed = 1;
    cfg->workers = 1;
    cfg->gegenbauer_u = 0.3;
    cfg->gegenbauer_d = 0.1;
    cfg->gegenbauer_sigma = 1.0;
    cfg->bins = 4096;
    cfg->truncation_N = 100;
}

cyclo_status cyclo_mc_run(const cyclo_mc_config* cfg, cyclo_mc_report** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        cyclo::MCConfig c;
        c.replicates = cfg->replicates;
        c.simulator = cyclo::simulator_from_string(need(cfg->simulator, "simulator"));
        if (c.simulator == cyclo::Simulator::GegenbauerMA)
            c.gegenbauer = cyclo::GegenbauerParams{cfg->gegenbauer_u, cfg->gegenbauer_d, cfg->gegenbauer_sigma};
        else
            c.truth = cyclo::make_model(cfg->s0, cfg->alpha);
        c.filter = need(cfg->filter, "filter")->filter;
        c.scheme = need(cfg->scheme, "scheme")->scheme;
        c.level = cfg->level;
        c.seed = cfg->seed;
        c.workers = cfg->workers;
        c.band = cfg->band;
        c.bins = cfg->bins;
        c.truncation_N = cfg->truncation_N;
        *out = new cyclo_mc_report{cyclo::run_replicates(c)};
    });
}

void cyclo_mc_report_destroy(cyclo_mc_report* report) { delete report; }

cyclo_status cyclo_mc_report_json(const cyclo_mc_report* report, int include_samples, char** json)
{
    return guard([&] { *need(json, "json") = duplicate(cyclo::report_json(need(report, "report")->report, include_samples != 0)); });
}

cyclo_status cyclo_mc_report_samples(const cyclo_mc_report* report, const double** s1, const double** s2, size_t* n)
{
    return guard([&] {
        const auto& r = need(report, "report")->report;
        *need(s1, "s1") = r.samples_S1.data();
        *need(s2, "s2") = r.samples_S2.data();
        *need(n, "n") = r.samples_S1.size();
    });
}

cyclo_status cyclo_mc_report_estimate(const cyclo_mc_report* report, size_t i, double* s0_hat, double* alpha_hat,
                                      int* truncated)
{
    return guard([&] {
        const auto& r = need(report, "report")->report;
        cyclo::require(i < r.estimates.size(), cyclo::ErrorKind::Domain, "mc report: replicate index out of range");
        *need(s0_hat, "s0_hat") = r.estimates[i].s0_hat;
        *need(alpha_hat, "alpha_hat") = r.estimates[i].alpha_hat;
        if (truncated) *truncated = r.estimates[i].truncated ? 1 : 0;
    });
}

cyclo_status cyclo_mc_report_runtime(const cyclo_mc_report* report, double* seconds)
{
    return guard([&] { *need(seconds, "seconds") = need(report, "report")->report.runtime_seconds; });
}

cyclo_status cyclo_normality_test(const double* samples, size_t n, double* statistic, double* p_value)
{
    return guard([&] {
        need(samples, "samples");
        const auto r = cyclo::normality_test(std::vector<double>(samples, samples + n));
        *need(statistic, "statistic") = r.statistic;
        *need(p_value, "p_value") = r.p_value;
    });
}

cyclo_status cyclo_qq_data(const double* samples, size_t n, double* theoretical, double* sample)
{
    return guard([&] {
        need(samples, "samples");
        need(theoretical, "theoretical");
        need(sample, "sample");
        const auto q = cyclo::qq_data(std::vector<double>(samples, samples + n));
        for (size_t i = 0; i < q.size(); ++i) {
            theoretical[i] = q[i].first;
            sample[i] = q[i].second;
        }
    });
}

cyclo_status cyclo_ellipse(const double* xs, const double* ys, size_t n, double level, double center[2],
                           double axes[2], double* angle)
{
    return guard([&] {
        need(xs, "xs");
        need(ys, "ys");
        const auto e = cyclo::ellipse_data(std::vector<double>(xs, xs + n), std::vector<double>(ys, ys + n), level);
        need(center, "center");
        need(axes, "axes");
        center[0] = e.center[0];
        center[1] = e.center[1];
        axes[0] = e.axes[0];
        axes[1] = e.axes[1];
        *need(angle, "angle") = e.angle;
    });
}

cyclo_status cyclo_periodogram(const cyclo_series* series, double* freq, double* power)
{
    return guard([&] {
        need(freq, "freq");
        need(power, "power");
        const auto p = cyclo::periodogram(need(series, "series")->series);
        for (size_t i = 0; i < p.size(); ++i) {
            freq[i] = p[i].first;
            power[i] = p[i].second;
        }
    });
}

cyclo_status cyclo_sample_autocovariance(const cyclo_series* series, size_t maxlag, double* out)
{
    return guard([&] {
        need(out, "out");
        const auto a = cyclo::sample_autocovariance(need(series, "series")->series, maxlag);
        std::copy(a.begin(), a.end(), out);
    });
}

}  // extern "C"
