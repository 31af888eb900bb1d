// Exercises the shared library through its C interface only.
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <json.hpp>
#include <string>
#include <vector>

#include "cyclo/cyclo.h"

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FilterHandle {
    cyclo_filter* p = nullptr;
    explicit FilterHandle(const char* name, double sigma = 1.0) { EXPECT_EQ(cyclo_filter_create(name, sigma, &p), CYCLO_OK); }
    ~FilterHandle() { cyclo_filter_destroy(p); }
};

struct ModelHandle {
    cyclo_model* p = nullptr;
    ModelHandle(double s0, double alpha) { EXPECT_EQ(cyclo_model_create(s0, alpha, &p), CYCLO_OK); }
    ~ModelHandle() { cyclo_model_destroy(p); }
};

nlohmann::json take_json(char* s)
{
    auto j = nlohmann::json::parse(s);
    cyclo_string_free(s);
    return j;
}

}  // namespace

TEST(CApi, VersionAndStatusNames)
{
    EXPECT_STREQ(cyclo_version(), "1.0.0");
    EXPECT_STREQ(cyclo_status_name(CYCLO_OK), "ok");
    EXPECT_STRNE(cyclo_status_name(CYCLO_ERR_CONFIG), cyclo_status_name(CYCLO_ERR_DOMAIN));
}

TEST(CApi, NullArgumentsAreReported)
{
    cyclo_filter* f = nullptr;
    EXPECT_EQ(cyclo_filter_create(nullptr, 1.0, &f), CYCLO_ERR_NULL);
    EXPECT_EQ(cyclo_filter_create("shannon", 1.0, nullptr), CYCLO_ERR_NULL);
    double v = 0.0;
    EXPECT_EQ(cyclo_filter_psi_hat(nullptr, 0.0, &v), CYCLO_ERR_NULL);
    EXPECT_NE(std::string(cyclo_last_error()).find("filter"), std::string::npos);
    cyclo_filter_destroy(nullptr);
    cyclo_model_destroy(nullptr);
    cyclo_mc_report_destroy(nullptr);
    cyclo_string_free(nullptr);
}

TEST(CApi, ErrorKindsMapToCodes)
{
    cyclo_filter* f = nullptr;
    EXPECT_EQ(cyclo_filter_create("haar", 1.0, &f), CYCLO_ERR_CONFIG);
    EXPECT_EQ(f, nullptr);
    EXPECT_NE(std::string(cyclo_last_error()).find("haar"), std::string::npos);
    cyclo_model* m = nullptr;
    EXPECT_EQ(cyclo_model_create(0.5, 0.25, &m), CYCLO_ERR_DOMAIN);
    double s0, alpha;
    EXPECT_EQ(cyclo_phi_inverse(0.5, 0.2, &s0, &alpha), CYCLO_ERR_DOMAIN);
    ModelHandle model(2.0, 0.25);
    double out;
    EXPECT_EQ(cyclo_spectral_density(model.p, 2.0, &out), CYCLO_ERR_SINGULARITY);
}

TEST(CApi, FilterInfoAndJson)
{
    FilterHandle f("shannon");
    cyclo_filter_info info;
    ASSERT_EQ(cyclo_filter_get_info(f.p, &info), CYCLO_OK);
    EXPECT_NEAR(info.L0, 2.0 * kPi, 1e-12);
    EXPECT_NEAR(info.support_hi, kPi, 1e-15);
    EXPECT_TRUE(info.has_time_form);
    const char* name = nullptr;
    ASSERT_EQ(cyclo_filter_name(f.p, &name), CYCLO_OK);
    EXPECT_STREQ(name, "shannon");

    const double cs[] = {0.5, 1.0, 2.0};
    char* s = nullptr;
    ASSERT_EQ(cyclo_filter_info_json(f.p, cs, 3, &s), CYCLO_OK);
    const auto j = take_json(s);
    EXPECT_EQ(j["name"], "shannon");
    EXPECT_NEAR(j["L0"]["computed"].get<double>(), 2.0 * kPi, 1e-12);
    ASSERT_EQ(j["I_of_c"].size(), 3u);
    EXPECT_NEAR(j["I_of_c"][0]["I"].get<double>(), 4.0 * kPi, 1e-12);
}

TEST(CApi, MexicanHatReferenceDisagreementIsReported)
{
    FilterHandle f("mexican_hat", 1.0);
    char* s = nullptr;
    ASSERT_EQ(cyclo_filter_info_json(f.p, nullptr, 0, &s), CYCLO_OK);
    const auto j = take_json(s);
    EXPECT_EQ(j["L0"]["reference"].get<double>(), 2.0);
    EXPECT_FALSE(j["L0"]["agrees"].get<bool>());
}

TEST(CApi, TabulatedFilter)
{
    const double eta[] = {0.0, 1.0, 2.0};
    const double vals[] = {1.0, 1.0, 0.0};
    cyclo_filter* f = nullptr;
    ASSERT_EQ(cyclo_filter_create_tabulated("box", eta, vals, 3, &f), CYCLO_OK);
    double v;
    cyclo_filter_psi_hat(f, 1.5, &v);
    EXPECT_DOUBLE_EQ(v, 0.5);
    cyclo_filter_info info;
    cyclo_filter_get_info(f, &info);
    EXPECT_FALSE(info.has_time_form);
    EXPECT_EQ(cyclo_filter_psi_time(f, 0.0, &v), CYCLO_ERR_CONFIG);
    cyclo_filter_destroy(f);
}

TEST(CApi, AsymptoticsShannon)
{
    FilterHandle f("shannon");
    cyclo_asymptotics a;
    ASSERT_EQ(cyclo_asymptotics_compute(2.0, 0.25, f.p, 1.0, &a), CYCLO_OK);
    EXPECT_NEAR(a.V1, 2.0 * kPi * kPi, 1e-10);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(a.V[i], a.V_sandwich[i], 1e-10 * std::abs(a.V[0]));
    EXPECT_NEAR(a.V[1], a.V[2], 1e-12 * std::abs(a.V[0]));
    EXPECT_GT(a.rho, -1.0);
    EXPECT_LT(a.rho, 1.0);
}

TEST(CApi, PhiRoundTripAndTruncation)
{
    double y1, y2, s0, alpha;
    ASSERT_EQ(cyclo_phi(2.0, 0.25, &y1, &y2), CYCLO_OK);
    EXPECT_NEAR(y1, 0.5, 1e-15);
    ASSERT_EQ(cyclo_phi_inverse(y1, y2, &s0, &alpha), CYCLO_OK);
    EXPECT_NEAR(s0, 2.0, 1e-9);
    EXPECT_NEAR(alpha, 0.25, 1e-9);
    double t1, t2;
    int active, degenerate;
    ASSERT_EQ(cyclo_truncate(1.5, 0.0, 0.01, &t1, &t2, &active, &degenerate), CYCLO_OK);
    EXPECT_TRUE(active);
    EXPECT_FALSE(degenerate);
    EXPECT_LT(t1, 1.0);
    EXPECT_GT(t2, 0.0);
    EXPECT_LT(t2, t1 * t1 / 2.0);
    double w;
    ASSERT_EQ(cyclo_lambert_w0(std::exp(1.0), &w), CYCLO_OK);
    EXPECT_NEAR(w, 1.0, 1e-15);
}

TEST(CApi, SchemeAndComputeM)
{
    cyclo_scheme_spec spec;
    cyclo_scheme_spec_default(&spec);
    EXPECT_EQ(spec.m, 4096);
    const double as[] = {0.5, 1.0, std::sqrt(2.0)};
    spec.scale_kind = CYCLO_SCALE_EXPLICIT;
    spec.a_list = as;
    spec.a_count = 3;
    spec.m = 1;
    cyclo_scheme* s = nullptr;
    ASSERT_EQ(cyclo_scheme_create(&spec, &s), CYCLO_OK);
    int64_t M;
    double unc;
    int capped;
    ASSERT_EQ(cyclo_compute_M(s, 1, &M, &unc, &capped), CYCLO_OK);
    EXPECT_EQ(M, 4);
    EXPECT_FALSE(capped);
    EXPECT_EQ(cyclo_compute_M(s, 2, &M, &unc, &capped), CYCLO_ERR_CONFIG);
    cyclo_scheme_destroy(s);

    cyclo_scheme_spec_default(&spec);
    spec.count_kind = CYCLO_COUNT_POWER;
    ASSERT_EQ(cyclo_scheme_create(&spec, &s), CYCLO_OK);
    FilterHandle mh("mexican_hat");
    char* js = nullptr;
    ASSERT_EQ(cyclo_validate_scheme_json(s, mh.p, 1, 4, &js), CYCLO_OK);
    const auto j = take_json(js);
    ASSERT_EQ(j["levels"].size(), 4u);
    EXPECT_TRUE(j["conforms_ratio_limit"].get<bool>());
    double a, g;
    int64_t m;
    ASSERT_EQ(cyclo_scheme_level(s, 3, &a, &g, &m), CYCLO_OK);
    EXPECT_EQ(a, 8.0);
    EXPECT_EQ(g, 8.0);
    EXPECT_EQ(m, 512);
    cyclo_scheme_destroy(s);
}

TEST(CApi, SeriesTransformRoundTrip)
{
    std::vector<double> zeros(2000, 0.0);
    cyclo_series* x = nullptr;
    ASSERT_EQ(cyclo_series_create(-128.0, 0.5, zeros.data(), zeros.size(), &x), CYCLO_OK);
    cyclo_scheme_spec spec;
    cyclo_scheme_spec_default(&spec);
    cyclo_scheme* s = nullptr;
    ASSERT_EQ(cyclo_scheme_create(&spec, &s), CYCLO_OK);
    FilterHandle mh("mexican_hat");
    std::vector<double> out(10, 1.0);
    double a, g;
    ASSERT_EQ(cyclo_filter_coefficients(x, mh.p, s, 3, 10, out.data(), &a, &g), CYCLO_OK);
    for (double v : out) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(a, 8.0);
    EXPECT_EQ(cyclo_filter_coefficients(x, mh.p, s, 3, 1000, out.data(), nullptr, nullptr), CYCLO_ERR_COVERAGE);
    std::vector<double> freq(1001), power(1001);
    EXPECT_EQ(cyclo_periodogram(x, freq.data(), power.data()), CYCLO_OK);
    cyclo_series_destroy(x);
    cyclo_scheme_destroy(s);
}

TEST(CApi, SimulatorsAreSeeded)
{
    cyclo_series *a = nullptr, *b = nullptr;
    ASSERT_EQ(cyclo_simulate_gegenbauer(0.3, 0.1, 1.0, 500, 7, 0, 100, &a), CYCLO_OK);
    ASSERT_EQ(cyclo_simulate_gegenbauer(0.3, 0.1, 1.0, 500, 7, 0, 100, &b), CYCLO_OK);
    const double *va, *vb;
    cyclo_series_values(a, &va);
    cyclo_series_values(b, &vb);
    EXPECT_EQ(std::memcmp(va, vb, 500 * sizeof(double)), 0);
    cyclo_series_destroy(a);
    cyclo_series_destroy(b);

    ModelHandle model(2.0, 0.25);
    FilterHandle f("shannon");
    std::vector<double> d1(64), d2(64);
    ASSERT_EQ(cyclo_simulate_coefficients_exact(model.p, f.p, 16.0, 16.0, 64, 3, 0, 0, d1.data()), CYCLO_OK);
    ASSERT_EQ(cyclo_simulate_coefficients_exact(model.p, f.p, 16.0, 16.0, 64, 3, 1, 0, d2.data()), CYCLO_OK);
    EXPECT_NE(d1, d2);

    std::vector<double> c(11);
    ASSERT_EQ(cyclo_gegenbauer_coeffs(0.3, 0.1, 10, c.data()), CYCLO_OK);
    EXPECT_EQ(c[0], 1.0);
    EXPECT_NEAR(c[1], 2.0 * 0.3 * 0.1, 1e-17);
}

TEST(CApi, MonteCarloRun)
{
    FilterHandle f("shannon");
    cyclo_scheme_spec spec;
    cyclo_scheme_spec_default(&spec);
    spec.m = 32;
    spec.M_cap = 32;
    cyclo_scheme* s = nullptr;
    ASSERT_EQ(cyclo_scheme_create(&spec, &s), CYCLO_OK);
    cyclo_mc_config cfg;
    cyclo_mc_config_default(&cfg);
    cfg.replicates = 40;
    cfg.filter = f.p;
    cfg.scheme = s;
    cfg.level = 3;
    cyclo_mc_report* r = nullptr;
    ASSERT_EQ(cyclo_mc_run(&cfg, &r), CYCLO_OK);
    const double *s1, *s2;
    size_t n;
    ASSERT_EQ(cyclo_mc_report_samples(r, &s1, &s2, &n), CYCLO_OK);
    EXPECT_EQ(n, 40u);
    char* js = nullptr;
    ASSERT_EQ(cyclo_mc_report_json(r, 0, &js), CYCLO_OK);
    const auto j = take_json(js);
    EXPECT_EQ(j["replicates"], 40);
    EXPECT_FALSE(j.contains("samples_S1"));
    double s0h, ah;
    int tr;
    EXPECT_EQ(cyclo_mc_report_estimate(r, 39, &s0h, &ah, &tr), CYCLO_OK);
    EXPECT_EQ(cyclo_mc_report_estimate(r, 40, &s0h, &ah, &tr), CYCLO_ERR_DOMAIN);
    cyclo_mc_report_destroy(r);

    cfg.simulator = "bootstrap";
    EXPECT_EQ(cyclo_mc_run(&cfg, &r), CYCLO_ERR_CONFIG);
    cfg.simulator = "exact-covariance";
    cfg.filter = nullptr;
    EXPECT_EQ(cyclo_mc_run(&cfg, &r), CYCLO_ERR_NULL);
    cyclo_scheme_destroy(s);
}

TEST(CApi, WarningHandlerReceivesMessages)
{
    std::vector<std::string> seen;
    cyclo_set_warning_handler(
        [](const char* msg, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(msg); }, &seen);
    // a short truncation of a strongly persistent process triggers the tail warning
    cyclo_series* x = nullptr;
    ASSERT_EQ(cyclo_simulate_gegenbauer(0.3, 0.45, 1.0, 50, 1, 0, 5, &x), CYCLO_OK);
    cyclo_series_destroy(x);
    cyclo_set_warning_handler(nullptr, nullptr);
    EXPECT_FALSE(seen.empty());
}

TEST(CApi, StatisticsHelpers)
{
    std::vector<double> xs(200), ys(200);
    for (int i = 0; i < 200; ++i) {
        xs[i] = std::sin(0.37 * i) + 0.01 * i;
        ys[i] = std::cos(1.3 * i);
    }
    double stat, p;
    ASSERT_EQ(cyclo_normality_test(xs.data(), xs.size(), &stat, &p), CYCLO_OK);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    EXPECT_EQ(cyclo_normality_test(xs.data(), 5, &stat, &p), CYCLO_ERR_DOMAIN);
    std::vector<double> th(200), sa(200);
    ASSERT_EQ(cyclo_qq_data(xs.data(), xs.size(), th.data(), sa.data()), CYCLO_OK);
    EXPECT_LT(th.front(), th.back());
    double center[2], axes[2], angle;
    ASSERT_EQ(cyclo_ellipse(xs.data(), ys.data(), xs.size(), 0.95, center, axes, &angle), CYCLO_OK);
    EXPECT_GE(axes[0], axes[1]);
    double ms;
    ASSERT_EQ(cyclo_mean_square_stat(xs.data(), xs.size(), &ms), CYCLO_OK);
    EXPECT_GT(ms, 0.0);
}
