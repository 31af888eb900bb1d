#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cyclo/error.hpp"
#include "cyclo/mc.hpp"
#include "cyclo/simulate.hpp"

using namespace cyclo;

namespace {

constexpr double kPi = std::numbers::pi;

MCConfig small_exact(std::int64_t R, std::int64_t m = 64)
{
    MCConfig cfg;
    cfg.replicates = R;
    cfg.truth = make_model(2.0, 0.25);
    cfg.filter = shannon_filter();
    cfg.scheme.m_const = m;
    cfg.scheme.M_cap = m;
    cfg.level = 3;
    cfg.seed = 11;
    return cfg;
}

MCConfig small_series(Simulator sim)
{
    MCConfig cfg;
    cfg.replicates = 24;
    cfg.filter = mexican_hat_filter(1.0);
    cfg.scheme.m_const = 16;
    cfg.scheme.M_cap = 16;
    cfg.level = 1;
    cfg.simulator = sim;
    cfg.seed = 5;
    cfg.bins = 256;
    cfg.truth = make_model(2.0, 0.25);
    if (sim == Simulator::GegenbauerMA) cfg.gegenbauer = GegenbauerParams{0.3, 0.1, 1.0};
    return cfg;
}

std::vector<double> normal_draws(std::size_t n, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> d;
    std::vector<double> x(n);
    for (auto& v : x) v = d(gen);
    return x;
}

}  // namespace

TEST(RunReplicates, ShapesAndRanges)
{
    const auto rep = run_replicates(small_exact(100));
    EXPECT_EQ(rep.samples_S1.size(), 100u);
    EXPECT_EQ(rep.samples_S2.size(), 100u);
    EXPECT_EQ(rep.estimates.size(), 100u);
    EXPECT_GE(rep.truncation_rate, 0.0);
    EXPECT_LE(rep.truncation_rate, 1.0);
    EXPECT_GE(rep.empirical_var_S1, 0.0);
    EXPECT_GE(rep.empirical_var_S2, 0.0);
    EXPECT_EQ(rep.m, 64);
    EXPECT_EQ(rep.M, 64);
    EXPECT_TRUE(rep.M_capped);
    EXPECT_GT(rep.M_uncapped, 64.0);
    EXPECT_EQ(rep.normality_S1.test, "anderson-darling");
    // theory targets V1 / L0^2 and V1 / (2 L2^2)
    const auto f = shannon_filter();
    EXPECT_NEAR(rep.V1, 4.0 * kPi * std::pow(2.0, -2.0) * 2.0 * kPi, 1e-12);
    EXPECT_NEAR(rep.theory_var_S1, rep.V1 / (f->L0() * f->L0()), 1e-14);
    EXPECT_NEAR(rep.theory_var_S2, rep.V1 / (2.0 * f->L2() * f->L2()), 1e-14);
}

TEST(RunReplicates, DeterministicOnRerun)
{
    const auto a = report_json(run_replicates(small_exact(2)));
    const auto b = report_json(run_replicates(small_exact(2)));
    EXPECT_EQ(a, b);
    auto other = small_exact(2);
    other.seed = 12;
    EXPECT_NE(report_json(run_replicates(other)), a);
}

TEST(RunReplicates, ByteIdenticalAcrossWorkerCounts)
{
    std::string first;
    for (int w : {1, 4, 16}) {
        auto cfg = small_exact(150);
        cfg.workers = w;
        const auto js = report_json(run_replicates(cfg));
        if (first.empty())
            first = js;
        else
            EXPECT_EQ(js, first) << w;
    }
}

TEST(RunReplicates, ReplicatePrefixIsStable)
{
    // replicate r depends only on (seed, r), not on R
    const auto a = run_replicates(small_exact(40));
    const auto b = run_replicates(small_exact(70));
    for (std::size_t r = 0; r < 40; ++r) EXPECT_EQ(a.samples_S1[r], b.samples_S1[r]);
}

TEST(RunReplicates, SeriesSimulatorsRun)
{
    for (auto sim : {Simulator::SpectralBin, Simulator::GegenbauerMA}) {
        const auto rep = run_replicates(small_series(sim));
        EXPECT_EQ(rep.samples_S1.size(), 24u);
        for (double v : rep.samples_S1) EXPECT_TRUE(std::isfinite(v));
        EXPECT_EQ(rep.simulator, to_string(sim));
    }
    const auto g = run_replicates(small_series(Simulator::GegenbauerMA));
    EXPECT_NEAR(g.truth_s0, std::acos(0.3), 1e-15);
}

TEST(RunReplicates, ConfigErrors)
{
    auto cfg = small_exact(1);
    EXPECT_THROW(run_replicates(cfg), Error);
    cfg = small_exact(10);
    cfg.filter = nullptr;
    EXPECT_THROW(run_replicates(cfg), Error);
    cfg = small_series(Simulator::GegenbauerMA);
    cfg.gegenbauer.reset();
    EXPECT_THROW(run_replicates(cfg), Error);
    cfg = small_series(Simulator::SpectralBin);
    cfg.filter = tabulated_filter("t", {0.0, 1.0}, {1.0, 0.0});
    EXPECT_THROW(run_replicates(cfg), Error);
    EXPECT_THROW(simulator_from_string("bootstrap"), Error);
    EXPECT_EQ(simulator_from_string("exact-covariance"), Simulator::ExactCovariance);
}

TEST(Normality, NullRarelyRejects)
{
    int accepted = 0;
    for (unsigned t = 0; t < 100; ++t)
        if (normality_test(normal_draws(10000, 1000 + t)).p_value > 0.01) ++accepted;
    EXPECT_GE(accepted, 98);
}

TEST(Normality, UniformAndConstant)
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u;
    std::vector<double> x(10000);
    for (auto& v : x) v = u(gen);
    EXPECT_LT(normality_test(x).p_value, 0.01);
    EXPECT_EQ(normality_test(std::vector<double>(50, 2.5)).p_value, 0.0);
    EXPECT_THROW(normality_test(std::vector<double>(19, 1.0)), Error);
}

TEST(Normality, ReferenceStatistic)
{
    // A^2 for the normal quantiles themselves is tiny; a heavy-tailed sample is large
    std::vector<double> q;
    for (const auto& pt : qq_data(normal_draws(200, 4))) q.push_back(pt.first);
    EXPECT_GT(normality_test(q).p_value, 0.5);
    std::vector<double> cauchy(2000);
    std::mt19937_64 gen(8);
    std::cauchy_distribution<double> c;
    for (auto& v : cauchy) v = c(gen);
    EXPECT_LT(normality_test(cauchy).p_value, 1e-6);
}

TEST(QQ, DiagonalForNormalQuantiles)
{
    const auto base = qq_data(normal_draws(500, 1));
    std::vector<double> theo(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) theo[i] = base[i].first;
    // the quantiles have mean 0, so standardizing only divides by their sd; scale and order are irrelevant
    double s = 0.0;
    for (double v : theo) s += v * v;
    const double sd = std::sqrt(s / (theo.size() - 1));
    std::vector<double> scaled(theo);
    for (auto& v : scaled) v *= 3.0;
    std::reverse(scaled.begin(), scaled.end());
    const auto out = qq_data(scaled);
    ASSERT_EQ(out.size(), theo.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i].second * sd, out[i].first, 1e-9);
    for (std::size_t i = 1; i < out.size(); ++i) {
        EXPECT_GT(out[i].first, out[i - 1].first);
        EXPECT_GE(out[i].second, out[i - 1].second);
    }
    EXPECT_THROW(qq_data(std::vector<double>(5, 1.0)), Error);
}

TEST(Ellipse, IsotropicAndRotation)
{
    const auto x = normal_draws(200000, 21);
    const auto y = normal_draws(200000, 22);
    const auto e = ellipse_data(x, y, 0.95);
    EXPECT_NEAR(e.axes[0] / e.axes[1], 1.0, 0.02);
    EXPECT_NEAR(e.axes[0], std::sqrt(-2.0 * std::log(0.05)), 0.02);

    // stretched along x, then rotated by 90 degrees
    std::vector<double> sx(x), ry(x.size()), rx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx[i] = 3.0 * x[i] + 0.5 * y[i];
        rx[i] = -y[i];
        ry[i] = sx[i];
    }
    const auto a = ellipse_data(sx, y, 0.9);
    const auto b = ellipse_data(rx, ry, 0.9);
    EXPECT_NEAR(a.axes[0], b.axes[0], 1e-9 * a.axes[0]);
    EXPECT_NEAR(a.axes[1], b.axes[1], 1e-9 * a.axes[0]);
    double shift = b.angle - a.angle;
    if (shift < 0.0) shift += kPi;
    EXPECT_NEAR(shift, kPi / 2.0, 1e-9);
    EXPECT_GT(a.angle, -kPi / 2.0);
    EXPECT_LE(a.angle, kPi / 2.0);
}

TEST(Ellipse, CoverageOfStandardNormalPairs)
{
    const auto x = normal_draws(100000, 31);
    const auto y = normal_draws(100000, 32);
    const auto e = ellipse_data(x, y, 0.95);
    const double ca = std::cos(e.angle), sa = std::sin(e.angle);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - e.center[0], dy = y[i] - e.center[1];
        const double u = (ca * dx + sa * dy) / e.axes[0];
        const double v = (-sa * dx + ca * dy) / e.axes[1];
        if (u * u + v * v <= 1.0) ++inside;
    }
    EXPECT_NEAR(static_cast<double>(inside) / x.size(), 0.95, 0.01);
}

TEST(Ellipse, Errors)
{
    EXPECT_THROW(ellipse_data({1.0, 2.0}, {1.0, 2.0}, 0.9), Error);
    EXPECT_THROW(ellipse_data({1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}, 0.9), Error);
    EXPECT_THROW(ellipse_data({1.0, 2.0, 3.0}, {1.0, 0.0, 1.0}, 1.0), Error);
}

TEST(Periodogram, ConstantCosineParseval)
{
    SeriesGrid c{0.0, 1.0, std::vector<double>(64, 2.0)};
    const auto pc = periodogram(c);
    ASSERT_EQ(pc.size(), 33u);
    EXPECT_NEAR(pc[0].second, 64.0 * 4.0 / (2.0 * kPi), 1e-10);
    for (std::size_t k = 1; k < pc.size(); ++k) EXPECT_NEAR(pc[k].second, 0.0, 1e-10);

    const std::size_t n = 128, k0 = 9;
    SeriesGrid cs{0.0, 1.0, std::vector<double>(n)};
    for (std::size_t t = 0; t < n; ++t) cs.values[t] = std::cos(2.0 * kPi * k0 * t / n);
    const auto p = periodogram(cs);
    EXPECT_NEAR(p[k0].first, 2.0 * kPi * k0 / n, 1e-15);
    EXPECT_NEAR(p[k0].second, n / (8.0 * kPi), 1e-9);
    for (std::size_t k = 0; k < p.size(); ++k)
        if (k != k0) EXPECT_NEAR(p[k].second, 0.0, 1e-9);

    // two-sided sum of powers times 2 pi / n equals the mean square
    const auto x = normal_draws(1000, 40);
    const auto px = periodogram(SeriesGrid{0.0, 1.0, x});
    double total = px[0].second + px.back().second;
    for (std::size_t k = 1; k + 1 < px.size(); ++k) total += 2.0 * px[k].second;
    double ms = 0.0;
    for (double v : x) ms += v * v;
    EXPECT_NEAR(total * 2.0 * kPi / x.size(), ms / x.size(), 1e-10);
}

TEST(Autocovariance, LagZeroAndWhiteNoise)
{
    const SeriesGrid x{0.0, 1.0, normal_draws(100000, 50)};
    const auto ac = sample_autocovariance(x, 50);
    ASSERT_EQ(ac.size(), 51u);
    EXPECT_NEAR(ac[0], sample_variance(x.values) * (x.n() - 1) / x.n(), 1e-12);
    for (std::size_t h = 1; h <= 50; ++h) EXPECT_LT(std::abs(ac[h]) / ac[0], 0.02) << h;
    EXPECT_THROW(sample_autocovariance(x, x.n()), Error);
}

TEST(Autocovariance, GegenbauerOscillates)
{
    SimulationConfig cfg;
    cfg.seed = 3;
    cfg.truncation_N = 2000;
    const auto x = simulate_gegenbauer({0.3, 0.1, 1.0}, 200000, cfg);
    const auto ac = sample_autocovariance(x, 200);
    // sign changes over [1, 200] near the rate of cos(h arccos(0.3))
    const double period = 2.0 * kPi / std::acos(0.3);
    int changes = 0;
    for (std::size_t h = 2; h <= 200; ++h)
        if ((ac[h] > 0.0) != (ac[h - 1] > 0.0)) ++changes;
    const double expected = 2.0 * 199.0 / period;
    EXPECT_NEAR(changes, expected, 0.2 * expected);
    // the first lags follow the cosine sign pattern
    for (std::size_t h : {1u, 4u, 5u, 9u}) EXPECT_EQ(ac[h] > 0.0, std::cos(h * std::acos(0.3)) > 0.0) << h;
}

TEST(SampleStats, VarianceAndCorrelation)
{
    EXPECT_DOUBLE_EQ(sample_variance({1.0, 2.0, 3.0, 4.0}), 5.0 / 3.0);
    EXPECT_NEAR(sample_correlation({1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}), 1.0, 1e-15);
    EXPECT_NEAR(sample_correlation({1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}), -1.0, 1e-15);
    EXPECT_THROW(sample_variance({1.0}), Error);
}
