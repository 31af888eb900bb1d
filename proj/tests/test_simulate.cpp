#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cyclo/error.hpp"
#include "cyclo/filters.hpp"
#include "cyclo/log.hpp"
#include "cyclo/mc.hpp"
#include "cyclo/rng.hpp"
#include "cyclo/simulate.hpp"

using namespace cyclo;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Collects warnings for the lifetime of the object.
class WarningCapture {
public:
    WarningCapture()
    {
        previous_ = set_warning_handler([this](const std::string& m) { messages.push_back(m); });
    }
    ~WarningCapture() { set_warning_handler(previous_); }
    std::vector<std::string> messages;

private:
    WarningHandler previous_;
};

}  // namespace

TEST(Philox, KnownAnswers)
{
    using B = Philox4x32::Block;
    EXPECT_EQ(Philox4x32::bijection({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::bijection({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::bijection({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, ReproducibleStreams)
{
    NormalStream a(42, 3, 1), b(42, 3, 1), c(42, 4, 1), d(42, 3, 2);
    std::vector<double> va(1000), vb(1000), vc(1000), vd(1000);
    a.fill(va.begin(), va.end());
    b.fill(vb.begin(), vb.end());
    c.fill(vc.begin(), vc.end());
    d.fill(vd.begin(), vd.end());
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
    EXPECT_NE(va, vd);
}

TEST(Rng, IndependentAcrossReplicates)
{
    const int n = 100000;
    std::vector<double> x(n), y(n), z(n);
    NormalStream(7, 0, 0).fill(x.begin(), x.end());
    NormalStream(7, 1, 0).fill(y.begin(), y.end());
    NormalStream(7, 0, 1).fill(z.begin(), z.end());
    EXPECT_LT(std::abs(sample_correlation(x, y)), 0.02);
    EXPECT_LT(std::abs(sample_correlation(x, z)), 0.02);
    EXPECT_GT(normality_test(x).p_value, 0.01);
}

TEST(Gegenbauer, ExplicitSmallOrders)
{
    EXPECT_EQ(gegenbauer_coeff_explicit(0.3, 0.1, 0), 1.0);
    EXPECT_NEAR(gegenbauer_coeff_explicit(0.3, 0.1, 1), 0.06, 1e-16);
    EXPECT_NEAR(gegenbauer_coeff_explicit(0.3, 0.1, 2), -0.0802, 1e-16);
    const auto c = gegenbauer_coeffs(0.3, 0.1, 2);
    EXPECT_EQ(c[0], 1.0);
    EXPECT_EQ(c[1], 2.0 * 0.3 * 0.1);
    EXPECT_NEAR(c[2], -0.0802, 1e-16);
}

TEST(Gegenbauer, HighPrecisionReferenceValues)
{
    EXPECT_NEAR(gegenbauer_coeff_explicit(0.3, 0.1, 10), 0.024533408527346641282, 1e-15);
    EXPECT_NEAR(gegenbauer_coeff_explicit(0.3, 0.25, 50), 0.02293844834154944487, 1e-15);
    EXPECT_NEAR(gegenbauer_coeff_explicit(-0.9, 0.45, 37), 0.13140022373488797355, 1e-14);
    EXPECT_NEAR(gegenbauer_coeff_explicit(0.8, 0.05, 23), -0.0029830717254574479965, 1e-15);
}

TEST(Gegenbauer, RecurrenceMatchesExplicitSum)
{
    for (double u : {-0.9, -0.5, 0.0, 0.3, 0.8})
        for (double d : {0.05, 0.15, 0.25, 0.35, 0.45}) {
            const auto c = gegenbauer_coeffs(u, d, 50);
            for (int n = 0; n <= 50; ++n) {
                const double e = gegenbauer_coeff_explicit(u, d, n);
                if (u == 0.0 && n % 2 == 1) {
                    EXPECT_EQ(c[n], 0.0);
                    EXPECT_EQ(e, 0.0);
                } else {
                    EXPECT_LT(rel(c[n], e), 1e-10) << u << " " << d << " " << n;
                }
            }
        }
}

TEST(Gegenbauer, CancellationIsReported)
{
    double cancel = 0.0;
    gegenbauer_coeff_explicit(0.3, 0.1, 60, &cancel);
    EXPECT_GT(cancel, 1.0);
    gegenbauer_coeff_explicit(0.9, 0.1, 1, &cancel);
    EXPECT_EQ(cancel, 1.0);
}

TEST(Gegenbauer, ZeroNoiseAndDeterminism)
{
    SimulationConfig cfg;
    cfg.seed = 99;
    const auto z = simulate_gegenbauer({0.3, 0.1, 0.0}, 500, cfg);
    for (double v : z.values) EXPECT_EQ(v, 0.0);
    const auto a = simulate_gegenbauer({0.3, 0.1, 1.0}, 500, cfg);
    const auto b = simulate_gegenbauer({0.3, 0.1, 1.0}, 500, cfg);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.dt, 1.0);
    cfg.replicate_index = 1;
    EXPECT_NE(simulate_gegenbauer({0.3, 0.1, 1.0}, 500, cfg).values, a.values);
}

TEST(Gegenbauer, VarianceIdentity)
{
    const GegenbauerParams g{0.3, 0.1, 1.5};
    const auto c = gegenbauer_coeffs(g.u, g.d, 100);
    std::vector<double> gamma(101, 0.0);
    for (int h = 0; h <= 100; ++h)
        for (int n = 0; n + h <= 100; ++n) gamma[h] += c[n] * c[n + h] * g.sigma_eps * g.sigma_eps;
    SimulationConfig cfg;
    cfg.seed = 5;
    const std::size_t n = 100000;
    const auto x = simulate_gegenbauer(g, n, cfg);
    double s = 0.0;
    for (double v : x.values) s += v * v;
    const double est = s / n;
    // Var of the mean of X^2 for a Gaussian MA: (2/n) sum_h gamma(h)^2.
    double v = gamma[0] * gamma[0];
    for (int h = 1; h <= 100; ++h) v += 2.0 * gamma[h] * gamma[h];
    const double se = std::sqrt(2.0 * v / n);
    EXPECT_LT(std::abs(est - gamma[0]), 3.0 * se);
}

TEST(Gegenbauer, TruncationWarning)
{
    WarningCapture w;
    SimulationConfig cfg;
    cfg.truncation_N = 5;
    simulate_gegenbauer({0.3, 0.45, 1.0}, 10, cfg);
    ASSERT_EQ(w.messages.size(), 1u);
    w.messages.clear();
    cfg.truncation_N = 100;
    simulate_gegenbauer({0.3, 0.1, 1.0}, 10, cfg);
    EXPECT_TRUE(w.messages.empty());
}

TEST(Spectral, BinsCarryTheSpectralMass)
{
    const auto m = make_model(2.0, 0.25);
    const auto b = spectral_bins(m, 4.0, 256);
    EXPECT_LT(rel(b.total_mass(), 2.0 * spectral_mass(m, 0.0, 4.0)), 1e-10);
    EXPECT_THROW(spectral_bins(m, 1.9, 256), Error);
    EXPECT_THROW(spectral_bins(m, 4.0, 32), Error);
}

TEST(Spectral, ZeroMean)
{
    const auto m = make_model(2.0, 0.25);
    const auto bins = spectral_bins(m, 4.0, 512);
    std::vector<double> means;
    for (std::uint64_t r = 0; r < 100; ++r) {
        SimulationConfig cfg;
        cfg.seed = 17;
        cfg.replicate_index = r;
        const auto x = simulate_spectral(bins, 0.0, 1.0, 1000, cfg);
        double s = 0.0;
        for (double v : x.values) s += v;
        means.push_back(s / 1000.0);
    }
    double mu = 0.0;
    for (double v : means) mu += v;
    mu /= means.size();
    const double se = std::sqrt(sample_variance(means) / means.size());
    EXPECT_LT(std::abs(mu), 3.0 * se);
}

TEST(Spectral, VarianceAndBinConvergence)
{
    const auto m = make_model(2.0, 0.25);
    const double total = 2.0 * spectral_mass(m, 0.0, 4.0);
    std::vector<double> var_by_bins;
    for (int bins : {1024, 2048}) {
        const auto b = spectral_bins(m, 4.0, bins);
        std::vector<double> x0;
        for (std::uint64_t r = 0; r < 2000; ++r) {
            SimulationConfig cfg;
            cfg.seed = 23;
            cfg.replicate_index = r;
            x0.push_back(simulate_spectral(b, 0.0, 1.0, 1, cfg).values[0]);
        }
        double s = 0.0;
        for (double v : x0) s += v * v;
        var_by_bins.push_back(s / x0.size());
    }
    const double se = std::sqrt(2.0 / 2000.0) * total;
    EXPECT_LT(std::abs(var_by_bins[0] - total), 3.0 * se);
    EXPECT_LT(std::abs(var_by_bins[1] - var_by_bins[0]), se);
}

TEST(Spectral, SameSeedSameSeries)
{
    const auto m = make_model(1.5, 0.3);
    SimulationConfig cfg;
    cfg.seed = 1;
    const auto a = simulate_spectral(m, 0.0, 0.5, 3000, 3.0, 128, cfg);
    const auto b = simulate_spectral(m, 0.0, 0.5, 3000, 3.0, 128, cfg);
    EXPECT_EQ(a.values, b.values);
    // the phase recurrence stays on the directly evaluated phase
    const auto bins = spectral_bins(m, 3.0, 128);
    NormalStream s(1, 0, 0);
    double direct = 0.0;
    const double t = 0.5 * 2999;
    for (std::size_t k = 0; k < bins.freq.size(); ++k) {
        const double xi = s(), eta = s();
        direct += bins.sigma[k] * (xi * std::cos(bins.freq[k] * t) + eta * std::sin(bins.freq[k] * t));
    }
    EXPECT_NEAR(a.values.back(), direct, 1e-11);
}

TEST(ExactSampler, ScalarVariance)
{
    const auto m = make_model(2.0, 0.25);
    const auto f = shannon_filter();
    ExactSampler s(m, *f, 16.0, 16.0, 1);
    std::vector<double> v;
    for (std::uint64_t r = 0; r < 10000; ++r) v.push_back(s.draw(3, r, 0)[0]);
    double ss = 0.0;
    for (double x : v) ss += x * x;
    const double var = coefficient_covariance(m, *f, 16.0, 0.0);
    EXPECT_LT(std::abs(ss / v.size() - var), 3.0 * std::sqrt(2.0 / v.size()) * var);
}

TEST(ExactSampler, LagOneCovariance)
{
    const auto m = make_model(2.0, 0.25);
    const auto f = meyer_filter();
    const double a = 16.0, gamma = 4.0;
    ExactSampler s(m, *f, a, gamma, 2);
    double sum = 0.0;
    const int R = 10000;
    for (int r = 0; r < R; ++r) {
        const auto d = s.draw(8, r, 0);
        sum += d[0] * d[1];
    }
    const double r0 = coefficient_covariance(m, *f, a, 0.0), r1 = coefficient_covariance(m, *f, a, gamma);
    EXPECT_LT(std::abs(sum / R - r1), 3.0 * std::sqrt((r0 * r0 + r1 * r1) / R));
}

TEST(ExactSampler, EmpiricalCovarianceMatrix)
{
    const auto m = make_model(2.0, 0.25);
    const auto f = shannon_filter();
    const int n = 128, R = 5000;
    ExactSampler s(m, *f, 16.0, 16.0, n);
    const auto lags = covariance_lags(m, *f, 16.0, 16.0, n);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < R; r += ExactSampler::kChunk) {
        const int count = std::min(ExactSampler::kChunk, R - r);
        const Eigen::MatrixXd y = s.draw_chunk(31, r, count, 0);
        acc += y * y.transpose();
    }
    acc /= R;
    int worst_i = 0, worst_j = 0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double t = lags[i - j];
            const double se = std::sqrt((lags[0] * lags[0] + t * t) / R);
            const double z = std::abs(acc(i, j) - t) / se;
            if (z > worst) worst = z, worst_i = i, worst_j = j;
        }
    EXPECT_LT(worst, 4.0) << worst_i << "," << worst_j;
}

TEST(ExactSampler, ChunkingDoesNotChangeDraws)
{
    const auto m = make_model(2.0, 0.25);
    const auto f = shannon_filter();
    ExactSampler s(m, *f, 16.0, 16.0, 64);
    const Eigen::MatrixXd chunk = s.draw_chunk(4, 10, 7, 2);
    for (int r = 0; r < 7; ++r) {
        const auto single = s.draw(4, 10 + r, 2);
        for (int k = 0; k < 64; ++k) EXPECT_EQ(chunk(k, r), single[k]);
    }
    const auto ms = s.mean_square_chunk(4, 10, 7, 2);
    EXPECT_NEAR(ms[3], chunk.col(3).squaredNorm() / 64.0, 1e-15);
}

TEST(ExactSampler, SpectralModeReproducesLags)
{
    const auto m = make_model(2.0, 0.25);
    const auto f = meyer_filter();
    const double a = 16.0;
    ExactSampler s(m, *f, a, a, 8192);
    ASSERT_FALSE(s.dense());
    EXPECT_LT(s.lag_error(), 1e-6);
    const auto lags = covariance_lags(m, *f, a, a, 3);
    double s0 = 0.0, s1 = 0.0;
    long count = 0;
    const int R = 200;
    for (int r = 0; r < R; ++r) {
        const auto d = s.draw(2, r, 0);
        for (std::size_t k = 0; k + 1 < d.size(); ++k) s1 += d[k] * d[k + 1];
        for (double v : d) s0 += v * v;
        count += static_cast<long>(d.size());
    }
    // lag sums over a replicate are correlated; 8192 draws of a short-memory block
    // still pin the averages to about 1% of lag 0
    EXPECT_NEAR(s0 / count, lags[0], 0.02 * lags[0]);
    EXPECT_NEAR(s1 / count, lags[1], 0.02 * lags[0]);
}

TEST(ExactSampler, CacheSharesInstances)
{
    clear_exact_sampler_cache();
    const auto m = make_model(2.0, 0.25);
    const auto f = shannon_filter();
    const auto a = exact_sampler(m, *f, 8.0, 8.0, 16);
    const auto b = exact_sampler(m, *f, 8.0, 8.0, 16);
    EXPECT_EQ(a.get(), b.get());
    EXPECT_NE(a.get(), exact_sampler(m, *f, 8.0, 8.0, 17).get());
    SimulationConfig cfg;
    cfg.seed = 3;
    const auto block = simulate_coefficients_exact(m, *f, 8.0, 8.0, 16, cfg, 3);
    EXPECT_EQ(block.level, 3);
    EXPECT_EQ(block.source, CoefficientSource::ExactCovariance);
    EXPECT_EQ(block.values, a->draw(3, 0, 0));
}
