#include "cyclo/mc.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

#include "cyclo/error.hpp"
#include "cyclo/fft.hpp"
#include "cyclo/log.hpp"
#include "cyclo/simulate.hpp"

namespace cyclo {

namespace {

constexpr double kPi = std::numbers::pi;

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Runs body(chunk) for chunks 0..count-1 on `workers` threads. The first
// exception thrown by any chunk is rethrown after all threads join.
template <class Body>
void parallel_chunks(std::int64_t count, int workers, Body&& body)
{
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::int64_t chunk = next.fetch_add(1);
            if (chunk >= count) return;
            try {
                body(chunk);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    const int n = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(workers, count)));
    std::vector<std::thread> threads;
    for (int i = 1; i < n; ++i) threads.emplace_back(run);
    run();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

const char* to_string(Simulator s)
{
    switch (s) {
    case Simulator::GegenbauerMA: return "gegenbauer-ma";
    case Simulator::SpectralBin: return "spectral-bin";
    case Simulator::ExactCovariance: return "exact-covariance";
    }
    return "unknown";
}

Simulator simulator_from_string(const std::string& name)
{
    if (name == "gegenbauer-ma" || name == "gegenbauer") return Simulator::GegenbauerMA;
    if (name == "spectral-bin" || name == "spectral") return Simulator::SpectralBin;
    if (name == "exact-covariance" || name == "exact") return Simulator::ExactCovariance;
    fail(ErrorKind::Config, "unknown simulator '" + name + "' (expected exact-covariance, spectral-bin or gegenbauer-ma)");
}

double sample_variance(const std::vector<double>& x)
{
    require(x.size() >= 2, ErrorKind::Domain, "sample_variance: need two samples");
    const double mu = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - mu) * (v - mu);
    return s / static_cast<double>(x.size() - 1);
}

double sample_correlation(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::Domain, "sample_correlation: need equal lengths >= 2");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

MCReport run_replicates(const MCConfig& cfg)
{
    const auto started = std::chrono::steady_clock::now();
    require(cfg.replicates >= 2, ErrorKind::Config, "mc: at least two replicates are required");
    require(cfg.filter != nullptr, ErrorKind::Config, "mc: filter is not set");
    require(cfg.workers >= 1, ErrorKind::Config, "mc: workers must be positive");
    const int j = cfg.level;
    check_scheme(cfg.scheme, j, j + 2);
    const Filter& filter = *cfg.filter;

    ModelParams truth = cfg.truth;
    if (cfg.simulator == Simulator::GegenbauerMA) {
        require(cfg.gegenbauer.has_value(), ErrorKind::Config, "mc: the gegenbauer-ma simulator needs (u, d, sigma_eps)");
        truth = gegenbauer_to_model(*cfg.gegenbauer);
    }
    validate_model(truth);

    MCReport rep;
    rep.replicates = cfg.replicates;
    rep.seed = cfg.seed;
    rep.simulator = to_string(cfg.simulator);
    rep.filter = filter.name();
    rep.level = j;
    rep.truth_s0 = truth.s0;
    rep.truth_alpha = truth.alpha;
    rep.m = cfg.scheme.m(j);
    const auto M = compute_M(cfg.scheme, j);
    rep.M = M.value;
    rep.M_uncapped = M.uncapped;
    rep.M_capped = M.capped;
    if (M.capped)
        rep.warnings.push_back("M_j capped at " + std::to_string(M.value) + " (uncapped value " + std::to_string(M.uncapped) + ")");

    const std::array<double, 3> a{cfg.scheme.a(j), cfg.scheme.a(j + 1), cfg.scheme.a(j + 2)};
    const std::array<double, 3> g{cfg.scheme.gamma(j), cfg.scheme.gamma(j + 1), cfg.scheme.gamma(j + 2)};
    const std::array<std::int64_t, 3> counts{rep.m, rep.M, rep.M};
    const double diff = 1.0 / (a[1] * a[1]) - 1.0 / (a[2] * a[2]);
    rep.increment_weight = static_cast<double>(rep.M) * diff * diff;

    rep.c = cfg.scheme.c_limit();
    double i_c = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(rep.c)) {
        i_c = i_of_c(filter, rep.c);
        rep.V1 = 4.0 * rep.c * kPi * std::pow(truth.s0, -8.0 * truth.alpha) * i_c;
    } else {
        rep.V1 = std::numeric_limits<double>::quiet_NaN();
        rep.warnings.push_back("level scheme has no finite c; theoretical variances are undefined");
    }
    rep.theory_var_S1 = rep.V1 / (filter.L0() * filter.L0());
    rep.theory_var_S2 = rep.V1 / (2.0 * filter.L2() * filter.L2());

    const auto R = cfg.replicates;
    std::array<std::vector<double>, 3> dbar;
    for (auto& v : dbar) v.assign(static_cast<std::size_t>(R), 0.0);
    constexpr std::int64_t chunk = ExactSampler::kChunk;
    const std::int64_t chunks = (R + chunk - 1) / chunk;

    if (cfg.simulator == Simulator::ExactCovariance) {
        const auto [B, A] = std::pair{filter.support_lo(), filter.support_hi()};
        if (!(B > 0.0 && A / a[2] < B / a[1]))
            rep.warnings.push_back("filter supports at levels j+1 and j+2 overlap; levels are simulated independently");
        std::array<std::shared_ptr<const ExactSampler>, 3> samplers;
        for (int l = 0; l < 3; ++l) samplers[l] = exact_sampler(truth, filter, a[l], g[l], counts[l]);
        parallel_chunks(chunks, cfg.workers, [&](std::int64_t c) {
            const std::int64_t first = c * chunk;
            const int count = static_cast<int>(std::min(chunk, R - first));
            for (int l = 0; l < 3; ++l) {
                const auto ms = samplers[l]->mean_square_chunk(cfg.seed, static_cast<std::uint64_t>(first), count,
                                                                static_cast<std::uint64_t>(j + l));
                std::copy(ms.begin(), ms.end(), dbar[l].begin() + first);
            }
        });
    } else {
        require(filter.has_time_form(), ErrorKind::Config, "mc: series simulators need a filter with a time form");
        double t_lo = HUGE_VAL, t_hi = -HUGE_VAL;
        for (int l = 0; l < 3; ++l) {
            const double reach = filter.time_radius() * a[l];
            t_lo = std::min(t_lo, g[l] - reach);
            t_hi = std::max(t_hi, g[l] * static_cast<double>(counts[l]) + reach);
        }
        const double t0 = std::floor(t_lo);
        const auto n = static_cast<std::size_t>(std::ceil(t_hi - t0)) + 1;
        SpectralBins bins;
        if (cfg.simulator == Simulator::SpectralBin) {
            const double band = cfg.band > 0.0 ? cfg.band : std::max(2.0 * truth.s0, truth.s0 + 1.0);
            bins = spectral_bins(truth, band, cfg.bins);
        }
        auto previous = set_warning_handler([](const std::string&) {});
        try {
            parallel_chunks(chunks, cfg.workers, [&](std::int64_t c) {
                const std::int64_t first = c * chunk;
                const std::int64_t last = std::min(R, first + chunk);
                for (std::int64_t r = first; r < last; ++r) {
                    SimulationConfig sc;
                    sc.seed = cfg.seed;
                    sc.replicate_index = static_cast<std::uint64_t>(r);
                    sc.truncation_N = cfg.truncation_N;
                    SeriesGrid series = cfg.simulator == Simulator::SpectralBin
                                            ? simulate_spectral(bins, t0, 1.0, n, sc)
                                            : simulate_gegenbauer(*cfg.gegenbauer, n, sc);
                    series.t0 = t0;
                    for (int l = 0; l < 3; ++l) {
                        const auto block = filter_coefficients(series, filter, cfg.scheme, j + l, counts[l]);
                        dbar[l][static_cast<std::size_t>(r)] = mean_square_stat(block.values);
                    }
                }
            });
        } catch (...) {
            set_warning_handler(std::move(previous));
            throw;
        }
        set_warning_handler(std::move(previous));
    }

    EstimateOptions opts;
    opts.c = std::isfinite(rep.c) ? rep.c : 1.0;
    opts.i_of_c = std::isfinite(i_c) ? i_c : 1.0;
    opts.M = rep.M;
    rep.samples_S1.resize(static_cast<std::size_t>(R));
    rep.samples_S2.resize(static_cast<std::size_t>(R));
    rep.estimates.resize(static_cast<std::size_t>(R));
    std::int64_t truncated = 0, finite = 0;
    double err_s0 = 0.0, err_alpha = 0.0, sum_s0 = 0.0, sum_alpha = 0.0;
    for (std::int64_t r = 0; r < R; ++r) {
        const auto i = static_cast<std::size_t>(r);
        const double dincr = increment_stat(dbar[1][i], dbar[2][i], a[1], a[2]);
        const auto s = normalized_stats(dbar[0][i], dincr, filter, rep.m, truth, rep.increment_weight);
        rep.samples_S1[i] = s.S1;
        rep.samples_S2[i] = s.S2;
        const auto est = adjusted_estimate(dbar[0][i], dincr, filter, rep.m, opts);
        rep.estimates[i] = {est.s0_hat, est.alpha_hat, est.truncation_active};
        if (est.truncation_active) ++truncated;
        if (std::isfinite(est.s0_hat) && std::isfinite(est.alpha_hat)) {
            ++finite;
            err_s0 += std::abs(est.s0_hat - truth.s0);
            err_alpha += std::abs(est.alpha_hat - truth.alpha);
            sum_s0 += est.s0_hat;
            sum_alpha += est.alpha_hat;
        }
    }
    rep.truncation_rate = static_cast<double>(truncated) / static_cast<double>(R);
    const double nf = static_cast<double>(std::max<std::int64_t>(finite, 1));
    rep.mean_abs_error_s0 = err_s0 / nf;
    rep.mean_abs_error_alpha = err_alpha / nf;
    rep.mean_s0_hat = sum_s0 / nf;
    rep.mean_alpha_hat = sum_alpha / nf;
    rep.empirical_var_S1 = sample_variance(rep.samples_S1);
    rep.empirical_var_S2 = sample_variance(rep.samples_S2);
    rep.corr_S1_S2 = sample_correlation(rep.samples_S1, rep.samples_S2);
    if (R >= 20) {
        rep.normality_S1 = normality_test(rep.samples_S1);
        rep.normality_S2 = normality_test(rep.samples_S2);
    } else {
        rep.normality_S1 = rep.normality_S2 = {"anderson-darling", std::numeric_limits<double>::quiet_NaN(),
                                               std::numeric_limits<double>::quiet_NaN()};
    }
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rep;
}

std::string report_json(const MCReport& r, bool include_samples)
{
    using nlohmann::ordered_json;
    auto num = [](double v) -> ordered_json { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    auto normality = [&](const NormalityResult& n) {
        return ordered_json{{"test", n.test}, {"statistic", num(n.statistic)}, {"p_value", num(n.p_value)}};
    };
    ordered_json j;
    j["replicates"] = r.replicates;
    j["seed"] = r.seed;
    j["simulator"] = r.simulator;
    j["filter"] = r.filter;
    j["level"] = r.level;
    j["truth"] = {{"s0", r.truth_s0}, {"alpha", r.truth_alpha}};
    j["m"] = r.m;
    j["M"] = r.M;
    j["M_uncapped"] = num(r.M_uncapped);
    j["M_capped"] = r.M_capped;
    j["increment_weight"] = num(r.increment_weight);
    j["c"] = num(r.c);
    j["V1"] = num(r.V1);
    j["theory_var_S1"] = num(r.theory_var_S1);
    j["theory_var_S2"] = num(r.theory_var_S2);
    j["empirical_var_S1"] = num(r.empirical_var_S1);
    j["empirical_var_S2"] = num(r.empirical_var_S2);
    j["corr_S1_S2"] = num(r.corr_S1_S2);
    j["normality"] = {{"S1", normality(r.normality_S1)}, {"S2", normality(r.normality_S2)}};
    j["truncation_rate"] = r.truncation_rate;
    j["mean_s0_hat"] = num(r.mean_s0_hat);
    j["mean_alpha_hat"] = num(r.mean_alpha_hat);
    j["mean_abs_error_s0"] = num(r.mean_abs_error_s0);
    j["mean_abs_error_alpha"] = num(r.mean_abs_error_alpha);
    j["warnings"] = r.warnings;
    if (include_samples) {
        ordered_json s1 = ordered_json::array(), s2 = ordered_json::array(), est = ordered_json::array();
        for (double v : r.samples_S1) s1.push_back(num(v));
        for (double v : r.samples_S2) s2.push_back(num(v));
        for (const auto& e : r.estimates)
            est.push_back(ordered_json{{"s0_hat", num(e.s0_hat)}, {"alpha_hat", num(e.alpha_hat)}, {"truncated", e.truncated}});
        j["samples_S1"] = std::move(s1);
        j["samples_S2"] = std::move(s2);
        j["estimates"] = std::move(est);
    }
    return j.dump(2);
}

NormalityResult normality_test(const std::vector<double>& samples)
{
    NormalityResult res{"anderson-darling", 0.0, 0.0};
    const std::size_t n = samples.size();
    require(n >= 20, ErrorKind::Domain, "normality_test: need at least 20 samples");
    std::vector<double> x = samples;
    std::sort(x.begin(), x.end());
    const double mu = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - mu) * (v - mu);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
        res.statistic = HUGE_VAL;
        return res;
    }
    const double nd = static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = std::max(normal_cdf((x[i] - mu) / sd), 1e-300);
        const double hi = std::max(1.0 - normal_cdf((x[n - 1 - i] - mu) / sd), 1e-300);
        s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log(hi));
    }
    const double a2 = -nd - s / nd;
    const double a = a2 * (1.0 + 0.75 / nd + 2.25 / (nd * nd));
    double p;
    if (a >= 0.6) {
        // the quadratic turns upward past its vertex; hold it there so p stays monotone in a
        const double ac = std::min(a, 5.709 / (2.0 * 0.0186));
        p = std::exp(1.2937 - 5.709 * ac + 0.0186 * ac * ac);
    }
    else if (a >= 0.34)
        p = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
    else if (a >= 0.2)
        p = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
    else
        p = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
    res.statistic = a;
    res.p_value = std::clamp(p, 0.0, 1.0);
    return res;
}

std::vector<std::pair<double, double>> qq_data(const std::vector<double>& samples)
{
    const std::size_t n = samples.size();
    require(n >= 2, ErrorKind::Domain, "qq_data: need at least two samples");
    std::vector<double> x = samples;
    std::sort(x.begin(), x.end());
    const double mu = mean(x);
    const double sd = std::sqrt(sample_variance(x));
    require(sd > 0.0, ErrorKind::Domain, "qq_data: zero variance");
    const boost::math::normal_distribution<double> standard;
    std::vector<std::pair<double, double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        out[i] = {boost::math::quantile(standard, prob), (x[i] - mu) / sd};
    }
    return out;
}

Ellipse ellipse_data(const std::vector<double>& xs, const std::vector<double>& ys, double level)
{
    require(xs.size() == ys.size() && xs.size() >= 3, ErrorKind::Domain, "ellipse_data: need equal lengths >= 3");
    require(level > 0.0 && level < 1.0, ErrorKind::Domain, "ellipse_data: level must lie in (0, 1)");
    const double mx = mean(xs), my = mean(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double nd = static_cast<double>(xs.size() - 1);
    Eigen::Matrix2d cov;
    cov << sxx / nd, sxy / nd, sxy / nd, syy / nd;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    const auto& ev = eig.eigenvalues();  // ascending
    require(ev(0) > 1e-14 * std::max(ev(1), 1e-300), ErrorKind::Domain, "ellipse_data: degenerate covariance");
    const double chi2 = -2.0 * std::log1p(-level);
    Ellipse e;
    e.center = {mx, my};
    e.axes = {std::sqrt(ev(1) * chi2), std::sqrt(ev(0) * chi2)};
    const Eigen::Vector2d major = eig.eigenvectors().col(1);
    double angle = std::atan2(major(1), major(0));
    if (angle <= -kPi / 2) angle += kPi;
    if (angle > kPi / 2) angle -= kPi;
    e.angle = angle;
    return e;
}

std::vector<std::pair<double, double>> periodogram(const SeriesGrid& series)
{
    const std::size_t n = series.n();
    require(n >= 2, ErrorKind::Domain, "periodogram: need at least two samples");
    const auto spec = fft::forward_real(series.values);
    std::vector<std::pair<double, double>> out(spec.size());
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < spec.size(); ++k)
        out[k] = {2.0 * kPi * static_cast<double>(k) / nd, std::norm(spec[k]) / (2.0 * kPi * nd)};
    return out;
}

std::vector<double> sample_autocovariance(const SeriesGrid& series, std::size_t maxlag)
{
    const std::size_t n = series.n();
    require(maxlag < n, ErrorKind::Domain, "sample_autocovariance: maxlag must be below the series length");
    const double mu = mean(series.values);
    std::vector<double> out(maxlag + 1, 0.0);
    for (std::size_t h = 0; h <= maxlag; ++h) {
        double s = 0.0;
        for (std::size_t t = 0; t + h < n; ++t) s += (series.values[t] - mu) * (series.values[t + h] - mu);
        out[h] = s / static_cast<double>(n);
    }
    return out;
}

}  // namespace cyclo
