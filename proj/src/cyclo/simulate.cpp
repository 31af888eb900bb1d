#include "cyclo/simulate.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>

#include "cyclo/error.hpp"
#include "cyclo/fft.hpp"
#include "cyclo/log.hpp"
#include "cyclo/rng.hpp"

namespace cyclo {

namespace {

constexpr double kPi = std::numbers::pi;

void require_gegenbauer_range(double u, double d)
{
    require(std::abs(u) <= 1.0, ErrorKind::Domain, "gegenbauer: |u| must not exceed 1");
    require(d > 0.0 && d < 0.5, ErrorKind::Domain, "gegenbauer: d must lie in (0, 1/2)");
}

}  // namespace

const char* to_string(CoefficientSource source)
{
    return source == CoefficientSource::SeriesDiscretized ? "series-discretized" : "exact-covariance";
}

double gegenbauer_coeff_explicit(double u, double d, int n, double* cancellation)
{
    require_gegenbauer_range(u, d);
    require(n >= 0, ErrorKind::Domain, "gegenbauer_coeff_explicit: n must be nonnegative");
    // The alternating sum cancels heavily for |u| near 1; 50 significant digits keep
    // the result exact to double precision while the cancellation ratio stays below 1e30.
    using Wide = boost::multiprecision::cpp_bin_float_50;
    const Wide uw(u), dw(d);
    Wide sum = 0, abs_sum = 0;
    for (int k = 0; 2 * k <= n; ++k) {
        // (d)_{n-k} / (k! (n-2k)!) as a running product.
        Wide term = 1;
        for (int i = 0; i < n - k; ++i) term *= dw + i;
        for (int i = 2; i <= k; ++i) term /= i;
        for (int i = 2; i <= n - 2 * k; ++i) term /= i;
        for (int i = 0; i < n - 2 * k; ++i) term *= 2 * uw;
        if (k % 2 == 1) term = -term;
        sum += term;
        abs_sum += abs(term);
    }
    if (cancellation)
        *cancellation = sum == 0 ? (abs_sum == 0 ? 1.0 : HUGE_VAL) : static_cast<double>(abs_sum / abs(sum));
    return static_cast<double>(sum);
}

std::vector<double> gegenbauer_coeffs(double u, double d, int N)
{
    require_gegenbauer_range(u, d);
    require(N >= 0, ErrorKind::Domain, "gegenbauer_coeffs: N must be nonnegative");
    std::vector<double> c(static_cast<std::size_t>(N) + 1);
    c[0] = 1.0;
    if (N >= 1) c[1] = 2.0 * u * d;
    for (int n = 2; n <= N; ++n) {
        const double nn = n;
        c[n] = 2.0 * u * (1.0 + (d - 1.0) / nn) * c[n - 1] - (1.0 + 2.0 * (d - 1.0) / nn) * c[n - 2];
    }
    return c;
}

double gegenbauer_tail_energy(double u, double d, int N)
{
    const int horizon = std::max(16 * N, 4096);
    const auto c = gegenbauer_coeffs(u, d, horizon);
    double partial = 0.0;
    for (int n = N + 1; n <= horizon; ++n) partial += c[n] * c[n];
    // C_n^2 ~ A n^(2d-2) away from u = +-1; A is averaged over the last half of the horizon.
    const double expo = 2.0 * d - 2.0;
    double amp = 0.0;
    for (int n = horizon / 2 + 1; n <= horizon; ++n) amp += c[n] * c[n] / std::pow(n, expo);
    amp /= horizon - horizon / 2;
    return partial + amp * std::pow(horizon, expo + 1.0) / (1.0 - 2.0 * d);
}

SeriesGrid simulate_gegenbauer(const GegenbauerParams& g, std::size_t len, const SimulationConfig& cfg)
{
    validate_gegenbauer(g);
    require(len >= 1, ErrorKind::Domain, "simulate_gegenbauer: length must be positive");
    require(cfg.truncation_N >= 1, ErrorKind::Config, "simulate_gegenbauer: truncation_N must be positive");
    const int N = cfg.truncation_N;
    const auto c = gegenbauer_coeffs(g.u, g.d, N);
    double head = 0.0;
    for (double v : c) head += v * v;
    const double tail = gegenbauer_tail_energy(g.u, g.d, N);
    if (tail > 0.01 * head)
        warn("gegenbauer truncation N = " + std::to_string(N) + " drops an estimated " +
             std::to_string(100.0 * tail / head) + "% of the coefficient energy");

    std::vector<double> eps(len + static_cast<std::size_t>(N));
    NormalStream stream(cfg.seed, cfg.replicate_index, cfg.stream);
    stream.fill(eps.begin(), eps.end());
    SeriesGrid out{0.0, 1.0, std::vector<double>(len, 0.0)};
    for (std::size_t t = 0; t < len; ++t) {
        double x = 0.0;
        for (int n = 0; n <= N; ++n) x += c[n] * eps[t + static_cast<std::size_t>(N - n)];
        out.values[t] = g.sigma_eps * x;
    }
    return out;
}

double SpectralBins::total_mass() const
{
    double s = 0.0;
    for (double v : sigma) s += v * v;
    return s;
}

SpectralBins spectral_bins(const ModelParams& model, double band, int bins)
{
    validate_model(model);
    require(band > model.s0, ErrorKind::Config, "simulate_spectral: band must exceed s0 to cover the singularity");
    require(bins >= 64, ErrorKind::Config, "simulate_spectral: at least 64 bins are required");
    SpectralBins b;
    b.band = band;
    b.freq.resize(bins);
    b.sigma.resize(bins);
    const double width = band / bins;
    for (int i = 0; i < bins; ++i) {
        const double lo = width * i, hi = i + 1 == bins ? band : width * (i + 1);
        b.freq[i] = 0.5 * (lo + hi);
        b.sigma[i] = std::sqrt(2.0 * spectral_mass(model, lo, hi));
    }
    return b;
}

SeriesGrid simulate_spectral(const SpectralBins& bins, double t0, double dt, std::size_t n, const SimulationConfig& cfg)
{
    require(dt > 0.0 && n >= 1, ErrorKind::Domain, "simulate_spectral: need dt > 0 and n >= 1");
    SeriesGrid out{t0, dt, std::vector<double>(n, 0.0)};
    NormalStream stream(cfg.seed, cfg.replicate_index, cfg.stream);
    constexpr std::size_t kResync = 512;
    for (std::size_t b = 0; b < bins.freq.size(); ++b) {
        const double xi = stream(), eta = stream();
        const double lam = bins.freq[b], s = bins.sigma[b];
        const std::complex<double> rot(std::cos(lam * dt), std::sin(lam * dt));
        std::complex<double> z;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % kResync == 0) {
                const double ph = lam * (t0 + dt * static_cast<double>(i));
                z = {std::cos(ph), std::sin(ph)};
            }
            out.values[i] += s * (xi * z.real() + eta * z.imag());
            z *= rot;
        }
    }
    return out;
}

SeriesGrid simulate_spectral(const ModelParams& model, double t0, double dt, std::size_t n, double band, int bins,
                             const SimulationConfig& cfg)
{
    return simulate_spectral(spectral_bins(model, band, bins), t0, dt, n, cfg);
}

ExactSampler::ExactSampler(const ModelParams& model, const Filter& filter, double a, double gamma, std::int64_t m)
    : m_(m), a_(a), gamma_(gamma), dense_(m <= kDenseLimit)
{
    validate_model(model);
    require(m >= 1, ErrorKind::Domain, "exact sampler: m must be positive");
    require(a > 0.0 && gamma > 0.0, ErrorKind::Domain, "exact sampler: a and gamma must be positive");
    lag0_ = coefficient_covariance(model, filter, a, 0.0);

    if (dense_) {
        const auto lags = covariance_lags(model, filter, a, gamma, static_cast<std::size_t>(m));
        const auto n = static_cast<Eigen::Index>(m);
        Eigen::MatrixXd T(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) T(i, j) = lags[static_cast<std::size_t>(std::abs(i - j))];
        for (double rel : {0.0, 1e-12, 1e-10}) {
            Eigen::MatrixXd work = T;
            work.diagonal().array() += rel * lags[0];
            Eigen::LLT<Eigen::MatrixXd> llt(work);
            if (llt.info() == Eigen::Success) {
                factor_ = llt.matrixL();
                jitter_ = rel * lags[0];
                if (rel > 0.0) warn("exact sampler: covariance needed diagonal jitter " + std::to_string(jitter_));
                return;
            }
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T, Eigen::EigenvaluesOnly);
        fail(ErrorKind::Numerical, "exact sampler: Toeplitz covariance is not positive semidefinite within 1e-10 "
                                   "jitter (m = " + std::to_string(m) + ", a = " + std::to_string(a) +
                                       ", smallest eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()) +
                                       ", lag 0 " + std::to_string(lags[0]) + ")");
    }

    // r_q = int_{-pi}^{pi} cos(q theta) S(theta) d theta with
    // S(theta) = c sum_n w(c (theta + 2 pi n)), c = a / gamma.
    const double c = a / gamma, x = 1.0 / a;
    const double s2 = model.s0 * model.s0, p = 2.0 * model.alpha;
    const double A = filter.support_hi();
    auto w = [&](double eta) {
        if (std::abs(eta) > A) return 0.0;
        const double v = filter.psi_hat(eta);
        const double xe = x * eta;
        return v * v * model.taper(xe) / std::pow(s2 - xe * xe, p);
    };
    n_fft_ = fft::good_size(2 * static_cast<std::size_t>(m));
    const std::size_t half = n_fft_ / 2;
    std::vector<double> symbol(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_fft_);
        const auto n_lo = static_cast<long>(std::ceil((-A / c - theta) / (2.0 * kPi)));
        const auto n_hi = static_cast<long>(std::floor((A / c - theta) / (2.0 * kPi)));
        double s = 0.0;
        for (long j = n_lo; j <= n_hi; ++j) s += w(c * (theta + 2.0 * kPi * static_cast<double>(j)));
        symbol[k] = c * s;
    }
    amplitude_.resize(half + 1);
    const double nd = static_cast<double>(n_fft_);
    for (std::size_t k = 0; k <= half; ++k) {
        const double scale = (k == 0 || k == half) ? 2.0 * kPi / nd : kPi / nd;
        amplitude_[k] = std::sqrt(scale * symbol[k]);
    }
    // Lags implied by the discretized symbol against adaptive quadrature.
    for (int q : {0, 1, 2}) {
        double r = 0.0;
        for (std::size_t k = 0; k <= half; ++k) {
            const double weight = (k == 0 || k == half) ? 1.0 : 2.0;
            r += weight * symbol[k] * std::cos(2.0 * kPi * q * static_cast<double>(k) / nd);
        }
        r *= 2.0 * kPi / nd;
        const double ref = q == 0 ? lag0_ : coefficient_covariance(model, filter, a, gamma * q);
        lag_error_ = std::max(lag_error_, std::abs(r - ref) / lag0_);
    }
    if (lag_error_ > 1e-6)
        warn("exact sampler: spectral grid reproduces the covariance lags only to " + std::to_string(lag_error_) +
             " relative");
}

void ExactSampler::draw_spectral(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream, double* out) const
{
    NormalStream normals(seed, replicate, stream);
    const std::size_t half = n_fft_ / 2;
    std::vector<std::complex<double>> spec(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        const double xi = normals();
        if (k == 0 || k == half) {
            spec[k] = {amplitude_[k] * xi, 0.0};
        } else {
            const double eta = normals();
            spec[k] = {amplitude_[k] * xi, -amplitude_[k] * eta};
        }
    }
    std::vector<double> series;
    fft::inverse_real(spec, series, n_fft_);
    std::copy(series.begin(), series.begin() + m_, out);
}

Eigen::MatrixXd ExactSampler::draw_chunk(std::uint64_t seed, std::uint64_t first, int count, std::uint64_t stream) const
{
    require(count >= 1 && count <= kChunk, ErrorKind::Internal, "exact sampler: chunk size out of range");
    const auto n = static_cast<Eigen::Index>(m_);
    if (!dense_) {
        Eigen::MatrixXd out(n, count);
        for (int r = 0; r < count; ++r) draw_spectral(seed, first + static_cast<std::uint64_t>(r), stream, out.col(r).data());
        return out;
    }
    // Always a full chunk so the product does not depend on the grouping.
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, kChunk);
    for (int r = 0; r < count; ++r) {
        NormalStream normals(seed, first + static_cast<std::uint64_t>(r), stream);
        normals.fill(z.col(r).data(), z.col(r).data() + n);
    }
    Eigen::MatrixXd y = factor_.triangularView<Eigen::Lower>() * z;
    return y.leftCols(count);
}

std::vector<double> ExactSampler::draw(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) const
{
    const Eigen::MatrixXd col = draw_chunk(seed, replicate, 1, stream);
    return {col.data(), col.data() + col.rows()};
}

std::vector<double> ExactSampler::mean_square_chunk(std::uint64_t seed, std::uint64_t first, int count,
                                                    std::uint64_t stream) const
{
    std::vector<double> out(static_cast<std::size_t>(count));
    const double md = static_cast<double>(m_);
    if (dense_) {
        const Eigen::MatrixXd y = draw_chunk(seed, first, count, stream);
        for (int r = 0; r < count; ++r) out[r] = y.col(r).squaredNorm() / md;
        return out;
    }
    std::vector<double> block(static_cast<std::size_t>(m_));
    for (int r = 0; r < count; ++r) {
        draw_spectral(seed, first + static_cast<std::uint64_t>(r), stream, block.data());
        double s = 0.0;
        for (double v : block) s += v * v;
        out[r] = s / md;
    }
    return out;
}

namespace {

std::shared_mutex& cache_mutex()
{
    static std::shared_mutex m;
    return m;
}

std::map<std::string, std::shared_ptr<const ExactSampler>>& cache()
{
    static std::map<std::string, std::shared_ptr<const ExactSampler>> c;
    return c;
}

}  // namespace

std::shared_ptr<const ExactSampler> exact_sampler(const ModelParams& model, const Filter& filter, double a,
                                                  double gamma, std::int64_t m)
{
    std::ostringstream key;
    key << std::hexfloat << model.s0 << '|' << model.alpha << '|' << model.taper_name << '|' << filter.name() << '|'
        << filter.L0() << '|' << filter.L2() << '|' << a << '|' << gamma << '|' << m;
    {
        std::shared_lock lock(cache_mutex());
        auto it = cache().find(key.str());
        if (it != cache().end()) return it->second;
    }
    std::unique_lock lock(cache_mutex());
    auto it = cache().find(key.str());
    if (it != cache().end()) return it->second;
    auto sampler = std::make_shared<const ExactSampler>(model, filter, a, gamma, m);
    cache().emplace(key.str(), sampler);
    return sampler;
}

void clear_exact_sampler_cache()
{
    std::unique_lock lock(cache_mutex());
    cache().clear();
}

CoefficientBlock simulate_coefficients_exact(const ModelParams& model, const Filter& filter, double a, double gamma,
                                             std::int64_t m, const SimulationConfig& cfg, int level)
{
    auto sampler = exact_sampler(model, filter, a, gamma, m);
    CoefficientBlock block;
    block.level = level;
    block.a = a;
    block.gamma = gamma;
    block.values = sampler->draw(cfg.seed, cfg.replicate_index, cfg.stream);
    block.source = CoefficientSource::ExactCovariance;
    return block;
}

}  // namespace cyclo
