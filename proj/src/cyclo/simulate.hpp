#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "cyclo/filters.hpp"
#include "cyclo/spectral_model.hpp"
#include "cyclo/types.hpp"

namespace cyclo {

struct SimulationConfig {
    std::uint64_t seed = 0;
    int truncation_N = 100;
    std::uint64_t replicate_index = 0;
    std::uint64_t stream = 0;  ///< level component of the RNG key
};

/// C_n^(d)(u) by the explicit finite sum in 50-digit arithmetic. `cancellation`
/// receives the ratio of the absolute term sum to |C_n|; the double result is
/// exact while it stays below about 1e30.
double gegenbauer_coeff_explicit(double u, double d, int n, double* cancellation = nullptr);

/// C_0..C_N by the three-term recurrence.
std::vector<double> gegenbauer_coeffs(double u, double d, int N);

/// Estimated sum_{n > N} C_n^2 (exact partial sum to a horizon plus a power-law tail).
double gegenbauer_tail_energy(double u, double d, int N);

/// X(t) = sum_{n <= N} C_n eps(t - n) on t = 0..len-1 with Gaussian eps.
SeriesGrid simulate_gegenbauer(const GegenbauerParams& g, std::size_t len, const SimulationConfig& cfg);

/// Frequency bins of [0, band] with masses sigma_b^2 = 2 int_bin f.
struct SpectralBins {
    double band = 0.0;
    std::vector<double> freq;   ///< bin midpoints
    std::vector<double> sigma;  ///< sqrt of the bin masses
    double total_mass() const;
};

SpectralBins spectral_bins(const ModelParams& model, double band, int bins);

/// X(t) = sum_b sigma_b (xi_b cos(lambda_b t) + eta_b sin(lambda_b t)) on t = t0 + i dt.
SeriesGrid simulate_spectral(const SpectralBins& bins, double t0, double dt, std::size_t n, const SimulationConfig& cfg);
SeriesGrid simulate_spectral(const ModelParams& model, double t0, double dt, std::size_t n, double band, int bins,
                             const SimulationConfig& cfg);

/// Exact Gaussian sampler of (delta_1..delta_m) with Toeplitz covariance
/// I_{gamma (k-l)/a}(1/a). Dense Cholesky up to kDenseLimit; above it the
/// spectral symbol of the Toeplitz sequence is sampled on an FFT grid.
class ExactSampler {
public:
    static constexpr std::int64_t kDenseLimit = 4096;
    static constexpr int kChunk = 32;

    ExactSampler(const ModelParams& model, const Filter& filter, double a, double gamma, std::int64_t m);

    std::int64_t m() const { return m_; }
    double a() const { return a_; }
    double gamma() const { return gamma_; }
    bool dense() const { return dense_; }
    double lag0() const { return lag0_; }
    /// Diagonal jitter added to reach a factorization (0 when none).
    double jitter() const { return jitter_; }
    /// Largest deviation of the sampled lags from adaptive quadrature, relative to lag 0.
    double lag_error() const { return lag_error_; }
    std::size_t fft_size() const { return n_fft_; }

    /// Draws for replicates first..first+count-1 (count <= kChunk) from the
    /// streams keyed (seed, replicate, stream). Column r holds replicate
    /// first + r. Results do not depend on how replicates are grouped.
    Eigen::MatrixXd draw_chunk(std::uint64_t seed, std::uint64_t first, int count, std::uint64_t stream) const;
    std::vector<double> draw(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) const;
    /// (1/m) sum_k delta_k^2 for each replicate of a chunk, without keeping the draws.
    std::vector<double> mean_square_chunk(std::uint64_t seed, std::uint64_t first, int count, std::uint64_t stream) const;

private:
    void draw_spectral(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream, double* out) const;

    std::int64_t m_;
    double a_, gamma_;
    bool dense_;
    double lag0_ = 0.0;
    double jitter_ = 0.0;
    double lag_error_ = 0.0;
    Eigen::MatrixXd factor_;
    std::size_t n_fft_ = 0;
    std::vector<double> amplitude_;  ///< per FFT bin k = 0..n/2
};

/// Shared sampler for (model, filter, a, gamma, m); built once, then read concurrently.
std::shared_ptr<const ExactSampler> exact_sampler(const ModelParams& model, const Filter& filter, double a,
                                                  double gamma, std::int64_t m);
void clear_exact_sampler_cache();

CoefficientBlock simulate_coefficients_exact(const ModelParams& model, const Filter& filter, double a, double gamma,
                                             std::int64_t m, const SimulationConfig& cfg, int level = 0);

}  // namespace cyclo
