#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclo/estimate.hpp"
#include "cyclo/filters.hpp"
#include "cyclo/spectral_model.hpp"
#include "cyclo/transform.hpp"
#include "cyclo/types.hpp"

namespace cyclo {

enum class Simulator { GegenbauerMA, SpectralBin, ExactCovariance };

const char* to_string(Simulator s);
Simulator simulator_from_string(const std::string& name);

struct MCConfig {
    std::int64_t replicates = 2000;
    ModelParams truth;
    std::optional<GegenbauerParams> gegenbauer;  ///< required by the MA simulator
    FilterPtr filter;
    LevelScheme scheme;
    int level = 5;
    Simulator simulator = Simulator::ExactCovariance;
    std::uint64_t seed = 1;
    int workers = 1;
    // Series simulators only.
    double band = 0.0;   ///< 0 selects max(2 s0, s0 + 1)
    int bins = 4096;
    int truncation_N = 100;
};

struct NormalityResult {
    std::string test;
    double statistic = 0.0;
    double p_value = 0.0;
};

struct ReplicateEstimate {
    double s0_hat = 0.0;
    double alpha_hat = 0.0;
    bool truncated = false;
};

struct MCReport {
    std::int64_t replicates = 0;
    std::uint64_t seed = 0;
    std::string simulator;
    std::string filter;
    int level = 0;
    std::int64_t m = 0;
    std::int64_t M = 0;
    double M_uncapped = 0.0;
    bool M_capped = false;
    double increment_weight = 0.0;  ///< normalizer of S2: M (a_{j+1}^-2 - a_{j+2}^-2)^2
    double c = 1.0;
    double V1 = 0.0;
    std::vector<double> samples_S1, samples_S2;
    std::vector<ReplicateEstimate> estimates;
    NormalityResult normality_S1, normality_S2;
    double corr_S1_S2 = 0.0;
    double empirical_var_S1 = 0.0, empirical_var_S2 = 0.0;
    double theory_var_S1 = 0.0, theory_var_S2 = 0.0;
    double truncation_rate = 0.0;
    double mean_abs_error_s0 = 0.0, mean_abs_error_alpha = 0.0;
    double mean_s0_hat = 0.0, mean_alpha_hat = 0.0;
    double truth_s0 = 0.0, truth_alpha = 0.0;
    std::vector<std::string> warnings;
    double runtime_seconds = 0.0;  ///< not part of the JSON report
};

MCReport run_replicates(const MCConfig& cfg);

/// Report as JSON text. Runtime is excluded so reports compare byte for byte.
std::string report_json(const MCReport& report, bool include_samples = true);

/// Anderson-Darling test for normality with estimated mean and variance.
NormalityResult normality_test(const std::vector<double>& samples);

/// (standard normal quantile at (i - 0.5)/n, i-th standardized order statistic).
std::vector<std::pair<double, double>> qq_data(const std::vector<double>& samples);

struct Ellipse {
    std::array<double, 2> center{};
    std::array<double, 2> axes{};  ///< semi-axes, major first
    double angle = 0.0;            ///< direction of the major axis, in (-pi/2, pi/2]
};

Ellipse ellipse_data(const std::vector<double>& xs, const std::vector<double>& ys, double level);

/// (lambda_k, (1/(2 pi n)) |sum_t X_t e^{-i lambda_k t}|^2) for lambda_k = 2 pi k / n, k = 0..n/2.
std::vector<std::pair<double, double>> periodogram(const SeriesGrid& series);

/// Biased sample autocovariance for lags 0..maxlag.
std::vector<double> sample_autocovariance(const SeriesGrid& series, std::size_t maxlag);

double sample_variance(const std::vector<double>& x);
double sample_correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cyclo
