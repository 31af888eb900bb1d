#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cyclo/filters.hpp"

namespace cyclo {

/// h(lambda) = 1 / (1 + lambda^6).
double default_taper(double lam);

/// Spectral density f(lambda) = h(lambda) / |lambda^2 - s0^2|^(2 alpha).
struct ModelParams {
    double s0 = 2.0;
    double alpha = 0.25;
    std::function<double(double)> taper = default_taper;
    std::string taper_name = "default";
};

/// Validates s0 > 1, 0 < alpha < 1/2 and the taper conditions; throws on failure.
ModelParams make_model(double s0, double alpha, std::function<double(double)> taper = default_taper,
                       std::string taper_name = "default");
void validate_model(const ModelParams& model);

struct GegenbauerParams {
    double u = 0.3;
    double d = 0.1;
    double sigma_eps = 1.0;
};

void validate_gegenbauer(const GegenbauerParams& g);
/// s0 = arccos(u), alpha = d, default taper.
ModelParams gegenbauer_to_model(const GegenbauerParams& g);

double spectral_density(const ModelParams& model, double lam);

/// Integral of f over [lo, hi], 0 <= lo < hi, split at s0 with the singular
/// substitution on the adjacent pieces.
double spectral_mass(const ModelParams& model, double lo, double hi);

/// I_zeta(x) = int cos(zeta eta) |psi_hat(eta)|^2 h(x eta) / (s0^2 - x^2 eta^2)^(2 alpha) d eta.
/// Requires |x| * A < s0.
double i_zeta(const ModelParams& model, const Filter& filter, double zeta, double x);

/// Cov(delta_jk, delta_jl) = I_{lag/a}(1/a), lag = b_jk - b_jl.
double coefficient_covariance(const ModelParams& model, const Filter& filter, double a, double lag_distance);

/// Var(delta_jk) = a int |psi_hat(a xi)|^2 f(xi) d xi evaluated directly in xi,
/// splitting at the singularity. Independent of the i_zeta path.
double coefficient_variance_direct(const ModelParams& model, const Filter& filter, double a);

/// r_q = coefficient_covariance(a, gamma q) for q = 0..count-1, from a fixed
/// Gauss-Legendre panel rule with a cosine recurrence. Spot-checked against
/// i_zeta; throws Internal on disagreement.
std::vector<double> covariance_lags(const ModelParams& model, const Filter& filter, double a, double gamma,
                                    std::size_t count);

/// Var(delta^(2,m)) = 2 sum_{|q|<m} (m - |q|) r_q^2.
double quadratic_variance(const ModelParams& model, const Filter& filter, double a, double gamma, std::int64_t m);
double quadratic_variance_from_lags(const std::vector<double>& lags, std::int64_t m);

}  // namespace cyclo
