#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>

#include "cyclo/filters.hpp"
#include "cyclo/spectral_model.hpp"

namespace cyclo {

/// (delta_bar / L0, delta_incr / (2 L2)); not yet constrained to the feasible region.
struct MomentPoint {
    double y1 = 0.0;
    double y2 = 0.0;
};

/// Point of D = {0 < y1 < 1, 0 < y2 < y1^2 / 2}.
struct FeasiblePoint {
    double y1 = 0.0;
    double y2 = 0.0;
};

struct Truncation {
    FeasiblePoint point;
    bool active = false;      ///< the clamp moved the point
    bool degenerate = false;  ///< upper y2 bound fell below the lower one
};

struct EstimateReport {
    double delta_bar = 0.0;
    double delta_incr = 0.0;
    MomentPoint moment;
    double epsilon = 0.0;
    FeasiblePoint truncated;
    bool truncation_active = false;
    bool truncation_degenerate = false;
    double s0_hat = 0.0;
    double alpha_hat = 0.0;
    Eigen::Matrix2d V = Eigen::Matrix2d::Constant(std::numeric_limits<double>::quiet_NaN());
    bool V_at_truth = false;
    std::int64_t m = 0;
    std::int64_t M = 0;
};

struct NormalizedStats {
    double S1 = 0.0;
    double S2 = 0.0;
};

/// (1/m) sum delta_k^2.
double mean_square_stat(std::span<const double> values);

/// (dbar_j1 - dbar_j2) / (a_j1^-2 - a_j2^-2).
double increment_stat(double dbar_j1, double dbar_j2, double a_j1, double a_j2);

/// S1 = sqrt(m) (dbar/L0 - s0^-4a); S2 = sqrt(w) (dincr/(2 L2) - a s0^(-4a-2)).
/// `increment_weight` w defaults to m; with a capped increment design pass
/// M (a_{j+1}^-2 - a_{j+2}^-2)^2 so that S2 keeps its limiting scale.
NormalizedStats normalized_stats(double dbar, double dincr, const Filter& filter, std::int64_t m,
                                 const ModelParams& truth, std::optional<double> increment_weight = std::nullopt);

MomentPoint phi(double s0, double alpha);
Eigen::Matrix2d jacobian_phi(double s0, double alpha);

/// Principal branch of Lambert W on [-1/e, inf).
double lambert_w0(double y);

struct Parameters {
    double s0 = 0.0;
    double alpha = 0.0;
};

Parameters phi_inverse(const FeasiblePoint& p);

bool in_feasible_region(double y1, double y2);

Truncation truncate_T(double y1, double y2, double eps);

struct EstimateOptions {
    double c = 1.0;                       ///< level-scheme limit a_j / gamma_j
    std::optional<double> i_of_c;         ///< precomputed I(c)
    std::optional<ModelParams> truth;     ///< evaluate V here instead of at the estimate
    std::int64_t M = 0;                   ///< increment count; 0 means m
};

EstimateReport adjusted_estimate(double dbar, double dincr, const Filter& filter, std::int64_t m,
                                 const EstimateOptions& options = {});

/// V1 = 4 c pi s0^(-8 alpha) I(c).
double asymptotic_V1(const ModelParams& model, const Filter& filter, double c);

/// Closed-form entries of V_{s0,alpha}.
Eigen::Matrix2d asymptotic_covariance(double s0, double alpha, const Filter& filter, double c);
Eigen::Matrix2d asymptotic_covariance(double s0, double alpha, double L0, double L2, double i_c, double c);
/// (D Phi)^-1 diag(V1/L0^2, V1/(2 L2^2)) (D Phi)^-T.
Eigen::Matrix2d asymptotic_covariance_sandwich(double s0, double alpha, double L0, double L2, double i_c, double c);

double correlation(const Eigen::Matrix2d& V);
/// For the Shannon filter the explicit correlation formula is evaluated as
/// well and must agree to 1e-9.
double asymptotic_correlation(double s0, double alpha, const Filter& filter, double c);
/// Explicit Shannon correlation (independent of c since I(c) cancels).
double shannon_correlation_explicit(double s0, double alpha);

}  // namespace cyclo
