#include "cyclo/estimate.hpp"

#include <cmath>
#include <numbers>

#include "cyclo/error.hpp"

namespace cyclo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvE = 0.36787944117144232160;

void require_parameters(double s0, double alpha, const char* where)
{
    require(std::isfinite(s0) && s0 > 1.0 && alpha > 0.0 && alpha < 0.5, ErrorKind::Domain,
            std::string(where) + ": need s0 > 1 and 0 < alpha < 1/2");
}

}  // namespace

double mean_square_stat(std::span<const double> values)
{
    require(!values.empty(), ErrorKind::Domain, "mean_square_stat: empty block");
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return sum / static_cast<double>(values.size());
}

double increment_stat(double dbar_j1, double dbar_j2, double a_j1, double a_j2)
{
    const double denom = 1.0 / (a_j1 * a_j1) - 1.0 / (a_j2 * a_j2);
    require(a_j1 > 0.0 && a_j2 > 0.0 && denom != 0.0, ErrorKind::Domain,
            "increment_stat: scales must be positive and distinct");
    return (dbar_j1 - dbar_j2) / denom;
}

NormalizedStats normalized_stats(double dbar, double dincr, const Filter& filter, std::int64_t m,
                                 const ModelParams& truth, std::optional<double> increment_weight)
{
    require(m >= 1, ErrorKind::Domain, "normalized_stats: m must be positive");
    const double w = increment_weight.value_or(static_cast<double>(m));
    require(w > 0.0, ErrorKind::Domain, "normalized_stats: increment weight must be positive");
    const auto target = phi(truth.s0, truth.alpha);
    return {std::sqrt(static_cast<double>(m)) * (dbar / filter.L0() - target.y1),
            std::sqrt(w) * (dincr / (2.0 * filter.L2()) - target.y2)};
}

MomentPoint phi(double s0, double alpha)
{
    require_parameters(s0, alpha, "phi");
    const double y1 = std::pow(s0, -4.0 * alpha);
    return {y1, alpha * y1 / (s0 * s0)};
}

Eigen::Matrix2d jacobian_phi(double s0, double alpha)
{
    require_parameters(s0, alpha, "jacobian_phi");
    const double scale = std::pow(s0, -4.0 * alpha - 2.0);
    const double ls = std::log(s0);
    Eigen::Matrix2d J;
    J << -4.0 * alpha * s0, -4.0 * s0 * s0 * ls, alpha * (-4.0 * alpha - 2.0) / s0, 1.0 - 4.0 * alpha * ls;
    return scale * J;
}

double lambert_w0(double y)
{
    require(!std::isnan(y), ErrorKind::Domain, "lambert_w0: NaN argument");
    if (y < -kInvE) {
        require(y >= -kInvE * (1.0 + 1e-15), ErrorKind::Domain, "lambert_w0: argument below -1/e");
        y = -kInvE;
    }
    if (y == 0.0) return 0.0;
    if (y == -kInvE) return -1.0;
    if (std::isinf(y)) return y;

    double w;
    if (y < -kInvE + 1e-3) {
        const double p = std::sqrt(2.0 * (std::numbers::e * y + 1.0));
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
    } else if (y < std::numbers::e) {
        w = std::log1p(y);
    } else {
        const double l = std::log(y);
        w = l - std::log(l);
    }
    const double tol = 1e-13 * std::max(1.0, std::abs(y));
    for (int it = 0; it < 50; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - y;
        if (std::abs(f) <= tol) break;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        const double next = w - step;
        if (next == w) break;
        w = std::max(next, -1.0);
    }
    return w;
}

bool in_feasible_region(double y1, double y2) { return y1 > 0.0 && y1 < 1.0 && y2 > 0.0 && y2 < 0.5 * y1 * y1; }

Parameters phi_inverse(const FeasiblePoint& p)
{
    require(in_feasible_region(p.y1, p.y2), ErrorKind::Domain, "phi_inverse: point outside the feasible region");
    const double z = -p.y1 * std::log(p.y1) / (2.0 * p.y2);
    require(z >= -kInvE, ErrorKind::Internal, "phi_inverse: Lambert W argument below -1/e");
    const double w = lambert_w0(z);
    return {std::exp(0.5 * w), p.y2 / p.y1 * std::exp(w)};
}

Truncation truncate_T(double y1, double y2, double eps)
{
    require(eps > 0.0 && eps < 1.0, ErrorKind::Domain, "truncate_T: eps must lie in (0, 1)");
    Truncation t;
    const double t1 = std::max(eps, std::min(y1, 1.0 - eps));
    const double lower = 0.25 * eps * eps;
    const double upper = 0.5 * t1 * t1 - lower;
    double t2;
    if (upper < lower) {
        t2 = lower;
        t.degenerate = true;
    } else {
        t2 = std::max(lower, std::min(y2, upper));
    }
    t.point = {t1, t2};
    t.active = t1 != y1 || t2 != y2;
    return t;
}

EstimateReport adjusted_estimate(double dbar, double dincr, const Filter& filter, std::int64_t m,
                                 const EstimateOptions& options)
{
    require(m >= 1, ErrorKind::Domain, "adjusted_estimate: m must be positive");
    EstimateReport r;
    r.delta_bar = dbar;
    r.delta_incr = dincr;
    r.m = m;
    r.M = options.M > 0 ? options.M : m;
    r.moment = {dbar / filter.L0(), dincr / (2.0 * filter.L2())};
    r.epsilon = 1.0 / static_cast<double>(m);
    if (r.epsilon >= 1.0) r.epsilon = 0.5;  // m = 1 leaves no open band; use the widest admissible margin
    const auto t = truncate_T(r.moment.y1, r.moment.y2, r.epsilon);
    r.truncated = t.point;
    r.truncation_active = t.active;
    r.truncation_degenerate = t.degenerate;
    if (t.degenerate) {
        r.s0_hat = r.alpha_hat = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const auto est = phi_inverse(t.point);
    r.s0_hat = est.s0;
    r.alpha_hat = est.alpha;

    const double i_c = options.i_of_c ? *options.i_of_c : i_of_c(filter, options.c);
    if (options.truth) {
        r.V = asymptotic_covariance(options.truth->s0, options.truth->alpha, filter.L0(), filter.L2(), i_c, options.c);
        r.V_at_truth = true;
    } else if (r.s0_hat > 1.0 && r.alpha_hat > 0.0 && r.alpha_hat < 0.5) {
        r.V = asymptotic_covariance(r.s0_hat, r.alpha_hat, filter.L0(), filter.L2(), i_c, options.c);
    }
    return r;
}

double asymptotic_V1(const ModelParams& model, const Filter& filter, double c)
{
    require(c > 0.0, ErrorKind::Domain, "asymptotic_V1: c must be positive");
    return 4.0 * c * kPi * std::pow(model.s0, -8.0 * model.alpha) * i_of_c(filter, c);
}

Eigen::Matrix2d asymptotic_covariance(double s0, double alpha, double L0, double L2, double i_c, double c)
{
    require_parameters(s0, alpha, "asymptotic_covariance");
    require(c > 0.0 && L0 > 0.0 && L2 > 0.0 && i_c > 0.0, ErrorKind::Domain,
            "asymptotic_covariance: c, L0, L2 and I(c) must be positive");
    const double ls = std::log(s0);
    const double pref = c * kPi * s0 * s0 * i_c / (4.0 * alpha * alpha * (1.0 + 2.0 * ls) * (1.0 + 2.0 * ls));
    const double L0s = L0 * L0, L2s = L2 * L2;
    const double u = 1.0 - 4.0 * alpha * ls;
    const double v11 = u * u / L0s + 8.0 * std::pow(s0, 4) * ls * ls / L2s;
    const double v12 = u * alpha * (4.0 * alpha + 2.0) / (s0 * L0s) - 8.0 * alpha * s0 * s0 * s0 * ls / L2s;
    const double v22 = alpha * alpha * (4.0 * alpha + 2.0) * (4.0 * alpha + 2.0) / (s0 * s0 * L0s) +
                       8.0 * alpha * alpha * s0 * s0 / L2s;
    Eigen::Matrix2d V;
    V << v11, v12, v12, v22;
    return pref * V;
}

Eigen::Matrix2d asymptotic_covariance(double s0, double alpha, const Filter& filter, double c)
{
    return asymptotic_covariance(s0, alpha, filter.L0(), filter.L2(), i_of_c(filter, c), c);
}

Eigen::Matrix2d asymptotic_covariance_sandwich(double s0, double alpha, double L0, double L2, double i_c, double c)
{
    require_parameters(s0, alpha, "asymptotic_covariance_sandwich");
    const double v1 = 4.0 * c * kPi * std::pow(s0, -8.0 * alpha) * i_c;
    Eigen::Matrix2d inner = Eigen::Matrix2d::Zero();
    inner(0, 0) = v1 / (L0 * L0);
    inner(1, 1) = v1 / (2.0 * L2 * L2);
    const Eigen::Matrix2d inv = jacobian_phi(s0, alpha).inverse();
    return inv * inner * inv.transpose();
}

double correlation(const Eigen::Matrix2d& V) { return V(0, 1) / std::sqrt(V(0, 0) * V(1, 1)); }

double shannon_correlation_explicit(double s0, double alpha)
{
    require_parameters(s0, alpha, "shannon_correlation_explicit");
    const double ls = std::log(s0);
    const double u = 1.0 - 4.0 * alpha * ls;
    const double k0 = 1.0 / (4.0 * kPi * kPi);     // 1 / L0^2
    const double k2 = 18.0 / std::pow(kPi, 6);     // 8 / L2^2 with L2 = 2 pi^3 / 3
    const double num = k0 / s0 * u * alpha * (4.0 * alpha + 2.0) - k2 * alpha * s0 * s0 * s0 * ls;
    const double d1 = k0 * u * u + k2 * std::pow(s0, 4) * ls * ls;
    const double d2 = k0 / (s0 * s0) * alpha * alpha * (4.0 * alpha + 2.0) * (4.0 * alpha + 2.0) + k2 * alpha * alpha * s0 * s0;
    return num / std::sqrt(d1 * d2);
}

double asymptotic_correlation(double s0, double alpha, const Filter& filter, double c)
{
    const double rho = correlation(asymptotic_covariance(s0, alpha, filter, c));
    if (filter.name() == "shannon") {
        const double explicit_rho = shannon_correlation_explicit(s0, alpha);
        require(std::abs(explicit_rho - rho) <= 1e-9, ErrorKind::Internal,
                "asymptotic_correlation: explicit Shannon formula disagrees with the matrix form");
    }
    return rho;
}

}  // namespace cyclo
