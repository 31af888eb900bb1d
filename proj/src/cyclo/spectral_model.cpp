#include "cyclo/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cyclo/error.hpp"
#include "cyclo/quadrature.hpp"

namespace cyclo {

namespace {

constexpr double kPi = std::numbers::pi;

quad::Tolerance tight() { return {1e-14, 1e-12, 200000}; }

std::string num(double v) { return std::to_string(v); }

// Panels never exceed one half-period of cos(zeta eta).
std::vector<double> oscillation_partition(const std::vector<double>& base, double zeta)
{
    std::vector<double> pts;
    const double w = std::abs(zeta);
    for (std::size_t i = 0; i + 1 < base.size(); ++i) {
        const double lo = base[i], hi = base[i + 1];
        const auto panels = std::max<long>(1, static_cast<long>(std::ceil(w * (hi - lo) / kPi)));
        for (long k = 0; k < panels; ++k) pts.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(panels));
    }
    pts.push_back(base.back());
    return pts;
}

}  // namespace

double default_taper(double lam)
{
    const double l2 = lam * lam;
    return 1.0 / (1.0 + l2 * l2 * l2);
}

void validate_model(const ModelParams& model)
{
    require(std::isfinite(model.s0) && model.s0 > 1.0, ErrorKind::Domain, "model: s0 must exceed 1, got " + num(model.s0));
    require(model.alpha > 0.0 && model.alpha < 0.5, ErrorKind::Domain,
            "model: alpha must lie in (0, 1/2), got " + num(model.alpha));
    require(static_cast<bool>(model.taper), ErrorKind::Config, "model: taper is not set");
    require(std::abs(model.taper(0.0) - 1.0) <= 1e-12, ErrorKind::Domain, "model: taper must satisfy h(0) = 1");
    for (int i = 0; i <= 2000; ++i) {
        const double lam = 0.05 * i;
        const double hp = model.taper(lam), hm = model.taper(-lam);
        require(std::isfinite(hp) && hp >= 0.0 && hp <= 1e6, ErrorKind::Domain,
                "model: taper must be finite, nonnegative and bounded");
        require(std::abs(hp - hm) <= 1e-12 * std::max(1.0, std::abs(hp)), ErrorKind::Domain, "model: taper must be even");
    }
    require(model.taper(model.s0) > 0.0, ErrorKind::Domain, "model: taper must be positive at s0");
}

ModelParams make_model(double s0, double alpha, std::function<double(double)> taper, std::string taper_name)
{
    ModelParams m{s0, alpha, std::move(taper), std::move(taper_name)};
    validate_model(m);
    return m;
}

void validate_gegenbauer(const GegenbauerParams& g)
{
    require(std::abs(g.u) <= 1.0, ErrorKind::Domain, "gegenbauer: |u| must not exceed 1");
    require(g.d > 0.0 && g.d < 0.5, ErrorKind::Domain, "gegenbauer: d must lie in (0, 1/2)");
    require(g.sigma_eps >= 0.0 && std::isfinite(g.sigma_eps), ErrorKind::Domain, "gegenbauer: sigma_eps must be nonnegative");
}

ModelParams gegenbauer_to_model(const GegenbauerParams& g)
{
    validate_gegenbauer(g);
    require(g.sigma_eps > 0.0, ErrorKind::Domain, "gegenbauer: sigma_eps must be positive");
    const double s0 = std::acos(g.u);
    require(s0 > 1.0, ErrorKind::Domain, "gegenbauer: arccos(u) = " + num(s0) + " does not exceed 1");
    return make_model(s0, g.d);
}

double spectral_density(const ModelParams& model, double lam)
{
    const double gap = std::abs(lam * lam - model.s0 * model.s0);
    if (gap == 0.0) fail(ErrorKind::Singularity, "spectral density evaluated at the singularity +-s0");
    return model.taper(lam) / std::pow(gap, 2.0 * model.alpha);
}

double spectral_mass(const ModelParams& model, double lo, double hi)
{
    require(lo >= 0.0 && hi >= lo, ErrorKind::Domain, "spectral_mass: need 0 <= lo <= hi");
    if (hi == lo) return 0.0;
    const double s0 = model.s0, p = 2.0 * model.alpha;
    auto regular = [&](double x) { return spectral_density(model, x); };
    auto smooth = [&](double x) { return model.taper(x) / std::pow(x + s0, p); };
    auto plain = [&](double a, double b) { return b > a ? quad::gauss_kronrod(regular, a, b, tight()).value : 0.0; };

    if (hi <= s0 || lo >= s0) {
        // s0 may still be an endpoint.
        if (hi == s0) {
            const double cut = std::max(lo, s0 - 1.0);
            return plain(lo, cut) + quad::integrate_endpoint_singular(smooth, cut, s0, false, p, tight()).value;
        }
        if (lo == s0) {
            const double cut = std::min(hi, s0 + 1.0);
            return quad::integrate_endpoint_singular(smooth, s0, cut, true, p, tight()).value + plain(cut, hi);
        }
        return plain(lo, hi);
    }
    return spectral_mass(model, lo, s0) + spectral_mass(model, s0, hi);
}

double i_zeta(const ModelParams& model, const Filter& filter, double zeta, double x)
{
    x = std::abs(x);
    require(x * filter.support_hi() < model.s0, ErrorKind::Domain,
            "i_zeta: x * A = " + num(x * filter.support_hi()) + " reaches s0; singularity inside the integration range");
    const double s2 = model.s0 * model.s0, p = 2.0 * model.alpha;
    auto integrand = [&](double eta) {
        const double v = filter.psi_hat(eta);
        const double xe = x * eta;
        return std::cos(zeta * eta) * v * v * model.taper(xe) / std::pow(s2 - xe * xe, p);
    };
    const auto pts = oscillation_partition(filter.partition(), zeta);
    auto tol = tight();
    tol.rel_to_magnitude = true;
    return 2.0 * quad::gauss_kronrod(integrand, std::span<const double>(pts), tol).value;
}

double coefficient_covariance(const ModelParams& model, const Filter& filter, double a, double lag_distance)
{
    require(a > 0.0, ErrorKind::Domain, "coefficient_covariance: scale a must be positive");
    return i_zeta(model, filter, lag_distance / a, 1.0 / a);
}

double coefficient_variance_direct(const ModelParams& model, const Filter& filter, double a)
{
    require(a > 0.0, ErrorKind::Domain, "coefficient_variance_direct: scale a must be positive");
    const double s0 = model.s0, p = 2.0 * model.alpha;
    std::vector<double> pts;
    for (double b : filter.partition()) pts.push_back(b / a);
    const bool inside = s0 > pts.front() && s0 < pts.back();
    if (inside) {
        pts.push_back(s0);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }
    auto weight = [&](double xi) {
        const double v = filter.psi_hat(a * xi);
        return a * v * v;
    };
    auto regular = [&](double xi) { return weight(xi) * spectral_density(model, xi); };
    auto smooth = [&](double xi) { return weight(xi) * model.taper(xi) / std::pow(xi + s0, p); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        if (hi <= lo) continue;
        if (hi == s0)
            total += quad::integrate_endpoint_singular(smooth, lo, hi, false, p, tight()).value;
        else if (lo == s0)
            total += quad::integrate_endpoint_singular(smooth, lo, hi, true, p, tight()).value;
        else
            total += quad::gauss_kronrod(regular, lo, hi, tight()).value;
    }
    return 2.0 * total;
}

std::vector<double> covariance_lags(const ModelParams& model, const Filter& filter, double a, double gamma,
                                    std::size_t count)
{
    require(a > 0.0 && gamma > 0.0, ErrorKind::Domain, "covariance_lags: a and gamma must be positive");
    require(count >= 1, ErrorKind::Domain, "covariance_lags: count must be positive");
    const double x = 1.0 / a, theta = gamma / a;
    require(x * filter.support_hi() < model.s0, ErrorKind::Domain,
            "covariance_lags: x * A reaches s0; singularity inside the integration range");
    const double s2 = model.s0 * model.s0, p = 2.0 * model.alpha;

    static const quad::GaussLegendre gl = quad::gauss_legendre(20);
    std::vector<double> nodes, weights;
    const auto& part = filter.partition();
    const double max_phase = theta * static_cast<double>(count - 1);
    for (std::size_t s = 0; s + 1 < part.size(); ++s) {
        const double lo = part[s], hi = part[s + 1];
        if (hi <= lo) continue;
        const auto panels = std::max<long>(16, static_cast<long>(std::ceil(max_phase * (hi - lo) / kPi)));
        const double width = (hi - lo) / static_cast<double>(panels);
        for (long k = 0; k < panels; ++k) {
            const double c = lo + width * (static_cast<double>(k) + 0.5);
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                const double eta = c + 0.5 * width * gl.nodes[i];
                const double v = filter.psi_hat(eta);
                const double xe = x * eta;
                nodes.push_back(eta);
                weights.push_back(0.5 * width * gl.weights[i] * v * v * model.taper(xe) / std::pow(s2 - xe * xe, p));
            }
        }
    }

    const std::size_t n = nodes.size();
    std::vector<double> lags(count, 0.0);
    std::vector<double> prev(n, 1.0), cur(n), step(n);
    for (std::size_t i = 0; i < n; ++i) {
        step[i] = std::cos(theta * nodes[i]);
        cur[i] = step[i];
        lags[0] += weights[i];
    }
    for (std::size_t q = 1; q < count; ++q) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += weights[i] * cur[i];
        lags[q] = sum;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = 2.0 * step[i] * cur[i] - prev[i];
            prev[i] = cur[i];
            cur[i] = next;
        }
    }

    // Integrand is even: each half-line sum counts twice.
    for (auto& r : lags) r *= 2.0;

    std::vector<std::size_t> probes{0, count - 1};
    if (count > 2) probes.push_back(1);
    if (count > 4) probes.push_back(count / 2);
    for (std::size_t q : probes) {
        const double ref = coefficient_covariance(model, filter, a, gamma * static_cast<double>(q));
        require(std::abs(ref - lags[q]) <= 1e-9 * std::abs(lags[0]), ErrorKind::Internal,
                "covariance_lags: panel rule disagrees with adaptive quadrature at lag " + std::to_string(q));
    }
    return lags;
}

double quadratic_variance_from_lags(const std::vector<double>& lags, std::int64_t m)
{
    require(m >= 1, ErrorKind::Domain, "quadratic_variance: m must be positive");
    require(lags.size() >= static_cast<std::size_t>(m), ErrorKind::Internal, "quadratic_variance: too few lags");
    const double md = static_cast<double>(m);
    double sum = md * lags[0] * lags[0];
    for (std::int64_t q = 1; q < m; ++q) sum += 2.0 * (md - static_cast<double>(q)) * lags[q] * lags[q];
    return 2.0 * sum;
}

double quadratic_variance(const ModelParams& model, const Filter& filter, double a, double gamma, std::int64_t m)
{
    require(m >= 1, ErrorKind::Domain, "quadratic_variance: m must be positive");
    return quadratic_variance_from_lags(covariance_lags(model, filter, a, gamma, static_cast<std::size_t>(m)), m);
}

}  // namespace cyclo
