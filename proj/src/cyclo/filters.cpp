#include "cyclo/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "cyclo/error.hpp"
#include "cyclo/quadrature.hpp"

namespace cyclo {

namespace {

constexpr double kPi = std::numbers::pi;

quad::Tolerance moment_tolerance() { return {1e-14, 1e-13, 20000}; }

// Natural cubic spline on a uniform grid, used for the tabulated Meyer time form.
class UniformSpline {
public:
    UniformSpline(double x0, double step, std::vector<double> y) : x0_(x0), h_(step), y_(std::move(y))
    {
        const std::size_t n = y_.size();
        m_.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (h_ * h_);
            const double denom = 4.0 - c[i - 1];
            c[i] = 1.0 / denom;
            d[i] = (rhs - d[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
            if (i == 1) break;
        }
    }

    double operator()(double x) const
    {
        const double u = (x - x0_) / h_;
        if (u < 0.0 || u > static_cast<double>(y_.size() - 1)) return 0.0;
        auto i = static_cast<std::size_t>(u);
        if (i >= y_.size() - 1) i = y_.size() - 2;
        const double t = u - static_cast<double>(i);
        const double a = 1.0 - t;
        return a * y_[i] + t * y_[i + 1] + h_ * h_ / 6.0 * ((a * a * a - a) * m_[i] + (t * t * t - t) * m_[i + 1]);
    }

private:
    double x0_, h_;
    std::vector<double> y_, m_;
};

double meyer_hat(double eta)
{
    const double e = std::abs(eta);
    if (e <= 2.0 * kPi / 3.0) return 1.0;
    if (e <= 4.0 * kPi / 3.0) {
        const double x = std::clamp(3.0 * e / (2.0 * kPi) - 1.0, 0.0, 1.0);
        return std::cos(0.5 * kPi * x);
    }
    return 0.0;
}

}  // namespace

Filter::Filter(Definition def) : def_(std::move(def))
{
    require(def_.partition.size() >= 2, ErrorKind::Config, "filter " + def_.name + ": partition needs two points");
    require(std::is_sorted(def_.partition.begin(), def_.partition.end()), ErrorKind::Config,
            "filter " + def_.name + ": partition must be ascending");
    const double lo = def_.partition.front(), hi = def_.partition.back();
    require(lo >= 0.0 && hi > lo, ErrorKind::Config, "filter " + def_.name + ": need 0 <= B < A");

    double peak = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double eta = lo + (hi - lo) * i / 400.0;
        peak = std::max(peak, std::abs(psi_hat(eta)));
        require(std::abs(psi_hat(eta) - psi_hat(-eta)) <= 1e-12 * (1.0 + std::abs(psi_hat(eta))), ErrorKind::Config,
                "filter " + def_.name + ": psi_hat is not even");
    }
    const double limit = def_.support_tolerance * std::max(peak, 1e-300) * (1.0 + 1e-9);
    for (int i = 1; i <= 200; ++i) {
        const double outside = hi * (1.0 + 0.05 * i);
        require(std::abs(psi_hat(outside)) <= limit, ErrorKind::Config,
                "filter " + def_.name + ": psi_hat exceeds tolerance outside [B, A]");
        if (lo > 0.0) {
            const double inside = lo * i / 201.0;
            require(std::abs(psi_hat(inside)) <= limit, ErrorKind::Config,
                    "filter " + def_.name + ": psi_hat exceeds tolerance inside (-B, B)");
        }
    }
    L0_ = moment(0);
    L2_ = moment(2);
    require(L0_ > 0.0 && L2_ > 0.0, ErrorKind::Config, "filter " + def_.name + ": moments must be positive");
}

double Filter::psi_time(double t) const
{
    require(has_time_form(), ErrorKind::Config, "filter " + name() + " has no time-domain form");
    return def_.psi_time(t);
}

double Filter::moment(int power, bool use_simpson) const
{
    auto integrand = [&](double eta) {
        const double v = psi_hat(eta);
        return std::pow(eta, power) * v * v;
    };
    if (use_simpson) return 2.0 * quad::adaptive_simpson(integrand, std::span<const double>(def_.partition), 1e-13).value;
    return 2.0 * quad::gauss_kronrod(integrand, std::span<const double>(def_.partition), moment_tolerance()).value;
}

double Filter::quartic_integral(bool use_simpson) const
{
    auto integrand = [&](double eta) {
        const double v = psi_hat(eta);
        return v * v * v * v;
    };
    if (use_simpson) return 2.0 * quad::adaptive_simpson(integrand, std::span<const double>(def_.partition), 1e-13).value;
    return 2.0 * quad::gauss_kronrod(integrand, std::span<const double>(def_.partition), moment_tolerance()).value;
}

FilterPtr shannon_filter()
{
    Filter::Definition def;
    def.name = "shannon";
    def.psi_hat = [](double eta) { return std::abs(eta) <= kPi ? 1.0 : 0.0; };
    def.partition = {0.0, kPi};
    def.psi_time = [](double t) { return t == 0.0 ? 1.0 : std::sin(kPi * t) / (kPi * t); };
    // The sinc tail decays like 1/t; the radius bounds the tail energy
    // 2/(pi^2 R) by 1e-4.
    def.time_radius = 2048.0;
    def.reference = {2.0 * kPi, 2.0 * kPi * kPi / 3.0, std::nullopt};
    return std::make_shared<const Filter>(std::move(def));
}

FilterPtr meyer_filter()
{
    // psi(t) = (1/pi) int_0^{4pi/3} psi_hat(eta) cos(eta t) d eta, tabulated on
    // [0, 64] and spline-interpolated. The tail decays like 1/t^2 and is cut.
    constexpr double step = 1.0 / 32.0;
    constexpr double t_max = 64.0;
    const auto gl = quad::gauss_legendre(64);
    const std::vector<double> breaks = {0.0, kPi / 3.0, 2.0 * kPi / 3.0, kPi, 4.0 * kPi / 3.0};
    const auto count = static_cast<std::size_t>(t_max / step) + 1;
    std::vector<double> table(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = step * static_cast<double>(k);
        double sum = 0.0;
        for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
            const double c = 0.5 * (breaks[p] + breaks[p + 1]), h = 0.5 * (breaks[p + 1] - breaks[p]);
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                const double eta = c + h * gl.nodes[i];
                sum += h * gl.weights[i] * meyer_hat(eta) * std::cos(eta * t);
            }
        }
        table[k] = sum / kPi;
    }
    auto spline = std::make_shared<UniformSpline>(0.0, step, std::move(table));

    Filter::Definition def;
    def.name = "meyer";
    def.psi_hat = meyer_hat;
    def.partition = {0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};
    def.psi_time = [spline](double t) { return (*spline)(std::abs(t)); };
    def.time_form_approximate = true;
    def.time_radius = t_max;
    def.reference = {2.0 * kPi, 8.0 / 9.0 * kPi * (kPi * kPi - 2.0), 11.0 * kPi / 6.0};
    return std::make_shared<const Filter>(std::move(def));
}

FilterPtr mexican_hat_filter(double sigma)
{
    require(sigma > 0.0, ErrorKind::Domain, "mexican hat: sigma must be positive");
    const double k_hat = std::sqrt(8.0) * std::pow(kPi, 0.25) * std::pow(sigma, 2.5) / std::sqrt(3.0);
    const double k_time = 2.0 / (std::sqrt(3.0 * sigma) * std::pow(kPi, 0.25));
    auto hat = [k_hat, sigma](double eta) { return k_hat * eta * eta * std::exp(-0.5 * sigma * sigma * eta * eta); };
    auto time = [k_time, sigma](double t) {
        const double u = t / sigma;
        return k_time * (1.0 - u * u) * std::exp(-0.5 * u * u);
    };

    // Effective band at relative tolerance 1e-8 of the peak at eta = sqrt(2)/sigma.
    constexpr double tol = 1e-8;
    const double peak = hat(std::sqrt(2.0) / sigma);
    const double level = tol * peak;
    auto bisect = [&](auto&& g, double lo, double hi) {
        for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double b_eff = bisect([&](double e) { return hat(e) >= level; }, 0.0, std::sqrt(2.0) / sigma);
    const double a_eff = bisect([&](double e) { return hat(e) < level; }, std::sqrt(2.0) / sigma, 40.0 / sigma);
    const double r_eff = bisect([&](double t) { return std::abs(time(t)) < tol * k_time; }, 2.0 * sigma, 40.0 * sigma);

    Filter::Definition def;
    def.name = "mexican_hat";
    def.psi_hat = hat;
    def.partition = {b_eff, std::sqrt(2.0) / sigma, a_eff};
    def.psi_time = time;
    def.time_radius = r_eff;
    def.support_tolerance = tol;
    if (sigma == 1.0) def.reference = {2.0, 10.0, std::nullopt};
    return std::make_shared<const Filter>(std::move(def));
}

FilterPtr tabulated_filter(std::string name, std::vector<double> eta, std::vector<double> values)
{
    require(eta.size() >= 2 && eta.size() == values.size(), ErrorKind::Config,
            "tabulated filter: need matching eta/value arrays with at least two samples");
    require(std::is_sorted(eta.begin(), eta.end()) && eta.front() >= 0.0, ErrorKind::Config,
            "tabulated filter: eta must be ascending and nonnegative");
    auto xs = std::make_shared<std::vector<double>>(eta);
    auto ys = std::make_shared<std::vector<double>>(std::move(values));
    Filter::Definition def;
    def.name = std::move(name);
    def.psi_hat = [xs, ys](double e) {
        e = std::abs(e);
        if (e < xs->front() || e > xs->back()) return 0.0;
        auto it = std::upper_bound(xs->begin(), xs->end(), e);
        if (it == xs->end()) return ys->back();
        const auto i = static_cast<std::size_t>(it - xs->begin());
        const double t = (e - (*xs)[i - 1]) / ((*xs)[i] - (*xs)[i - 1]);
        return (1.0 - t) * (*ys)[i - 1] + t * (*ys)[i];
    };
    def.partition = std::move(eta);
    return std::make_shared<const Filter>(std::move(def));
}

FilterPtr filter_by_name(const std::string& name, double sigma)
{
    if (name == "shannon") return shannon_filter();
    if (name == "meyer") return meyer_filter();
    if (name == "mexican_hat" || name == "mexican-hat") return mexican_hat_filter(sigma);
    fail(ErrorKind::Config, "unknown filter '" + name + "' (expected shannon, meyer or mexican_hat)");
}

std::pair<double, double> effective_support(const Filter& filter, double tol)
{
    require(tol > 0.0 && tol < 1.0, ErrorKind::Domain, "effective_support: tol must lie in (0, 1)");
    const double lo = filter.support_lo(), hi = filter.support_hi();
    constexpr int grid = 4000;
    double peak = 0.0;
    for (int i = 0; i <= grid; ++i) peak = std::max(peak, std::abs(filter.psi_hat(lo + (hi - lo) * i / grid)));
    for (double p : filter.partition()) peak = std::max(peak, std::abs(filter.psi_hat(p)));
    const double level = tol * peak;
    auto above = [&](double e) { return std::abs(filter.psi_hat(e)) >= level; };
    auto refine = [&](double inside, double outside) {
        // `inside` satisfies above(), `outside` does not.
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (inside + outside);
            if (mid == inside || mid == outside) break;
            (above(mid) ? inside : outside) = mid;
        }
        return inside;
    };

    // Scan downward from beyond A for the last grid point above the level.
    const double top = hi * 1.5 + 1.0;
    double a_eff = hi;
    for (int i = grid; i >= 0; --i) {
        const double e = top * i / grid;
        if (above(e)) {
            a_eff = i == grid ? e : refine(e, top * (i + 1) / grid);
            break;
        }
    }
    double b_eff = 0.0;
    if (!above(0.0)) {
        for (int i = 1; i <= grid; ++i) {
            const double e = a_eff * i / grid;
            if (above(e)) {
                // Bisect between e (above) and the previous point (below).
                double inside = e, outside = a_eff * (i - 1) / grid;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (inside + outside);
                    if (mid == inside || mid == outside) break;
                    (above(mid) ? inside : outside) = mid;
                }
                b_eff = inside;
                break;
            }
        }
    }
    return {b_eff, a_eff};
}

double periodized_energy(const Filter& filter, double eta, double c)
{
    require(c > 0.0, ErrorKind::Domain, "periodized_energy: c must be positive");
    const double period = 2.0 * c * kPi;
    const double A = filter.support_hi();
    const auto n_lo = static_cast<long>(std::ceil((-A - eta) / period));
    const auto n_hi = static_cast<long>(std::floor((A - eta) / period));
    double sum = 0.0;
    for (long n = n_lo; n <= n_hi; ++n) {
        const double v = filter.psi_hat(eta + static_cast<double>(n) * period);
        sum += v * v;
    }
    return sum;
}

double i_of_c_quadrature(const Filter& filter, double c, bool use_simpson)
{
    require(c > 0.0, ErrorKind::Domain, "I(c): c must be positive");
    const double half = c * kPi;
    const double period = 2.0 * half;
    // Breakpoints of F0 on [0, c pi]: shifted filter partition points.
    std::set<double> cuts{0.0, half};
    for (double p : filter.partition()) {
        for (double s : {p, -p}) {
            const double r = std::remainder(s, period);  // in [-c pi, c pi]
            if (std::abs(r) > 0.0 && std::abs(r) < half) cuts.insert(std::abs(r));
        }
    }
    const std::vector<double> pts(cuts.begin(), cuts.end());
    auto integrand = [&](double eta) {
        const double f0 = periodized_energy(filter, eta, c);
        return f0 * f0;
    };
    if (use_simpson) return 2.0 * quad::adaptive_simpson(integrand, std::span<const double>(pts), 1e-13).value;
    return 2.0 * quad::gauss_kronrod(integrand, std::span<const double>(pts), {1e-14, 1e-13, 20000}).value;
}

double shannon_i_closed(double c)
{
    require(c > 0.0, ErrorKind::Domain, "shannon_i_closed: c must be positive");
    if (c >= 1.0) return 2.0 * kPi;
    const double n_star = std::floor((1.0 - c) / (2.0 * c));
    const double eta_star = kPi * (1.0 - 2.0 * c * (1.0 + n_star));
    const double sign = eta_star < 0.0 ? -1.0 : 1.0;  // sign(0) := +1; both branches agree there
    const double inner = 2.0 * n_star + 2.0 + sign;
    const double outer = 2.0 * n_star + 2.0;
    return 2.0 * std::abs(eta_star) * inner * inner + 2.0 * (c * kPi - std::abs(eta_star)) * outer * outer;
}

double i_of_c(const Filter& filter, double c)
{
    if (filter.name() != "shannon") return i_of_c_quadrature(filter, c);
    const double closed = shannon_i_closed(c);
    const double numeric = i_of_c_quadrature(filter, c);
    require(std::abs(closed - numeric) <= 1e-8 * closed, ErrorKind::Internal,
            "Shannon I(c) closed form disagrees with quadrature");
    return closed;
}

}  // namespace cyclo
