#pragma once

// Adaptive one-dimensional quadrature used throughout the library.
//
// Two independent rules are provided so that integrals can be cross-checked:
// a globally adaptive 21-point Gauss-Kronrod scheme (QUADPACK QAG style) and
// a recursive adaptive Simpson rule. A helper handles integrable algebraic
// endpoint singularities |x - e|^(-p), 0 < p < 1, by the substitution
// x = e +/- t^(1/(1-p)), which removes the singular factor.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace cyclo::quad {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    long evaluations = 0;
    bool converged = true;
};

struct Tolerance {
    double abs = 1e-12;
    double rel = 1e-10;
    int max_intervals = 4000;
    /// Measure `rel` against the integral of |f| instead of |integral of f|;
    /// needed for oscillatory integrands whose value cancels.
    bool rel_to_magnitude = false;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b, value, error, magnitude;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk21(F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = 0.0;
    double resk = fc * kWgk[10];
    double resabs = std::abs(resk);
    std::array<double, 10> fv1{}, fv2{};
    for (int j = 0; j < 10; ++j) {
        const double x = half * kXgk[j];
        const double f1 = f(center - x);
        const double f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    const double value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = 2.220446049250313e-16;
    if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
    return {a, b, value, err, resabs};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod over the partition given by `points`
/// (sorted, at least two entries). Breakpoints are where the integrand has
/// kinks or jumps; the initial panels never straddle them.
template <class F>
Result gauss_kronrod(F&& f, std::span<const double> points, Tolerance tol = {})
{
    std::priority_queue<detail::Panel> heap;
    double total = 0.0, total_err = 0.0, total_mag = 0.0;
    long evals = 0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i + 1] == points[i]) continue;
        auto p = detail::gk21(f, points[i], points[i + 1]);
        evals += 21;
        total += p.value;
        total_err += p.error;
        total_mag += p.magnitude;
        heap.push(p);
    }
    auto target = [&](double value, double mag) {
        return std::max(tol.abs, tol.rel * (tol.rel_to_magnitude ? mag : std::abs(value)));
    };
    int intervals = static_cast<int>(heap.size());
    while (total_err > target(total, total_mag) && intervals < tol.max_intervals) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);
            break;
        }
        auto left = detail::gk21(f, worst.a, mid);
        auto right = detail::gk21(f, mid, worst.b);
        evals += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_mag += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum to shed the drift of the running total.
    double sum = 0.0, err = 0.0, mag = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        mag += heap.top().magnitude;
        heap.pop();
    }
    return {sum, err, evals, err <= target(sum, mag)};
}

template <class F>
Result gauss_kronrod(F&& f, double a, double b, Tolerance tol = {})
{
    const std::array<double, 2> pts{a, b};
    return gauss_kronrod(f, std::span<const double>(pts), tol);
}

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole, double eps, int depth,
                    long& evals, bool& ok)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) {
        ok = false;
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, evals, ok) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, evals, ok);
}

}  // namespace detail

/// Recursive adaptive Simpson with Richardson correction. Independent of the
/// Gauss-Kronrod path; used as the second rule in cross-checks.
template <class F>
Result adaptive_simpson(F&& f, double a, double b, double eps = 1e-12, int max_depth = 48)
{
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    long evals = 3;
    bool ok = true;
    const double v = detail::simpson_step(f, a, b, fa, fm, fb, whole, eps, max_depth, evals, ok);
    return {v, eps, evals, ok};
}

template <class F>
Result adaptive_simpson(F&& f, std::span<const double> points, double eps = 1e-12, int max_depth = 48)
{
    Result total{0.0, 0.0, 0, true};
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i + 1] == points[i]) continue;
        auto r = adaptive_simpson(f, points[i], points[i + 1], eps / static_cast<double>(points.size()), max_depth);
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.evaluations += r.evaluations;
        total.converged = total.converged && r.converged;
    }
    return total;
}

/// Integral of g(x)·|x - e|^(-p) over [lo, hi] where the singular point e is
/// one of the endpoints (`singular_at_lo` selects which) and 0 <= p < 1.
/// `g` must be regular on the closed interval.
template <class G>
Result integrate_endpoint_singular(G&& g, double lo, double hi, bool singular_at_lo, double p, Tolerance tol = {})
{
    if (hi <= lo) return {};
    const double q = 1.0 - p;  // x - e = t^(1/q), dx = (1/q) t^(1/q - 1) dt, |x-e|^(-p) = t^(-p/q)
    const double tmax = std::pow(hi - lo, q);
    auto h = [&](double t) {
        const double d = std::pow(t, 1.0 / q);
        const double x = singular_at_lo ? lo + d : hi - d;
        return g(x) / q;
    };
    return gauss_kronrod(h, 0.0, tmax, tol);
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int n)
{
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        gl.weights[i] = gl.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

}  // namespace cyclo::quad
