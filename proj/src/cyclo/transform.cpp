#include "cyclo/transform.hpp"

#include <climits>
#include <cmath>
#include <limits>

#include "cyclo/error.hpp"
#include "cyclo/log.hpp"

namespace cyclo {

double LevelScheme::a(int j) const
{
    require(j >= 1, ErrorKind::Config, "level scheme: levels start at j = 1");
    switch (scale) {
    case Scale::Geometric: return std::pow(base, j);
    case Scale::Linear: return step * j;
    case Scale::Explicit:
        require(static_cast<std::size_t>(j) <= a_list.size(), ErrorKind::Config,
                "level scheme: a_j not configured for j = " + std::to_string(j));
        return a_list[static_cast<std::size_t>(j) - 1];
    }
    fail(ErrorKind::Internal, "level scheme: bad scale kind");
}

double LevelScheme::gamma(int j) const
{
    return shift == Shift::Proportional ? a(j) / c : gamma_const;
}

std::int64_t LevelScheme::m(int j) const
{
    switch (count) {
    case Count::Constant: return m_const;
    case Count::Power: return static_cast<std::int64_t>(std::floor(m_coef * std::pow(a(j), m_power)));
    case Count::Explicit:
        require(j >= 1 && static_cast<std::size_t>(j) <= m_list.size(), ErrorKind::Config,
                "level scheme: m_j not configured for j = " + std::to_string(j));
        return m_list[static_cast<std::size_t>(j) - 1];
    }
    fail(ErrorKind::Internal, "level scheme: bad count kind");
}

double LevelScheme::c_limit() const
{
    if (shift == Shift::Proportional) return c;
    if (scale == Scale::Explicit) return a_list.empty() ? 0.0 : a_list.back() / gamma_const;
    return std::numeric_limits<double>::infinity();
}

int LevelScheme::max_level() const
{
    int hi = INT_MAX;
    if (scale == Scale::Explicit) hi = std::min<int>(hi, static_cast<int>(a_list.size()));
    if (count == Count::Explicit) hi = std::min<int>(hi, static_cast<int>(m_list.size()));
    return hi;
}

void check_scheme(const LevelScheme& scheme, int lo, int hi)
{
    require(lo >= 1 && hi >= lo, ErrorKind::Config, "level scheme: invalid level range");
    require(hi <= scheme.max_level(), ErrorKind::Config,
            "level scheme: level " + std::to_string(hi) + " is not configured");
    require(scheme.shift == LevelScheme::Shift::Constant ? scheme.gamma_const > 0.0 : scheme.c > 0.0,
            ErrorKind::Config, "level scheme: shift steps must be positive");
    if (scheme.scale == LevelScheme::Scale::Geometric)
        require(scheme.base > 1.0, ErrorKind::Config, "level scheme: geometric base must exceed 1");
    if (scheme.scale == LevelScheme::Scale::Linear)
        require(scheme.step > 0.0, ErrorKind::Config, "level scheme: linear step must be positive");
    if (scheme.M_cap) require(*scheme.M_cap >= 1, ErrorKind::Config, "level scheme: M_cap must be positive");
    for (int j = lo; j <= hi; ++j) {
        require(scheme.a(j) > 0.0 && std::isfinite(scheme.a(j)), ErrorKind::Config, "level scheme: a_j must be positive");
        require(scheme.m(j) >= 1, ErrorKind::Config, "level scheme: m_j must be positive at j = " + std::to_string(j));
        if (j > lo)
            require(scheme.a(j) > scheme.a(j - 1), ErrorKind::Config, "level scheme: a_j must be strictly increasing");
    }
}

MCount compute_M(const LevelScheme& scheme, int j)
{
    check_scheme(scheme, j, j + 2);
    const double a1 = scheme.a(j + 1), a2 = scheme.a(j + 2);
    const double diff = 1.0 / (a1 * a1) - 1.0 / (a2 * a2);
    require(diff != 0.0, ErrorKind::Domain, "compute_M: a_{j+1} = a_{j+2} gives a degenerate denominator");
    MCount r;
    // a few ulps of slack so exact integers such as 1 / (1 - 1/2)^2 are not floored down
    const double raw = static_cast<double>(scheme.m(j)) / (diff * diff);
    r.uncapped = std::floor(raw * (1.0 + 64.0 * std::numeric_limits<double>::epsilon()));
    const double cap = scheme.M_cap ? static_cast<double>(*scheme.M_cap) : 9.0e18;
    r.capped = r.uncapped > cap;
    r.value = static_cast<std::int64_t>(std::min(r.uncapped, cap));
    return r;
}

ValidationReport validate_scheme(const LevelScheme& scheme, const Filter& filter, int j_lo, int j_hi)
{
    check_scheme(scheme, j_lo, j_hi + 2);
    ValidationReport rep;
    const auto [B, A] = effective_support(filter, 1e-8);
    rep.A_eff = A;
    rep.B_eff = B;
    rep.support_ratio = B > 0.0 ? A / B : std::numeric_limits<double>::infinity();
    const double c = scheme.c_limit();
    rep.conforms_3prime = std::isfinite(c) && c > 0.0;
    if (!rep.conforms_3prime)
        rep.warnings.push_back("a_j / gamma_j has no finite positive limit; the scheme does not satisfy the ratio condition");
    if (B == 0.0)
        rep.warnings.push_back("filter band reaches the origin (B = 0); the scale-ratio and disjoint-support checks cannot pass");

    for (int j = j_lo; j <= j_hi; ++j) {
        LevelCheck lc;
        lc.j = j;
        const double a = scheme.a(j), an = scheme.a(j + 1), ann = scheme.a(j + 2);
        lc.m_over_a4 = static_cast<double>(scheme.m(j)) / std::pow(a, 4);
        lc.m_over_a4_decreasing = static_cast<double>(scheme.m(j + 1)) / std::pow(an, 4) < lc.m_over_a4;
        lc.scale_ratio = an / a;
        lc.ratio_ok = lc.scale_ratio >= rep.support_ratio;
        const double gap = rep.conforms_3prime ? std::abs(a / scheme.gamma(j) - c) : std::numeric_limits<double>::infinity();
        const double gap_next = rep.conforms_3prime ? std::abs(an / scheme.gamma(j + 1) - c) : std::numeric_limits<double>::infinity();
        lc.c_gap = gap;
        lc.c_gap_nonincreasing = rep.conforms_3prime && gap_next <= gap;
        lc.disjoint_next = B > 0.0 && A / ann < B / an;
        if (!lc.m_over_a4_decreasing) rep.warnings.push_back("m_j / a_j^4 does not decrease at j = " + std::to_string(j));
        if (!lc.ratio_ok && B > 0.0) rep.warnings.push_back("a_{j+1} / a_j < A / B at j = " + std::to_string(j));
        if (rep.conforms_3prime && !lc.c_gap_nonincreasing)
            rep.warnings.push_back("|a_j / gamma_j - c| increases at j = " + std::to_string(j));
        if (!lc.disjoint_next)
            rep.warnings.push_back("supports at levels " + std::to_string(j + 1) + " and " + std::to_string(j + 2) +
                                   " overlap");
        rep.levels.push_back(lc);
    }
    return rep;
}

CoefficientBlock filter_coefficients(const SeriesGrid& series, const Filter& filter, const LevelScheme& scheme, int j,
                                     std::int64_t count)
{
    require(filter.has_time_form(), ErrorKind::Config, "filter " + filter.name() + " has no time-domain form");
    require(count >= 1, ErrorKind::Domain, "filter_coefficients: count must be positive");
    require(series.n() >= 2 && series.dt > 0.0, ErrorKind::Domain, "filter_coefficients: series needs two samples");
    check_scheme(scheme, j, j);
    if (filter.name() == "shannon")
        warn("shannon time form is truncated at radius " + std::to_string(filter.time_radius()) +
             "; the exact-covariance path avoids this error");
    const double a = scheme.a(j), gamma = scheme.gamma(j);
    const double reach = filter.time_radius() * a;
    const double first = scheme.b(j, 1) - reach, last = scheme.b(j, count) + reach;
    const double t_end = series.t(series.n() - 1);
    const double slack = 1e-9 * std::max(1.0, std::abs(t_end));
    if (series.t0 > first + slack || t_end < last - slack)
        fail(ErrorKind::Coverage, "series covers [" + std::to_string(series.t0) + ", " + std::to_string(t_end) +
                                      "] but level " + std::to_string(j) + " needs [" + std::to_string(first) + ", " +
                                      std::to_string(last) + "]");

    CoefficientBlock block;
    block.level = j;
    block.a = a;
    block.gamma = gamma;
    block.source = CoefficientSource::SeriesDiscretized;
    block.values.resize(static_cast<std::size_t>(count));
    const double norm = series.dt / std::sqrt(a);
    const auto n = static_cast<std::int64_t>(series.n());
    for (std::int64_t k = 1; k <= count; ++k) {
        const double b = scheme.b(j, k);
        const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((b - reach - series.t0) / series.dt)));
        const auto hi = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::floor((b + reach - series.t0) / series.dt)));
        double sum = 0.0;
        for (std::int64_t i = lo; i <= hi; ++i) {
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            sum += w * filter.psi_time((series.t(static_cast<std::size_t>(i)) - b) / a) * series.values[static_cast<std::size_t>(i)];
        }
        block.values[static_cast<std::size_t>(k - 1)] = norm * sum;
    }
    return block;
}

std::vector<CoefficientBlock> coefficient_grid(const SeriesGrid& series, const Filter& filter,
                                               const LevelScheme& scheme, int j_lo, int j_hi, std::int64_t count)
{
    check_scheme(scheme, j_lo, j_hi);
    std::vector<CoefficientBlock> out;
    for (int j = j_lo; j <= j_hi; ++j) out.push_back(filter_coefficients(series, filter, scheme, j, count));
    return out;
}

}  // namespace cyclo
