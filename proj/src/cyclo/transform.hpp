#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cyclo/filters.hpp"
#include "cyclo/types.hpp"

namespace cyclo {

/// Scales a_j, shift steps gamma_j (b_jk = gamma_j k), counts m_j and the cap on M_j.
struct LevelScheme {
    enum class Scale { Geometric, Linear, Explicit };
    enum class Shift { Proportional, Constant };
    enum class Count { Constant, Power, Explicit };

    Scale scale = Scale::Geometric;
    double base = 2.0;             ///< Geometric: a_j = base^j
    double step = 1.0;             ///< Linear: a_j = step * j
    std::vector<double> a_list;    ///< Explicit: a_j = a_list[j - 1]

    Shift shift = Shift::Proportional;
    double c = 1.0;                ///< Proportional: gamma_j = a_j / c
    double gamma_const = 1.0;      ///< Constant: gamma_j = gamma_const

    Count count = Count::Constant;
    std::int64_t m_const = 4096;   ///< Constant: m_j = m_const
    double m_coef = 1.0;           ///< Power: m_j = floor(m_coef * a_j^m_power)
    double m_power = 3.0;
    std::vector<std::int64_t> m_list;  ///< Explicit: m_j = m_list[j - 1]

    std::optional<std::int64_t> M_cap = std::int64_t{1} << 22;

    double a(int j) const;
    double gamma(int j) const;
    double b(int j, std::int64_t k) const { return gamma(j) * static_cast<double>(k); }
    std::int64_t m(int j) const;
    /// Configured limit of a_j / gamma_j; infinity when gamma is constant and a_j is unbounded.
    double c_limit() const;
    int max_level() const;  ///< largest configured j (INT_MAX for unbounded rules)
};

/// Throws Config when levels lo..hi are not configured or a is not strictly increasing.
void check_scheme(const LevelScheme& scheme, int lo, int hi);

struct MCount {
    std::int64_t value = 0;
    double uncapped = 0.0;
    bool capped = false;
};

/// M_j = min(M_cap, floor(m_j / (a_{j+1}^-2 - a_{j+2}^-2)^2)).
MCount compute_M(const LevelScheme& scheme, int j);

struct LevelCheck {
    int j = 0;
    double m_over_a4 = 0.0;
    bool m_over_a4_decreasing = false;  ///< (i) against level j + 1
    double scale_ratio = 0.0;           ///< a_{j+1} / a_j
    bool ratio_ok = false;              ///< (ii) scale_ratio >= A / B
    double c_gap = 0.0;                 ///< |a_j / gamma_j - c|
    bool c_gap_nonincreasing = false;   ///< (iii) against level j + 1
    bool disjoint_next = false;         ///< (iv) psi_hat(a_{j+1} .) and psi_hat(a_{j+2} .) disjoint
};

struct ValidationReport {
    double A_eff = 0.0;
    double B_eff = 0.0;
    double support_ratio = 0.0;  ///< A / B (infinite when B = 0)
    bool conforms_3prime = true; ///< finite positive c limit
    std::vector<LevelCheck> levels;
    std::vector<std::string> warnings;
};

/// Finite-level checks of the scheme conditions; never throws on failed checks.
ValidationReport validate_scheme(const LevelScheme& scheme, const Filter& filter, int j_lo, int j_hi);

/// delta_jk = a^-1/2 sum_i psi((t_i - b_jk)/a) X(t_i) dt, k = 1..count, trapezoid
/// weights at the series ends. The series must cover every window.
CoefficientBlock filter_coefficients(const SeriesGrid& series, const Filter& filter, const LevelScheme& scheme, int j,
                                     std::int64_t count);

std::vector<CoefficientBlock> coefficient_grid(const SeriesGrid& series, const Filter& filter,
                                               const LevelScheme& scheme, int j_lo, int j_hi, std::int64_t count);

}  // namespace cyclo
