#pragma once

#include <string>
#include <vector>

namespace cyclo {

/// Samples of X on the grid t_i = t0 + i dt.
struct SeriesGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;

    std::size_t n() const { return values.size(); }
    double t(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

enum class CoefficientSource { SeriesDiscretized, ExactCovariance };

const char* to_string(CoefficientSource source);

/// delta_{j1}..delta_{jm} at one level.
struct CoefficientBlock {
    int level = 0;
    double a = 1.0;
    double gamma = 1.0;
    std::vector<double> values;
    CoefficientSource source = CoefficientSource::ExactCovariance;
};

}  // namespace cyclo
