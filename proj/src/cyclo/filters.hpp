#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cyclo {

/// Constants quoted for a filter in the literature. They are kept for
/// comparison only; the operative moments always come from quadrature.
struct ReferenceConstants {
    std::optional<double> L0;
    std::optional<double> L2;
    std::optional<double> quartic;  ///< integral of |psi_hat|^4
};

/// A real, even filter given by its frequency response psi_hat, with an
/// optional time-domain form psi(t) = (1/2pi) int e^{i eta t} psi_hat(eta) d eta.
///
/// Support is the band B <= |eta| <= A outside which |psi_hat| is below the
/// support tolerance. `partition` lists the points of [B, A] (ascending,
/// including both ends) where psi_hat has kinks or jumps; integrals over the
/// real line are computed as twice the integral over that partition.
class Filter {
public:
    using Evaluator = std::function<double(double)>;

    struct Definition {
        std::string name;
        Evaluator psi_hat;
        std::vector<double> partition;
        Evaluator psi_time;             ///< empty when no time form is available
        bool time_form_approximate = false;
        double time_radius = 0.0;       ///< |psi(t)| negligible for |t| > radius
        ReferenceConstants reference;
        double support_tolerance = 1e-8;
    };

    explicit Filter(Definition def);

    const std::string& name() const { return def_.name; }
    double psi_hat(double eta) const { return def_.psi_hat(eta); }
    double support_lo() const { return def_.partition.front(); }
    double support_hi() const { return def_.partition.back(); }
    const std::vector<double>& partition() const { return def_.partition; }
    double support_tolerance() const { return def_.support_tolerance; }

    double L0() const { return L0_; }
    double L2() const { return L2_; }

    bool has_time_form() const { return static_cast<bool>(def_.psi_time); }
    bool time_form_approximate() const { return def_.time_form_approximate; }
    double psi_time(double t) const;
    double time_radius() const { return def_.time_radius; }

    const ReferenceConstants& reference() const { return def_.reference; }

    /// Integral of eta^power * |psi_hat(eta)|^2 over the real line with the
    /// Gauss-Kronrod rule (`use_simpson` switches to adaptive Simpson).
    double moment(int power, bool use_simpson = false) const;
    /// Integral of |psi_hat|^4 over the real line.
    double quartic_integral(bool use_simpson = false) const;

private:
    Definition def_;
    double L0_ = 0.0;
    double L2_ = 0.0;
};

using FilterPtr = std::shared_ptr<const Filter>;

FilterPtr shannon_filter();
FilterPtr meyer_filter();
FilterPtr mexican_hat_filter(double sigma = 1.0);
/// Filter from tabulated samples of psi_hat on eta >= 0 (ascending), linearly
/// interpolated and zero outside the table. No time form.
FilterPtr tabulated_filter(std::string name, std::vector<double> eta, std::vector<double> values);
/// Built-in filter by name: "shannon", "meyer", "mexican_hat".
FilterPtr filter_by_name(const std::string& name, double sigma = 1.0);

/// Smallest band [B_eff, A_eff] outside which |psi_hat| < tol * max|psi_hat|,
/// located by a bracketing scan followed by bisection.
std::pair<double, double> effective_support(const Filter& filter, double tol);

/// F0(eta) = sum_n |psi_hat(eta + 2 n c pi)|^2.
double periodized_energy(const Filter& filter, double eta, double c);

/// I(c) = integral over [-c pi, c pi] of F0(eta)^2, by adaptive quadrature.
double i_of_c_quadrature(const Filter& filter, double c, bool use_simpson = false);
/// I(c); for the Shannon filter the piecewise closed form is returned after
/// checking it against quadrature.
double i_of_c(const Filter& filter, double c);
/// Closed form of I(c) for the Shannon filter.
double shannon_i_closed(double c);

}  // namespace cyclo
