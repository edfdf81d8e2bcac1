#pragma once

#include <cmath>
#include <vector>

#include "alloy/errors.hpp"

namespace alloy {

/// y = intercept + slope * x by ordinary least squares.
///
/// slope_se propagates the per-point standard errors `y_se` through the OLS weights
/// (delta method, points treated as independent); residual_se is the classical
/// residual-based error, reported separately because with few points it is itself noisy.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    double residual_se = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;

    double ci_lo(double z = 1.96) const { return slope - z * slope_se; }
    double ci_hi(double z = 1.96) const { return slope + z * slope_se; }
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& y_se) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n || y_se.size() != n) throw InvalidArgument("linear_fit needs >= 2 matching points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("linear_fit: abscissae are all equal");
    LinearFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double var_slope = 0.0, var_icpt = 0.0, rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (x[i] - mx) / sxx;
        var_slope += w * w * y_se[i] * y_se[i];
        const double wi = 1.0 / static_cast<double>(n) - mx * w;
        var_icpt += wi * wi * y_se[i] * y_se[i];
        const double r = y[i] - f.intercept - f.slope * x[i];
        rss += r * r;
    }
    f.slope_se = std::sqrt(var_slope);
    f.intercept_se = std::sqrt(var_icpt);
    f.residual_se = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    f.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    return f;
}

} // namespace alloy
