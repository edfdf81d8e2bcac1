#pragma once

#include <cmath>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "alloy/errors.hpp"

namespace alloy {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
};

/// Integral of f over [breaks.front(), breaks.back()] where f may blow up like
/// |x - b|^{-beta} (beta <= max_exponent < 1) at every breakpoint.
///
/// Each piece is cut at its midpoint; on each half the graded map x = b + (m - b) t^p puts
/// the endpoint at t = 0. With the integer p = ceil(3 / (1 - max_exponent)) the transformed
/// integrand behaves like t^{p(1 - beta) - 1}, at least t^2, near a singular end and stays
/// a smooth function of t everywhere else, so Gauss-Kronrod (7/15) adaptive quadrature
/// converges quickly on every half panel.
///
/// f may take (end, offset) instead of x = end + offset. For p large, end + offset rounds to
/// end long before offset underflows, and an integrand that measures distance to a root
/// from x alone turns into a staircase there.
template <class F>
QuadratureResult integrate_singular_panels(const F& f, const std::vector<double>& breaks,
                                           double max_exponent, double rel_tol = 1e-11,
                                           unsigned max_depth = 18) {
    if (breaks.size() < 2) throw InvalidArgument("integrate_singular_panels: need two breakpoints");
    if (!(max_exponent >= 0.0 && max_exponent < 1.0))
        throw InvalidArgument("integrate_singular_panels: exponent must lie in [0,1)");
    const int p = static_cast<int>(std::ceil(3.0 / (1.0 - max_exponent)));
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

    QuadratureResult res;
    auto half = [&](double end, double mid) {
        const double w = mid - end;
        auto g = [&](double t) {
            const double tp1 = std::pow(t, p - 1);
            const double off = w * tp1 * t;
            double fx;
            if constexpr (std::is_invocable_v<const F&, double, double>) fx = f(end, off);
            else fx = f(end + off);
            const double v = fx * p * tp1 * std::abs(w);
            return std::isfinite(v) ? v : 0.0;
        };
        double err = 0.0;
        const double v = GK::integrate(g, 0.0, 1.0, max_depth, rel_tol, &err);
        res.value += v;
        res.error += std::abs(err);
        ++res.panels;
    };
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        if (!(b > a)) continue;
        const double m = 0.5 * (a + b);
        half(a, m);
        half(b, m);
    }
    return res;
}

} // namespace alloy
