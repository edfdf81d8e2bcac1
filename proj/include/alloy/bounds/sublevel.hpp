#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "alloy/bounds/polynomial.hpp"

namespace alloy {

struct SublevelSet {
    std::vector<std::pair<double, double>> intervals;
    double measure = 0.0;
    double error = 0.0; // bound on |computed measure - true measure|
};

/// {x in [lo, hi] : |p(x)| <= level}.
///
/// Candidate boundary points are the real parts of the roots of |p|^2 - level^2. Each piece
/// between candidates is classified by its midpoint; boundaries between pieces of different
/// class are refined by bisection on |p| - level. Roots close to the real axis that do not
/// become boundaries could hide a short interval, their imaginary parts go into the error.
inline SublevelSet sublevel_set(const Polynomial& p, double level, double lo, double hi) {
    if (!(lo < hi)) throw InvalidArgument("sublevel_set: empty domain");
    if (!(level >= 0.0)) throw InvalidArgument("sublevel_set: level must be nonnegative");
    auto inside = [&](double x) { return std::abs(p(x)) <= level; };

    SublevelSet out;
    std::vector<double> cuts{lo, hi};
    if (p.degree() >= 1) {
        auto q = p.abs_squared().coefficients();
        q[0] -= level * level;
        const auto roots = Polynomial(q).roots();
        for (auto r : roots) {
            if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
                throw NumericalFailure("sublevel_set: non-finite root");
            const double im = std::abs(r.imag());
            if (im > 0.0 && im <= 1e-6 * (1.0 + std::abs(r.real())) && r.real() > lo && r.real() < hi)
                out.error += im;
        }
        cuts = with_endpoints(root_breakpoints(roots, lo, hi), lo, hi);
    }

    const std::size_t pieces = cuts.size() - 1;
    std::vector<char> cls(pieces);
    for (std::size_t i = 0; i < pieces; ++i) cls[i] = inside(0.5 * (cuts[i] + cuts[i + 1]));

    // refined boundary between piece i-1 and piece i
    auto refine = [&](std::size_t i) {
        double a = 0.5 * (cuts[i - 1] + cuts[i]);
        double b = 0.5 * (cuts[i] + cuts[i + 1]);
        const bool a_in = cls[i - 1];
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            if (static_cast<bool>(inside(m)) == a_in) a = m;
            else b = m;
        }
        out.error += b - a;
        return 0.5 * (a + b);
    };

    double start = lo;
    for (std::size_t i = 0; i < pieces; ++i) {
        if (i > 0 && cls[i] != cls[i - 1]) {
            const double x = refine(i);
            if (cls[i]) start = x;
            else out.intervals.emplace_back(start, x);
        }
    }
    if (cls[pieces - 1]) out.intervals.emplace_back(start, hi);
    for (auto& [a, b] : out.intervals) out.measure += b - a;
    return out;
}

} // namespace alloy
