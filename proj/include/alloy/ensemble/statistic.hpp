#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace alloy {

/// Running moments of a scalar observable. merge() is the Chan et al. pairwise update.
struct Statistic {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    static Statistic of(double x) {
        Statistic s;
        s.n = 1;
        s.mean = x;
        s.min = x;
        s.max = x;
        return s;
    }

    // Unbiased sample variance; 0 when n < 2.
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    // sqrt(var / n); reported as 0 for a single sample.
    double standard_error() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }

    friend Statistic merge(const Statistic& a, const Statistic& b) {
        if (a.n == 0) return b;
        if (b.n == 0) return a;
        Statistic r;
        r.n = a.n + b.n;
        const double na = static_cast<double>(a.n);
        const double nb = static_cast<double>(b.n);
        const double nt = static_cast<double>(r.n);
        const double delta = b.mean - a.mean;
        r.mean = a.mean + delta * (nb / nt);
        r.m2 = a.m2 + b.m2 + delta * delta * (na * nb / nt);
        r.min = std::min(a.min, b.min);
        r.max = std::max(a.max, b.max);
        return r;
    }
};

/// Fixed-shape binary reduction over [0, n): split at the midpoint, leaves are `leaf(i)`.
/// The tree depends on n only, so the result does not depend on who computed the leaves.
template <class Leaf>
Statistic tree_reduce(std::size_t lo, std::size_t hi, const Leaf& leaf) {
    if (hi <= lo) return {};
    if (hi - lo == 1) return leaf(lo);
    const std::size_t mid = lo + (hi - lo) / 2;
    return merge(tree_reduce(lo, mid, leaf), tree_reduce(mid, hi, leaf));
}

inline Statistic summarize(std::span<const double> xs) {
    return tree_reduce(0, xs.size(), [&](std::size_t i) { return Statistic::of(xs[i]); });
}

// Wilson score interval for k successes in n trials.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

inline Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.96) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double den = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

} // namespace alloy
