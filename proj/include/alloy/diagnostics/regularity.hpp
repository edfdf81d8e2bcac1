#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "alloy/diagnostics/model_spec.hpp"
#include "alloy/spectral.hpp"

namespace alloy {

struct RegularityVerdict {
    Site center;
    double energy = 0.0;
    double m = 0.0;
    int L = 0;
    bool regular = false;
    bool in_spectrum = false;  // dist(E, sigma) <= 1e-10 |H|; witness is then infinite
    double distance = 0.0;
    double witness = 0.0;  // sup over the interior boundary of |G(E; x, w)|
    double threshold = 0.0;
};

namespace detail {

inline std::vector<Eigen::Index> boundary_indices(const HamiltonianMatrix& h) {
    std::vector<Eigen::Index> out;
    for (const auto& w : interior_boundary(h.region.as_set())) out.push_back(static_cast<Eigen::Index>(h.index_of(w)));
    return out;
}

inline const BoxSpec& require_box(const HamiltonianMatrix& h) {
    if (!h.box()) throw InvalidArgument("regularity needs a Hamiltonian assembled on a box");
    return *h.box();
}

// max_w |G(E; x, w)| from the eigenbasis.
inline double boundary_green(const EigenSystem& eig, Eigen::Index x, const std::vector<Eigen::Index>& ws, double E) {
    double best = 0.0;
    for (auto w : ws) best = std::max(best, std::abs(green_from_eigen(eig, E, x, w).real()));
    return best;
}

} // namespace detail

/// (m, E)-regularity of the box around its center.
inline RegularityVerdict is_regular(const HamiltonianMatrix& h, double E, double m) {
    const BoxSpec& box = detail::require_box(h);
    RegularityVerdict v;
    v.center = box.center;
    v.energy = E;
    v.m = m;
    v.L = box.L;
    v.threshold = std::exp(-m * box.L);
    const auto eig = eigen_decomposition(h);
    v.distance = distance_to_spectrum(eig.values, E);
    if (!(v.distance > 1e-10 * matrix_scale(h.matrix))) {
        v.in_spectrum = true;
        v.witness = std::numeric_limits<double>::infinity();
        return v;
    }
    const auto ws = detail::boundary_indices(h);
    const Eigen::VectorXcd col = green_column(h.matrix, E, static_cast<Eigen::Index>(h.index_of(box.center)), &eig.values);
    for (auto w : ws) v.witness = std::max(v.witness, std::abs(col(w)));
    v.regular = v.witness <= v.threshold;
    return v;
}

/// Subintervals of [a,b] on which the box is certified (m,E)-regular for every E.
///
/// The resolvent identity G(E) - G(c) = (E - c) G(E) G(c), read entrywise in the eigenbasis, gives
/// |G(E;x,w) - G(c;x,w)| <= h sum_k |q_k(x) q_k(w)| / (dist(E_k, J) |E_k - c|) on J = [c-h, c+h].
/// The operator-norm version h / (dist(c) dist(J)) is useless next to eigenvalues whose vectors
/// barely reach the boundary; at lambda = 30 it needs ~1/dist cells.
/// Cells are bisected until certified, certainly irregular, too deep, or the budget runs out.
struct RegularCover {
    std::vector<std::pair<double, double>> certified;
    std::size_t uncertified_cells = 0;
    std::size_t cells = 0;
};

inline RegularCover certify_regular_set(const EigenSystem& eig, Eigen::Index x, const std::vector<Eigen::Index>& ws,
                                        double threshold, double a, double b, int max_depth, double scale,
                                        std::size_t max_cells = 200000) {
    RegularCover out;
    const double floor_dist = 1e-10 * scale;
    const Eigen::Index n = eig.size();
    std::vector<Eigen::VectorXd> weight;  // q_k(x) q_k(w) per boundary site
    for (auto w : ws) weight.push_back(eig.vectors.row(x).transpose().cwiseProduct(eig.vectors.row(w).transpose()));
    struct Cell {
        double lo, hi;
        int depth;
    };
    std::vector<Cell> stack{{a, b, 0}};
    while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        ++out.cells;
        const double mid = 0.5 * (c.lo + c.hi);
        const double half = 0.5 * (c.hi - c.lo);
        bool certain_bad = false;
        if (distance_to_spectrum(eig.values, c.lo, c.hi) > floor_dist) {
            double lower = 0.0, upper = 0.0;  // inf and sup over J of max_w |G(E;x,w)|, bracketed
            for (const auto& wk : weight) {
                double g = 0.0, slack = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double ek = eig.values(k);
                    const double dc = ek - mid;
                    const double dj = ek < c.lo ? c.lo - ek : ek - c.hi;
                    g += wk(k) / dc;
                    slack += std::abs(wk(k)) / (dj * std::abs(dc));
                }
                slack *= half;
                lower = std::max(lower, std::abs(g) - slack);
                upper = std::max(upper, std::abs(g) + slack);
            }
            if (upper <= threshold) {
                if (!out.certified.empty() && out.certified.back().second == c.lo)
                    out.certified.back().second = c.hi;
                else
                    out.certified.emplace_back(c.lo, c.hi);
                continue;
            }
            certain_bad = lower > threshold;
        }
        if (certain_bad) continue;
        if (c.depth >= max_depth || out.cells + stack.size() >= max_cells) {
            ++out.uncertified_cells;
            continue;
        }
        // right half first so cells come off the stack left to right
        stack.push_back({mid, c.hi, c.depth + 1});
        stack.push_back({c.lo, mid, c.depth + 1});
    }
    return out;
}

inline bool covers_interval(std::vector<std::pair<double, double>> parts, double a, double b) {
    if (parts.empty()) return false;
    std::sort(parts.begin(), parts.end());
    double reach = a;
    for (const auto& [lo, hi] : parts) {
        if (lo > reach) return false;
        reach = std::max(reach, hi);
        if (reach >= b) return true;
    }
    return reach >= b;
}

struct RegularPairResult {
    Statistic good;  // indicator: every E in I has one of the two boxes regular
    Interval good_ci;
    double p_exponent = 0.0;
    double schedule = 0.0;  // 1 - L^{-2p}
    Statistic uncertified_cells;
    std::size_t samples = 0;

    double probability() const { return good.mean; }
};

inline RegularPairResult regular_pair_probability(const ModelSpec& model, double a, double b, double m, int L,
                                                  const Site& x, const Site& y, const EnsembleConfig& cfg,
                                                  double p_exponent = -1.0, int max_depth = 40) {
    if (!(a <= b)) throw InvalidArgument("regular_pair_probability: need a <= b");
    if (!(m >= 0.0)) throw InvalidArgument("regular_pair_probability: need m >= 0");
    const int d = model.dimension();
    if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
        throw InvalidArgument("regular_pair_probability: centers have the wrong dimension");
    const int need = 2 * L + model.u.diameter() + 1;
    if (sup_distance(x, y) < need)
        throw InvalidArgument("regular_pair_probability: |x - y| must be >= 2L + diam Theta + 1 = " +
                              std::to_string(need));
    const BoxSpec bx(d, L, x), by(d, L, y);
    const SiteSet cover = set_union(coverage_region(bx, model.u), coverage_region(by, model.u));
    const double threshold = std::exp(-m * L);
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto sample = sample_disorder(model.mu, cover, rng);
        std::vector<std::pair<double, double>> parts;
        std::size_t open = 0;
        for (const BoxSpec* box : {&bx, &by}) {
            const auto h = model.hamiltonian(*box, sample);
            const auto eig = eigen_decomposition(h);
            const auto cover_set = certify_regular_set(eig, static_cast<Eigen::Index>(h.index_of(box->center)),
                                                       detail::boundary_indices(h), threshold, a, b, max_depth,
                                                       matrix_scale(h.matrix));
            parts.insert(parts.end(), cover_set.certified.begin(), cover_set.certified.end());
            open += cover_set.uncertified_cells;
        }
        return std::vector<double>{covers_interval(parts, a, b) ? 1.0 : 0.0, static_cast<double>(open)};
    };
    const auto r = run_ensemble(task, 2, cfg);
    RegularPairResult out;
    out.good = r.stats[0];
    out.uncertified_cells = r.stats[1];
    out.samples = r.requested;
    out.good_ci = wilson_interval(static_cast<std::size_t>(std::llround(out.good.mean * out.good.n)), out.good.n);
    out.p_exponent = p_exponent > 0.0 ? p_exponent : d + 0.1;
    out.schedule = 1.0 - std::pow(static_cast<double>(L), -2.0 * out.p_exponent);
    return out;
}

} // namespace alloy
