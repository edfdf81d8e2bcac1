#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "alloy/diagnostics/model_spec.hpp"
#include "alloy/spectral.hpp"

namespace alloy {

struct SuitabilityVerdict {
    int r = 0;
    double energy = 0.0;
    double gamma = 0.0;
    double resolvent_norm = 0.0;
    double norm_threshold = 0.0;  // e^{sqrt r}
    bool resolvent_ok = false;    // condition (i)
    double worst_ratio = 0.0;     // max |G(x,y)| #Lambda e^{gamma |x-y|} over pairs at range
    Site worst_x, worst_y;
    bool decay_ok = false;        // condition (ii): worst_ratio <= 1
    bool suitable = false;
};

/// gamma-suitability of a box of half-width r; pair distances in the sup norm.
inline SuitabilityVerdict is_gamma_suitable(const HamiltonianMatrix& h, double E, double gamma) {
    if (!h.box()) throw InvalidArgument("is_gamma_suitable needs a Hamiltonian assembled on a box");
    const int r = h.box()->L;
    SuitabilityVerdict v;
    v.r = r;
    v.energy = E;
    v.gamma = gamma;
    v.norm_threshold = std::exp(std::sqrt(static_cast<double>(r)));
    const auto eig = eigen_decomposition(h);
    const double dist = distance_to_spectrum(eig.values, E);
    if (!(dist > 1e-10 * matrix_scale(h.matrix))) {
        v.resolvent_norm = std::numeric_limits<double>::infinity();
        v.worst_ratio = std::numeric_limits<double>::infinity();
        return v;
    }
    v.resolvent_norm = 1.0 / dist;
    v.resolvent_ok = v.resolvent_norm <= v.norm_threshold;
    const Eigen::MatrixXd g = resolvent_matrix(eig, E);
    const auto& sites = h.region.sites();
    const double count = static_cast<double>(sites.size());
    const double range = r / 10.0;
    bool any = false;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        for (std::size_t j = i; j < sites.size(); ++j) {
            const int dxy = sup_distance(sites[i], sites[j]);
            if (dxy < range) continue;
            const double ratio = std::abs(g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) * count *
                                 std::exp(gamma * dxy);
            if (!any || ratio > v.worst_ratio) {
                v.worst_ratio = ratio;
                v.worst_x = sites[i];
                v.worst_y = sites[j];
                any = true;
            }
        }
    }
    v.decay_ok = v.worst_ratio <= 1.0;
    v.suitable = v.resolvent_ok && v.decay_ok;
    return v;
}

enum class Verdict { Pass, Fail, Straddle };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Straddle: return "straddle";
    }
    return "?";
}

// Pass when the whole interval is below the threshold, fail when it is all above.
inline Verdict compare_below(const Interval& ci, double threshold) {
    if (ci.hi < threshold) return Verdict::Pass;
    if (ci.lo > threshold) return Verdict::Fail;
    return Verdict::Straddle;
}

struct SuitabilityEstimate {
    int r = 0;
    double threshold = 0.0;  // r^{-4d}
    std::size_t samples = 0;
    std::size_t bad = 0;          // not gamma-suitable
    std::size_t resolvent_bad = 0; // condition (i) alone fails
    Interval bad_ci, good_ci, resolvent_bad_ci;
    Verdict bad_verdict = Verdict::Straddle;   // reading: P{not suitable} <= r^{-4d}
    Verdict good_verdict = Verdict::Straddle;  // reading as displayed: P{suitable} <= r^{-4d}

    double bad_fraction() const { return samples ? static_cast<double>(bad) / samples : 0.0; }
};

/// Estimates P{Lambda_r not gamma-suitable} for each r, boxes centered at the origin.
///
/// One disorder draw per sample covers the largest box; the nested boxes share it.
inline std::vector<SuitabilityEstimate> suitability_probability(const ModelSpec& model, double E, double gamma,
                                                                std::vector<int> rs, const EnsembleConfig& cfg) {
    if (rs.empty()) throw InvalidArgument("suitability_probability needs at least one r");
    for (int r : rs)
        if (r < 1) throw InvalidArgument("suitability_probability: r must be >= 1");
    const int d = model.dimension();
    const int rmax = *std::max_element(rs.begin(), rs.end());
    const SiteSet cover = coverage_region(BoxSpec(d, rmax), model.u);
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto sample = sample_disorder(model.mu, cover, rng);
        std::vector<double> row;
        for (int r : rs) {
            const auto v = is_gamma_suitable(model.hamiltonian(BoxSpec(d, r), sample), E, gamma);
            row.push_back(v.suitable ? 0.0 : 1.0);
            row.push_back(v.resolvent_ok ? 0.0 : 1.0);
        }
        return row;
    };
    const auto res = run_ensemble(task, 2 * rs.size(), cfg);
    std::vector<SuitabilityEstimate> out;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        SuitabilityEstimate e;
        e.r = rs[i];
        e.threshold = std::pow(static_cast<double>(rs[i]), -4.0 * d);
        const auto& st = res.stats[2 * i];
        e.samples = st.n;
        e.bad = static_cast<std::size_t>(std::llround(st.mean * st.n));
        e.resolvent_bad = static_cast<std::size_t>(std::llround(res.stats[2 * i + 1].mean * st.n));
        e.bad_ci = wilson_interval(e.bad, e.samples);
        e.good_ci = wilson_interval(e.samples - e.bad, e.samples);
        e.resolvent_bad_ci = wilson_interval(e.resolvent_bad, e.samples);
        e.bad_verdict = compare_below(e.bad_ci, e.threshold);
        e.good_verdict = compare_below(e.good_ci, e.threshold);
        out.push_back(e);
    }
    return out;
}

struct ExceptionalEvents {
    std::vector<Statistic> x;  // indicator of X_l, l = 1..count
    Statistic all;             // indicator of the intersection
    double product = 1.0;      // prod_l P{X_l}
    double correlation = 0.0;  // of the X_1 and X_2 indicators (0 when undefined)
    double correlation_se = 0.0;
    int resamples = 0;
    std::size_t samples = 0;
};

/// X_l: every tried omega~ (omega resampled inside Lambda_{r(l-1)}, M times, plus omega itself)
/// keeps |(H_{omega~, Lambda_{rl}} - E)^{-1}| > A. Finite M can only miss a resurrection,
/// so P{X_l} is overestimated.
inline ExceptionalEvents exceptional_event_rate(const ModelSpec& model, double E, double A, int r, int count,
                                                int M, const EnsembleConfig& cfg) {
    if (r < 1 || count < 1 || M < 0) throw InvalidArgument("exceptional_event_rate: need r >= 1, count >= 1, M >= 0");
    for (const auto& k : model.u.support())
        if (sup_norm(k) > r - 1) throw InvalidArgument("exceptional_event_rate: supp u must lie in Lambda_{r-1}");
    const int d = model.dimension();
    const SiteSet cover = coverage_region(BoxSpec(d, r * count), model.u);
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto base = sample_disorder(model.mu, cover, rng);
        std::vector<double> row;
        double all = 1.0;
        for (int l = 1; l <= count; ++l) {
            const BoxSpec outer(d, r * l);
            const auto inner = box_set(BoxSpec(d, r * (l - 1)));
            bool exceptional = true;
            auto trial = base;
            for (int t = 0; t <= M && exceptional; ++t) {
                if (t > 0)
                    for (const auto& k : inner) trial.set(k, model.mu.quantile(uniform01(rng)));
                const auto values = eigenvalues(model.hamiltonian(outer, trial));
                if (distance_to_spectrum(values, E) * A >= 1.0) exceptional = false;
            }
            row.push_back(exceptional ? 1.0 : 0.0);
            all *= row.back();
        }
        row.push_back(all);
        row.push_back(count >= 2 ? row[0] * row[1] : 0.0);
        return row;
    };
    const auto res = run_ensemble(task, static_cast<std::size_t>(count) + 2, cfg);
    ExceptionalEvents out;
    out.resamples = M;
    out.samples = res.requested;
    for (int l = 0; l < count; ++l) {
        out.x.push_back(res.stats[static_cast<std::size_t>(l)]);
        out.product *= out.x.back().mean;
    }
    out.all = res.stats[static_cast<std::size_t>(count)];
    if (count >= 2) {
        const double p1 = out.x[0].mean, p2 = out.x[1].mean;
        const double p12 = res.stats[static_cast<std::size_t>(count) + 1].mean;
        const double den = std::sqrt(p1 * (1 - p1) * p2 * (1 - p2));
        if (den > 0.0) out.correlation = (p12 - p1 * p2) / den;
        out.correlation_se = 1.0 / std::sqrt(static_cast<double>(out.samples));
    }
    return out;
}

} // namespace alloy
