#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "alloy/diagnostics/fit.hpp"
#include "alloy/diagnostics/model_spec.hpp"
#include "alloy/spectral.hpp"

namespace alloy {

struct FracMomentEstimate {
    Statistic stat;
    std::size_t requested = 0;
    std::size_t failures = 0;  // spectral collisions or failed solves
};

namespace detail {

inline void require_moment_exponent(double s) {
    if (!(s >= 0.0 && s < 1.0)) throw InvalidArgument("fractional moment exponent must lie in [0, 1)");
}

// |G_H(z; x, y)|^s for each y in `targets`, from the single column at x; nullopt on a collision.
inline SampleVector moment_row(const HamiltonianMatrix& h, cplx z, double s, const Site& x,
                               const std::vector<Site>& targets) {
    try {
        const Eigen::VectorXcd col = green_column(h, z, x);
        std::vector<double> out;
        out.reserve(targets.size());
        for (const auto& y : targets) out.push_back(std::pow(std::abs(col(static_cast<Eigen::Index>(h.index_of(y)))), s));
        return out;
    } catch (const SpectralCollision&) {
        return std::nullopt;
    } catch (const NumericalFailure&) {
        return std::nullopt;
    }
}

} // namespace detail

/// E|G_{omega,box}(z;x,y)|^s for every y in `targets` from one solve per sample.
inline std::vector<FracMomentEstimate> frac_moment_profile(const ModelSpec& model, const BoxSpec& box, cplx z,
                                                           double s, const Site& x, const std::vector<Site>& targets,
                                                           const EnsembleConfig& cfg) {
    detail::require_moment_exponent(s);
    if (!box.contains(x)) throw InvalidArgument("frac_moment: x outside the box");
    for (const auto& y : targets)
        if (!box.contains(y)) throw InvalidArgument("frac_moment: target " + to_string(y) + " outside the box");
    const SiteSet cover = coverage_region(box, model.u);
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto sample = sample_disorder(model.mu, cover, rng);
        return detail::moment_row(model.hamiltonian(box, sample), z, s, x, targets);
    };
    const auto r = run_ensemble(task, targets.size(), cfg);
    std::vector<FracMomentEstimate> out;
    for (const auto& st : r.stats) out.push_back({st, r.requested, r.failures});
    return out;
}

inline FracMomentEstimate frac_moment_estimate(const ModelSpec& model, const BoxSpec& box, cplx z, double s,
                                               const Site& x, const Site& y, const EnsembleConfig& cfg) {
    return frac_moment_profile(model, box, z, s, x, {y}, cfg).front();
}

// max(lambda^{-s/(2|Theta|)}, lambda^{-2s})
inline double xi_s(double lambda, double s, std::size_t theta_size) {
    if (!(lambda > 0.0)) throw InvalidArgument("xi_s: lambda must be positive");
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("xi_s: s must lie in (0, 1)");
    if (theta_size < 1) throw InvalidArgument("xi_s: |Theta| must be >= 1");
    return std::max(std::pow(lambda, -s / (2.0 * static_cast<double>(theta_size))), std::pow(lambda, -2.0 * s));
}

enum class MomentExponent { Plain, Theorem };

inline std::string to_string(MomentExponent e) { return e == MomentExponent::Plain ? "plain" : "theorem"; }

struct DecayFit {
    std::vector<int> distances;
    std::vector<double> means;
    std::vector<double> stderrs;
    std::vector<bool> used;
    double prefactor = std::numeric_limits<double>::quiet_NaN();  // A
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double gamma_se = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    double exponent = 0.0;  // the moment actually estimated
    MomentExponent mode = MomentExponent::Plain;
    bool resolved = false;  // false: fewer than two distances above the noise floor
    std::string status;
    std::size_t requested = 0;
    std::size_t failures = 0;

    double gamma_lo(double z = 1.96) const { return gamma - z * gamma_se; }
    double gamma_hi(double z = 1.96) const { return gamma + z * gamma_se; }
};

/// Fit of log E|G(z;x,x+r e_1)|^exponent = log A - gamma r on the box of half-width L.
///
/// x sits at -floor(r_max/2) e_1 so the pairs are as central as the box allows.
inline DecayFit fit_decay(const std::vector<int>& distances, const std::vector<FracMomentEstimate>& est) {
    DecayFit f;
    f.distances = distances;
    std::vector<double> xs, ys, ses;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        const double m = est[i].stat.mean;
        const double se = est[i].stat.standard_error();
        f.means.push_back(m);
        f.stderrs.push_back(se);
        const bool ok = m > 3.0 * se && m > 0.0;
        f.used.push_back(ok);
        if (ok) {
            xs.push_back(distances[i]);
            ys.push_back(std::log(m));
            ses.push_back(se / m);
        }
    }
    if (!est.empty()) {
        f.requested = est.front().requested;
        f.failures = est.front().failures;
    }
    if (xs.size() < 2 || xs.front() == xs.back()) {
        f.status = "decay too fast to resolve: fewer than two distances above 3 standard errors";
        return f;
    }
    const auto lf = linear_fit(xs, ys, ses);
    f.gamma = -lf.slope;
    f.gamma_se = lf.slope_se;
    f.prefactor = std::exp(lf.intercept);
    f.r_squared = lf.r_squared;
    f.resolved = true;
    f.status = "ok";
    return f;
}

inline DecayFit frac_moment_decay_fit(const ModelSpec& model, cplx z, double s, int L, std::vector<int> distances,
                                      const EnsembleConfig& cfg, MomentExponent mode = MomentExponent::Plain) {
    if (distances.size() < 2) throw InvalidArgument("decay fit needs at least two distances");
    std::sort(distances.begin(), distances.end());
    if (distances.front() < 0) throw InvalidArgument("decay fit distances must be nonnegative");
    const int d = model.dimension();
    const int rmax = distances.back();
    const BoxSpec box(d, L);
    const Site x = unit_vector(d, 0, -(rmax / 2));
    std::vector<Site> targets;
    for (int r : distances) targets.push_back(x + unit_vector(d, 0, r));
    const double exponent =
        mode == MomentExponent::Plain ? s : s / (2.0 * static_cast<double>(model.u.support_size()));
    auto f = fit_decay(distances, frac_moment_profile(model, box, z, exponent, x, targets, cfg));
    f.exponent = exponent;
    f.mode = mode;
    return f;
}

/// Sets used by the finite-volume criterion around x in Gamma.
struct FiniteVolumeGeometry {
    SiteSet box_x;           // Lambda_{L,x}
    SiteSet b_x;             // interior boundary of Lambda_{L,x}
    SiteSet lambda_hat;      // sites of Gamma in some Theta_b, b in Lambda_{L,x}
    SiteSet w_hat;           // sites of Gamma in some Theta_b, b in B_x
    SiteSet lambda_x;        // outer closure of lambda_hat, cut to Gamma
    SiteSet w_x;             // outer closure of w_hat, cut to Gamma
    SiteSet depleted;        // Gamma \ W_x
    std::vector<Site> terms; // exterior boundary of W_x inside Gamma
};

inline SiteSet theta_cover(const SiteSet& bases, const SingleSitePotential& u, const SiteSet& gamma) {
    SiteSet out;
    for (const auto& b : bases)
        for (const auto& k : u.support())
            if (gamma.count(b + k)) out.insert(b + k);
    return out;
}

inline FiniteVolumeGeometry finite_volume_geometry(const SingleSitePotential& u, const SiteSet& gamma, const Site& x,
                                                   int L) {
    if (L < u.diameter() + 2) throw InvalidArgument("finite volume criterion needs L >= diam Theta + 2");
    if (!gamma.count(x)) throw InvalidArgument("finite volume criterion: x outside Gamma");
    FiniteVolumeGeometry g;
    g.box_x = box_set(BoxSpec(u.dimension(), L, x));
    g.b_x = interior_boundary(g.box_x);
    g.lambda_hat = theta_cover(g.box_x, u, gamma);
    g.w_hat = theta_cover(g.b_x, u, gamma);
    g.lambda_x = set_intersection(outer_closure(g.lambda_hat), gamma);
    g.w_x = set_intersection(outer_closure(g.w_hat), gamma);
    if (g.w_x.count(x)) throw InvalidArgument("finite volume geometry degenerates: W_x contains x");
    g.depleted = set_difference(gamma, g.w_x);
    const auto ext = exterior_boundary(g.w_x, &gamma);
    g.terms.assign(ext.begin(), ext.end());
    return g;
}

struct FiniteVolumeSum {
    FiniteVolumeGeometry geometry;
    double exponent = 0.0;  // s / (2|Theta|)
    Statistic sum;          // per-sample sum over the boundary terms
    double xi = 0.0;
    double multiplier = 0.0;  // Xi_s lambda^{-2s/(2|Theta|)} L^{3(d-1)}, B_s left out
    std::size_t requested = 0;
    std::size_t failures = 0;

    double scaled() const { return multiplier * sum.mean; }
    double scaled_se() const { return multiplier * sum.standard_error(); }
};

inline FiniteVolumeSum finite_volume_sum(const ModelSpec& model, const BoxSpec& gamma_box, const Site& x, int L,
                                         cplx z, double s, const EnsembleConfig& cfg) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("finite_volume_sum: s must lie in (0, 1)");
    if (!(model.lambda > 0.0)) throw InvalidArgument("finite_volume_sum: lambda must be positive");
    const SiteSet gamma = box_set(gamma_box);
    FiniteVolumeSum out;
    out.geometry = finite_volume_geometry(model.u, gamma, x, L);
    const double theta = static_cast<double>(model.u.support_size());
    out.exponent = s / (2.0 * theta);
    out.xi = xi_s(model.lambda, s, model.u.support_size());
    out.multiplier = out.xi * std::pow(model.lambda, -2.0 * s / (2.0 * theta)) *
                     std::pow(static_cast<double>(L), 3.0 * (model.dimension() - 1));
    const SiteSet cover = coverage_region(gamma, model.u);
    const auto& geo = out.geometry;
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto sample = sample_disorder(model.mu, cover, rng);
        const auto h = model.hamiltonian(geo.depleted, sample);
        auto row = detail::moment_row(h, z, out.exponent, x, geo.terms);
        if (!row) return row;
        double total = 0.0;
        for (double v : *row) total += v;
        return std::vector<double>{total};
    };
    const auto r = run_ensemble(task, 1, cfg);
    out.sum = r.stats.front();
    out.requested = r.requested;
    out.failures = r.failures;
    return out;
}

} // namespace alloy
