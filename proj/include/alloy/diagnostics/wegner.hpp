#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "alloy/bounds/report.hpp"
#include "alloy/diagnostics/fit.hpp"
#include "alloy/diagnostics/model_spec.hpp"
#include "alloy/spectral.hpp"

namespace alloy {

struct WegnerPoint {
    double eps = 0.0;
    Statistic count;  // Tr chi_[E-eps, E+eps](H)
    Statistic hit;    // indicator of sigma(H) meeting the window
    Interval hit_ci;
};

struct WegnerCount {
    double energy = 0.0;
    std::vector<WegnerPoint> points;  // ascending eps
    std::size_t monotonicity_violations = 0;
    std::size_t samples = 0;
};

inline WegnerCount wegner_count(const ModelSpec& model, const BoxSpec& box, double E, std::vector<double> eps,
                                const EnsembleConfig& cfg) {
    if (eps.empty()) throw InvalidArgument("wegner_count needs at least one eps");
    for (double e : eps)
        if (!(e >= 0.0) || !std::isfinite(e)) throw InvalidArgument("wegner_count: eps must be finite and >= 0");
    std::sort(eps.begin(), eps.end());
    const std::size_t k = eps.size();
    const SiteSet cover = coverage_region(box, model.u);
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto values = eigenvalues(model.hamiltonian(box, sample_disorder(model.mu, cover, rng)));
        std::vector<double> row(2 * k + 1, 0.0);
        std::size_t prev = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const auto c = count_in_interval(values, E - eps[j], E + eps[j]);
            row[j] = static_cast<double>(c);
            row[k + j] = c > 0 ? 1.0 : 0.0;
            if (j > 0 && c < prev) row[2 * k] += 1.0;
            prev = c;
        }
        return row;
    };
    const auto r = run_ensemble(task, 2 * k + 1, cfg);
    WegnerCount out;
    out.energy = E;
    out.samples = r.requested;
    for (std::size_t j = 0; j < k; ++j) {
        const auto& hit = r.stats[k + j];
        const auto hits = static_cast<std::size_t>(std::llround(hit.mean * static_cast<double>(hit.n)));
        out.points.push_back({eps[j], r.stats[j], hit, wilson_interval(hits, hit.n)});
    }
    out.monotonicity_violations =
        static_cast<std::size_t>(std::llround(r.stats[2 * k].mean * static_cast<double>(r.stats[2 * k].n)));
    return out;
}

// Total variation of the piecewise-linear density, jumps at the support ends included.
inline double density_bv_norm(const DisorderSpec& mu) {
    const auto& v = mu.knot_values();
    double tv = std::abs(v.front()) + std::abs(v.back());
    for (std::size_t i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
    return tv;
}

/// (4/|ubar|) rank(u) |rho| eps (2L + n)^d / lambda with n = diam Theta.
///
/// The density of lambda*omega is rho(./lambda)/lambda, hence the 1/lambda.
/// `rho_norm` is the density norm to use (sup norm or total variation).
inline double wegner_corollary_bound(const ModelSpec& model, double rho_norm, double eps, int L) {
    const double ubar = model.u.mean();
    if (ubar == 0.0) throw InvalidArgument("Wegner corollary bound needs a nonzero mean of u");
    if (!(model.lambda > 0.0)) throw InvalidArgument("Wegner corollary bound needs lambda > 0");
    const double side = 2.0 * L + model.u.diameter();
    return 4.0 / std::abs(ubar) * static_cast<double>(model.u.support_size()) * rho_norm * eps *
           std::pow(side, model.dimension()) / model.lambda;
}

struct WegnerScaling {
    LinearFit eps_fit;     // log mean count vs log eps at fixed L
    LinearFit volume_fit;  // log mean count vs log(2L+1) at fixed eps
    double eps_exponent = 0.0;
    double volume_exponent = 0.0;  // slope / d
    double volume_exponent_se = 0.0;
    std::vector<WegnerCount> eps_runs;     // a single run holding all eps
    std::vector<WegnerCount> volume_runs;  // one per L
    bool degenerate = false;
};

inline WegnerScaling wegner_scaling_fit(const ModelSpec& model, double E, const std::vector<double>& eps_grid,
                                        int fixed_L, const std::vector<int>& L_grid, double fixed_eps,
                                        const EnsembleConfig& cfg) {
    if (eps_grid.size() < 3 || L_grid.size() < 3) throw InvalidArgument("wegner_scaling_fit needs >= 3 points per axis");
    const int d = model.dimension();
    WegnerScaling out;
    out.eps_runs.push_back(wegner_count(model, BoxSpec(d, fixed_L), E, eps_grid, cfg));
    std::vector<double> xs, ys, ses;
    for (const auto& p : out.eps_runs.front().points) {
        if (!(p.count.mean > 0.0) || !(p.eps > 0.0)) {
            out.degenerate = true;
            continue;
        }
        xs.push_back(std::log(p.eps));
        ys.push_back(std::log(p.count.mean));
        ses.push_back(p.count.standard_error() / p.count.mean);
    }
    std::vector<double> vx, vy, vse;
    for (int L : L_grid) {
        out.volume_runs.push_back(wegner_count(model, BoxSpec(d, L), E, {fixed_eps}, cfg));
        const auto& p = out.volume_runs.back().points.front();
        if (!(p.count.mean > 0.0)) {
            out.degenerate = true;
            continue;
        }
        vx.push_back(std::log(2.0 * L + 1.0));
        vy.push_back(std::log(p.count.mean));
        vse.push_back(p.count.standard_error() / p.count.mean);
    }
    if (xs.size() < 2 || vx.size() < 2) {
        out.degenerate = true;
        return out;
    }
    out.eps_fit = linear_fit(xs, ys, ses);
    out.volume_fit = linear_fit(vx, vy, vse);
    out.eps_exponent = out.eps_fit.slope;
    out.volume_exponent = out.volume_fit.slope / d;
    out.volume_exponent_se = out.volume_fit.slope_se / d;
    return out;
}

/// <delta_x, chi_[a,b](H) delta_x> <= (4/pi) int_a^b Im G(E + i eps; x, x) dE.
///
/// The right side is integrated with per-point Green solves, split at the eigenvalues in [a,b].
inline InequalityReport stone_inequality_check(const Eigen::MatrixXd& h, Eigen::Index x, double a, double b,
                                               double eps) {
    if (!(a < b)) throw InvalidArgument("stone_inequality_check: need a < b");
    if (!(eps > 0.0 && eps <= b - a)) throw InvalidArgument("stone_inequality_check: need 0 < eps <= b - a");
    if (x < 0 || x >= h.rows()) throw InvalidArgument("stone_inequality_check: x outside matrix");
    const auto eig = eigen_decomposition(h);
    InequalityReport rep;
    rep.name = "stone";
    rep.lhs = spectral_projection_trace(eig, a, b).diagonal(x);

    std::vector<double> cuts{a};
    for (Eigen::Index k = 0; k < eig.size(); ++k)
        if (eig.values(k) > a && eig.values(k) < b && eig.values(k) > cuts.back()) cuts.push_back(eig.values(k));
    cuts.push_back(b);
    // Im G(E + i eps; x, x) from the eigenbasis; one LU per node was far too slow.
    const Eigen::VectorXd w = eig.vectors.row(x).transpose().cwiseAbs2();
    auto f = [&](double E) {
        return (w.array() * eps / ((eig.values.array() - E).square() + eps * eps)).sum();
    };
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        double e = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-12, &e);
        err += e;
    }
    rep.rhs = 4.0 / M_PI * total;
    rep.error = 1e-8;
    rep.details = {{"quadrature_error", 4.0 / M_PI * err}, {"pieces", static_cast<double>(cuts.size() - 1)}};
    if (!(4.0 / M_PI * err <= 1e-9 * std::max(1.0, rep.rhs))) {
        rep.status = CheckStatus::NumericalFailure;
        rep.note = "quadrature error above 1e-9";
    }
    return rep;
}

} // namespace alloy
