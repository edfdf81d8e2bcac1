#pragma once

#include <cmath>
#include <vector>

#include "alloy/diagnostics/model_spec.hpp"
#include "alloy/spectral.hpp"

namespace alloy {

struct DynamicalMoment {
    std::vector<double> t;
    std::vector<double> moment;  // M_p(t)
    double mass = 0.0;           // |chi_I(H) delta_x|^2
    double max_mass_drift = 0.0; // max_t | |psi(t)|^2 - mass |
};

/// M_p(t) = sum_n (1 + |n|_inf)^p |<delta_n, e^{-itH} chi_I(H) delta_x>|^2, n in absolute coordinates.
inline DynamicalMoment dynamical_moment(const EigenSystem& eig, const Region& region, const Site& x, double a,
                                        double b, double p, const std::vector<double>& times) {
    if (static_cast<Eigen::Index>(region.size()) != eig.size())
        throw InvalidArgument("dynamical_moment: region and eigensystem sizes differ");
    if (!region.contains(x)) throw InvalidArgument("dynamical_moment: x outside the region");
    if (!(a <= b)) throw InvalidArgument("dynamical_moment: need a <= b");
    const auto ix = static_cast<Eigen::Index>(region.index_of(x));
    const Eigen::Index n = eig.size();
    // coefficients of chi_I(H) delta_x in the eigenbasis
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k)
        if (eig.values(k) >= a && eig.values(k) <= b) c(k) = eig.vectors(ix, k);
    Eigen::VectorXd weight(n);
    for (Eigen::Index i = 0; i < n; ++i)
        weight(i) = std::pow(1.0 + sup_norm(region.site(static_cast<std::size_t>(i))), p);
    DynamicalMoment out;
    out.mass = c.squaredNorm();
    const double tol = 1e-10 * std::max(1.0, out.mass);
    for (double t : times) {
        Eigen::VectorXcd ct(n);
        for (Eigen::Index k = 0; k < n; ++k) ct(k) = c(k) * std::polar(1.0, -eig.values(k) * t);
        const Eigen::VectorXcd psi = eig.vectors.cast<cplx>() * ct;
        const Eigen::VectorXd prob = psi.cwiseAbs2();
        const double drift = std::abs(prob.sum() - out.mass);
        out.max_mass_drift = std::max(out.max_mass_drift, drift);
        if (!(drift <= tol)) throw NumericalFailure("dynamical_moment: mass not conserved to 1e-10");
        out.t.push_back(t);
        out.moment.push_back(weight.dot(prob));
    }
    return out;
}

struct DynamicalEnsemble {
    std::vector<double> t;
    std::vector<Statistic> moment;
    std::size_t samples = 0;

    // ratio of ensemble means at two grid indices
    double ratio(std::size_t late, std::size_t early) const { return moment[late].mean / moment[early].mean; }
};

inline DynamicalEnsemble dynamical_moment_ensemble(const ModelSpec& model, const BoxSpec& box, const Site& x,
                                                   double a, double b, double p, const std::vector<double>& times,
                                                   const EnsembleConfig& cfg) {
    if (times.empty()) throw InvalidArgument("dynamical_moment needs a nonempty t-grid");
    const SiteSet cover = coverage_region(box, model.u);
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto h = model.hamiltonian(box, sample_disorder(model.mu, cover, rng));
        return dynamical_moment(eigen_decomposition(h), h.region, x, a, b, p, times).moment;
    };
    const auto r = run_ensemble(task, times.size(), cfg);
    return {times, r.stats, r.requested};
}

} // namespace alloy
