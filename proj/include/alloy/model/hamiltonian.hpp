#pragma once

#include <Eigen/Dense>

#include "alloy/model/disorder.hpp"
#include "alloy/model/lattice.hpp"
#include "alloy/model/potential.hpp"

namespace alloy {

/// Dense matrix of H_{omega,Gamma} = P_Gamma (-Delta + lambda V_omega) P_Gamma^* in region order.
struct HamiltonianMatrix {
    Region region;
    Eigen::MatrixXd matrix;
    double lambda = 0.0;

    std::size_t size() const { return region.size(); }
    const std::optional<BoxSpec>& box() const { return region.box(); }
    std::size_t index_of(const Site& k) const { return region.index_of(k); }
};

// Restriction drops every hopping term leaving the region (simple boundary conditions).
inline HamiltonianMatrix assemble_on_region(Region region, const SingleSitePotential& u,
                                            const DisorderSample& sample, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("disorder strength lambda must be a finite nonnegative number");
    if (region.size() && region.dimension() != u.dimension())
        throw InvalidArgument("single-site potential dimension does not match region");
    const auto n = static_cast<Eigen::Index>(region.size());
    HamiltonianMatrix h{std::move(region), Eigen::MatrixXd::Zero(n, n), lambda};
    for (Eigen::Index i = 0; i < n; ++i) {
        const Site& x = h.region.site(static_cast<std::size_t>(i));
        h.matrix(i, i) = lambda * potential_value(sample, u, x);
        for (const auto& y : neighbours(x)) {
            if (auto j = h.region.find(y)) h.matrix(i, static_cast<Eigen::Index>(*j)) = -1.0;
        }
    }
    return h;
}

inline HamiltonianMatrix assemble_hamiltonian(const BoxSpec& box, const SingleSitePotential& u,
                                              const DisorderSample& sample, double lambda) {
    return assemble_on_region(Region(box), u, sample, lambda);
}

inline HamiltonianMatrix assemble_on_sites(const SiteSet& sites, const SingleSitePotential& u,
                                           const DisorderSample& sample, double lambda) {
    return assemble_on_region(Region(sites), u, sample, lambda);
}

} // namespace alloy
