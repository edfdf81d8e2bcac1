#pragma once

#include <vector>

#include "alloy/spectral/eigen_system.hpp"

namespace alloy {

struct SchurBlockResult {
    Eigen::MatrixXd inverse;      // (H_Xi - E - Gamma (H_Theta - E)^{-1} Gamma^*)^{-1}
    Eigen::MatrixXd direct;       // P_Xi (H - E)^{-1} P_Xi^*
    double max_deviation = 0.0;
    double tolerance = 0.0;
    double condition = 0.0;       // condition number of H - E
};

/// Inverse of the Schur complement on the block `block` (indices into H), checked
/// entrywise against the corresponding block of the full inverse.
inline SchurBlockResult schur_block_inverse(const Eigen::MatrixXd& h, double energy,
                                            const std::vector<Eigen::Index>& block) {
    require_symmetric(h);
    const Eigen::Index n = h.rows();
    std::vector<char> in_block(static_cast<std::size_t>(n), 0);
    for (auto i : block) {
        if (i < 0 || i >= n) throw InvalidArgument("schur_block_inverse: block index out of range");
        if (in_block[static_cast<std::size_t>(i)]) throw InvalidArgument("schur_block_inverse: repeated index");
        in_block[static_cast<std::size_t>(i)] = 1;
    }
    if (block.empty()) throw InvalidArgument("schur_block_inverse: empty block");
    std::vector<Eigen::Index> rest;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!in_block[static_cast<std::size_t>(i)]) rest.push_back(i);

    const auto ev = eigenvalues(h);
    const double scale = matrix_scale(h);
    const double dist = distance_to_spectrum(ev, cplx(energy, 0.0));
    if (!(dist > 1e-10 * scale)) throw SpectralCollision("schur_block_inverse: E in sigma(H)", dist);

    const auto nr = static_cast<Eigen::Index>(rest.size());
    Eigen::MatrixXd hxx = h(block, block);
    hxx.diagonal().array() -= energy;

    SchurBlockResult out;
    Eigen::MatrixXd complement = hxx;
    if (nr > 0) {
        Eigen::MatrixXd htt = h(rest, rest);
        const auto ev_t = eigenvalues(htt);
        const double dist_t = distance_to_spectrum(ev_t, cplx(energy, 0.0));
        if (!(dist_t > 1e-10 * scale))
            throw SpectralCollision("schur_block_inverse: E in sigma of the complement block", dist_t);
        htt.diagonal().array() -= energy;
        Eigen::MatrixXd gamma = h(block, rest);
        complement -= gamma * htt.partialPivLu().solve(gamma.transpose());
    }
    out.inverse = complement.partialPivLu().inverse();

    Eigen::MatrixXd full = h;
    full.diagonal().array() -= energy;
    Eigen::MatrixXd full_inv = full.partialPivLu().inverse();
    out.direct = full_inv(block, block);

    const double max_gap = std::max(std::abs(ev(0) - energy), std::abs(ev(ev.size() - 1) - energy));
    out.condition = max_gap / dist;
    out.max_deviation = (out.inverse - out.direct).cwiseAbs().maxCoeff();
    out.tolerance = 1e-10 * out.condition * std::max(1.0, out.direct.cwiseAbs().maxCoeff());
    if (!(out.max_deviation <= out.tolerance))
        throw NumericalFailure("schur_block_inverse: Schur complement disagrees with the direct inverse");
    return out;
}

} // namespace alloy
