#pragma once

#include "alloy/spectral/eigen_system.hpp"

namespace alloy {

// e^{-itH} psi0 through the eigenbasis.
inline Eigen::VectorXcd evolve_state(const EigenSystem& eig, const Eigen::VectorXcd& psi0, double t) {
    if (psi0.size() != eig.size()) throw InvalidArgument("evolve_state: state has wrong length");
    if (t == 0.0) return psi0;
    Eigen::VectorXcd c = eig.vectors.transpose().cast<cplx>() * psi0;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -eig.values(k) * t);
    return eig.vectors.cast<cplx>() * c;
}

} // namespace alloy
