#pragma once

#include <vector>

#include "alloy/spectral/eigen_system.hpp"

namespace alloy {

namespace detail {

inline void check_collision(const Eigen::MatrixXd& h, cplx z, const Eigen::VectorXd* values) {
    const double tol = collision_tolerance(h, z);
    if (z.imag() != 0.0 && std::abs(z.imag()) > tol) return;
    Eigen::VectorXd own;
    if (!values) {
        own = eigenvalues(h);
        values = &own;
    }
    const double dist = distance_to_spectrum(*values, z);
    if (!(dist > tol))
        throw SpectralCollision("spectral parameter within collision tolerance of sigma(H)", dist);
}

} // namespace detail

/// Column y of (H - z)^{-1} from one LU solve of (H - z) w = delta_y.
///
/// Real z (and |Im z| below the collision tolerance) is checked against the spectrum,
/// using `values` when given and a fresh eigenvalue computation otherwise.
inline Eigen::VectorXcd green_column(const Eigen::MatrixXd& h, cplx z, Eigen::Index y,
                                     const Eigen::VectorXd* values = nullptr) {
    if (y < 0 || y >= h.rows()) throw InvalidArgument("green_column: index outside matrix");
    detail::check_collision(h, z, values);
    Eigen::MatrixXcd a = h.cast<cplx>();
    a.diagonal().array() -= z;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(h.rows());
    rhs(y) = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::VectorXcd w = lu.solve(rhs);
    const double residual = (a * w - rhs).norm();
    if (!(residual <= 1e-10 * std::max(1.0, w.norm())))
        throw NumericalFailure("green_column: linear solve residual too large");
    return w;
}

inline Eigen::VectorXcd green_column(const HamiltonianMatrix& h, cplx z, const Site& y,
                                     const Eigen::VectorXd* values = nullptr) {
    return green_column(h.matrix, z, static_cast<Eigen::Index>(h.index_of(y)), values);
}

/// G(z;x,y) = <delta_x, (H - z)^{-1} delta_y>.
inline cplx green_function(const HamiltonianMatrix& h, cplx z, const Site& x, const Site& y,
                           const Eigen::VectorXd* values = nullptr) {
    const auto ix = static_cast<Eigen::Index>(h.index_of(x));
    return green_column(h, z, y, values)(ix);
}

// Spectral representation sum_k q_k(x) q_k(y) / (E_k - z); no solve.
inline cplx green_from_eigen(const EigenSystem& eig, cplx z, Eigen::Index x, Eigen::Index y) {
    cplx g = 0.0;
    for (Eigen::Index k = 0; k < eig.size(); ++k)
        g += eig.vectors(x, k) * eig.vectors(y, k) / (eig.values(k) - z);
    return g;
}

// Full real resolvent (H - E)^{-1} from the eigenbasis; E must be off the spectrum.
inline Eigen::MatrixXd resolvent_matrix(const EigenSystem& eig, double energy) {
    Eigen::VectorXd inv = (eig.values.array() - energy).inverse();
    return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

/// ||(H - z)^{-1}|| = 1 / dist(z, sigma(H)) for the normal matrix H.
inline double resolvent_norm(const Eigen::VectorXd& values, cplx z, double scale = 1.0) {
    const double dist = distance_to_spectrum(values, z);
    if (!(dist > 1e-13 * scale)) throw SpectralCollision("resolvent_norm: z lies in sigma(H)", dist);
    return 1.0 / dist;
}

inline double resolvent_norm(const EigenSystem& eig, cplx z) {
    return resolvent_norm(eig.values, z, std::max(1.0, eig.spectral_norm()));
}

inline double resolvent_norm(const HamiltonianMatrix& h, cplx z) {
    return resolvent_norm(eigenvalues(h), z, matrix_scale(h.matrix));
}

struct ProjectionTrace {
    std::size_t count = 0;
    Eigen::VectorXd diagonal;  // <delta_x, chi_[a,b](H) delta_x> per site
};

// Closed interval, exact comparison on the computed eigenvalues.
inline ProjectionTrace spectral_projection_trace(const EigenSystem& eig, double a, double b) {
    if (!(a <= b)) throw InvalidArgument("spectral_projection_trace: need a <= b");
    ProjectionTrace out;
    out.diagonal = Eigen::VectorXd::Zero(eig.size());
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
        if (eig.values(k) < a || eig.values(k) > b) continue;
        ++out.count;
        out.diagonal += eig.vectors.col(k).cwiseAbs2();
    }
    return out;
}

inline std::size_t count_in_interval(const Eigen::VectorXd& values, double a, double b) {
    const double* first = values.data();
    const double* last = first + values.size();
    return static_cast<std::size_t>(std::upper_bound(first, last, b) - std::lower_bound(first, last, a));
}

} // namespace alloy
