#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "alloy/errors.hpp"
#include "alloy/model/hamiltonian.hpp"

namespace alloy {

using cplx = std::complex<double>;

/// Ascending eigenvalues with orthonormal eigenvectors (columns) in site order.
struct EigenSystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;

    Eigen::Index size() const { return values.size(); }
    double spectral_norm() const {
        return values.size() ? std::max(std::abs(values(0)), std::abs(values(values.size() - 1))) : 0.0;
    }
};

inline void require_symmetric(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols()) throw InvalidArgument("matrix is not square");
    if (h.size() && (h - h.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw InvalidArgument("matrix is not symmetric");
}

// Householder tridiagonalisation followed by implicit symmetric QR.
inline EigenSystem eigen_decomposition(const Eigen::MatrixXd& h) {
    require_symmetric(h);
    if (h.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline EigenSystem eigen_decomposition(const HamiltonianMatrix& h) { return eigen_decomposition(h.matrix); }

inline Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& h) {
    require_symmetric(h);
    if (h.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver did not converge");
    return solver.eigenvalues();
}

inline Eigen::VectorXd eigenvalues(const HamiltonianMatrix& h) { return eigenvalues(h.matrix); }

// dist(z, sigma(H)) from ascending eigenvalues.
inline double distance_to_spectrum(const Eigen::VectorXd& values, cplx z) {
    if (values.size() == 0) return std::numeric_limits<double>::infinity();
    const double re = z.real();
    const double* b = values.data();
    const double* e = b + values.size();
    const double* it = std::lower_bound(b, e, re);
    double best = std::numeric_limits<double>::infinity();
    if (it != e) best = std::min(best, std::abs(*it - re));
    if (it != b) best = std::min(best, std::abs(*(it - 1) - re));
    return std::hypot(best, z.imag());
}

inline double distance_to_spectrum(const Eigen::VectorXd& values, double lo, double hi) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double v = values(k);
        if (v >= lo && v <= hi) return 0.0;
        best = std::min(best, v < lo ? lo - v : v - hi);
    }
    return best;
}

// Scale used in collision tolerances; the infinity norm bounds the spectral norm.
inline double matrix_scale(const Eigen::MatrixXd& h) {
    return h.size() ? std::max(1.0, h.cwiseAbs().rowwise().sum().maxCoeff()) : 1.0;
}

inline double collision_tolerance(const Eigen::MatrixXd& h, cplx z) {
    return (z.imag() == 0.0 ? 1e-10 : 1e-13) * matrix_scale(h);
}

} // namespace alloy
