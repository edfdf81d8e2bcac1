#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "alloy/bounds/polynomial.hpp"
#include "alloy/bounds/quadrature.hpp"
#include "alloy/bounds/report.hpp"
#include "alloy/bounds/sublevel.hpp"
#include "alloy/errors.hpp"
#include "alloy/model/disorder.hpp"

namespace alloy {

inline constexpr double kQuadratureBudget = 1e-6; // relative to rhs

/// Measure of {x : |P(x)| <= alpha} against 4 (alpha/2)^{1/n}.
inline InequalityReport polya_sublevel_measure(const MonicPolynomial& p, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("polya: alpha must be positive");
    InequalityReport r;
    r.name = "polya";
    const int n = p.degree();
    r.rhs = 4.0 * std::pow(alpha / 2.0, 1.0 / n);
    // every x with |P(x)| <= alpha is a root of P - w for some |w| <= alpha
    const double radius = p.root_bound() + alpha;
    try {
        const auto set = sublevel_set(p.polynomial(), alpha, -radius, radius);
        r.lhs = set.measure;
        // degree 1 with a real root attains the bound, so the rounding of rhs belongs in the error
        r.error = set.error + 8.0 * std::numeric_limits<double>::epsilon() * r.rhs;
        r.details.emplace_back("intervals", static_cast<double>(set.intervals.size()));
    } catch (const NumericalFailure& e) {
        r.status = CheckStatus::NumericalFailure;
        r.note = e.what();
    }
    return r;
}

inline double fractional_integral_bound(const DisorderSpec& rho, double s) {
    return std::pow(rho.l1_norm(), 1.0 - s) * std::pow(rho.sup_density(), s) * std::pow(2.0, s) *
           std::pow(s, -s) / (1.0 - s);
}

inline void require_fraction(double s, const char* who) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument(std::string(who) + ": s must lie in (0,1)");
}

/// Integral of |P(x)|^{-s/n} rho(x) against the closed-form bound.
inline InequalityReport polynomial_fractional_integral(const MonicPolynomial& p, const DisorderSpec& rho,
                                                       double s) {
    require_fraction(s, "polynomial_fractional_integral");
    InequalityReport r;
    r.name = "fractional_integral";
    r.rhs = fractional_integral_bound(rho, s);
    const double beta = s / p.degree();
    const Polynomial poly = p.polynomial();
    try {
        const auto roots = poly.roots();
        // Horner where it is accurate; next to a root, where the graded panels put most of
        // their nodes, |P(x)| = prod |x - r_j| as a sum of logs (no cancellation, no underflow)
        auto log_abs = [&](double end, double off) {
            double acc = 0.0;
            for (auto z : roots) acc += std::log(std::abs((end - z) + off));
            return acc;
        };
        auto gauge = [&](double x) {
            double g = 0.0;
            for (auto it = poly.coefficients().rbegin(); it != poly.coefficients().rend(); ++it)
                g = g * std::abs(x) + std::abs(*it);
            return g;
        };
        auto inv_power = [&](double end, double off) {
            const double x = end + off;
            const double h = std::abs(poly(x));
            if (std::isnormal(h) && h >= 1e-6 * gauge(x)) return std::pow(h, -beta);
            return std::exp(-beta * log_abs(end, off));
        };
        const double span = rho.upper() - rho.lower();
        for (int k = 0; k <= 8; ++k) {
            const double x = rho.lower() + span * (k + 0.5) / 9.0;
            const double h = std::abs(poly(x));
            if (h >= 1e-6 * gauge(x) && std::abs(std::exp(log_abs(x, 0.0)) - h) > 1e-4 * h)
                throw NumericalFailure("computed roots do not reproduce the polynomial");
        }
        auto cuts = root_breakpoints(roots, rho.lower(), rho.upper());
        cuts.insert(cuts.end(), rho.knots().begin(), rho.knots().end());
        std::sort(cuts.begin(), cuts.end());
        cuts = with_endpoints(std::move(cuts), rho.lower(), rho.upper());
        auto f = [&](double end, double off) { return rho.density(end + off) * inv_power(end, off); };
        // a root of multiplicity k gives |x - r|^{-k s/n}, so s bounds every exponent
        const auto q = integrate_singular_panels(f, cuts, s);
        r.lhs = q.value;
        r.error = q.error;
        r.details.emplace_back("panels", static_cast<double>(q.panels));
        if (!std::isfinite(q.value) || q.error > kQuadratureBudget * r.rhs) {
            r.status = CheckStatus::NumericalFailure;
            r.note = "quadrature error above budget";
        }
    } catch (const NumericalFailure& e) {
        r.status = CheckStatus::NumericalFailure;
        r.note = e.what();
    }
    return r;
}

struct DeterminantPolynomial {
    MonicPolynomial poly{std::vector<cplx>{0.0}};
    double abs_det_v = 0.0;
    double residual = 0.0; // relative misfit at an extra node, and of the leading coefficient
};

inline double abs_det_checked(const Eigen::MatrixXcd& v) {
    const double d = std::abs(Eigen::PartialPivLU<Eigen::MatrixXcd>(v).determinant());
    if (!(d >= 1e-14)) throw InvalidArgument("V is singular (|det V| < 1e-14)");
    return d;
}

/// r -> det(A + rV)/det(V), recovered from values at n+1 Chebyshev nodes on [c-h, c+h].
inline DeterminantPolynomial determinant_polynomial(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& v,
                                                    double center, double half_width) {
    if (a.rows() != a.cols() || v.rows() != v.cols() || a.rows() != v.rows() || a.rows() == 0)
        throw InvalidArgument("A and V must be square of equal size");
    const int n = static_cast<int>(a.rows());
    const cplx det_v = Eigen::PartialPivLU<Eigen::MatrixXcd>(v).determinant();
    DeterminantPolynomial out;
    out.abs_det_v = abs_det_checked(v);
    if (!(half_width > 0.0)) half_width = 1.0;
    auto value = [&](double r) {
        return Eigen::PartialPivLU<Eigen::MatrixXcd>(a + r * v).determinant() / det_v;
    };
    const int m = n + 1;
    Eigen::MatrixXcd vand(m, m);
    Eigen::VectorXcd rhs(m);
    for (int k = 0; k < m; ++k) {
        const double t = std::cos(M_PI * (2.0 * k + 1.0) / (2.0 * m));
        double pw = 1.0;
        for (int j = 0; j < m; ++j, pw *= t) vand(k, j) = pw;
        rhs(k) = value(center + half_width * t);
    }
    const Eigen::VectorXcd beta = vand.partialPivLu().solve(rhs);
    // expand sum_j beta_j ((r - c)/h)^j in powers of r
    std::vector<cplx> coef(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
        const cplx bj = beta(j) / std::pow(half_width, j);
        double binom = 1.0;
        for (int i = 0; i <= j; ++i) {
            coef[static_cast<std::size_t>(i)] += bj * binom * std::pow(-center, j - i);
            binom = binom * (j - i) / (i + 1);
        }
    }
    const cplx lead = coef.back();
    coef.pop_back();
    out.poly = MonicPolynomial(coef);
    const double t_extra = 0.5 * (std::cos(M_PI / (2.0 * m)) + std::cos(3.0 * M_PI / (2.0 * m)));
    const double r_extra = center + half_width * t_extra;
    const cplx exact = value(r_extra);
    out.residual = std::max(std::abs(out.poly(r_extra) - exact) / std::max(1.0, std::abs(exact)),
                            std::abs(lead - 1.0));
    return out;
}

/// Integral of |det(A + rV)|^{-s/n} rho(r) against |det V|^{-s/n} times the scalar bound.
inline InequalityReport determinant_average(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& v,
                                            const DisorderSpec& rho, double s) {
    require_fraction(s, "determinant_average");
    const double c = 0.5 * (rho.lower() + rho.upper());
    // a narrow support makes the monic fit ill conditioned at high degree; the nodes only
    // fix the polynomial, the integrand is still evaluated on supp rho
    const double h = std::max(2.0, 0.5 * (rho.upper() - rho.lower()));
    const auto dp = determinant_polynomial(a, v, c, h);
    const int n = static_cast<int>(a.rows());
    InequalityReport r = polynomial_fractional_integral(dp.poly, rho, s);
    r.name = "determinant_average";
    const double scale = std::pow(dp.abs_det_v, -s / n);
    r.lhs *= scale;
    r.rhs *= scale;
    r.error *= scale;
    r.details.emplace_back("interpolation_residual", dp.residual);
    if (dp.residual > 1e-8 && r.status == CheckStatus::Ok) {
        r.status = CheckStatus::NumericalFailure;
        r.note = "determinant interpolation residual above 1e-8";
    }
    return r;
}

inline double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

/// Integral over [-R, R] of ||(A + rV)^{-1}||^{s/n} against the closed-form bound.
inline InequalityReport inverse_norm_average(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& v, double s,
                                             double radius) {
    require_fraction(s, "inverse_norm_average");
    if (!(radius > 0.0)) throw InvalidArgument("inverse_norm_average: R must be positive");
    if (a.rows() != a.cols() || v.rows() != v.cols() || a.rows() != v.rows() || a.rows() == 0)
        throw InvalidArgument("A and V must be square of equal size");
    const int n = static_cast<int>(a.rows());
    const double det_v = abs_det_checked(v);
    InequalityReport r;
    r.name = "inverse_norm_average";
    r.rhs = 2.0 * std::pow(radius, 1.0 - s) *
            std::pow(spectral_norm(a) + radius * spectral_norm(v), s * (n - 1) / n) /
            (std::pow(s, s) * (1.0 - s) * std::pow(det_v, s / n));
    try {
        // singular points: det(A + rV) = 0  <=>  r is an eigenvalue of -V^{-1} A
        const Eigen::MatrixXcd m = -v.partialPivLu().solve(a);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
        if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");
        std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
        const auto cuts = with_endpoints(root_breakpoints(ev, -radius, radius), -radius, radius);
        auto f = [&](double x) {
            const Eigen::MatrixXcd b = a + x * v;
            const double smin = Eigen::JacobiSVD<Eigen::MatrixXcd>(b).singularValues()(n - 1);
            return std::pow(smin, -s / n);
        };
        // a Jordan block of size k gives |r - r0|^{-ks/n}, so s bounds every exponent
        const auto q = integrate_singular_panels(f, cuts, s);
        r.lhs = q.value;
        r.error = q.error;
        r.details.emplace_back("panels", static_cast<double>(q.panels));
        if (!std::isfinite(q.value) || q.error > kQuadratureBudget * r.rhs) {
            r.status = CheckStatus::NumericalFailure;
            r.note = "quadrature error above budget";
        }
    } catch (const NumericalFailure& e) {
        r.status = CheckStatus::NumericalFailure;
        r.note = e.what();
    }
    return r;
}

struct WeakL1Profile {
    std::vector<double> t;
    std::vector<double> measure;
    std::vector<double> normalized; // t * measure / (|M1 V^{-1/2}|_HS |M2 V^{-1/2}|_HS)
    double sup_normalized = 0.0;    // empirical weak-L1 constant on the grid
    double window = 0.0;            // r is sampled on [-window, window]
    double step = 0.0;
    double hs_left = 0.0;
    double hs_right = 0.0;
};

inline void require_dissipative(const Eigen::MatrixXcd& a) {
    const Eigen::MatrixXcd k = (a - a.adjoint()) / cplx(0.0, 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, spectral_norm(a)))
        throw InvalidArgument("A is not dissipative: Im<x,Ax> < 0 for some x");
}

/// Distribution function of r -> |M1 (A + rV)^{-1} M2|_HS on the t grid.
///
/// Outside the window the norm is below every t in the grid, because
/// |M1 (A + rV)^{-1} M2|_HS <= |M1| |M2|_HS / (|r| v_min - |A|), so the sampled
/// measure misses nothing there; inside it the error is a few grid steps per crossing.
inline WeakL1Profile weak_l1_tail(const Eigen::MatrixXcd& a, const Eigen::VectorXd& v,
                                  const Eigen::MatrixXcd& m1, const Eigen::MatrixXcd& m2,
                                  std::vector<double> t_grid, std::size_t points = 20000) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || v.size() != n || m1.cols() != n || m2.rows() != n)
        throw InvalidArgument("weak_l1_tail: dimension mismatch");
    if (t_grid.empty() || points == 0) throw InvalidArgument("weak_l1_tail: empty grid");
    for (double t : t_grid)
        if (!(t > 0.0)) throw InvalidArgument("weak_l1_tail: t must be positive");
    if (!(v.minCoeff() > 0.0)) throw InvalidArgument("weak_l1_tail: V must be positive definite");
    require_dissipative(a);

    WeakL1Profile out;
    out.t = t_grid;
    const Eigen::VectorXd vis = v.cwiseSqrt().cwiseInverse();
    out.hs_left = (m1 * vis.asDiagonal()).norm();
    out.hs_right = (m2 * vis.asDiagonal()).norm();
    const double tmin = *std::min_element(t_grid.begin(), t_grid.end());
    out.window = (spectral_norm(m1) * m2.norm() / tmin + spectral_norm(a)) / v.minCoeff();
    out.step = 2.0 * out.window / static_cast<double>(points);

    std::vector<double> values(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double r = -out.window + (static_cast<double>(i) + 0.5) * out.step;
        const Eigen::MatrixXcd b = a + r * Eigen::MatrixXcd(v.cast<cplx>().asDiagonal());
        values[i] = (m1 * b.partialPivLu().solve(m2)).norm();
    }
    std::sort(values.begin(), values.end());
    const double norm = out.hs_left * out.hs_right;
    for (double t : t_grid) {
        const auto above = static_cast<double>(values.end() - std::upper_bound(values.begin(), values.end(), t));
        const double meas = above * out.step;
        out.measure.push_back(meas);
        out.normalized.push_back(norm > 0.0 ? t * meas / norm : 0.0);
        out.sup_normalized = std::max(out.sup_normalized, out.normalized.back());
    }
    return out;
}

} // namespace alloy
