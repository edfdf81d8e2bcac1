#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "alloy/errors.hpp"

namespace alloy {

using cplx = std::complex<double>;

/// Polynomial with complex coefficients stored in ascending order.
class Polynomial {
public:
    Polynomial() : c_{0.0} {}
    explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
        while (c_.size() > 1 && c_.back() == cplx(0.0)) c_.pop_back();
        if (c_.empty()) c_.push_back(0.0);
    }
    static Polynomial real(const std::vector<double>& coeffs) {
        return Polynomial(std::vector<cplx>(coeffs.begin(), coeffs.end()));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cplx>& coefficients() const { return c_; }
    cplx leading() const { return c_.back(); }

    bool is_real() const {
        return std::all_of(c_.begin(), c_.end(), [](cplx a) { return a.imag() == 0.0; });
    }

    cplx operator()(cplx x) const {
        cplx acc = c_.back();
        for (auto it = c_.rbegin() + 1; it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    cplx operator()(double x) const { return (*this)(cplx(x, 0.0)); }

    Polynomial derivative() const {
        if (c_.size() == 1) return Polynomial();
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    // |P(x)|^2 for real x, as a polynomial with real coefficients.
    Polynomial abs_squared() const {
        std::vector<cplx> q(2 * c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < c_.size(); ++j)
                q[i + j] += (c_[i] * std::conj(c_[j])).real();
        return Polynomial(std::move(q));
    }

    // All complex roots: companion-matrix eigenvalues polished by Newton's method.
    std::vector<cplx> roots() const {
        const int n = degree();
        if (n < 1) return {};
        const cplx lead = leading();
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        for (int j = 0; j < n; ++j) comp(j, n - 1) = -c_[static_cast<std::size_t>(j)] / lead;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
        if (solver.info() != Eigen::Success) throw NumericalFailure("polynomial root finder did not converge");
        std::vector<cplx> r(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
        const Polynomial dp = derivative();
        for (auto& z : r) {
            for (int it = 0; it < 8; ++it) {
                const cplx pz = (*this)(z);
                const cplx dz = dp(z);
                if (pz == cplx(0.0) || dz == cplx(0.0)) break;
                const cplx next = z - pz / dz;
                if (!(std::abs((*this)(next)) < std::abs(pz))) break;
                z = next;
            }
        }
        std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        return r;
    }

private:
    std::vector<cplx> c_;
};

/// P(x) = x^n + alpha_{n-1} x^{n-1} + ... + alpha_0, n >= 1.
class MonicPolynomial {
public:
    explicit MonicPolynomial(std::vector<cplx> lower) : lower_(std::move(lower)) {
        if (lower_.empty()) throw InvalidArgument("monic polynomial needs degree >= 1");
        for (auto a : lower_)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw InvalidArgument("monic polynomial has non-finite coefficients");
    }

    static MonicPolynomial real(const std::vector<double>& lower) {
        return MonicPolynomial(std::vector<cplx>(lower.begin(), lower.end()));
    }

    static MonicPolynomial from_roots(const std::vector<cplx>& roots) {
        if (roots.empty()) throw InvalidArgument("monic polynomial needs degree >= 1");
        std::vector<cplx> c{1.0};
        for (auto r : roots) {
            std::vector<cplx> next(c.size() + 1, 0.0);
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i + 1] += c[i];
                next[i] -= r * c[i];
            }
            c = std::move(next);
        }
        c.pop_back();
        return MonicPolynomial(std::move(c));
    }

    int degree() const { return static_cast<int>(lower_.size()); }
    const std::vector<cplx>& lower_coefficients() const { return lower_; }

    Polynomial polynomial() const {
        std::vector<cplx> c(lower_);
        c.push_back(1.0);
        return Polynomial(std::move(c));
    }

    cplx operator()(cplx x) const {
        cplx acc = 1.0;
        for (auto it = lower_.rbegin(); it != lower_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    cplx operator()(double x) const { return (*this)(cplx(x, 0.0)); }

    /// Matrix A with det(x I + A) = P(x): -1 on the subdiagonal, alpha_j in the last column.
    Eigen::MatrixXcd companion() const {
        const int n = degree();
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 1; i < n; ++i) a(i, i - 1) = -1.0;
        for (int j = 0; j < n; ++j) a(j, n - 1) = lower_[static_cast<std::size_t>(j)];
        return a;
    }

    std::vector<cplx> roots() const { return polynomial().roots(); }

    // Cauchy bound: every root has modulus below this.
    double root_bound() const {
        double m = 0.0;
        for (auto a : lower_) m = std::max(m, std::abs(a));
        return 1.0 + m;
    }

private:
    std::vector<cplx> lower_;
};

/// Real breakpoints in (lo, hi) induced by complex roots: real parts, plus the centroid of
/// each cluster of nearby roots (multiple roots come back from the eigensolver as small
/// clusters whose centroid is accurate). Values closer than 1e-10 are merged.
inline std::vector<double> root_breakpoints(const std::vector<cplx>& roots, double lo, double hi,
                                            double cluster_radius = 0.05) {
    std::vector<double> out;
    auto keep = [&](double x) {
        if (x > lo && x < hi && std::isfinite(x)) out.push_back(x);
    };
    for (auto r : roots) keep(r.real());
    // single-linkage clusters
    std::vector<int> label(roots.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (label[i] >= 0) continue;
        label[i] = next;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            auto a = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < roots.size(); ++j) {
                if (label[j] >= 0) continue;
                if (std::abs(roots[a] - roots[j]) <= cluster_radius * (1.0 + std::abs(roots[a]))) {
                    label[j] = next;
                    stack.push_back(j);
                }
            }
        }
        ++next;
    }
    for (int c = 0; c < next; ++c) {
        cplx sum = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < roots.size(); ++i)
            if (label[i] == c) {
                sum += roots[i];
                ++count;
            }
        if (count > 1) keep(sum.real() / count);
    }
    std::sort(out.begin(), out.end());
    std::vector<double> merged;
    for (double x : out)
        if (merged.empty() || x - merged.back() > 1e-10 * (1.0 + std::abs(x))) merged.push_back(x);
    return merged;
}

// Sorted breakpoints lo < b_1 < ... < hi.
inline std::vector<double> with_endpoints(std::vector<double> inner, double lo, double hi) {
    std::vector<double> b{lo};
    for (double x : inner)
        if (x > b.back() && x < hi) b.push_back(x);
    b.push_back(hi);
    return b;
}

} // namespace alloy
