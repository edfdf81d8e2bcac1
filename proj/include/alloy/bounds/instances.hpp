#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "alloy/bounds/averaging.hpp"
#include "alloy/bounds/cartan.hpp"

namespace alloy {

// Random hypothesis-satisfying instances for the inequality sweeps.
namespace instances {

inline double uniform(Rng& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

inline double gauss(Rng& rng) {
    // Box-Muller on the library's own uniform stream, so instances do not depend on the std distribution
    const double u1 = 1.0 - uniform01(rng), u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Roots scattered near [-2, 2]; a third of them real, some repeated.
inline MonicPolynomial monic(Rng& rng, int degree) {
    std::vector<cplx> roots;
    for (int k = 0; k < degree; ++k) {
        const double pick = uniform01(rng);
        if (k > 0 && pick < 0.1)
            roots.push_back(roots.back());
        else if (pick < 0.4)
            roots.emplace_back(uniform(rng, -2, 2), 0.0);
        else
            roots.emplace_back(uniform(rng, -2, 2), uniform(rng, -1, 1));
    }
    return MonicPolynomial::from_roots(roots);
}

inline DisorderSpec density(Rng& rng) {
    const double a = uniform(rng, -2, 1);
    const double w = uniform(rng, 0.2, 3);
    if (uniform01(rng) < 0.5) return DisorderSpec::uniform(a, a + w);
    const double peak = uniform(rng, 0.1, 0.9);
    return DisorderSpec::table({a, a + peak * w, a + w}, {0.0, 2.0 / w, 0.0});
}

inline Eigen::MatrixXcd complex_matrix(Rng& rng, int n) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(gauss(rng), gauss(rng));
    return m;
}

// Invertible with |det V| well above the 1e-14 guard.
inline Eigen::MatrixXcd invertible(Rng& rng, int n) {
    while (true) {
        Eigen::MatrixXcd v = complex_matrix(rng, n);
        if (std::abs(v.partialPivLu().determinant()) > 1e-3) return v;
    }
}

// Coefficients normalised so that |f| <= 1 on the whole polydisc boundary (Bernstein slack
// per variable on the 64-point grid), with |f(0)| bounded away from 0.
inline MultiPolynomial cartan_function(Rng& rng, int vars, int max_degree, int grid = 64) {
    while (true) {
        std::vector<MultiPolynomial::Term> terms;
        std::vector<int> deg(static_cast<std::size_t>(vars));
        for (auto& d : deg) d = uniform_int(rng, 0, max_degree);
        if (*std::max_element(deg.begin(), deg.end()) == 0) deg[0] = 1;
        std::vector<int> p(static_cast<std::size_t>(vars), 0);
        while (true) {
            const double decay = std::pow(kCartanDiscRadius, -std::accumulate(p.begin(), p.end(), 0));
            terms.push_back({cplx(gauss(rng), gauss(rng)) * decay, p});
            int j = 0;
            while (j < vars && ++p[static_cast<std::size_t>(j)] > deg[static_cast<std::size_t>(j)])
                p[static_cast<std::size_t>(j++)] = 0;
            if (j == vars) break;
        }
        MultiPolynomial f(vars, terms);
        double sup = 0.0;
        std::vector<int> idx(static_cast<std::size_t>(vars), 0);
        std::vector<cplx> z(static_cast<std::size_t>(vars));
        while (true) {
            for (int j = 0; j < vars; ++j)
                z[static_cast<std::size_t>(j)] =
                    std::polar(kCartanDiscRadius, 2.0 * std::numbers::pi * idx[static_cast<std::size_t>(j)] / grid);
            sup = std::max(sup, std::abs(f(z)));
            int j = 0;
            while (j < vars && ++idx[static_cast<std::size_t>(j)] == grid) idx[static_cast<std::size_t>(j++)] = 0;
            if (j == vars) break;
        }
        double slack = 1.0;
        for (int d : deg) slack *= 1.0 - std::numbers::pi * d / grid;
        f = f.scaled(slack * (1.0 - 1e-12) / sup);  // rescaled sup must not round above 1
        if (std::abs(f(std::vector<double>(static_cast<std::size_t>(vars), 0.0))) > 1e-6) return f;
    }
}

struct Instance {
    std::string inequality;
    std::string description;
    InequalityReport report;
};

inline std::string describe_poly(const MonicPolynomial& p) {
    std::string out = "alpha=[";
    for (std::size_t k = 0; k < p.lower_coefficients().size(); ++k) {
        const auto c = p.lower_coefficients()[k];
        out += (k ? " " : "") + std::to_string(c.real()) + (c.imag() < 0 ? "" : "+") + std::to_string(c.imag()) + "i";
    }
    return out + "]";
}

inline std::string describe_matrix(const char* name, const Eigen::MatrixXcd& m) {
    std::string out = std::string(name) + "=[";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out += (i || j ? " " : "") + std::to_string(m(i, j).real()) + (m(i, j).imag() < 0 ? "" : "+") +
                   std::to_string(m(i, j).imag()) + "i";
    return out + "]";
}

inline Instance polya(Rng& rng, int max_degree) {
    const auto p = monic(rng, uniform_int(rng, 1, max_degree));
    const double alpha = std::exp(uniform(rng, std::log(1e-3), std::log(10.0)));
    return {"polya", describe_poly(p) + " level=" + std::to_string(alpha), polya_sublevel_measure(p, alpha)};
}

inline Instance fractional_integral(Rng& rng, int max_degree) {
    const auto p = monic(rng, uniform_int(rng, 1, max_degree));
    const auto rho = density(rng);
    const double s = uniform(rng, 0.05, 0.95);
    return {"fractional_integral", describe_poly(p) + " rho=" + rho.describe() + " s=" + std::to_string(s),
            polynomial_fractional_integral(p, rho, s)};
}

inline Instance determinant(Rng& rng, int max_dim) {
    const int n = uniform_int(rng, 1, max_dim);
    const auto a = complex_matrix(rng, n);
    const auto v = invertible(rng, n);
    const auto rho = density(rng);
    const double s = uniform(rng, 0.05, 0.95);
    return {"determinant_average",
            describe_matrix("A", a) + " " + describe_matrix("V", v) + " rho=" + rho.describe() +
                " s=" + std::to_string(s),
            determinant_average(a, v, rho, s)};
}

inline Instance inverse_norm(Rng& rng, int max_dim) {
    const int n = uniform_int(rng, 1, max_dim);
    const auto a = complex_matrix(rng, n);
    const auto v = invertible(rng, n);
    const double s = uniform(rng, 0.05, 0.95);
    const double radius = uniform(rng, 0.5, 3.0);
    return {"inverse_norm_average",
            describe_matrix("A", a) + " " + describe_matrix("V", v) + " s=" + std::to_string(s) +
                " R=" + std::to_string(radius),
            inverse_norm_average(a, v, s, radius)};
}

// s spans trivial and nontrivial regimes of the bound: s / log(1/eps) in (0, 12)
inline Instance cartan(Rng& rng, int vars, int max_degree, std::size_t samples) {
    const auto f = cartan_function(rng, vars, max_degree);
    const double at0 = std::abs(f(std::vector<double>(static_cast<std::size_t>(vars), 0.0)));
    const double eps = std::min(0.5, at0) * uniform(rng, 0.1, 1.0);
    const double s = std::log(1.0 / eps) * uniform(rng, 0.1, 12.0);
    std::string desc = "vars=" + std::to_string(vars) + " terms=" + std::to_string(f.terms().size()) +
                       " eps=" + std::to_string(eps) + " s=" + std::to_string(s);
    if (vars == 1) return {"cartan_disc", desc, cartan_disc(f.univariate(), eps, s)};
    return {"cartan_polydisc", desc, cartan_polydisc(f, eps, s, samples, rng())};
}

} // namespace instances

} // namespace alloy
