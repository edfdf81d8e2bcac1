#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "alloy/bounds/polynomial.hpp"
#include "alloy/bounds/report.hpp"
#include "alloy/bounds/sublevel.hpp"
#include "alloy/ensemble/statistic.hpp"
#include "alloy/errors.hpp"
#include "alloy/model/disorder.hpp"

namespace alloy {

/// Polynomial in several complex variables, sum of c * z_1^{k_1} ... z_n^{k_n}.
class MultiPolynomial {
public:
    struct Term {
        cplx coeff;
        std::vector<int> powers;
    };

    MultiPolynomial(int variables, std::vector<Term> terms) : vars_(variables), terms_(std::move(terms)) {
        if (vars_ < 1) throw InvalidArgument("multivariate polynomial needs >= 1 variable");
        for (const auto& t : terms_) {
            if (static_cast<int>(t.powers.size()) != vars_)
                throw InvalidArgument("monomial exponent vector has wrong length");
            for (int k : t.powers)
                if (k < 0) throw InvalidArgument("negative monomial exponent");
        }
    }

    // prod_j (z_j - a_j) * scale
    static MultiPolynomial product_of_linear(const std::vector<double>& a, cplx scale) {
        const int n = static_cast<int>(a.size());
        std::vector<Term> terms{{scale, std::vector<int>(static_cast<std::size_t>(n), 0)}};
        for (int j = 0; j < n; ++j) {
            std::vector<Term> next;
            for (const auto& t : terms) {
                Term hi = t, lo = t;
                hi.powers[static_cast<std::size_t>(j)] += 1;
                lo.coeff *= -a[static_cast<std::size_t>(j)];
                next.push_back(hi);
                if (lo.coeff != cplx(0.0)) next.push_back(lo);
            }
            terms = std::move(next);
        }
        return MultiPolynomial(n, std::move(terms));
    }

    static MultiPolynomial from_univariate(const Polynomial& p) {
        std::vector<Term> terms;
        for (std::size_t k = 0; k < p.coefficients().size(); ++k)
            if (p.coefficients()[k] != cplx(0.0)) terms.push_back({p.coefficients()[k], {static_cast<int>(k)}});
        return MultiPolynomial(1, std::move(terms));
    }

    int variables() const { return vars_; }
    const std::vector<Term>& terms() const { return terms_; }

    MultiPolynomial scaled(cplx c) const {
        auto t = terms_;
        for (auto& x : t) x.coeff *= c;
        return MultiPolynomial(vars_, std::move(t));
    }

    template <class T>
    cplx operator()(const std::vector<T>& z) const {
        if (static_cast<int>(z.size()) != vars_) throw InvalidArgument("wrong number of variables");
        cplx sum = 0.0;
        for (const auto& t : terms_) {
            cplx m = t.coeff;
            for (int j = 0; j < vars_; ++j) m *= std::pow(cplx(z[static_cast<std::size_t>(j)]), t.powers[static_cast<std::size_t>(j)]);
            sum += m;
        }
        return sum;
    }

    Polynomial univariate() const {
        if (vars_ != 1) throw InvalidArgument("not a univariate polynomial");
        std::vector<cplx> c;
        for (const auto& t : terms_) {
            const auto k = static_cast<std::size_t>(t.powers[0]);
            if (c.size() <= k) c.resize(k + 1, 0.0);
            c[k] += t.coeff;
        }
        return Polynomial(c);
    }

    int degree_in(int j) const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, t.powers[static_cast<std::size_t>(j)]);
        return d;
    }

private:
    int vars_;
    std::vector<Term> terms_;
};

inline constexpr double kCartanDiscRadius = 2.0 * std::numbers::e;

inline double cartan_rhs(double eps, double s, int n) {
    const double e3 = std::pow(std::numbers::e, 3);
    return 30.0 * e3 * n * std::exp(-s / std::log(1.0 / eps));
}

inline void require_cartan_parameters(double eps, double s, int grid) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("cartan: eps must lie in (0,1)");
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("cartan: s must be positive");
    if (grid < 1) throw InvalidArgument("cartan: grid must be positive");
}

/// Maximum of |f| over `grid` equispaced points of |z| = 2e, and the bound
/// max / (1 - pi deg / grid) for the whole circle (Bernstein), infinite if deg >= grid / pi.
inline std::pair<double, double> circle_sup(const Polynomial& f, int grid) {
    double m = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double th = 2.0 * std::numbers::pi * k / grid;
        m = std::max(m, std::abs(f(std::polar(kCartanDiscRadius, th))));
    }
    const double slack = 1.0 - std::numbers::pi * f.degree() / grid;
    return {m, slack > 0.0 ? m / slack : INFINITY};
}

/// Sublevel measure of |f| on [-1, 1] at e^{-s}, for |f| <= 1 on the disc of radius 2e and |f(0)| >= eps.
inline InequalityReport cartan_disc(const Polynomial& f, double eps, double s, int grid = 64) {
    require_cartan_parameters(eps, s, grid);
    InequalityReport r;
    r.name = "cartan_disc";
    r.rhs = cartan_rhs(eps, s, 1);
    const auto [sup, certified] = circle_sup(f, grid);
    const double at0 = std::abs(f(0.0));
    r.details = {{"boundary_sup", sup}, {"certified_sup", certified}, {"value_at_origin", at0}};
    try {
        const auto set = sublevel_set(f, std::exp(-s), -1.0, 1.0);
        r.lhs = set.measure;
        r.error = set.error;
    } catch (const NumericalFailure& e) {
        r.status = CheckStatus::NumericalFailure;
        r.note = e.what();
        return r;
    }
    if (!(sup <= 1.0) || !(at0 >= eps)) {
        r.status = CheckStatus::HypothesesNotMet;
        r.note = !(sup <= 1.0) ? "sup on |z| = 2e exceeds 1" : "|f(0)| < eps";
    }
    return r;
}

/// Normalized sublevel measure on [-1, 1]^n, estimated from `samples` uniform points.
/// lhs is the hit fraction; error is its distance to the lower end of the 3-sigma Wilson
/// interval, so passed() says that interval reaches down to the bound.
inline InequalityReport cartan_polydisc(const MultiPolynomial& f, double eps, double s, std::size_t samples,
                                        std::uint64_t seed, int grid = 64) {
    require_cartan_parameters(eps, s, grid);
    const int n = f.variables();
    if (n == 1) {
        auto r = cartan_disc(f.univariate(), eps, s, grid);
        r.name = "cartan_polydisc";
        return r;
    }
    if (n > 4) throw InvalidArgument("cartan_polydisc supports at most 4 variables");
    if (samples == 0) throw InvalidArgument("cartan_polydisc: need samples");
    InequalityReport r;
    r.name = "cartan_polydisc";
    r.rhs = cartan_rhs(eps, s, n);

    // distinguished boundary grid
    std::vector<cplx> circle(static_cast<std::size_t>(grid));
    for (int k = 0; k < grid; ++k)
        circle[static_cast<std::size_t>(k)] = std::polar(kCartanDiscRadius, 2.0 * std::numbers::pi * k / grid);
    double sup = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<cplx> z(static_cast<std::size_t>(n));
    while (true) {
        for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] = circle[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        sup = std::max(sup, std::abs(f(z)));
        int j = 0;
        while (j < n && ++idx[static_cast<std::size_t>(j)] == grid) idx[static_cast<std::size_t>(j++)] = 0;
        if (j == n) break;
    }
    const double at0 = std::abs(f(std::vector<double>(static_cast<std::size_t>(n), 0.0)));

    Rng rng(seed);
    const double level = std::exp(-s);
    std::size_t hits = 0;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < samples; ++i) {
        for (auto& xi : x) xi = -1.0 + 2.0 * uniform01(rng);
        if (std::abs(f(x)) <= level) ++hits;
    }
    const auto ci = wilson_interval(hits, samples, 3.0);
    r.lhs = static_cast<double>(hits) / static_cast<double>(samples);
    r.error = r.lhs - ci.lo;
    r.details = {{"boundary_sup", sup}, {"value_at_origin", at0}, {"samples", static_cast<double>(samples)},
                 {"wilson_lo", ci.lo}, {"wilson_hi", ci.hi}};
    if (!(sup <= 1.0) || !(at0 >= eps)) {
        r.status = CheckStatus::HypothesesNotMet;
        r.note = !(sup <= 1.0) ? "sup on the distinguished boundary exceeds 1" : "|f(0)| < eps";
    }
    return r;
}

} // namespace alloy
