#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "alloy/model/lattice.hpp"
#include "alloy/model/potential.hpp"

namespace alloy {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits; platform independent.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Law of a single coupling: a bounded piecewise-linear density on [x_0, x_n].
class DisorderSpec {
public:
    enum class Kind { Uniform, Table };

    static DisorderSpec uniform(double a, double b) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
            throw InvalidArgument("uniform disorder needs finite a < b");
        const double h = 1.0 / (b - a);
        DisorderSpec s({a, b}, {h, h});
        s.kind_ = Kind::Uniform;
        return s;
    }

    static DisorderSpec table(std::vector<double> x, std::vector<double> rho) {
        return DisorderSpec(std::move(x), std::move(rho));
    }

    Kind kind() const { return kind_; }
    double lower() const { return x_.front(); }
    double upper() const { return x_.back(); }
    double sup_density() const { return sup_; }
    double l1_norm() const { return cum_.back(); }
    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& knot_values() const { return rho_; }

    double density(double x) const {
        if (x < x_.front() || x > x_.back()) return 0.0;
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin() - 1, 0));
        if (i + 1 >= x_.size()) i = x_.size() - 2;
        const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
        return rho_[i] + t * (rho_[i + 1] - rho_[i]);
    }

    double cdf(double x) const {
        if (x <= x_.front()) return 0.0;
        if (x >= x_.back()) return cum_.back();
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin() - 1);
        const double h = x_[i + 1] - x_[i];
        const double t = x - x_[i];
        return cum_[i] + rho_[i] * t + 0.5 * (rho_[i + 1] - rho_[i]) * t * t / h;
    }

    // Inverse CDF; the quadratic on each segment is solved in its cancellation-free form.
    double quantile(double p) const {
        if (kind_ == Kind::Uniform) return x_[0] + p * (x_[1] - x_[0]);
        p = std::clamp(p, 0.0, 1.0) * cum_.back();
        auto it = std::upper_bound(cum_.begin(), cum_.end(), p);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum_.begin() - 1, 0));
        if (i + 1 >= x_.size()) return x_.back();
        const double h = x_[i + 1] - x_[i];
        const double rem = p - cum_[i];
        const double a = 0.5 * (rho_[i + 1] - rho_[i]) / h;
        const double b = rho_[i];
        double t;
        if (rem <= 0.0) {
            t = 0.0;
        } else {
            const double disc = std::max(b * b + 4.0 * a * rem, 0.0);
            const double den = b + std::sqrt(disc);
            t = den > 0.0 ? 2.0 * rem / den : h;
        }
        return x_[i] + std::clamp(t, 0.0, h);
    }

    std::string describe() const {
        char buf[96];
        if (kind_ == Kind::Uniform) {
            std::snprintf(buf, sizeof buf, "uniform[%.17g,%.17g]", x_[0], x_[1]);
            return buf;
        }
        std::string s = "table";
        for (std::size_t i = 0; i < x_.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.17g:%.17g", i ? ";" : "[", x_[i], rho_[i]);
            s += buf;
        }
        return s + "]";
    }

private:
    DisorderSpec(std::vector<double> x, std::vector<double> rho)
        : kind_(Kind::Table), x_(std::move(x)), rho_(std::move(rho)) {
        if (x_.size() < 2 || x_.size() != rho_.size())
            throw InvalidArgument("density table needs >= 2 knots and matching values");
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (!std::isfinite(x_[i]) || !std::isfinite(rho_[i]))
                throw InvalidArgument("density table has non-finite entries");
            if (rho_[i] < 0.0) throw InvalidArgument("density must be nonnegative");
            if (i && !(x_[i] > x_[i - 1])) throw InvalidArgument("density knots must increase");
        }
        cum_.assign(x_.size(), 0.0);
        for (std::size_t i = 0; i + 1 < x_.size(); ++i)
            cum_[i + 1] = cum_[i] + 0.5 * (rho_[i] + rho_[i + 1]) * (x_[i + 1] - x_[i]);
        if (std::abs(cum_.back() - 1.0) > 1e-12)
            throw InvalidArgument("density must integrate to 1 (got " + std::to_string(cum_.back()) + ")");
        sup_ = *std::max_element(rho_.begin(), rho_.end());
    }

    Kind kind_;
    std::vector<double> x_;
    std::vector<double> rho_;
    std::vector<double> cum_;
    double sup_ = 0.0;
};

/// One realisation {omega_k} on a finite index region.
class DisorderSample {
public:
    DisorderSample() = default;
    explicit DisorderSample(std::map<Site, double> couplings) : couplings_(std::move(couplings)) {}

    const std::map<Site, double>& couplings() const { return couplings_; }
    std::map<Site, double>& couplings() { return couplings_; }
    bool covers(const Site& k) const { return couplings_.count(k) != 0; }

    double at(const Site& k) const {
        auto it = couplings_.find(k);
        if (it == couplings_.end())
            throw CoverageError("disorder sample does not cover coupling index " + to_string(k));
        return it->second;
    }

    void set(const Site& k, double v) { couplings_[k] = v; }

    double sup_abs() const {
        double m = 0.0;
        for (const auto& [k, v] : couplings_) m = std::max(m, std::abs(v));
        return m;
    }

    // Configuration t * omega.
    DisorderSample scaled(double t) const {
        DisorderSample s(*this);
        for (auto& [k, v] : s.couplings_) v *= t;
        return s;
    }

private:
    std::map<Site, double> couplings_;
};

// Every coupling index k with Theta_k ∩ sites nonempty.
inline SiteSet coverage_region(const SiteSet& sites, const SingleSitePotential& u) {
    SiteSet out;
    for (const auto& x : sites)
        for (const auto& k : u.support()) out.insert(x - k);
    return out;
}

inline SiteSet coverage_region(const BoxSpec& box, const SingleSitePotential& u) {
    return coverage_region(box_set(box), u);
}

// Independent inverse-CDF draws in lexicographic order of the region.
inline DisorderSample sample_disorder(const DisorderSpec& spec, const SiteSet& region, Rng& rng) {
    std::map<Site, double> c;
    for (const auto& k : region) c.emplace_hint(c.end(), k, spec.quantile(uniform01(rng)));
    return DisorderSample(std::move(c));
}

// V_omega(x) = sum_k omega_k u(x - k).
inline double potential_value(const DisorderSample& sample, const SingleSitePotential& u, const Site& x) {
    double v = 0.0;
    for (const auto& [off, val] : u.values()) v += val * sample.at(x - off);
    return v;
}

} // namespace alloy
