#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "alloy/model/lattice.hpp"

namespace alloy {

/// Single-site potential u : Z^d -> R with finite support (exponential tails are
/// truncated where |u(k)| drops below the cutoff).
///
/// Zero values are dropped on construction, so support() is exactly {k : u(k) != 0}.
/// The origin must belong to the support.
class SingleSitePotential {
public:
    SingleSitePotential() : SingleSitePotential(dirac(1)) {}

    explicit SingleSitePotential(const std::map<Site, double>& values) {
        for (const auto& [k, v] : values) {
            if (!std::isfinite(v)) throw InvalidArgument("single-site potential value is not finite");
            if (k.empty()) throw InvalidArgument("single-site potential offset has no coordinates");
            if (d_ == 0) d_ = static_cast<int>(k.size());
            if (static_cast<int>(k.size()) != d_)
                throw InvalidArgument("single-site potential offsets have mixed dimensions");
            if (v != 0.0) values_.emplace(k, v);
        }
        if (values_.empty()) throw InvalidArgument("single-site potential is identically zero");
        if (!values_.count(origin(d_)))
            throw InvalidArgument("single-site potential must satisfy 0 in supp u (u(0) != 0)");
        for (const auto& [k, v] : values_) {
            support_.insert(k);
            mean_ += v;
            l1_ += std::abs(v);
        }
        diameter_ = sup_diameter(support_);
        boundary_positive_ = true;
        for (const auto& k : interior_boundary(support_))
            if (values_.at(k) <= 0.0) boundary_positive_ = false;
    }

    static SingleSitePotential dirac(int d) { return SingleSitePotential({{origin(d), 1.0}}); }

    // u(k) = C exp(-c |k|_inf), optionally with sign (-1)^{|k|_1}, truncated where |u(k)| < cutoff.
    static SingleSitePotential exponential(int d, double C, double c, bool alternating = false,
                                           double cutoff = 1e-12) {
        if (!(C > 0.0) || !(c > 0.0)) throw InvalidArgument("exponential tail needs C > 0 and c > 0");
        if (C < cutoff) throw InvalidArgument("exponential tail amplitude below truncation cutoff");
        const int radius = static_cast<int>(std::floor(std::log(C / cutoff) / c));
        std::map<Site, double> vals;
        for (const auto& k : enumerate_sites(BoxSpec(d, radius))) {
            double v = C * std::exp(-c * sup_norm(k));
            if (v < cutoff) continue;
            if (alternating && (l1_norm(k) % 2)) v = -v;
            vals.emplace(k, v);
        }
        SingleSitePotential u(vals);
        u.truncation_radius_ = radius;
        return u;
    }

    int dimension() const { return d_; }
    const std::map<Site, double>& values() const { return values_; }

    double at(const Site& k) const {
        auto it = values_.find(k);
        return it == values_.end() ? 0.0 : it->second;
    }

    // Theta = supp u.
    const SiteSet& support() const { return support_; }
    std::size_t support_size() const { return support_.size(); }
    // u-bar = sum_k u(k).
    double mean() const { return mean_; }
    double l1() const { return l1_; }
    int diameter() const { return diameter_; }
    // u(k) > 0 on the interior boundary of its support.
    bool boundary_positive() const { return boundary_positive_; }
    std::optional<int> truncation_radius() const { return truncation_radius_; }

    std::string describe() const {
        std::string s;
        for (const auto& [k, v] : values_) {
            if (!s.empty()) s += ';';
            for (std::size_t i = 0; i < k.size(); ++i) {
                if (i) s += ',';
                s += std::to_string(k[i]);
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, ":%.17g", v);
            s += buf;
        }
        return s;
    }

private:
    int d_ = 0;
    std::map<Site, double> values_;
    SiteSet support_;
    double mean_ = 0.0;
    double l1_ = 0.0;
    int diameter_ = 0;
    bool boundary_positive_ = false;
    std::optional<int> truncation_radius_;
};

// Theta_b = Theta + b.
inline SiteSet translate_support(const SingleSitePotential& u, const Site& b) {
    return translate(u.support(), b);
}

} // namespace alloy
