#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alloy/errors.hpp"

namespace alloy {

// A point of Z^d. Ordering is lexicographic, which fixes the site order everywhere.
using Site = std::vector<int>;
using SiteSet = std::set<Site>;

inline int sup_norm(const Site& k) {
    int m = 0;
    for (int c : k) m = std::max(m, std::abs(c));
    return m;
}

inline int l1_norm(const Site& k) {
    int m = 0;
    for (int c : k) m += std::abs(c);
    return m;
}

inline Site operator+(const Site& a, const Site& b) {
    Site r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline Site operator-(const Site& a, const Site& b) {
    Site r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline int sup_distance(const Site& a, const Site& b) { return sup_norm(a - b); }

inline Site origin(int d) { return Site(static_cast<std::size_t>(d), 0); }

inline Site unit_vector(int d, int axis, int length = 1) {
    Site e = origin(d);
    e[static_cast<std::size_t>(axis)] = length;
    return e;
}

inline std::string to_string(const Site& k) {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(k[i]);
    }
    return s + ")";
}

// Nearest neighbours |k - j|_1 = 1, in lexicographic order.
inline std::vector<Site> neighbours(const Site& k) {
    std::vector<Site> out;
    out.reserve(2 * k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        Site a(k), b(k);
        --a[i];
        ++b[i];
        out.push_back(std::move(a));
        out.push_back(std::move(b));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// The cube {k : |k - center|_inf <= L} in Z^d.
struct BoxSpec {
    int d = 1;
    int L = 0;
    Site center;

    BoxSpec() : center(origin(1)) {}
    BoxSpec(int dim, int half_width, Site c = {}) : d(dim), L(half_width), center(std::move(c)) {
        if (d < 1) throw InvalidArgument("box dimension must be >= 1");
        if (L < 0) throw InvalidArgument("box half-width must be >= 0");
        if (center.empty()) center = origin(d);
        if (static_cast<int>(center.size()) != d)
            throw InvalidArgument("box center has wrong dimension");
    }

    int side() const { return 2 * L + 1; }

    std::size_t size() const {
        std::size_t n = 1;
        for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(side());
        return n;
    }

    bool contains(const Site& k) const {
        if (static_cast<int>(k.size()) != d) return false;
        return sup_distance(k, center) <= L;
    }

    // Position of k in the lexicographic enumeration.
    std::size_t index_of(const Site& k) const {
        if (!contains(k)) throw InvalidArgument("site " + to_string(k) + " outside box");
        std::size_t idx = 0;
        for (int i = 0; i < d; ++i)
            idx = idx * static_cast<std::size_t>(side()) +
                  static_cast<std::size_t>(k[i] - center[i] + L);
        return idx;
    }

    Site site_at(std::size_t idx) const {
        Site k(static_cast<std::size_t>(d));
        for (int i = d - 1; i >= 0; --i) {
            k[i] = center[i] - L + static_cast<int>(idx % static_cast<std::size_t>(side()));
            idx /= static_cast<std::size_t>(side());
        }
        return k;
    }

    friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
};

/// Sites of the box in lexicographic order (last coordinate fastest).
inline std::vector<Site> enumerate_sites(const BoxSpec& box) {
    std::vector<Site> out;
    out.reserve(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) out.push_back(box.site_at(i));
    return out;
}

inline SiteSet box_set(const BoxSpec& box) {
    auto v = enumerate_sites(box);
    return SiteSet(v.begin(), v.end());
}

// An ordered finite region with O(log n) site lookup.
class Region {
public:
    Region() = default;
    explicit Region(const SiteSet& s) : sites_(s.begin(), s.end()) { build(); }
    explicit Region(const BoxSpec& box) : sites_(enumerate_sites(box)), box_(box) { build(); }

    std::size_t size() const { return sites_.size(); }
    const std::vector<Site>& sites() const { return sites_; }
    const Site& site(std::size_t i) const { return sites_[i]; }
    const std::optional<BoxSpec>& box() const { return box_; }
    int dimension() const { return sites_.empty() ? 0 : static_cast<int>(sites_.front().size()); }

    bool contains(const Site& k) const { return lookup_.count(k) != 0; }

    std::size_t index_of(const Site& k) const {
        auto it = lookup_.find(k);
        if (it == lookup_.end()) throw InvalidArgument("site " + to_string(k) + " not in region");
        return it->second;
    }

    std::optional<std::size_t> find(const Site& k) const {
        auto it = lookup_.find(k);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    SiteSet as_set() const { return SiteSet(sites_.begin(), sites_.end()); }

private:
    void build() {
        for (std::size_t i = 0; i < sites_.size(); ++i) lookup_.emplace(sites_[i], i);
    }

    std::vector<Site> sites_;
    std::map<Site, std::size_t> lookup_;
    std::optional<BoxSpec> box_;
};

enum class BoundarySide { Interior, Exterior };

// Sites of S with fewer than 2d neighbours inside S.
inline SiteSet interior_boundary(const SiteSet& s) {
    SiteSet out;
    for (const auto& k : s) {
        for (const auto& n : neighbours(k)) {
            if (!s.count(n)) {
                out.insert(k);
                break;
            }
        }
    }
    return out;
}

// Sites outside S adjacent to S; restricted to `context` when one is given.
inline SiteSet exterior_boundary(const SiteSet& s, const SiteSet* context = nullptr) {
    SiteSet out;
    for (const auto& k : s)
        for (const auto& n : neighbours(k))
            if (!s.count(n) && (!context || context->count(n))) out.insert(n);
    return out;
}

inline SiteSet boundary(const SiteSet& s, BoundarySide side, const SiteSet* context = nullptr) {
    return side == BoundarySide::Interior ? interior_boundary(s) : exterior_boundary(s, context);
}

// X ∪ ∂^o X, the one-step outer closure.
inline SiteSet outer_closure(const SiteSet& s) {
    SiteSet out(s);
    auto ext = exterior_boundary(s);
    out.insert(ext.begin(), ext.end());
    return out;
}

inline SiteSet translate(const SiteSet& s, const Site& b) {
    SiteSet out;
    for (const auto& k : s) out.insert(k + b);
    return out;
}

inline SiteSet set_union(const SiteSet& a, const SiteSet& b) {
    SiteSet out(a);
    out.insert(b.begin(), b.end());
    return out;
}

inline SiteSet set_intersection(const SiteSet& a, const SiteSet& b) {
    SiteSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

inline SiteSet set_difference(const SiteSet& a, const SiteSet& b) {
    SiteSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

inline int sup_diameter(const SiteSet& s) {
    int diam = 0;
    for (const auto& a : s)
        for (const auto& b : s) diam = std::max(diam, sup_distance(a, b));
    return diam;
}

} // namespace alloy
