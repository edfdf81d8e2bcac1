#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "alloy/errors.hpp"
#include "alloy/model/hamiltonian.hpp"
#include "alloy/spectral/green.hpp"

namespace alloy {

struct GreenDeterminantCheck {
    int n = 0;                  // support size of u
    std::vector<double> probes; // values of omega_x used, the last one held out
    std::vector<cplx> inverse_green;
    cplx leading = 0.0;         // leading coefficient of the interpolant
    double expected_leading = 0.0; // lambda^n prod |u(k)|
    double residual = 0.0;         // relative misfit at the held-out probe
    double leading_error = 0.0;    // relative error of |leading|

    bool passed(double tol = 1e-8) const { return residual <= tol && leading_error <= tol; }
};

/// In d = 1 with supp u = {0, ..., n-1}, 1/G(z; x, x+n-1) is a polynomial of degree n in
/// omega_x with leading coefficient lambda^n prod u(k). Checked by probing omega_x at n + 2
/// points, interpolating through n + 1 of them and testing the last.
inline GreenDeterminantCheck green_determinant_identity_1d(const BoxSpec& box, const SingleSitePotential& u,
                                                           const DisorderSample& base, double lambda, cplx z,
                                                           int x) {
    if (box.d != 1 || u.dimension() != 1) throw InvalidArgument("green/determinant identity needs d = 1");
    if (!(lambda > 0.0)) throw InvalidArgument("green/determinant identity needs lambda > 0");
    const int n = static_cast<int>(u.support_size());
    for (int k = 0; k < n; ++k)
        if (u.at(Site{k}) == 0.0) throw InvalidArgument("u must be supported exactly on {0, ..., n-1}");
    const Site sx{x}, sy{x + n - 1};
    if (!box.contains(sx) || !box.contains(sy)) throw InvalidArgument("x and x+n-1 must lie in the box");

    GreenDeterminantCheck out;
    out.n = n;
    out.expected_leading = std::pow(lambda, n);
    for (int k = 0; k < n; ++k) out.expected_leading *= std::abs(u.at(Site{k}));

    DisorderSample sample = base;
    for (int j = 0; j <= n + 1; ++j) {
        double w = j;
        for (int attempt = 0;; ++attempt) {
            sample.set(sx, w);
            const auto h = assemble_hamiltonian(box, u, sample, lambda);
            try {
                out.inverse_green.push_back(1.0 / green_function(h, z, sx, sy));
                break;
            } catch (const SpectralCollision&) {
                if (attempt == 8) throw;
                w += 0.37 / (attempt + 1); // stays between neighbouring integer nodes
            }
        }
        out.probes.push_back(w);
    }

    // Newton divided differences through the first n + 1 probes
    std::vector<cplx> dd(out.inverse_green.begin(), out.inverse_green.begin() + n + 1);
    const auto& t = out.probes;
    for (int level = 1; level <= n; ++level)
        for (int i = n; i >= level; --i)
            dd[static_cast<std::size_t>(i)] = (dd[static_cast<std::size_t>(i)] - dd[static_cast<std::size_t>(i - 1)]) /
                                              (t[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(i - level)]);
    out.leading = dd[static_cast<std::size_t>(n)];

    const double te = t[static_cast<std::size_t>(n + 1)];
    cplx fit = dd[static_cast<std::size_t>(n)];
    for (int i = n - 1; i >= 0; --i) fit = fit * (te - t[static_cast<std::size_t>(i)]) + dd[static_cast<std::size_t>(i)];
    const cplx exact = out.inverse_green.back();
    out.residual = std::abs(fit - exact) / std::max(std::abs(exact), 1e-300);
    out.leading_error = std::abs(std::abs(out.leading) - out.expected_leading) / out.expected_leading;
    return out;
}

} // namespace alloy
