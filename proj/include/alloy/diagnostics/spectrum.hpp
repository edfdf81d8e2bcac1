#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "alloy/diagnostics/model_spec.hpp"
#include "alloy/spectral.hpp"

namespace alloy {

struct SpectrumEnvelope {
    std::vector<double> t;
    std::vector<double> lo;  // min sigma(H_{t omega})
    std::vector<double> hi;  // max sigma(H_{t omega})
    double lipschitz = 0.0;  // lambda max_x |V_omega(x)| over the box
    double tolerance = 0.0;
    std::size_t violations = 0;  // adjacent steps exceeding lipschitz * dt + tolerance
    double max_step_ratio = 0.0; // max jump / (lipschitz * dt + tolerance)
};

/// Extreme eigenvalues of the box Hamiltonian for the scaled couplings t*omega.
inline SpectrumEnvelope spectrum_envelope(const DisorderSample& omega, const ModelSpec& model, const BoxSpec& box,
                                          std::vector<double> times) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.empty() || times.front() != 0.0 || times.back() != 1.0)
        throw InvalidArgument("spectrum_envelope: t-grid must lie in [0,1] and contain 0 and 1");
    SpectrumEnvelope out;
    double vmax = 0.0;
    for (const auto& x : enumerate_sites(box)) vmax = std::max(vmax, std::abs(potential_value(omega, model.u, x)));
    out.lipschitz = model.lambda * vmax;
    double scale = 0.0;
    for (double t : times) {
        const auto h = model.hamiltonian(box, omega.scaled(t));
        const auto values = eigenvalues(h);
        scale = std::max(scale, matrix_scale(h.matrix));
        out.t.push_back(t);
        out.lo.push_back(values(0));
        out.hi.push_back(values(values.size() - 1));
    }
    out.tolerance = 1e-12 * std::max(1.0, scale) * std::sqrt(static_cast<double>(box.size()));
    for (std::size_t i = 1; i < out.t.size(); ++i) {
        const double allowed = out.lipschitz * (out.t[i] - out.t[i - 1]) + out.tolerance;
        const double jump = std::max(std::abs(out.lo[i] - out.lo[i - 1]), std::abs(out.hi[i] - out.hi[i - 1]));
        out.max_step_ratio = std::max(out.max_step_ratio, jump / allowed);
        if (jump > allowed) ++out.violations;
    }
    return out;
}

struct SpectrumHull {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> trace_lo;  // running hull after each sample, in sample order
    std::vector<double> trace_hi;
    std::size_t samples = 0;
};

inline SpectrumHull spectrum_union_estimate(const ModelSpec& model, const BoxSpec& box, const EnsembleConfig& cfg) {
    const SiteSet cover = coverage_region(box, model.u);
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto values = eigenvalues(model.hamiltonian(box, sample_disorder(model.mu, cover, rng)));
        return std::vector<double>{values(0), values(values.size() - 1)};
    };
    const auto samples = collect_samples(task, cfg);
    SpectrumHull out;
    out.samples = samples.size();
    out.lo = std::numeric_limits<double>::infinity();
    out.hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        out.lo = std::min(out.lo, (*s)[0]);
        out.hi = std::max(out.hi, (*s)[1]);
        out.trace_lo.push_back(out.lo);
        out.trace_hi.push_back(out.hi);
    }
    return out;
}

} // namespace alloy
