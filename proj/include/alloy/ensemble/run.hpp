#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "alloy/ensemble/seed.hpp"
#include "alloy/ensemble/statistic.hpp"
#include "alloy/errors.hpp"

namespace alloy {

struct EnsembleConfig {
    std::size_t samples = 1;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;              // parallelism hint; never affects results
    double failure_threshold = 0.01;   // abort when failures / samples exceeds this
};

// Raised when more samples failed than the policy allows.
class EnsembleFailure : public NumericalFailure {
public:
    EnsembleFailure(const std::string& what, std::size_t failures, std::size_t samples)
        : NumericalFailure(what), failures_(failures), samples_(samples) {}
    std::size_t failures() const noexcept { return failures_; }
    std::size_t samples() const noexcept { return samples_; }

private:
    std::size_t failures_;
    std::size_t samples_;
};

// One entry per sample index; nullopt marks a failed sample.
using SampleVector = std::optional<std::vector<double>>;

/// Evaluates task(seed, index) for every sample index, spread over `workers` threads.
/// The task must be a pure function of its arguments.
template <class Task>
std::vector<SampleVector> collect_samples(const Task& task, const EnsembleConfig& cfg) {
    if (cfg.samples == 0) throw InvalidArgument("ensemble needs at least one sample");
    std::vector<SampleVector> out(cfg.samples);
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(cfg.samples)));
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&](unsigned w) {
        for (std::size_t i = w; i < cfg.samples; i += workers) {
            try {
                out[i] = task(derive_seed(cfg.master_seed, i), i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

struct EnsembleResult {
    std::vector<Statistic> stats;  // one per observable
    std::size_t requested = 0;
    std::size_t failures = 0;
};

// Fixed-tree reduction keyed on sample index.
inline EnsembleResult reduce_samples(const std::vector<SampleVector>& samples, std::size_t observables) {
    EnsembleResult r;
    r.requested = samples.size();
    for (const auto& s : samples) {
        if (!s) {
            ++r.failures;
        } else if (s->size() != observables) {
            throw InvalidArgument("ensemble task returned the wrong number of observables");
        }
    }
    r.stats.reserve(observables);
    for (std::size_t j = 0; j < observables; ++j) {
        r.stats.push_back(tree_reduce(0, samples.size(), [&](std::size_t i) {
            return samples[i] ? Statistic::of((*samples[i])[j]) : Statistic{};
        }));
    }
    return r;
}

inline void enforce_failure_policy(const EnsembleResult& r, const EnsembleConfig& cfg) {
    if (static_cast<double>(r.failures) > cfg.failure_threshold * static_cast<double>(cfg.samples)) {
        throw EnsembleFailure(std::to_string(r.failures) + " of " + std::to_string(cfg.samples) +
                                  " samples failed (policy " + std::to_string(cfg.failure_threshold) + ")",
                              r.failures, cfg.samples);
    }
}

template <class Task>
EnsembleResult run_ensemble(const Task& task, std::size_t observables, const EnsembleConfig& cfg) {
    auto r = reduce_samples(collect_samples(task, cfg), observables);
    enforce_failure_policy(r, cfg);
    return r;
}

} // namespace alloy
