#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "alloy/bounds.hpp"
#include "alloy/cli/config.hpp"
#include "alloy/cli/csv.hpp"
#include "alloy/diagnostics.hpp"

#ifndef ALLOY_VERSION
#define ALLOY_VERSION "dev"
#endif

namespace alloy::cli {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kNumerical = 3, kInequality = 4 };

struct RunOutput {
    CsvTable table{{}};
    int exit_code = kOk;
    json failures = json::array();  // verify-bounds counterexamples
};

inline std::string config_hash(const ExperimentConfig& cfg) {
    json h = cfg.resolved;
    h["subcommand"] = cfg.estimator;
    return hex64(fnv1a64(h.dump()));
}

inline std::vector<std::pair<std::string, std::string>> meta_columns(const ExperimentConfig& cfg) {
    return {{"tool_version", ALLOY_VERSION},
            {"config_hash", config_hash(cfg)},
            {"seed", fmt(static_cast<unsigned long long>(cfg.ensemble.master_seed))},
            {"N", fmt(cfg.ensemble.samples)},
            {"d", fmt(cfg.model.dimension())},
            {"lambda", fmt(cfg.model.lambda)},
            {"u", cfg.model.u.describe()},
            {"disorder", cfg.model.mu.describe()}};
}

namespace detail {

inline RunOutput run_spectrum(const ExperimentConfig& c) {
    const auto h = spectrum_union_estimate(c.model, BoxSpec(c.model.dimension(), c.geometry.L, c.geometry.center),
                                           c.ensemble);
    CsvTable t({"n", "hull_lo", "hull_hi"});
    for (std::size_t i = 0; i < h.trace_lo.size(); ++i) t.add(i + 1, h.trace_lo[i], h.trace_hi[i]);
    return {t};
}

inline RunOutput run_envelope(const ExperimentConfig& c) {
    const BoxSpec box(c.model.dimension(), c.geometry.L, c.geometry.center);
    const auto& grid = c.params.t_grid;
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto env = spectrum_envelope(c.model.draw(box, rng), c.model, box, grid);
        std::vector<double> row(env.t);
        row.insert(row.end(), env.lo.begin(), env.lo.end());
        row.insert(row.end(), env.hi.begin(), env.hi.end());
        row.push_back(env.lipschitz);
        row.push_back(static_cast<double>(env.violations));
        return row;
    };
    const auto samples = collect_samples(task, c.ensemble);
    CsvTable t({"sample", "t", "min", "max", "lipschitz", "violations"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& r = *samples[i];
        const std::size_t k = (r.size() - 2) / 3;
        for (std::size_t j = 0; j < k; ++j)
            t.add(i, r[j], r[k + j], r[2 * k + j], r[3 * k], static_cast<std::size_t>(r[3 * k + 1]));
    }
    return {t};
}

inline RunOutput run_wegner(const ExperimentConfig& c) {
    const auto& p = c.params;
    const int d = c.model.dimension();
    const bool bound_ok = c.model.u.mean() != 0.0 && c.model.lambda > 0.0;
    std::string eps_exp = "nan", eps_se = "nan", vol_exp = "nan", vol_se = "nan";
    if (p.L_grid.size() >= 3 && p.eps.size() >= 3) {
        const auto fit = wegner_scaling_fit(c.model, p.energy, p.eps, c.geometry.L, p.L_grid, p.fixed_eps, c.ensemble);
        if (!fit.degenerate) {
            eps_exp = fmt(fit.eps_exponent);
            eps_se = fmt(fit.eps_fit.slope_se);
            vol_exp = fmt(fit.volume_exponent);
            vol_se = fmt(fit.volume_exponent_se);
        }
    }
    CsvTable t({"L", "energy", "eps", "mean", "stderr", "hit_prob", "hit_lo", "hit_hi", "bound_sup", "bound_bv",
                "monotone_violations", "eps_exponent", "eps_exponent_se", "volume_exponent", "volume_exponent_se"});
    for (int L : p.L_grid) {
        const auto w = wegner_count(c.model, BoxSpec(d, L, c.geometry.center), p.energy, p.eps, c.ensemble);
        for (const auto& pt : w.points) {
            const double bs = bound_ok ? wegner_corollary_bound(c.model, c.model.mu.sup_density(), pt.eps, L) : NAN;
            const double bb = bound_ok ? wegner_corollary_bound(c.model, density_bv_norm(c.model.mu), pt.eps, L) : NAN;
            t.add(L, p.energy, pt.eps, pt.count.mean, pt.count.standard_error(), pt.hit.mean, pt.hit_ci.lo,
                  pt.hit_ci.hi, bs, bb, w.monotonicity_violations, eps_exp, eps_se, vol_exp, vol_se);
        }
    }
    return {t};
}

inline RunOutput run_fracmom(const ExperimentConfig& c) {
    const auto& p = c.params;
    const int d = c.model.dimension();
    const auto f = frac_moment_decay_fit(c.model, p.z, p.s, c.geometry.L, p.distances, c.ensemble, p.exponent);
    const int rmax = f.distances.back();
    const Site x = unit_vector(d, 0, -(rmax / 2));
    CsvTable t({"distance", "x", "y", "mean", "stderr", "used", "exponent", "mode", "gamma", "gamma_se", "prefactor",
                "r_squared", "status", "failures"});
    for (std::size_t i = 0; i < f.distances.size(); ++i)
        t.add(f.distances[i], to_string(x), to_string(x + unit_vector(d, 0, f.distances[i])), f.means[i],
              f.stderrs[i], static_cast<bool>(f.used[i]), f.exponent, to_string(f.mode), f.gamma, f.gamma_se,
              f.prefactor, f.r_squared, f.status, f.failures);
    return {t};
}

inline RunOutput run_fvc(const ExperimentConfig& c) {
    const auto& p = c.params;
    const auto r = finite_volume_sum(c.model, BoxSpec(c.model.dimension(), c.geometry.gamma_L, c.geometry.center),
                                     c.geometry.x, c.geometry.L, p.z, p.s, c.ensemble);
    CsvTable t({"x", "L", "gamma_L", "s", "exponent", "terms", "w_size", "depleted_size", "sum_mean", "sum_stderr",
                "xi", "multiplier", "scaled", "scaled_stderr", "closure", "failures"});
    t.add(to_string(c.geometry.x), c.geometry.L, c.geometry.gamma_L, p.s, r.exponent, r.geometry.terms.size(),
          r.geometry.w_x.size(), r.geometry.depleted.size(), r.sum.mean, r.sum.standard_error(), r.xi, r.multiplier,
          r.scaled(), r.scaled_se(), "outer_one_step", r.failures);
    return {t};
}

inline RunOutput run_regular_pairs(const ExperimentConfig& c) {
    const auto& p = c.params;
    const auto r = regular_pair_probability(c.model, p.lo, p.hi, p.m, c.geometry.L, c.geometry.x, c.geometry.y,
                                            c.ensemble, p.p_exponent, p.max_depth);
    CsvTable t({"x", "y", "L", "m", "I_lo", "I_hi", "probability", "stderr", "ci_lo", "ci_hi", "p", "schedule",
                "meets_schedule", "mean_uncertified_cells"});
    t.add(to_string(c.geometry.x), to_string(c.geometry.y), c.geometry.L, p.m, p.lo, p.hi, r.good.mean,
          r.good.standard_error(), r.good_ci.lo, r.good_ci.hi, r.p_exponent, r.schedule, r.good.mean >= r.schedule,
          r.uncertified_cells.mean);
    return {t};
}

inline RunOutput run_suitability(const ExperimentConfig& c) {
    const auto& p = c.params;
    const auto est = suitability_probability(c.model, p.energy, p.gamma, p.r, c.ensemble);
    CsvTable t({"r", "energy", "gamma", "not_suitable", "bad_fraction", "bad_lo", "bad_hi", "threshold",
                "bad_verdict", "good_lo", "good_hi", "good_verdict", "resolvent_bad", "resolvent_bad_lo",
                "resolvent_bad_hi"});
    for (const auto& e : est)
        t.add(e.r, p.energy, p.gamma, e.bad, e.bad_fraction(), e.bad_ci.lo, e.bad_ci.hi, e.threshold,
              to_string(e.bad_verdict), e.good_ci.lo, e.good_ci.hi, to_string(e.good_verdict), e.resolvent_bad,
              e.resolvent_bad_ci.lo, e.resolvent_bad_ci.hi);
    return {t};
}

inline RunOutput run_dynloc(const ExperimentConfig& c) {
    const auto& p = c.params;
    const auto r = dynamical_moment_ensemble(c.model, BoxSpec(c.model.dimension(), c.geometry.L, c.geometry.center),
                                             c.geometry.x, p.lo, p.hi, p.p, p.t_grid, c.ensemble);
    CsvTable t({"t", "p", "mean", "stderr", "min", "max"});
    for (std::size_t i = 0; i < r.t.size(); ++i)
        t.add(r.t[i], p.p, r.moment[i].mean, r.moment[i].standard_error(), r.moment[i].min, r.moment[i].max);
    return {t};
}

inline RunOutput run_stone(const ExperimentConfig& c) {
    const auto& p = c.params;
    const BoxSpec box(c.model.dimension(), c.geometry.L, c.geometry.center);
    if (!box.contains(c.geometry.x)) throw InvalidArgument("geometry.x: outside the box");
    const auto ix = static_cast<Eigen::Index>(box.index_of(c.geometry.x));
    auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
        Rng rng(seed);
        const auto h = c.model.hamiltonian(box, c.model.draw(box, rng));
        const auto rep = stone_inequality_check(h.matrix, ix, p.lo, p.hi, p.stone_eps);
        return std::vector<double>{rep.lhs, rep.rhs, rep.detail("quadrature_error"),
                                   static_cast<double>(rep.status), rep.passed() ? 1.0 : 0.0};
    };
    const auto samples = collect_samples(task, c.ensemble);
    CsvTable t({"sample", "x", "a", "b", "eps", "lhs", "rhs", "quadrature_error", "status", "pass"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& r = *samples[i];
        t.add(i, to_string(c.geometry.x), p.lo, p.hi, p.stone_eps, r[0], r[1], r[2],
              to_string(static_cast<CheckStatus>(static_cast<int>(r[3]))), r[4] != 0.0);
    }
    return {t};
}

// One generator per inequality family; all draw from the instance's own seed.
inline instances::Instance make_instance(int kind, const EstimatorParams& p, Rng& rng) {
    switch (kind) {
    case 0: return instances::polya(rng, p.max_degree);
    case 1: return instances::fractional_integral(rng, p.max_degree);
    case 2: return instances::determinant(rng, p.max_dim);
    case 3: return instances::inverse_norm(rng, p.max_dim);
    case 4: return instances::cartan(rng, 1, std::min(p.max_degree, 8), 0);
    default: return instances::cartan(rng, 2 + static_cast<int>(rng() % 2), 3, static_cast<std::size_t>(p.cartan_samples));
    }
}

inline constexpr int kInstanceKinds = 6;

inline RunOutput run_verify_bounds(const ExperimentConfig& c) {
    RunOutput out;
    out.table = CsvTable({"inequality", "instance", "instance_hash", "lhs", "rhs", "error", "margin", "status", "pass"});
    std::size_t numerical = 0, violated = 0, total = 0;
    for (int kind = 0; kind < kInstanceKinds; ++kind) {
        EnsembleConfig e = c.ensemble;
        e.master_seed = derive_seed(c.ensemble.master_seed, static_cast<std::uint64_t>(kind));
        auto task = [&](std::uint64_t seed, std::size_t) -> SampleVector {
            Rng rng(seed);
            const auto inst = make_instance(kind, c.params, rng);
            const auto& r = inst.report;
            return std::vector<double>{r.lhs, r.rhs, r.error, static_cast<double>(r.status), r.passed() ? 1.0 : 0.0,
                                       r.violated() ? 1.0 : 0.0};
        };
        const auto samples = collect_samples(task, e);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& r = *samples[i];
            const auto status = static_cast<CheckStatus>(static_cast<int>(r[3]));
            Rng rng(derive_seed(e.master_seed, i));
            const auto name = make_instance(kind, c.params, rng);  // regenerated for its name and description
            out.table.add(name.inequality, i, hex64(fnv1a64(name.inequality + " " + name.description)), r[0], r[1], r[2], r[1] - r[0], to_string(status), r[4] != 0.0);
            ++total;
            if (status == CheckStatus::NumericalFailure) ++numerical;
            else if (r[5] != 0.0) ++violated;
            if (r[5] != 0.0)
                out.failures.push_back({{"inequality", name.inequality}, {"instance", i},
                                        {"instance_hash", hex64(fnv1a64(name.inequality + " " + name.description))},
                                        {"description", name.description}, {"lhs", r[0]}, {"rhs", r[1]},
                                        {"error", r[2]}, {"status", to_string(status)}, {"note", name.report.note}});
        }
    }
    if (violated) out.exit_code = kInequality;
    else if (static_cast<double>(numerical) > c.ensemble.failure_threshold * static_cast<double>(total))
        out.exit_code = kNumerical;
    return out;
}

} // namespace detail

inline RunOutput run_subcommand(const ExperimentConfig& cfg) {
    const auto& n = cfg.estimator;
    RunOutput out;
    if (n == "spectrum") out = detail::run_spectrum(cfg);
    else if (n == "envelope") out = detail::run_envelope(cfg);
    else if (n == "wegner") out = detail::run_wegner(cfg);
    else if (n == "fracmom") out = detail::run_fracmom(cfg);
    else if (n == "fvc") out = detail::run_fvc(cfg);
    else if (n == "regular-pairs") out = detail::run_regular_pairs(cfg);
    else if (n == "suitability") out = detail::run_suitability(cfg);
    else if (n == "dynloc") out = detail::run_dynloc(cfg);
    else if (n == "verify-bounds") out = detail::run_verify_bounds(cfg);
    else if (n == "stone") out = detail::run_stone(cfg);
    else throw ConfigError({"subcommand: unknown '" + n + "'"});
    out.table = out.table.with_prefix(meta_columns(cfg));
    return out;
}

/// Parses, runs and writes; returns the process exit code. Diagnostics go to `log`.
inline int run_cli(const std::string& subcommand, const std::string& config_text,
                   std::optional<std::uint64_t> seed, std::optional<std::uint64_t> samples,
                   std::optional<unsigned> workers, std::optional<std::string> out_path, std::ostream& log) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config(config_text, subcommand);
        apply_overrides(cfg, seed, samples, workers, out_path);
    } catch (const ConfigError& e) {
        for (const auto& msg : e.errors()) log << "config error: " << msg << "\n";
        return kConfig;
    }
    RunOutput out;
    try {
        out = run_subcommand(cfg);
    } catch (const ConfigError& e) {
        for (const auto& msg : e.errors()) log << "config error: " << msg << "\n";
        return kConfig;
    } catch (const InvalidArgument& e) {
        log << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const NumericalFailure& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        log << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    const std::filesystem::path path(cfg.output_path);
    json sidecar{{"tool_version", ALLOY_VERSION},
                 {"subcommand", cfg.estimator},
                 {"config_hash", config_hash(cfg)},
                 {"config", cfg.resolved},
                 {"columns", out.table.columns()},
                 {"exit_code", out.exit_code}};
    try {
        write_atomic(path, out.table.str());
        write_atomic(path.string() + ".json", sidecar.dump(2) + "\n");
        if (!out.failures.empty()) write_atomic(path.string() + ".failures.json", out.failures.dump(2) + "\n");
    } catch (const Error& e) {
        log << "output error: " << e.what() << "\n";
        return kInternal;
    }
    if (out.exit_code == kInequality)
        log << out.failures.size() << " inequality instance(s) failed; see " << path.string() << ".failures.json\n";
    if (out.exit_code == kNumerical) log << "numerical failures above the failure policy\n";
    return out.exit_code;
}

} // namespace alloy::cli
