// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "alloy/cli.hpp"

using namespace alloy;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

EnsembleConfig ens(std::size_t n, std::uint64_t seed, unsigned workers = 1) {
    EnsembleConfig c;
    c.samples = n;
    c.master_seed = seed;
    c.workers = workers;
    return c;
}

ModelSpec anderson(double lambda) {
    return ModelSpec(SingleSitePotential::dirac(1), DisorderSpec::uniform(0.0, 1.0), lambda);
}

ModelSpec three_site(double lambda) {
    return ModelSpec(SingleSitePotential({{{0}, 1.0}, {{1}, -0.5}, {{2}, 1.0}}), DisorderSpec::uniform(0.0, 1.0),
                     lambda);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// 1: Polya, polynomial fractional integral, determinant average, inverse-norm average
void criterion1(Outcome& o) {
    using Gen = std::function<instances::Instance(Rng&)>;
    const std::vector<std::pair<std::string, Gen>> kinds{
        {"polya", [](Rng& r) { return instances::polya(r, 8); }},
        {"fractional_integral", [](Rng& r) { return instances::fractional_integral(r, 8); }},
        {"determinant_average", [](Rng& r) { return instances::determinant(r, 6); }},
        {"inverse_norm_average", [](Rng& r) { return instances::inverse_norm(r, 6); }},
    };
    const std::size_t n = 500;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        std::size_t passed = 0;
        double worst_rel_error = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Rng rng(derive_seed(1000 + k, i));
            const auto inst = kinds[k].second(rng);
            const auto& r = inst.report;
            if (r.passed()) ++passed;
            else if (o.pass) o.detail << " first failure " << inst.inequality << ": " << inst.description << ";";
            if (r.rhs > 0.0) worst_rel_error = std::max(worst_rel_error, r.error / r.rhs);
        }
        o.detail << " " << kinds[k].first << " " << passed << "/" << n;
        o.require(passed == n, kinds[k].first + " all instances pass");
        o.require(worst_rel_error <= 1e-6, kinds[k].first + " error within 1e-6 of rhs");
    }
}

// 2: Cartan disc and poly-disc, hypothesis-satisfying instances only
void criterion2(Outcome& o) {
    const std::size_t want = 200;
    for (int family = 0; family < 2; ++family) {
        std::size_t used = 0, passed = 0, skipped = 0;
        for (std::size_t i = 0; used < want && i < 10 * want; ++i) {
            Rng rng(derive_seed(2000 + family, i));
            const int vars = family == 0 ? 1 : 2 + static_cast<int>(i % 2);
            const auto inst = instances::cartan(rng, vars, family == 0 ? 8 : 3, 20000);
            if (inst.report.status == CheckStatus::HypothesesNotMet) {
                ++skipped;
                continue;
            }
            ++used;
            if (inst.report.passed()) ++passed;
        }
        const std::string name = family == 0 ? "cartan_disc" : "cartan_polydisc";
        o.detail << " " << name << " " << passed << "/" << used << " (skipped " << skipped << ")";
        o.require(used == want && passed == want, name + " all instances pass");
    }
}

// 3: exact identities
void criterion3(Outcome& o) {
    Rng rng(3001);
    double schur_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int d = 1 + i % 2;
        const BoxSpec box(d, 1 + static_cast<int>(rng() % 3));
        const ModelSpec m(SingleSitePotential::dirac(d), DisorderSpec::uniform(-1.0, 1.0), 1.0 + 2.0 * uniform01(rng));
        const auto h = m.hamiltonian(box, m.draw(box, rng));
        const auto values = eigenvalues(h);
        double E = 0.0;
        do E = -6.0 + 12.0 * uniform01(rng);
        while (distance_to_spectrum(values, cplx(E, 0.0)) < 0.05);
        std::vector<Eigen::Index> block;
        for (Eigen::Index j = 0; j < h.matrix.rows(); ++j)
            if (rng() % 2) block.push_back(j);
        if (block.empty()) block.push_back(0);
        const auto res = schur_block_inverse(h.matrix, E, block);
        Eigen::MatrixXd full = h.matrix - E * Eigen::MatrixXd::Identity(h.matrix.rows(), h.matrix.cols());
        const Eigen::MatrixXd inv = full.fullPivLu().inverse();
        const Eigen::MatrixXd direct = inv(block, block);
        schur_worst = std::max(schur_worst, (res.inverse - direct).cwiseAbs().maxCoeff() /
                                                std::max(1.0, direct.cwiseAbs().maxCoeff()));
    }
    o.detail << " schur " << schur_worst;
    o.require(schur_worst <= 1e-10, "Schur block inverse within 1e-10");

    double residual = 0.0, leading = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = 1 + static_cast<int>(rng() % 4);
        std::map<Site, double> vals;
        for (int k = 0; k < n; ++k) {
            double v = 0.0;
            while (std::abs(v) < 0.1) v = -2.0 + 4.0 * uniform01(rng);
            vals[Site{k}] = v;
        }
        const SingleSitePotential u(vals);
        const ModelSpec m(u, DisorderSpec::uniform(0.0, 1.0), 0.5 + 2.0 * uniform01(rng));
        const BoxSpec box(1, 4 + static_cast<int>(rng() % 3));
        const int x = -box.L + static_cast<int>(rng() % static_cast<unsigned>(2 * box.L + 2 - n));
        const cplx z(-2.0 + 4.0 * uniform01(rng), 0.2 + uniform01(rng));
        const auto chk = green_determinant_identity_1d(box, u, m.draw(box, rng), m.lambda, z, x);
        residual = std::max(residual, chk.residual);
        leading = std::max(leading, chk.leading_error);
    }
    o.detail << "; 1-d identity residual " << residual << " leading " << leading;
    o.require(residual < 1e-8 && leading < 1e-8, "1-d Green/determinant identity within 1e-8");

    double norm_worst = 0.0, sym_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int d = 1 + i % 2;
        const BoxSpec box(d, 1 + static_cast<int>(rng() % 3));
        const ModelSpec m(SingleSitePotential::dirac(d), DisorderSpec::uniform(0.0, 1.0), 3.0 * uniform01(rng));
        const auto h = m.hamiltonian(box, m.draw(box, rng));
        const cplx z(-3.0 + 7.0 * uniform01(rng), 0.1 + uniform01(rng));
        Eigen::MatrixXcd a = h.matrix.cast<cplx>();
        a.diagonal().array() -= z;
        const double smin = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues().minCoeff();
        norm_worst = std::max(norm_worst, std::abs(resolvent_norm(h, z) * smin - 1.0));
        const auto sites = enumerate_sites(box);
        const auto& xs = sites[rng() % sites.size()];
        const auto& ys = sites[rng() % sites.size()];
        const cplx gxy = green_function(h, z, xs, ys), gyx = green_function(h, z, ys, xs);
        sym_worst = std::max(sym_worst, std::abs(gxy - gyx) / std::max(1.0, std::abs(gxy)));
    }
    o.detail << "; resolvent norm " << norm_worst << "; symmetry " << sym_worst;
    o.require(norm_worst <= 1e-12, "resolvent norm equals 1/dist within 1e-12");
    o.require(sym_worst <= 1e-12, "Green symmetry within 1e-12");
}

// 4: Wegner scaling and the corollary bound
void criterion4(Outcome& o) {
    const auto m = anderson(1.0);
    const auto w = wegner_scaling_fit(m, 0.0, {0.02, 0.04, 0.08}, 20, {10, 20, 40}, 0.04, ens(5000, 4001));
    o.require(!w.degenerate, "fits not degenerate");
    o.detail << " eps exponent " << w.eps_exponent << " +- " << w.eps_fit.slope_se << "; volume exponent "
             << w.volume_exponent << " +- " << w.volume_exponent_se;
    o.require(w.eps_exponent >= 0.9 && w.eps_exponent <= 1.1, "eps exponent in [0.9, 1.1]");
    o.require(w.volume_exponent >= 0.9 && w.volume_exponent <= 1.1, "volume exponent in [0.9, 1.1]");
    double worst = 0.0;
    auto check = [&](const WegnerCount& c, int L) {
        for (const auto& p : c.points) {
            const double bound = wegner_corollary_bound(m, m.mu.sup_density(), p.eps, L);
            worst = std::max(worst, (p.count.mean - 3.0 * p.count.standard_error()) / bound);
        }
    };
    check(w.eps_runs.front(), 20);
    for (std::size_t i = 0; i < w.volume_runs.size(); ++i) check(w.volume_runs[i], std::vector<int>{10, 20, 40}[i]);
    o.detail << "; max (mean - 3se) / bound " << worst;
    o.require(worst <= 1.0, "expected count below the corollary bound within 3 sigma");
}

// 5: Stone inequality
void criterion5(Outcome& o) {
    Eigen::MatrixXd one(1, 1);
    one << 0.3;
    const double a = -0.5, b = 1.0, eps = 0.4;
    const auto rep = stone_inequality_check(one, 0, a, b, eps);
    const double exact = 4.0 / std::numbers::pi * (std::atan((b - 0.3) / eps) - std::atan((a - 0.3) / eps));
    o.detail << " 1x1 lhs " << rep.lhs << " rhs-closed form " << rep.rhs - exact << ";";
    o.require(rep.lhs == 1.0 && std::abs(rep.rhs - exact) <= 1e-12 && rep.passed(), "1x1 closed form");

    Rng rng(5001);
    std::size_t passed = 0;
    const std::size_t n = 200;
    for (std::size_t i = 0; i < n; ++i) {
        const auto m = i % 2 ? three_site(0.5 + 3.0 * uniform01(rng)) : anderson(0.5 + 3.0 * uniform01(rng));
        const BoxSpec box(1, 3 + static_cast<int>(rng() % 10));
        const auto h = m.hamiltonian(box, m.draw(box, rng));
        const double lo = -4.0 + 8.0 * uniform01(rng);
        const double hi = lo + 0.05 + 3.0 * uniform01(rng);
        const double e = (hi - lo) * (0.01 + 0.99 * uniform01(rng));
        const auto x = static_cast<Eigen::Index>(rng() % h.size());
        if (stone_inequality_check(h.matrix, x, lo, hi, e).passed()) ++passed;
    }
    o.detail << " random " << passed << "/" << n;
    o.require(passed == n, "all random instances pass");
}

// 6: single-site fractional moment against quadrature; decay at large disorder
void criterion6(Outcome& o) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const std::vector<std::pair<cplx, double>> cases{{cplx(0.0, 1.0), 0.5}, {cplx(0.5, 0.1), 0.7}};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto [z, s] = cases[i];
        const auto est = frac_moment_estimate(anderson(1.0), BoxSpec(1, 0), z, s, {0}, {0}, ens(10000, 6001 + i));
        const double exact = ts.integrate([&](double w) { return std::pow(std::abs(w - z), -s); }, 0.0, 1.0);
        const double sigmas = std::abs(est.stat.mean - exact) / est.stat.standard_error();
        o.detail << " single site z=" << z << " s=" << s << ": " << sigmas << " sigma;";
        o.require(sigmas <= 4.0, "single-site agreement within 4 sigma");
    }
    std::vector<int> distances;
    for (int r = 0; r <= 20; r += 2) distances.push_back(r);
    const auto f = frac_moment_decay_fit(three_site(30.0), cplx(0.0, 1.0), 0.2, 12, distances, ens(2000, 6100));
    o.detail << " decay gamma " << f.gamma << " +- " << f.gamma_se << " R^2 " << f.r_squared << " (" << f.status << ")";
    o.require(f.resolved && f.gamma > 0.0 && f.r_squared > 0.9, "gamma > 0 with R^2 > 0.9");
}

// 7: regular pairs, suitability, dynamical contrast
void criterion7(Outcome& o) {
    const auto m = three_site(30.0);
    const auto rp = regular_pair_probability(m, -0.5, 0.5, 0.3, 8, {0}, {19}, ens(5000, 7001), 1.1);
    o.detail << " regular pairs " << rp.good.mean << " [" << rp.good_ci.lo << ", " << rp.good_ci.hi << "];";
    o.require(rp.good.mean >= 0.99, "regular-pair probability >= 0.99");

    const auto su = suitability_probability(m, 0.0, 0.3, {4, 8}, ens(10000, 7002));
    for (const auto& e : su) {
        o.detail << " r=" << e.r << " not suitable " << e.bad_fraction() << " [" << e.bad_ci.lo << ", "
                 << e.bad_ci.hi << "] vs " << e.threshold << " " << to_string(e.bad_verdict)
                 << " (resolvent alone " << static_cast<double>(e.resolvent_bad) / e.samples << ");";
        o.require(e.bad_verdict != Verdict::Fail, "suitability bad event below r^{-4d} at r=" + std::to_string(e.r));
    }

    const std::vector<double> t{1.0, 100.0};
    const BoxSpec box(1, 100);
    const auto free = dynamical_moment_ensemble(anderson(0.0), box, {0}, -1e3, 1e3, 2.0, t, ens(50, 7003));
    const auto loc = dynamical_moment_ensemble(m, box, {0}, -1e3, 1e3, 2.0, t, ens(50, 7004));
    o.detail << " M2(100)/M2(1) free " << free.ratio(1, 0) << " disordered " << loc.ratio(1, 0);
    o.require(free.ratio(1, 0) > 10.0, "free ratio > 10");
    o.require(loc.ratio(1, 0) < 2.0, "lambda = 30 ratio < 2");
}

// 8: envelope Lipschitz bound and the union-of-spectra hull
void criterion8(Outcome& o) {
    const auto m = anderson(1.0);
    const BoxSpec box(1, 200);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    std::size_t violations = 0;
    double ratio = 0.0;
    for (int i = 0; i < 10; ++i) {
        Rng rng(derive_seed(8001, static_cast<std::uint64_t>(i)));
        const auto env = spectrum_envelope(m.draw(box, rng), m, box, grid);
        violations += env.violations;
        ratio = std::max(ratio, env.max_step_ratio);
    }
    o.detail << " envelope violations " << violations << " max step ratio " << ratio << ";";
    o.require(violations == 0, "envelope Lipschitz on every grid pair");

    const auto hull = spectrum_union_estimate(m, box, ens(200, 8002));
    o.detail << " hull [" << hull.lo << ", " << hull.hi << "]";
    o.require(hull.lo >= -2.0 && hull.hi <= 3.0, "hull inside [-2, 3]");
    o.require(hull.lo <= -1.9 && hull.hi >= 2.9, "hull within 0.1 of both endpoints");
}

// 9: byte-identical CSV across worker counts, every subcommand
void criterion9(Outcome& o) {
    const std::filesystem::path configs = ALLOY_CONFIG_DIR;
    const auto dir = std::filesystem::temp_directory_path() / "alloylab_acceptance";
    std::filesystem::create_directories(dir);
    const std::map<std::string, std::uint64_t> samples{
        {"spectrum", 20}, {"envelope", 10}, {"wegner", 200},        {"fracmom", 100},     {"fvc", 100},
        {"regular-pairs", 200}, {"suitability", 500}, {"dynloc", 20}, {"verify-bounds", 10}, {"stone", 50}};
    std::size_t identical = 0;
    for (const auto& sub : cli::subcommands()) {
        const std::string text = slurp(configs / (sub + ".json"));
        std::string reference, reference_side;
        bool same = true;
        for (unsigned w : {1u, 4u, 16u}) {
            const auto out = dir / (sub + "-w" + std::to_string(w) + ".csv");
            std::ostringstream log;
            const int code = cli::run_cli(sub, text, std::nullopt, samples.at(sub), w, out.string(), log);
            if (code != cli::kOk) {
                same = false;
                o.detail << " " << sub << " exit " << code << " (" << log.str() << ")";
                break;
            }
            const auto csv = slurp(out), side = slurp(out.string() + ".json");
            if (w == 1) {
                reference = csv;
                reference_side = side;
            } else if (csv != reference || side != reference_side) {
                same = false;
            }
        }
        if (same) ++identical;
        else o.detail << " " << sub << " differs;";
        o.require(same, sub + " byte-identical");
    }
    o.detail << " " << identical << "/" << cli::subcommands().size() << " subcommands identical at workers 1, 4, 16";
}

} // namespace

int main() {
    const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
    std::size_t failed = 0;
    for (const auto& [id, run] : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failed;
        std::printf("criterion %d: %s (%.1f s)%s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%zu of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
