#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "alloy/model.hpp"
#include "alloy/spectral.hpp"

using namespace alloy;

namespace {

HamiltonianMatrix random_hamiltonian(int d, int L, std::uint64_t seed, double lambda = 1.3) {
    BoxSpec box(d, L);
    auto u = SingleSitePotential::dirac(d);
    Rng rng(seed);
    auto sample = sample_disorder(DisorderSpec::uniform(-1.0, 1.0), coverage_region(box, u), rng);
    return assemble_hamiltonian(box, u, sample, lambda);
}

Eigen::MatrixXd free_chain(int n) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = -1.0;
    return h;
}

} // namespace

TEST(Eigen, ScalarAndFreeChain) {
    Eigen::MatrixXd one(1, 1);
    one << 6.0;
    auto e1 = eigen_decomposition(one);
    EXPECT_EQ(e1.values(0), 6.0);
    EXPECT_EQ(std::abs(e1.vectors(0, 0)), 1.0);

    const int n = 17;
    auto e = eigen_decomposition(free_chain(n));
    for (int j = 1; j <= n; ++j)
        EXPECT_NEAR(e.values(j - 1), -2.0 * std::cos(std::numbers::pi * j / (n + 1)), 1e-12);
}

TEST(Eigen, Invariants) {
    auto h = random_hamiltonian(2, 3, 5);
    auto e = eigen_decomposition(h);
    const double norm = h.matrix.lpNorm<Eigen::Infinity>();
    Eigen::MatrixXd resid = h.matrix * e.vectors - e.vectors * e.values.asDiagonal();
    EXPECT_LE(resid.cwiseAbs().maxCoeff(), 1e-10 * (norm + 1.0));
    Eigen::MatrixXd gram = e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(h.size(), h.size());
    EXPECT_LE(gram.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(e.values.sum(), h.matrix.trace(), 1e-10 * std::max(1.0, std::abs(h.matrix.trace())));
    EXPECT_TRUE(std::is_sorted(e.values.data(), e.values.data() + e.values.size()));
}

TEST(Green, Examples) {
    Eigen::MatrixXd c(1, 1);
    c << 2.5;
    const cplx z(0.3, 0.7);
    EXPECT_NEAR(std::abs(green_column(c, z, 0)(0) - 1.0 / (2.5 - z)), 0.0, 1e-15);

    // 2-site free box at z = i: off-diagonal entry is -1/2
    auto g = green_column(free_chain(2), cplx(0, 1), 1);
    EXPECT_NEAR(g(0).real(), -0.5, 1e-15);
    EXPECT_NEAR(g(0).imag(), 0.0, 1e-15);

    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
    EXPECT_NEAR(std::abs(green_column(zero, z, 0)(0) - 1.0 / (-z)), 0.0, 1e-15);
}

TEST(Green, BoundsSymmetryAndHerglotz) {
    auto h = random_hamiltonian(2, 2, 8);
    auto vals = eigenvalues(h);
    const cplx z(0.2, 0.05);
    const auto n = static_cast<Eigen::Index>(h.size());
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index y = 0; y < n; ++y) g.col(y) = green_column(h.matrix, z, y, &vals);
    const double dist = distance_to_spectrum(vals, z);
    for (Eigen::Index y = 0; y < n; ++y) {
        EXPECT_LE(g.col(y).norm(), 1.0 / dist * (1.0 + 1e-12));
        EXPECT_GT(g(y, y).imag(), 0.0);
        for (Eigen::Index x = 0; x < n; ++x) {
            EXPECT_LE(std::abs(g(x, y)), 1.0 / z.imag());
            EXPECT_LE(std::abs(g(x, y) - g(y, x)), 1e-12 * std::abs(g(x, y)));
        }
    }
    // first resolvent identity G(z) - G(z') = (z - z') G(z) G(z')
    const cplx w(-0.4, 0.3);
    Eigen::MatrixXcd gw(n, n);
    for (Eigen::Index y = 0; y < n; ++y) gw.col(y) = green_column(h.matrix, w, y, &vals);
    Eigen::MatrixXcd diff = g - gw - (z - w) * g * gw;
    EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-9);

    // spectral representation agrees with the solve
    auto eig = eigen_decomposition(h);
    EXPECT_NEAR(std::abs(green_from_eigen(eig, z, 3, 7) - g(3, 7)), 0.0, 1e-10);
}

TEST(Green, CollisionAtRealEnergy) {
    auto h = random_hamiltonian(1, 4, 2);
    auto vals = eigenvalues(h);
    EXPECT_THROW(green_column(h.matrix, cplx(vals(3), 0.0), 0, &vals), SpectralCollision);
    EXPECT_THROW(green_column(h.matrix, cplx(vals(3), 0.0), 0), SpectralCollision);
    EXPECT_NO_THROW(green_column(h.matrix, cplx(vals(3) + 1e-3, 0.0), 0, &vals));
}

TEST(Resolvent, NormExamples) {
    Eigen::VectorXd zero(1);
    zero << 0.0;
    EXPECT_DOUBLE_EQ(resolvent_norm(zero, cplx(2.0, 0.0)), 0.5);

    auto h = random_hamiltonian(1, 5, 4);
    auto eig = eigen_decomposition(h);
    EXPECT_NEAR(resolvent_norm(eig, cplx(eig.values(4), 0.01)), 100.0, 1e-9);
    EXPECT_THROW(resolvent_norm(eig, cplx(eig.values(4), 0.0)), SpectralCollision);
}

TEST(Resolvent, MatchesDenseInverse) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto h = random_hamiltonian(2, 1, 100 + seed);
        const double e = 0.123 + 0.1 * static_cast<double>(seed);
        auto eig = eigen_decomposition(h);
        Eigen::MatrixXd a = h.matrix - e * Eigen::MatrixXd::Identity(9, 9);
        const double dense = Eigen::JacobiSVD<Eigen::MatrixXd>(a.inverse()).singularValues()(0);
        EXPECT_NEAR(resolvent_norm(eig, e), dense, 1e-10 * dense);
    }
}

TEST(Projection, CountsAndDiagonal) {
    Eigen::MatrixXd c(1, 1);
    c << 6.0;
    auto p = spectral_projection_trace(eigen_decomposition(c), 5.0, 7.0);
    EXPECT_EQ(p.count, 1u);
    EXPECT_NEAR(p.diagonal(0), 1.0, 1e-15);

    auto h = random_hamiltonian(2, 2, 9);
    auto eig = eigen_decomposition(h);
    auto all = spectral_projection_trace(eig, -100.0, 100.0);
    EXPECT_EQ(all.count, 25u);
    EXPECT_EQ(spectral_projection_trace(eig, -100.0, -50.0).count, 0u);
    auto part = spectral_projection_trace(eig, -0.5, 0.7);
    EXPECT_NEAR(part.diagonal.sum(), static_cast<double>(part.count), 1e-10);
    EXPECT_EQ(part.count, count_in_interval(eig.values, -0.5, 0.7));
    // closed interval on computed eigenvalues
    EXPECT_EQ(count_in_interval(eig.values, eig.values(3), eig.values(3)), 1u);
}

TEST(Schur, Identities) {
    auto h = random_hamiltonian(2, 3, 12);
    const auto n = static_cast<Eigen::Index>(h.size());
    std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    const double e = 10.0;
    auto full = schur_block_inverse(h.matrix, e, all);
    EXPECT_LE(full.max_deviation, 1e-12);

    auto one = schur_block_inverse(h.matrix, e, {5});
    auto eig = eigen_decomposition(h);
    EXPECT_NEAR(one.inverse(0, 0), green_from_eigen(eig, e, 5, 5).real(), 1e-12);

    BoxSpec sub(2, 1, {1, -1});
    std::vector<Eigen::Index> block;
    for (const auto& s : enumerate_sites(sub)) block.push_back(static_cast<Eigen::Index>(h.index_of(s)));
    auto r = schur_block_inverse(h.matrix, e, block);
    EXPECT_LE(r.max_deviation, 1e-10);
}

TEST(Evolution, ExamplesAndUnitarity) {
    Eigen::MatrixXd c(1, 1);
    c << 1.7;
    auto e1 = eigen_decomposition(c);
    Eigen::VectorXcd psi(1);
    psi << 1.0;
    EXPECT_NEAR(std::abs(evolve_state(e1, psi, 2.0)(0) - std::polar(1.0, -1.7 * 2.0)), 0.0, 1e-14);

    auto h = random_hamiltonian(1, 10, 3);
    auto eig = eigen_decomposition(h);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(eig.size());
    psi0(4) = cplx(0.6, 0.8);
    psi0(9) = 0.5;
    EXPECT_EQ(evolve_state(eig, psi0, 0.0), psi0);
    for (double t : {1.0, 10.0, 100.0})
        EXPECT_NEAR(evolve_state(eig, psi0, t).norm(), psi0.norm(), 1e-10 * psi0.norm());
    auto two = evolve_state(eig, evolve_state(eig, psi0, 1.3), 2.4);
    EXPECT_LE((two - evolve_state(eig, psi0, 3.7)).cwiseAbs().maxCoeff(), 1e-9);
}
