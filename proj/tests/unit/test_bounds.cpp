#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "alloy/bounds.hpp"
#include "alloy/model.hpp"

using namespace alloy;

namespace {

// Independent route: tanh-sinh on pieces between sorted singular points.
template <class F>
double tanh_sinh_pieces(const F& f, std::vector<double> cuts) {
    std::sort(cuts.begin(), cuts.end());
    boost::math::quadrature::tanh_sinh<double> ts;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) sum += ts.integrate(f, cuts[i], cuts[i + 1]);
    return sum;
}

MonicPolynomial random_monic(std::mt19937_64& rng, int degree, double spread = 2.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<cplx> roots;
    for (int k = 0; k < degree; ++k) roots.emplace_back(u(rng), 0.3 * u(rng));
    return MonicPolynomial::from_roots(roots);
}

Eigen::MatrixXcd random_complex(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int n) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(rng, n));
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

} // namespace

TEST(Polynomial, HornerAndRoots) {
    auto p = MonicPolynomial::from_roots({1.0, -2.0, cplx(0.5, 1.0)});
    EXPECT_EQ(p.degree(), 3);
    for (double x : {-1.3, 0.0, 0.7, 2.2}) {
        const cplx direct = (x - 1.0) * (x + 2.0) * (x - cplx(0.5, 1.0));
        EXPECT_NEAR(std::abs(p(x) - direct), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(p.polynomial()(x) - direct), 0.0, 1e-13);
    }
    auto r = p.roots();
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(std::abs(r[0] - cplx(-2.0)), 0.0, 1e-12);
}

TEST(Polynomial, CompanionIdentity) {
    std::mt19937_64 rng(1);
    for (int n = 1; n <= 10; ++n) {
        std::normal_distribution<double> g;
        std::vector<cplx> lower;
        for (int k = 0; k < n; ++k) lower.emplace_back(g(rng), g(rng));
        MonicPolynomial p(lower);
        const Eigen::MatrixXcd a = p.companion();
        double worst = 0.0;
        for (int k = 0; k < 2 * n + 1; ++k) {
            const double x = 2.0 * std::cos(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * (2 * n + 1)));
            const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) * x + a;
            const cplx det = m.partialPivLu().determinant();
            worst = std::max(worst, std::abs(det - p(x)) / std::max(1.0, std::abs(p(x))));
        }
        EXPECT_LE(worst, 1e-8) << "n = " << n;
    }
}

TEST(Polya, ClosedForms) {
    auto lin = polya_sublevel_measure(MonicPolynomial::real({0.0}), 0.3);
    EXPECT_NEAR(lin.lhs, 0.6, 1e-14);
    EXPECT_NEAR(lin.rhs, 0.6, 1e-14);
    EXPECT_TRUE(lin.passed());

    auto sq = polya_sublevel_measure(MonicPolynomial::real({0.0, 0.0}), 1.0);
    EXPECT_NEAR(sq.lhs, 2.0, 1e-12);
    EXPECT_NEAR(sq.rhs, 4.0 * std::sqrt(0.5), 1e-14);
    EXPECT_TRUE(sq.passed());

    // |x^2 - 1| <= 1/sqrt(2): two intervals, endpoints by hand
    auto quartic = polya_sublevel_measure(MonicPolynomial::real({1.0, 0.0, -2.0, 0.0}), 0.5);
    const double expect = 2.0 * (std::sqrt(1.0 + std::sqrt(0.5)) - std::sqrt(1.0 - std::sqrt(0.5)));
    EXPECT_NEAR(quartic.lhs, expect, 1e-12);
}

TEST(Polya, MonteCarloOracleAndMonotonicity) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        auto p = random_monic(rng, 5);
        const double alpha = trial == 0 ? 1e-3 : 0.5 * trial;
        auto rep = polya_sublevel_measure(p, alpha);
        EXPECT_TRUE(rep.passed());
        EXPECT_GT(rep.margin(), 0.0);
        const double radius = p.root_bound() + alpha;
        std::uniform_real_distribution<double> x(-radius, radius);
        const int n = 1000000;
        int hits = 0;
        for (int i = 0; i < n; ++i) hits += std::abs(p(x(rng))) <= alpha;
        const double frac = static_cast<double>(hits) / n;
        const double sigma = std::sqrt(std::max(frac * (1 - frac), 1.0 / n) / n);
        EXPECT_NEAR(rep.lhs, 2.0 * radius * frac, 2.0 * radius * 4.0 * sigma);
    }
    auto p = random_monic(rng, 6);
    double prev = -1.0, prev_rhs = -1.0;
    for (double alpha = 1e-4; alpha < 100.0; alpha *= 1.7) {
        auto r = polya_sublevel_measure(p, alpha);
        EXPECT_GE(r.lhs + r.error, prev);
        EXPECT_GE(r.rhs, prev_rhs);
        prev = r.lhs;
        prev_rhs = r.rhs;
    }
    EXPECT_THROW(polya_sublevel_measure(p, 0.0), InvalidArgument);
}

TEST(FractionalIntegral, ClosedForms) {
    auto uni = DisorderSpec::uniform(0.0, 1.0);
    for (int n : {1, 3, 7})
        for (double s : {0.1, 0.5, 0.9}) {
            std::vector<double> lower(static_cast<std::size_t>(n), 0.0);
            auto r = polynomial_fractional_integral(MonicPolynomial::real(lower), uni, s);
            EXPECT_NEAR(r.lhs, 1.0 / (1.0 - s), 1e-8) << n << " " << s;
            EXPECT_NEAR(r.rhs, std::pow(2.0, s) * std::pow(s, -s) / (1.0 - s), 1e-13);
            EXPECT_TRUE(r.passed());
        }
    auto shifted = polynomial_fractional_integral(MonicPolynomial::real({-5.0}), uni, 0.5);
    EXPECT_NEAR(shifted.lhs, 2.0 * (std::sqrt(5.0) - 2.0), 1e-10);
    EXPECT_THROW(polynomial_fractional_integral(MonicPolynomial::real({0.0}), uni, 1.0), InvalidArgument);
}

TEST(FractionalIntegral, RandomSweepAgainstTanhSinh) {
    std::mt19937_64 rng(7);
    auto rho = DisorderSpec::uniform(-1.0, 1.0);
    auto tri = DisorderSpec::table({-1.0, 0.0, 2.0}, {0.0, 2.0 / 3.0, 0.0});
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 8;
        const double s = 0.1 + 0.1 * (trial % 9);
        auto p = random_monic(rng, n);
        const auto& dens = trial % 2 ? rho : tri;
        auto r = polynomial_fractional_integral(p, dens, s);
        ASSERT_TRUE(r.passed()) << "trial " << trial;
        std::vector<double> cuts(dens.knots());
        for (auto z : p.roots())
            if (z.real() > dens.lower() && z.real() < dens.upper()) cuts.push_back(z.real());
        const auto poly = p.polynomial();
        const double oracle = tanh_sinh_pieces(
            [&](double x) { return dens.density(x) * std::pow(std::abs(poly(x)), -s / n); }, cuts);
        EXPECT_NEAR(r.lhs, oracle, 1e-6 * r.rhs) << "trial " << trial;
    }
}

TEST(DeterminantAverage, ClosedForms) {
    auto uni = DisorderSpec::uniform(0.0, 1.0);
    Eigen::MatrixXcd a0 = Eigen::MatrixXcd::Zero(1, 1), v1 = Eigen::MatrixXcd::Identity(1, 1);
    auto r = determinant_average(a0, v1, uni, 0.5);
    // a rounding-level shift c of the interpolated root moves the integral by ~2 sqrt(c)
    EXPECT_NEAR(r.lhs, 2.0, 1e-7);
    EXPECT_NEAR(r.rhs, 4.0, 1e-12);

    for (int n : {2, 4}) {
        const double s = 0.4;
        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
        auto q = determinant_average(id, id, uni, s);
        EXPECT_NEAR(q.lhs, (std::pow(2.0, 1.0 - s) - 1.0) / (1.0 - s), 1e-9);
        EXPECT_TRUE(q.passed());
    }
    Eigen::MatrixXcd sing = Eigen::MatrixXcd::Zero(2, 2);
    EXPECT_THROW(determinant_average(sing, sing, uni, 0.5), InvalidArgument);
}

TEST(DeterminantAverage, RandomAgainstDirectQuadratureAndUnitaryInvariance) {
    std::mt19937_64 rng(11);
    auto rho = DisorderSpec::uniform(-1.0, 1.0);
    Eigen::MatrixXcd v = Eigen::VectorXcd((Eigen::VectorXcd(4) << 1.0, -1.0, 2.0, -2.0).finished()).asDiagonal();
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXcd a = random_complex(rng, 4);
        const double s = 0.3 + 0.05 * trial;
        auto r = determinant_average(a, v, rho, s);
        ASSERT_TRUE(r.passed());
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(-v.inverse() * a, false);
        std::vector<double> cuts{-1.0, 1.0};
        for (Eigen::Index k = 0; k < 4; ++k)
            if (std::abs(es.eigenvalues()(k).real()) < 1.0) cuts.push_back(es.eigenvalues()(k).real());
        const double oracle = tanh_sinh_pieces(
            [&](double x) {
                const Eigen::MatrixXcd m = a + x * v;
                return rho.density(x) * std::pow(std::abs(m.partialPivLu().determinant()), -s / 4.0);
            },
            cuts);
        EXPECT_NEAR(r.lhs, oracle, 1e-6 * r.rhs);

        Eigen::MatrixXcd u = random_unitary(rng, 4);
        auto rot = determinant_average(u * a * u.adjoint(), u * v * u.adjoint(), rho, s);
        EXPECT_NEAR(rot.lhs, r.lhs, 1e-9 * std::max(1.0, r.lhs));
    }
}

TEST(InverseNormAverage, ClosedForms) {
    Eigen::MatrixXcd a0 = Eigen::MatrixXcd::Zero(1, 1), v1 = Eigen::MatrixXcd::Identity(1, 1);
    auto r = inverse_norm_average(a0, v1, 0.5, 1.0);
    EXPECT_NEAR(r.lhs, 4.0, 1e-9);
    EXPECT_NEAR(r.rhs, 2.0 / (std::sqrt(0.5) * 0.5), 1e-12);
    EXPECT_TRUE(r.passed());

    const int n = 3;
    const double s = 0.6, radius = 0.2;
    Eigen::MatrixXcd a = 10.0 * Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    auto far = inverse_norm_average(a, id, s, radius);
    const double beta = s / n;
    const double exact = (std::pow(10.0 + radius, 1.0 - beta) - std::pow(10.0 - radius, 1.0 - beta)) / (1.0 - beta);
    EXPECT_NEAR(far.lhs, exact, 1e-10);
    EXPECT_GT(far.margin(), 0.5 * far.rhs);
}

TEST(InverseNormAverage, RandomInstances) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        Eigen::MatrixXcd a = random_complex(rng, 3);
        Eigen::MatrixXcd v = random_complex(rng, 3);
        const double s = 0.2 + 0.02 * trial;
        auto r = inverse_norm_average(a, v, s, 1.0 + 0.1 * trial);
        EXPECT_TRUE(r.passed()) << trial << " " << r.lhs << " " << r.rhs << " " << r.note;
    }
}

TEST(WeakL1, ScalarClosedForm) {
    Eigen::MatrixXcd a(1, 1);
    a << cplx(0.0, 1.0);
    Eigen::VectorXd v(1);
    v << 1.0;
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(1, 1);
    std::vector<double> ts{0.05, 0.2, 0.5, 0.9, 0.99, 2.0};
    auto prof = weak_l1_tail(a, v, one, one, ts, 200000);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        const double exact = t < 1.0 ? 2.0 * std::sqrt(1.0 / (t * t) - 1.0) : 0.0;
        EXPECT_NEAR(prof.measure[i], exact, 2.0 * prof.step) << t;
    }
    EXPECT_EQ(prof.measure.back(), 0.0);
    EXPECT_LE(prof.sup_normalized, 2.0 + 1e-9);
}

TEST(WeakL1, RandomDissipativeProfileIsBounded) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    Eigen::MatrixXd h0(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j <= i; ++j) h0(i, j) = h0(j, i) = g(rng);
    Eigen::MatrixXcd a = h0.cast<cplx>() + cplx(0.0, 1.0) * Eigen::MatrixXcd::Identity(4, 4);
    Eigen::VectorXd v(4);
    v << 1.0, 0.5, 2.0, 1.5;
    Eigen::MatrixXcd m1 = random_complex(rng, 4), m2 = random_complex(rng, 4);
    std::vector<double> ts;
    for (double t = 0.01; t < 100.0; t *= 1.5) ts.push_back(t);
    auto prof = weak_l1_tail(a, v, m1, m2, ts);
    EXPECT_TRUE(std::isfinite(prof.sup_normalized));
    EXPECT_GT(prof.sup_normalized, 0.0);
    for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_LE(prof.measure[i], prof.measure[i - 1]);
    EXPECT_EQ(prof.measure.back(), 0.0);

    Eigen::MatrixXcd bad = a;
    bad(0, 0) = cplx(0.0, -1.0);
    EXPECT_THROW(weak_l1_tail(bad, v, m1, m2, ts), InvalidArgument);
}

TEST(Cartan, ConstantFunctions) {
    const double eps = 0.05;
    Polynomial f({cplx(eps)});
    const double s_in = 0.5 * std::log(1.0 / eps);
    auto in = cartan_disc(f, eps, s_in);
    EXPECT_EQ(in.status, CheckStatus::Ok);
    EXPECT_EQ(in.lhs, 2.0);
    EXPECT_TRUE(in.passed());
    auto out = cartan_disc(f, eps, 2.0 * std::log(1.0 / eps));
    EXPECT_EQ(out.lhs, 0.0);
    EXPECT_TRUE(out.passed());

    MultiPolynomial g(3, {{cplx(eps), {0, 0, 0}}});
    auto pin = cartan_polydisc(g, eps, s_in, 1000, 1);
    EXPECT_EQ(pin.lhs, 1.0);
    EXPECT_TRUE(pin.passed());
    EXPECT_EQ(cartan_polydisc(g, eps, 2.0 * std::log(1.0 / eps), 1000, 1).lhs, 0.0);
}

TEST(Cartan, HypothesisViolationsAreReportedNotFailed) {
    Polynomial big({cplx(2.0)});
    auto r = cartan_disc(big, 0.5, 1.0);
    EXPECT_EQ(r.status, CheckStatus::HypothesesNotMet);
    EXPECT_FALSE(r.violated());
    Polynomial small({cplx(0.01)});
    EXPECT_EQ(cartan_disc(small, 0.5, 1.0).status, CheckStatus::HypothesesNotMet);
    EXPECT_THROW(cartan_disc(small, 1.5, 1.0), InvalidArgument);
}

TEST(Cartan, LinearFamilyAgainstMonteCarlo) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ua(-1.0, 1.0);
    const double c = 4.0 * std::numbers::e / (2.0 * std::numbers::e + 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = ua(rng);
        if (std::abs(a) < 1e-3) continue;
        Polynomial f({cplx(-a * c / (4.0 * std::numbers::e)), cplx(c / (4.0 * std::numbers::e))});
        const double eps = std::abs(f(0.0));
        for (double s : {0.5, 1.0, 2.0, 4.0}) {
            auto r = cartan_disc(f, eps, s);
            ASSERT_EQ(r.status, CheckStatus::Ok);
            EXPECT_TRUE(r.passed());
            EXPECT_LE(r.lhs, 2.0);
            EXPECT_GE(r.rhs, 0.0);
            // exact: |x - a| <= e^{-s} 4e / c, clipped to [-1,1]
            const double w = std::exp(-s) * 4.0 * std::numbers::e / c;
            const double exact = std::max(0.0, std::min(1.0, a + w) - std::max(-1.0, a - w));
            EXPECT_NEAR(r.lhs, exact, 1e-12);
            auto multi = cartan_polydisc(MultiPolynomial::from_univariate(f), eps, s, 10, 1);
            EXPECT_EQ(multi.passed(), r.passed());
            EXPECT_EQ(multi.lhs, r.lhs);
        }
    }
}

TEST(Cartan, ProductsInTwoAndThreeVariables) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ua(-1.0, 1.0);
    const double e = std::numbers::e;
    for (int n : {2, 3}) {
        std::vector<double> a(static_cast<std::size_t>(n));
        for (auto& x : a) x = ua(rng);
        const double scale = std::pow(4.0 * e / (2.0 * e + 1.0), n) / std::pow(4.0 * e, n);
        auto f = MultiPolynomial::product_of_linear(a, scale);
        double at0 = std::abs(f(std::vector<double>(static_cast<std::size_t>(n), 0.0)));
        auto r = cartan_polydisc(f, at0, 3.0, 1000000, 5);
        ASSERT_EQ(r.status, CheckStatus::Ok) << r.note;
        EXPECT_TRUE(r.passed());
        EXPECT_LE(r.detail("wilson_lo"), r.lhs);
    }
}

TEST(GreenIdentity, Examples) {
    BoxSpec box(1, 3);
    auto dirac = SingleSitePotential::dirac(1);
    Rng rng(1);
    auto base = sample_disorder(DisorderSpec::uniform(0.0, 1.0), coverage_region(box, dirac), rng);
    auto rank1 = green_determinant_identity_1d(box, dirac, base, 1.7, cplx(0.2, 1.0), 0);
    EXPECT_TRUE(rank1.passed());
    EXPECT_NEAR(std::abs(rank1.leading), 1.7, 1e-10);

    SingleSitePotential u({{Site{0}, 1.0}, {Site{1}, -0.5}});
    auto base2 = sample_disorder(DisorderSpec::uniform(0.0, 1.0), coverage_region(box, u), rng);
    auto r = green_determinant_identity_1d(box, u, base2, 1.0, cplx(0.0, 1.0), -1);
    EXPECT_LT(r.residual, 1e-8);
    EXPECT_NEAR(std::abs(r.leading), 0.5, 1e-8);
    auto r2 = green_determinant_identity_1d(box, u, base2, 2.0, cplx(0.0, 1.0), -1);
    EXPECT_NEAR(std::abs(r2.leading) / std::abs(r.leading), 4.0, 1e-8);

    EXPECT_THROW(green_determinant_identity_1d(box, u, base2, 1.0, cplx(0.0, 1.0), 3), InvalidArgument);
}
