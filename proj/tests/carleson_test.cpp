#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "msk/carleson.hpp"

using namespace msk;

namespace {

// Smallest rho with a positive semidefinite Pick matrix for the data
// mu_i -> w_i, found by bisection. Independent of the model-space route.
double pickMinimalNorm(const std::vector<Complex>& mu, const std::vector<Complex>& w) {
    const auto n = static_cast<Eigen::Index>(mu.size());
    auto psd = [&](double rho) {
        Matrix p(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                p(i, j) = (rho * rho - w[i] * std::conj(w[j])) / (1.0 - mu[i] * std::conj(mu[j]));
        Eigen::SelfAdjointEigenSolver<Matrix> es(p);
        return es.eigenvalues().minCoeff() >= 0.0;
    };
    double lo = 0, hi = 1;
    while (!psd(hi)) hi *= 2;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (psd(mid) ? hi : lo) = mid;
    }
    return hi;
}

std::vector<BlaschkeProduct> singletons(const std::vector<Complex>& pts) {
    std::vector<BlaschkeProduct> out;
    for (const auto& p : pts) out.push_back(BlaschkeProduct::fromValues({p}));
    return out;
}

Matrix diagonalOf(const std::vector<Complex>& pts) {
    Matrix d = Matrix::Zero(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = pts[i];
    return d;
}

} // namespace

TEST(Corona, WorkedExample) {
    auto c = coronaSolve(BlaschkeProduct::fromValues({0.0}), BlaschkeProduct::fromValues({0.5}));
    EXPECT_NEAR(c.minimalFNorm, 2.0, 1e-12);
    EXPECT_NEAR(c.fNorm, 2.0, 1e-10);
    EXPECT_NEAR(c.gNorm, 3.0, 1e-9);
    EXPECT_LT(c.bezoutResidual, 1e-12);
}

TEST(Corona, EdgeSubsets) {
    auto theta = BlaschkeProduct::fromValues({0.1, 0.4});
    auto empty = coronaSolve(BlaschkeProduct(), theta);
    EXPECT_EQ(empty.fNorm, 1.0);
    EXPECT_EQ(empty.gNorm, 0.0);
    auto full = coronaSolve(theta, BlaschkeProduct());
    EXPECT_EQ(full.fNorm, 0.0);
    EXPECT_EQ(full.gNorm, 1.0);
}

TEST(Corona, RejectsSharedZero) {
    try {
        coronaSolve(BlaschkeProduct::fromValues({0.3}), BlaschkeProduct::fromValues({0.3, 0.1}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotCoprime);
    }
}

TEST(Corona, MinimalNormMatchesPickOracle) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<Complex> a, m;
        for (int i = 0; i < 2; ++i) a.push_back(std::polar(0.9 * std::sqrt(u(rng)), 2 * kPi * u(rng)));
        for (int i = 0; i < 3; ++i) m.push_back(std::polar(0.9 * std::sqrt(u(rng)), 2 * kPi * u(rng)));
        auto thetaA = BlaschkeProduct::fromValues(a);
        auto comp = BlaschkeProduct::fromValues(m);
        std::vector<Complex> w;
        for (const auto& z : m) w.push_back(1.0 / thetaA(z));
        auto c = coronaSolve(thetaA, comp);
        const double pick = pickMinimalNorm(m, w);
        EXPECT_NEAR(c.minimalFNorm, pick, 1e-7 * pick);
        EXPECT_LE(c.fNorm, pick * (1 + 1e-8));
        EXPECT_LT(c.bezoutResidual, 1e-8 * std::max(1.0, c.gNorm));
        // Interpolation: f = 1/theta_A at the zeros of comp.
        for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(std::abs(c.f(m[i]) - w[i]), 0.0, 1e-8 * pick);
    }
}

TEST(Corona, RepeatedComplementZero) {
    auto thetaA = BlaschkeProduct::fromValues({Complex(0.2, 0.3)});
    auto comp = BlaschkeProduct::fromValues({-0.4, -0.4});
    auto c = coronaSolve(thetaA, comp);
    EXPECT_LT(c.bezoutResidual, 1e-9);
    EXPECT_LE(c.fNorm, c.minimalFNorm * 1.05);
    // f - 1/theta_A vanishes to second order at -0.4.
    Series fs = c.f.taylor(-0.4, 2);
    Series want = FunctionRep::quotient(FunctionRep::constant(1.0), thetaA).taylor(-0.4, 2);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(std::abs(fs[k] - want[k]), 0.0, 1e-9);
}

TEST(Corona, CosetInvariance) {
    auto r = cosetInvariance(BlaschkeProduct::fromValues({0.3, Complex(-0.2, 0.6)}),
                             BlaschkeProduct::fromValues({Complex(0.5, 0.5), -0.7, 0.1}), 7);
    EXPECT_LT(r.gap, 1e-9);
}

TEST(CarlesonConstant, TwoPointFamily) {
    auto family = singletons({0.0, 0.5});
    auto r = generalizedCarlesonConstant(family);
    EXPECT_TRUE(r.exhaustive);
    EXPECT_EQ(r.subsetsExamined, 4);
    EXPECT_NEAR(r.constant, 3.0, 1e-9);
}

TEST(CarlesonConstant, SampledAboveBudget) {
    std::vector<Complex> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(std::polar(0.5, 2 * kPi * i / 6));
    auto family = singletons(pts);
    auto exact = generalizedCarlesonConstant(family);
    auto sampled = generalizedCarlesonConstant(family, 16, 3);
    EXPECT_FALSE(sampled.exhaustive);
    EXPECT_EQ(sampled.subsetsExamined, 16);
    EXPECT_LE(sampled.constant, exact.constant + 1e-12);
    EXPECT_EQ(sampled.table.front().mask, 0u);
    EXPECT_EQ(sampled.table[1].mask, 63u);
}

TEST(InvolutionGroup, DiagonalIdempotentsAreIndicators) {
    std::vector<Complex> pts{0.1, Complex(0.5, 0.2), Complex(-0.3, -0.6)};
    auto family = singletons(pts);
    auto g = buildInvolutionGroup(diagonalOf(pts), family);
    ASSERT_EQ(g.elements.size(), 8u);
    for (SubsetMask a = 0; a < 8; ++a) {
        Matrix want = Matrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) want(i, i) = (a >> i) & 1 ? 1.0 : 0.0;
        EXPECT_LT(linalg::spectralNorm(Matrix(g.idempotents[a] - want)), 1e-10);
    }
    EXPECT_NEAR(g.normSup, 1.0, 1e-10);
    EXPECT_LT(g.laws.worst(), 1e-10);
}

TEST(InvolutionGroup, ModelOperatorLawsAndWellDefinedness) {
    auto family = std::vector<BlaschkeProduct>{BlaschkeProduct::fromValues({0.2, 0.2}),
                                               BlaschkeProduct::fromValues({Complex(-0.4, 0.5)}),
                                               BlaschkeProduct::fromValues({Complex(0.6, -0.3), -0.1})};
    ModelOperator m = buildModelOperator(productOf(family));
    auto g = buildInvolutionGroup(m.shift, family);
    EXPECT_LT(g.laws.worst(), 1e-9);
    EXPECT_TRUE(g.laws.exhaustive);
    EXPECT_EQ(g.laws.pairsChecked, 64);
    // phi_{n}(T) annihilates on the complement and is the identity on ker theta_n(T).
    const BlaschkeProduct theta = productOf(family);
    for (int n = 0; n < 3; ++n) {
        const Matrix& p = g.idempotents[SubsetMask{1} << n];
        Matrix kern = kernelOf(family[n], m.shift);
        EXPECT_LT(linalg::spectralNorm(Matrix(p * kern - kern)), 1e-9);
    }
    EXPECT_LT(wellDefinednessGap(m.shift, family, {1, 2, 3, 4, 5, 6}), 1e-8);
}

TEST(InvolutionGroup, NonCoprimeFamilyRejected) {
    auto family = singletons({0.2, 0.2});
    try {
        buildInvolutionGroup(diagonalOf({0.2, 0.2}), family);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotCoprime);
    }
}

TEST(Dixmier, UnitarizesConjugatedSignGroup) {
    std::mt19937_64 rng(5);
    Matrix v = linalg::randomUnitary(rng, 3) * Vector::LinSpaced(3, 1.0, 4.0).asDiagonal() * linalg::randomUnitary(rng, 3);
    std::vector<Matrix> group;
    for (int a = 0; a < 8; ++a) {
        Matrix d = Matrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) d(i, i) = (a >> i) & 1 ? 1.0 : -1.0;
        group.push_back(v * d * v.inverse());
    }
    auto r = dixmierUnitarizer(group);
    EXPECT_LT(r.unitarityResidual, 1e-10);
    EXPECT_LE(std::max(r.normX, r.normXinv), r.normSup + 1e-10);
}

TEST(Dixmier, SingularAverageRejected) {
    std::vector<Matrix> group{Matrix::Zero(2, 2)};
    try {
        dixmierUnitarizer(group);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
    }
}

TEST(BlockDecompose, ModelOperatorSplitsIntoFactorModels) {
    auto family = std::vector<BlaschkeProduct>{BlaschkeProduct::fromValues({0.3, Complex(0.1, 0.4)}),
                                               BlaschkeProduct::fromValues({Complex(-0.5, -0.2), -0.5, 0.6})};
    ModelOperator m = buildModelOperator(productOf(family));
    auto d = blockDecompose(m.shift, family);
    ASSERT_EQ(d.blocks.size(), 2u);
    EXPECT_LT(d.residual, 1e-9);
    EXPECT_LE(std::max(d.normY, d.normYinv), d.bound);
    // Each block is a copy of the factor's model operator: theta_n kills it and
    // its eigenvalues are theta_n's zeros.
    for (std::size_t n = 0; n < 2; ++n) {
        EXPECT_LT(linalg::spectralNorm(evaluateBlaschke(family[n], d.blocks[n])), 1e-8);
        EXPECT_LE(linalg::spectralNorm(d.blocks[n]), 1.0 + 1e-10);
    }
}

TEST(DiagonalWitness, MatchesPointValues) {
    std::vector<DiskPoint> z{DiskPoint(0.1, 0.0), DiskPoint(0.0, 0.7), DiskPoint(-0.5, -0.5)};
    auto w = diagonalWitness(z, 0.1);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(w.values[i], w.direct[i], 1e-12);
    EXPECT_NEAR(w.minimum, computeCarlesonConstant(z), 1e-12);
    EXPECT_TRUE(w.pass);
    std::vector<DiskPoint> dup{DiskPoint(0.1, 0.0), DiskPoint(0.1, 0.0)};
    EXPECT_THROW(diagonalWitness(dup, 0.1), Error);
}
