#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "msk/blaschke.hpp"
#include "msk/oracles.hpp"

using namespace msk;

namespace {

DiskPoint randomPoint(std::mt19937_64& rng, double maxRadius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = maxRadius * std::sqrt(u(rng));
    return DiskPoint(std::polar(r, 2.0 * kPi * u(rng)));
}

} // namespace

TEST(DiskPoint, RejectsPointsNearTheBoundary) {
    EXPECT_NO_THROW(DiskPoint(0.999, 0.0));
    EXPECT_THROW(DiskPoint(0.9991, 0.0), Error);
    EXPECT_THROW(DiskPoint(Complex(0.0, 1.0)), Error);
    try {
        DiskPoint(2.0, 0.0);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidPoint);
    }
}

TEST(BlaschkeFactor, Examples) {
    EXPECT_NEAR(std::abs(blaschkeFactor(DiskPoint(0, 0), 0.5) - 0.5), 0.0, 1e-15);
    EXPECT_EQ(blaschkeFactor(DiskPoint(0.5, 0), 0.5), Complex(0.0));
    EXPECT_NEAR(std::abs(blaschkeFactor(DiskPoint(0.5, 0), 0.0) - (-0.5)), 0.0, 1e-15);
}

TEST(BlaschkeFactor, UnimodularOnTheCircle) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        DiskPoint l = randomPoint(rng, 0.99);
        for (int i = 0; i < 512; ++i) {
            Complex z = std::polar(1.0, 2.0 * kPi * i / 512);
            EXPECT_NEAR(std::abs(blaschkeFactor(l, z)), 1.0, 1e-12);
        }
        EXPECT_LT(std::abs(blaschkeFactor(l, 0.3 * std::polar(1.0, 0.2))), 1.0);
    }
}

TEST(Kernel, Examples) {
    EXPECT_EQ(kernel(DiskPoint(0, 0), Complex(0.7, 0.1)), Complex(1.0));
    EXPECT_NEAR(std::abs(kernel(DiskPoint(0.5, 0), 0.5) - 4.0 / 3.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(normalizedKernel(DiskPoint(0.5, 0), 0.0) - 0.75), 0.0, 1e-15);
}

TEST(BlaschkeInnerProduct, Examples) {
    DiskPoint a(0.3, -0.4);
    EXPECT_NEAR(std::abs(blaschkeInnerProduct(a, a) - 1.0), 0.0, 1e-15);
    // Power-series oracle: <b_0, b_0.5> = conj of z-coefficient of b_0.5 = 0.75.
    const Complex series = oracle::blaschkeInnerProductSeries(DiskPoint(0, 0), DiskPoint(0.5, 0));
    EXPECT_NEAR(std::abs(series - 0.75), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(blaschkeInnerProduct(DiskPoint(0, 0), DiskPoint(0.5, 0)) - 0.75), 0.0, 1e-15);
}

TEST(BlaschkeInnerProduct, MatchesQuadratureOnRandomPairs) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        DiskPoint a = randomPoint(rng, 0.99);
        DiskPoint b = randomPoint(rng, 0.99);
        EXPECT_NEAR(std::abs(blaschkeInnerProduct(a, b) - oracle::blaschkeInnerProductQuadrature(a, b)), 0.0, 1e-10);
    }
}

TEST(BlaschkeProduct, EmptyProductIsOne) {
    BlaschkeProduct one;
    EXPECT_EQ(one(Complex(0.3, 0.2)), Complex(1.0));
    EXPECT_EQ(one.degree(), 0);
}

TEST(BlaschkeProduct, DivisorAlgebra) {
    auto theta = BlaschkeProduct::fromValues({0.1, 0.1, Complex(0, 0.5)});
    EXPECT_EQ(theta.distinctZeros().size(), 2u);
    EXPECT_TRUE(theta.hasRepeatedZero());
    auto phi = BlaschkeProduct::fromValues({0.1, Complex(0, 0.5)});
    EXPECT_TRUE(theta.isDivisibleBy(phi));
    EXPECT_TRUE(theta.dividedBy(phi).sameZeroMultiset(BlaschkeProduct::fromValues({0.1})));
    EXPECT_FALSE(phi.isDivisibleBy(theta));
    EXPECT_TRUE(theta.withoutIndex(2).sameZeroMultiset(BlaschkeProduct::fromValues({0.1, 0.1})));
    EXPECT_EQ(theta.prefix(0).degree(), 0);
}

TEST(Eta, Examples) {
    EXPECT_EQ(computeEta(BlaschkeProduct::fromValues({0.4})), 0.0);
    EXPECT_NEAR(computeEta(BlaschkeProduct::fromValues({0.0, 0.5})), std::sqrt(0.5) / std::sqrt(0.75), 1e-15);
    EXPECT_NEAR(computeEta(BlaschkeProduct::fromValues({0.0, 0.5})), 0.81650, 1e-5);
    EXPECT_EQ(computeEta(BlaschkeProduct::fromValues({Complex(0.2, 0.3), Complex(0.2, 0.3)})), 0.0);
}

TEST(CarlesonConstant, Examples) {
    std::vector<DiskPoint> one{DiskPoint(0.3, 0.0)};
    EXPECT_EQ(computeCarlesonConstant(one), 1.0);
    std::vector<DiskPoint> two{DiskPoint(0, 0), DiskPoint(0.5, 0)};
    EXPECT_NEAR(computeCarlesonConstant(two), 0.5, 1e-15);

    std::vector<DiskPoint> three{DiskPoint(0, 0), DiskPoint(0.5, 0), DiskPoint(-0.5, 0)};
    // Brute-force enumeration of each k-product.
    double brute = 1.0;
    for (int k = 0; k < 3; ++k) {
        double prod = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j == k) continue;
            const Complex a = three[static_cast<std::size_t>(j)].value();
            const Complex b = three[static_cast<std::size_t>(k)].value();
            prod *= std::abs((a - b) / (1.0 - std::conj(a) * b));
        }
        brute = std::min(brute, prod);
    }
    EXPECT_NEAR(computeCarlesonConstant(three), brute, 1e-15);
    EXPECT_NEAR(brute, 0.25, 1e-15);  // k=0: |b_0.5(0)| * |b_-0.5(0)|

    std::vector<DiskPoint> dup{DiskPoint(0.1, 0), DiskPoint(0.1, 0)};
    try {
        computeCarlesonConstant(dup);
        FAIL() << "duplicate accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicatePoint);
    }
}

TEST(Delta, Examples) {
    std::vector<BlaschkeProduct> singletons{BlaschkeProduct::fromValues({0.1}), BlaschkeProduct::fromValues({-0.4})};
    EXPECT_EQ(computeDelta(singletons), 1.0);
    std::vector<BlaschkeProduct> repeated{BlaschkeProduct::fromValues({0.3, 0.3})};
    EXPECT_EQ(computeDelta(repeated), 0.0);
    std::vector<BlaschkeProduct> pair{BlaschkeProduct::fromValues({0.0, 0.5})};
    EXPECT_NEAR(computeDelta(pair), std::sqrt(0.5), 1e-15);
}

TEST(Delta, BoundedByEtaWheneverPairsExist) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<BlaschkeProduct> family;
        const int m = 1 + static_cast<int>(rng() % 4);
        for (int n = 0; n < m; ++n) {
            std::vector<DiskPoint> z;
            const int deg = 2 + static_cast<int>(rng() % 3);
            for (int k = 0; k < deg; ++k) z.push_back(randomPoint(rng, 0.95));
            family.emplace_back(std::move(z));
        }
        SequenceConstants c = computeSequenceConstants(family);
        ASSERT_TRUE(c.hasZeroPair);
        EXPECT_GE(c.delta, 0.0);
        EXPECT_LE(c.delta, c.eta);
    }
}

// Pairwise estimates on random pairs; left sides by independent routes.
TEST(PairEstimates, HoldOnRandomPairs) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        DiskPoint a = randomPoint(rng, 0.99);
        DiskPoint b = randomPoint(rng, 0.99);
        const double rho = pseudoHyperbolic(a, b);

        const double diffB = std::sqrt(std::max(0.0, 2.0 - 2.0 * blaschkeInnerProduct(a, b).real()));
        EXPECT_LE(diffB, 2.0 * std::sqrt(rho) + 1e-12);

        // theta = b_a b_b, psi_a = b_b, psi_b = b_a.
        const double diffPsi = oracle::h2Norm(
            [&](Complex z) { return blaschkeFactor(b, z) * normalizedKernel(a, z) - blaschkeFactor(a, z) * normalizedKernel(b, z); });
        EXPECT_LE(diffPsi, 4.0 * std::sqrt(rho) + 1e-10);

        const Complex x = a.value(), y = b.value();
        const double kk = 1.0 / (1.0 - std::norm(x)) + 1.0 / (1.0 - std::norm(y)) -
                          2.0 * (1.0 / (1.0 - std::conj(x) * y)).real();
        EXPECT_LE(std::sqrt(std::max(0.0, kk)), std::sqrt(rho) * std::sqrt(1.0 / (1.0 - std::norm(x)) + 1.0 / (1.0 - std::norm(y))) + 1e-9);
    }
}
