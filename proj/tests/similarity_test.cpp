#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "msk/similarity.hpp"

using namespace msk;

namespace {

C0Instance conjugated(const BlaschkeProduct& theta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Matrix q = linalg::randomUnitary(rng, theta.degree());
    C0Instance inst = modelInstance(theta);
    inst.matrix = q * inst.matrix * q.adjoint();
    return inst;
}

// n zeros within eps of a random centre, so eta is small.
BlaschkeProduct cluster(std::mt19937_64& rng, int n, double eps) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Complex c = std::polar(0.5 * std::sqrt(u(rng)), 2 * kPi * u(rng));
    std::vector<DiskPoint> z;
    for (int i = 0; i < n; ++i) z.emplace_back(c + std::polar(eps * u(rng), 2 * kPi * u(rng)));
    return BlaschkeProduct(std::move(z));
}

double brute(const Matrix& t, const BlaschkeProduct& theta, const Vector& xi) {
    // Every sub-multiset of the zero list, by index subsets.
    const int n = theta.degree();
    double best = 1.0;
    for (int mask = 0; mask + 1 < (1 << n); ++mask) {
        std::vector<DiskPoint> z;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) z.push_back(theta.zero(i));
        Matrix m = applyFunction(FunctionRep::blaschke(BlaschkeProduct(z)), t, theta);
        best = std::min(best, (m * xi).norm());
    }
    return best;
}

} // namespace

TEST(AlphaBasis, Examples) {
    auto theta = BlaschkeProduct::fromValues({0.0, 0.0});
    Matrix b = alphaBasis(buildModelOperator(theta).shift, theta, Vector::Unit(2, 0));
    EXPECT_LT(linalg::spectralNorm(Matrix(b - Matrix::Identity(2, 2))), 1e-15);

    auto one = BlaschkeProduct::fromValues({0.3});
    Vector xi(1);
    xi << Complex(0.6, 0.8);
    Matrix b1 = alphaBasis(buildModelOperator(one).shift, one, xi);
    ASSERT_EQ(b1.size(), 1);
    EXPECT_EQ(b1(0, 0), xi(0));

    std::mt19937_64 rng(2);
    auto theta5 = BlaschkeProduct::fromValues({0.1, Complex(0.3, 0.4), -0.5, Complex(0.0, -0.7), 0.2});
    C0Instance inst = conjugated(theta5, 3);
    Matrix b5 = alphaBasis(inst.matrix, theta5, linalg::randomUnitVector(rng, 5));
    for (int k = 0; k < 5; ++k) EXPECT_LE(b5.col(k).norm(), 1 + 1e-10);
}

TEST(AlphaBasis, NonCyclicVectorRejected) {
    auto theta = BlaschkeProduct::fromValues({0.1, 0.5});
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.1;
    d(1, 1) = 0.5;
    try {
        alphaBasis(d, theta, Vector::Unit(2, 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularBasis);
    }
}

TEST(CyclicVector, KernelVectorIsExtremalForSecondFactor) {
    auto theta = BlaschkeProduct::fromValues({Complex(0.2, 0.1), Complex(-0.4, 0.3)});
    Matrix s = buildModelOperator(theta).shift;
    Vector zeta = Vector::Unit(2, 0);
    EXPECT_NEAR((evaluateBlaschke(BlaschkeProduct({theta.zero(1)}), s) * zeta).norm(), 1.0, 1e-14);
}

TEST(CyclicVector, DiagonalVandermonde) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.1;
    d(1, 1) = Complex(0.0, 0.6);
    Vector xi(2);
    xi << 1.0, 1.0;
    xi /= std::sqrt(2.0);
    EXPECT_GT(linalg::krylovSigmaMin(d, xi), 1e-3);
}

TEST(CyclicVector, ThresholdUnreachable) {
    auto theta = BlaschkeProduct::fromValues({0.1, 0.5, -0.3});
    try {
        findCyclicVector(modelInstance(theta), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ThresholdUnreachable);
    }
}

TEST(CyclicVector, SeparatedModelFindsVectorQuickly) {
    std::vector<Complex> pts;
    for (int k = 0; k < 4; ++k) pts.push_back(std::polar(0.8, kPi / 2 * k));
    auto theta = BlaschkeProduct::fromValues(pts);
    ASSERT_GE(computeCarlesonConstant(theta.zeros()), 0.5);
    auto r = findCyclicVector(modelInstance(theta), 0.4, 1000, 0);
    EXPECT_TRUE(r.found);
    EXPECT_LE(r.samplesTried, 1000);
    EXPECT_NEAR(r.vector.norm(), 1.0, 1e-12);
    EXPECT_GT(r.psiNNorm, 0.4);
    EXPECT_GT(r.krylovSigmaMin, 1e-10);
    EXPECT_LE(r.divisorFloor, r.psiNNorm + 1e-15);
}

TEST(DivisorFloor, MatchesBruteForce) {
    std::mt19937_64 rng(8);
    auto theta = BlaschkeProduct::fromValues({0.1, 0.1, Complex(0.3, -0.5), -0.6});
    C0Instance inst = conjugated(theta, 9);
    for (int trial = 0; trial < 5; ++trial) {
        Vector xi = linalg::randomUnitVector(rng, 4);
        auto f = divisorFloor(inst.matrix, theta, xi);
        EXPECT_TRUE(f.exhaustive);
        EXPECT_EQ(f.examined, 11);  // 3 * 2 * 2 - 1
        EXPECT_NEAR(f.value, brute(inst.matrix, theta, xi), 1e-12);
    }
    auto sampled = divisorFloor(inst.matrix, theta, Vector::Unit(4, 0), 6, 1);
    EXPECT_FALSE(sampled.exhaustive);
    EXPECT_GE(sampled.value, divisorFloor(inst.matrix, theta, Vector::Unit(4, 0)).value - 1e-15);
}

TEST(AngleCheck, DegenerateCases) {
    auto one = BlaschkeProduct::fromValues({0.3});
    EXPECT_TRUE(angleCheck(buildModelOperator(one).shift, one, Vector::Unit(1, 0), 0.9).pass);
    auto theta = BlaschkeProduct::fromValues({0.1, 0.5, -0.2});
    std::mt19937_64 rng(4);
    Matrix s = buildModelOperator(theta).shift;
    auto r = angleCheck(s, theta, linalg::randomUnitVector(rng, 3), 0.0);
    EXPECT_EQ(r.cosineBound, 1.0);
    EXPECT_LE(r.worstCosine, 1.0 + 1e-15);
}

TEST(Similarity, BoundArithmetic) {
    EXPECT_NEAR(alphaBasisBound(0.9, 2), std::pow(0.81 / 2 * (1 - std::sqrt(0.19)), -0.5), 1e-14);
    EXPECT_NEAR(alphaBasisBound(0.9, 2), 2.0922, 1e-4);
    EXPECT_EQ(betaGate(2), 0.0);
    EXPECT_NEAR(betaGate(3), std::sqrt(0.75), 1e-15);
}

TEST(Similarity, SelfSimilarityCommutes) {
    std::mt19937_64 rng(11);
    auto theta = cluster(rng, 3, 1e-6);
    C0Instance s = modelInstance(theta);
    auto c = buildSimilarity(s, s, 0.9, 0.9, 5);
    EXPECT_LT(c.intertwineResidual, 1e-10);
    EXPECT_TRUE(c.withinBound());
}

TEST(Similarity, UnitaryConjugatesAreCertified) {
    std::mt19937_64 rng(12);
    for (int n = 2; n <= 6; ++n) {
        auto theta = cluster(rng, n, 1e-9);
        const double beta = n == 2 ? 0.5 : 0.5 * (betaGate(n) + 1.0);
        C0Instance t1 = conjugated(theta, 100 + static_cast<std::uint64_t>(n));
        auto c = buildSimilarity(t1, modelInstance(theta), beta, beta, static_cast<std::uint64_t>(n));
        EXPECT_TRUE(c.residualOk()) << n;
        EXPECT_TRUE(c.withinBound()) << n << " " << c.normX << " " << c.normXinv << " " << *c.theoreticalBound;
        // X u(T1) xi1 = u(T2) X xi1 for random polynomials u.
        for (int trial = 0; trial < 20; ++trial) {
            Vector coeffs = linalg::gaussianVector(rng, n + 2);
            auto u = FunctionRep::polynomial(std::vector<Complex>(coeffs.data(), coeffs.data() + coeffs.size()));
            Vector lhs = c.x * applyFunction(u, t1.matrix, theta) * c.vectors[0];
            Vector rhs = applyFunction(u, modelInstance(theta).matrix, theta) * c.x * c.vectors[0];
            EXPECT_LT((lhs - rhs).norm(), 1e-8 * (1 + rhs.norm()));
        }
    }
}

TEST(Similarity, HypothesisFailures) {
    auto theta = BlaschkeProduct::fromValues({0.0, 0.5});
    C0Instance s = modelInstance(theta);
    try {  // eta = 0.8165 makes the strict inequality impossible
        buildSimilarity(s, s, 0.1, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    }
    C0Instance other = modelInstance(BlaschkeProduct::fromValues({0.5, 0.0}));
    EXPECT_THROW(buildSimilarity(s, other, 0.5, 0.5), Error);
    std::mt19937_64 rng(1);
    auto clustered = modelInstance(cluster(rng, 4, 1e-9));
    try {  // below the gate for N = 4
        buildSimilarity(clustered, clustered, 0.9, 0.99);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    }
}

TEST(IsomorphismBound, Examples) {
    C0Instance repeated = modelInstance(BlaschkeProduct::fromValues({0.3, 0.3}));
    try {
        buildSimilarityFromIsomorphismBound(repeated, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    }
    std::mt19937_64 rng(21);
    auto theta = cluster(rng, 2, 1e-10);
    auto c = buildSimilarityFromIsomorphismBound(modelInstance(theta), 1.01, 3);
    EXPECT_LT(c.intertwineResidual, 1e-9);
    EXPECT_TRUE(c.withinBound());
    auto c2 = buildSimilarityFromIsomorphismBound(conjugated(theta, 4), 1.01, 3);
    EXPECT_TRUE(c2.withinBound());
}

TEST(Dim2LowerBound, ClosedForms) {
    EXPECT_NEAR(dim2LowerBound(0.0, 0.7), 0.7, 1e-15);
    EXPECT_NEAR(dim2LowerBound(Complex(0.1, 0.2), 1.0), 1 - 2 * std::abs(Complex(0.1, 0.2)), 1e-15);
    EXPECT_THROW(dim2LowerBound(0.9, 0.1), Error);
    const double r = dim2Radius(0.9);
    EXPECT_GT(r, 0);
    EXPECT_LE(r, 0.25);
    EXPECT_NEAR(dim2LowerBound(r, 0.9), 0.45, 1e-9);
}

TEST(Dim2LowerBound, MonteCarlo) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto theta = BlaschkeProduct::fromValues(
            {std::polar(0.9 * u(rng), 2 * kPi * u(rng)), std::polar(0.9 * u(rng), 2 * kPi * u(rng))});
        C0Instance t = conjugated(theta, static_cast<std::uint64_t>(trial));
        Vector xi = linalg::randomUnitVector(rng, 2);
        const double beta = (evaluateBlaschke(BlaschkeProduct({theta.zero(0)}), t.matrix) * xi).norm();
        const Complex mu = blaschkeFactor(theta.zero(1), theta.zero(0).value());
        double bound;
        try {
            bound = dim2LowerBound(mu, beta);
        } catch (const Error&) {
            continue;
        }
        const double actual = (evaluateBlaschke(BlaschkeProduct({theta.zero(1)}), t.matrix) * xi).norm();
        EXPECT_GE(actual, bound - 1e-12);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(Dim2, Branches) {
    EXPECT_THROW(buildSimilarityDim2(modelInstance(BlaschkeProduct::fromValues({0.3, 0.3})), 1.1), Error);

    // Separated roots: |mu| = 0.8.
    auto far = BlaschkeProduct::fromValues({0.0, 0.8});
    auto c = buildSimilarityDim2(conjugated(far, 1), 1.2, 0);
    EXPECT_EQ(c.branch, "separated-roots");
    EXPECT_LT(c.intertwineResidual, 1e-9);
    EXPECT_TRUE(c.withinBound());

    // Close roots: |mu| = 0.01.
    auto near = BlaschkeProduct::fromValues({0.3, 0.3 + 0.01 * (1 - 0.09) / (1 + 0.3 * 0.01)});
    EXPECT_NEAR(std::abs(blaschkeFactor(near.zero(1), near.zero(0).value())), 0.01, 1e-3);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto z = buildSimilarityDim2(conjugated(near, seed), 1.05, seed);
        EXPECT_EQ(z.branch, "close-roots");
        EXPECT_TRUE(z.residualOk());
        EXPECT_LE(z.normXinv * z.normXinv, 8.0);
        EXPECT_TRUE(z.withinBound());
    }
}
