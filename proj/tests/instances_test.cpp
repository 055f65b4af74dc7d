#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "msk/instances.hpp"

using namespace msk;

namespace {

BlaschkeProduct sampleTheta(std::mt19937_64& rng, int n, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<DiskPoint> z;
    for (int i = 0; i < n; ++i) z.emplace_back(std::polar(radius * std::sqrt(u(rng)), 2 * kPi * u(rng)));
    return BlaschkeProduct(std::move(z));
}

} // namespace

TEST(Generate, ModelItself) {
    auto theta = BlaschkeProduct::fromValues({0.1, Complex(0.2, -0.4), 0.1});
    auto inst = generate({theta, 1.0, 0, GeneratorKind::ModelItself});
    EXPECT_EQ(inst.matrix, buildModelOperator(theta).shift);
    EXPECT_TRUE(validate(inst).pass());
}

TEST(Generate, UnitaryConjugateKeepsSingularValues) {
    auto theta = BlaschkeProduct::fromValues({0.1, Complex(0.2, -0.4), -0.7, Complex(0.5, 0.5)});
    auto inst = generate({theta, 1.0, 3, GeneratorKind::UnitaryConjugate});
    Eigen::VectorXd a = linalg::singularValues(inst.matrix);
    Eigen::VectorXd b = linalg::singularValues(buildModelOperator(theta).shift);
    EXPECT_LT((a - b).norm(), 1e-10);
    // Conditioning 1 forces a unitary conjugate.
    auto forced = generate({theta, 1.0, 3, GeneratorKind::InvertibleConjugate});
    EXPECT_EQ(forced.provenance.generator, "unitaryConjugate");
}

TEST(Generate, DiagonalIfDistinct) {
    auto theta = BlaschkeProduct::fromValues({0.1, Complex(0.2, -0.4)});
    auto inst = generate({theta, 1.0, 0, GeneratorKind::DiagonalIfDistinct});
    Matrix want = Matrix::Zero(2, 2);
    want(0, 0) = 0.1;
    want(1, 1) = Complex(0.2, -0.4);
    EXPECT_EQ(inst.matrix, want);
    EXPECT_TRUE(validate(inst).pass());
    auto repeated = generate({BlaschkeProduct::fromValues({0.3, 0.3}), 1.0, 0, GeneratorKind::DiagonalIfDistinct});
    EXPECT_EQ(repeated.provenance.generator, "modelItself");
}

TEST(Generate, InvertibleConjugatesHitConditioningAndValidate) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        auto theta = sampleTheta(rng, 2 + trial % 5, 0.9);
        const double cond = trial % 2 ? 1.005 : 10.0;
        auto inst = generate({theta, cond, static_cast<std::uint64_t>(trial), GeneratorKind::InvertibleConjugate});
        EXPECT_NEAR(inst.provenance.conditioning, cond, 1e-6 * cond);
        auto report = validate(inst);
        EXPECT_TRUE(report.pass()) << trial;
        // Eigenvalues are the zeros.
        Eigen::ComplexEigenSolver<Matrix> es(inst.matrix);
        for (const auto& z : theta.zeros()) {
            double best = 1;
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                best = std::min(best, std::abs(es.eigenvalues()(i) - z.value()));
            EXPECT_LT(best, 1e-6);
        }
        // Similarity invariance: ||u(V S V^-1)|| <= cond(V) ||u(S)||.
        auto s = buildModelOperator(theta);
        for (int j = 0; j < theta.degree(); ++j) {
            auto psi = FunctionRep::blaschke(theta.withoutIndex(j));
            EXPECT_LE(linalg::spectralNorm(applyFunction(psi, inst.matrix, theta)),
                      inst.provenance.conditioning * linalg::spectralNorm(applyFunction(psi, s.shift, theta)) + 1e-9);
        }
    }
}

TEST(Generate, Deterministic) {
    auto theta = BlaschkeProduct::fromValues({0.1, Complex(0.2, -0.4), -0.6});
    GeneratorSpec spec{theta, 3.0, 17, GeneratorKind::InvertibleConjugate};
    EXPECT_EQ(generate(spec).matrix, generate(spec).matrix);
}

TEST(Validate, CorruptedInputsFail) {
    auto theta = BlaschkeProduct::fromValues({0.1, Complex(0.2, -0.4), -0.6});
    auto inst = generate({theta, 1.0, 2, GeneratorKind::UnitaryConjugate});
    auto zeroRow = inst;
    zeroRow.matrix.row(1).setZero();
    EXPECT_FALSE(validate(zeroRow).pass());
    auto scaled = inst;
    scaled.matrix *= 1.5;
    EXPECT_FALSE(validate(scaled).pass());
    auto wrongTheta = inst;
    wrongTheta.theta = BlaschkeProduct::fromValues({0.1, Complex(0.2, -0.4), -0.6, 0.3});
    EXPECT_FALSE(validate(wrongTheta).pass());
}

TEST(Validate, PsiKernelDimensions) {
    auto theta = BlaschkeProduct::fromValues({0.1, Complex(0.2, -0.4), 0.1, 0.6});
    auto report = validate(generate({theta, 1.0, 0, GeneratorKind::ModelItself}));
    ASSERT_EQ(report.psiKernelDims.size(), 4u);
    for (int d : report.psiKernelDims) EXPECT_EQ(d, 3);
}
