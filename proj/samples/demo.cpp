// Walkthrough: build a compressed shift, hide it behind a conjugation, and
// recover a similarity certificate.

#include <cstdio>

#include "msk/msk.hpp"

using namespace msk;

int main() {
    // Three nearly coincident zeros: eta is tiny, so the certificate route applies.
    const auto theta = BlaschkeProduct::fromValues({Complex(0.3, 0.2), Complex(0.3 + 1e-10, 0.2), Complex(0.3, 0.2 + 1e-10)});
    std::printf("eta = %.6g, gate for N = 3 is %.6g\n", computeEta(theta), betaGate(3));

    const ModelOperator s = buildModelOperator(theta);
    std::printf("||theta(S)|| = %.6g\n", linalg::spectralNorm(evaluateBlaschke(theta, s.shift)));

    const C0Instance t = generate({theta, 1.0, 7, GeneratorKind::UnitaryConjugate});
    const SimilarityCertificate c = buildSimilarity(t, modelInstance(theta), 0.93, 0.93, 7);
    std::printf("branch %s: ||X|| = %.6g, ||X^-1|| = %.6g, bound %.6g, residual %.6g\n", c.branch.c_str(), c.normX,
                c.normXinv, *c.theoreticalBound, c.intertwineResidual);

    // Two factors: split T into blocks and read off the corona constant.
    std::vector<BlaschkeProduct> family{BlaschkeProduct::fromValues({0.1, 0.3}), BlaschkeProduct::fromValues({-0.5})};
    const C0Instance u = generate({productOf(family), 2.0, 3, GeneratorKind::InvertibleConjugate});
    const BlockDecomposition d = blockDecompose(u.matrix, family);
    std::printf("blocks: C = %.6g, max(||Y||, ||Y^-1||) = %.6g <= (2C+1)^2 = %.6g\n", d.carlesonConstant,
                std::max(d.normY, d.normYinv), d.bound);
    return c.residualOk() && c.withinBound() ? 0 : 1;
}
