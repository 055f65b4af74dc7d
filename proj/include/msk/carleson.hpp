#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msk/blaschke.hpp"
#include "msk/function_rep.hpp"
#include "msk/linalg.hpp"
#include "msk/modelspace.hpp"
#include "msk/types.hpp"

namespace msk {

inline constexpr int kSubsetBudget = 4096;
inline constexpr double kGridSlack = 0.05;

using SubsetMask = std::uint64_t;

/// theta_A for the factors selected by `mask`.
inline BlaschkeProduct subsetProduct(std::span<const BlaschkeProduct> family, SubsetMask mask) {
    BlaschkeProduct out;
    for (std::size_t n = 0; n < family.size(); ++n)
        if (mask & (SubsetMask{1} << n)) out = out * family[n];
    return out;
}

inline void requirePairwiseCoprime(std::span<const BlaschkeProduct> family) {
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j)
            if (family[i].sharesZeroWith(family[j])) {
                std::ostringstream os;
                os << "factors " << i << " and " << j << " share a zero";
                throw Error(ErrorCode::NotCoprime, os.str());
            }
}

struct CoronaCertificate {
    FunctionRep f;
    FunctionRep g;
    double fNorm = 0;
    double gNorm = 0;
    double bezoutResidual = 0;
    double minimalFNorm = 0;
    std::string kind;  // "empty", "full" or "extremal"
};

namespace detail {

struct Extremal {
    double rho = 0;
    Vector maximizing;  // x with ||A x|| = ||A|| ||x||, A = theta_A(S(comp))^{-1}
    Vector image;       // A x
};

inline Extremal extremalPair(const BlaschkeProduct& thetaA, const BlaschkeProduct& comp) {
    Matrix s = buildModelOperator(comp).shift;
    Matrix b = evaluateBlaschke(thetaA, s);
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Index last = b.rows() - 1;
    const double sigma = svd.singularValues()(last);
    if (!(sigma > 0)) throw Error(ErrorCode::NotCoprime, "theta_A(S(complement)) is singular");
    Extremal e;
    e.rho = 1.0 / sigma;
    e.maximizing = svd.matrixU().col(last);
    e.image = svd.matrixV().col(last) / sigma;
    return e;
}

inline std::vector<Complex> toStd(const Vector& v) { return std::vector<Complex>(v.data(), v.data() + v.size()); }

} // namespace detail

/// Bezout pair f theta_A + g comp = 1 with f of least possible sup norm.
///
/// The optimum is ||theta_A(S(comp))^{-1}||. The witness is the extremal
/// function (A x)/x built from a maximizing vector x of that operator, which
/// has constant modulus equal to the optimum on the circle.
inline CoronaCertificate coronaSolve(const BlaschkeProduct& thetaA, const BlaschkeProduct& comp,
                                     int gridSize = boundaryGridSize(), double gridSlack = kGridSlack) {
    if (thetaA.sharesZeroWith(comp)) throw Error(ErrorCode::NotCoprime, "theta_A and its complement share a zero");
    CoronaCertificate c;
    if (comp.empty()) {
        c.f = FunctionRep::constant(0.0);
        c.g = FunctionRep::constant(1.0);
        c.gNorm = 1.0;
        c.kind = "full";
        return c;
    }
    if (thetaA.empty()) {
        c.f = FunctionRep::constant(1.0);
        c.g = FunctionRep::constant(0.0);
        c.fNorm = 1.0;
        c.minimalFNorm = 1.0;
        c.kind = "empty";
        return c;
    }
    detail::Extremal e = detail::extremalPair(thetaA, comp);
    c.minimalFNorm = e.rho;
    c.f = FunctionRep::ratio(FunctionRep::modelVector(comp, detail::toStd(e.image)),
                             FunctionRep::modelVector(comp, detail::toStd(e.maximizing)));
    c.g = FunctionRep::quotient(FunctionRep::constant(1.0) - c.f * FunctionRep::blaschke(thetaA), comp);
    c.kind = "extremal";
    for (const Complex& z : linalg::circleGrid(gridSize)) {
        const Complex fz = c.f(z);
        const Complex gz = c.g(z);
        c.fNorm = std::max(c.fNorm, std::abs(fz));
        c.gNorm = std::max(c.gNorm, std::abs(gz));
        c.bezoutResidual = std::max(c.bezoutResidual, std::abs(fz * thetaA(z) + gz * comp(z) - 1.0));
    }
    if (!std::isfinite(c.fNorm) || c.fNorm > e.rho * (1.0 + gridSlack)) {
        std::ostringstream os;
        os << "witness sup norm " << c.fNorm << " exceeds optimum " << e.rho << " by more than the grid slack";
        throw Error(ErrorCode::OptimizationStalled, os.str());
    }
    return c;
}

/// Interpolating polynomial of 1/theta_A at the zeros of comp: the cheapest
/// member of the admissible coset.
inline FunctionRep coronaInterpolant(const BlaschkeProduct& thetaA, const BlaschkeProduct& comp) {
    return hermiteDataOf(FunctionRep::quotient(FunctionRep::constant(1.0), thetaA), comp);
}

struct CosetReport {
    double exact = 0;        // 1 / sigma_min(theta_A(S(comp)))
    double interpolant = 0;  // ||f0(S(comp))||
    double shifted = 0;      // ||(f0 + comp p)(S(comp))|| for a random polynomial p
    double gap = 0;          // largest relative deviation from `exact`
};

/// The quotient norm of the admissible coset does not depend on the member
/// chosen; measures that on three members.
inline CosetReport cosetInvariance(const BlaschkeProduct& thetaA, const BlaschkeProduct& comp, std::uint64_t seed) {
    CosetReport r;
    r.exact = detail::extremalPair(thetaA, comp).rho;
    FunctionRep f0 = coronaInterpolant(thetaA, comp);
    ModelOperator m = buildModelOperator(comp);
    r.interpolant = quotientNorm(f0, m);
    std::mt19937_64 rng(seed);
    Vector coeffs = linalg::gaussianVector(rng, 4);
    FunctionRep shifted = f0 + FunctionRep::blaschke(comp) * FunctionRep::polynomial(detail::toStd(coeffs));
    r.shifted = quotientNorm(shifted, m);
    const double scale = std::max(1.0, r.exact);
    r.gap = std::max(std::abs(r.interpolant - r.exact), std::abs(r.shifted - r.exact)) / scale;
    return r;
}

struct CoronaRow {
    SubsetMask mask = 0;
    double fNorm = 0;
    double gNorm = 0;
    double residual = 0;
    double minimalFNorm = 0;
};

struct CarlesonReport {
    double constant = 0;
    std::vector<CoronaRow> table;
    bool exhaustive = true;
    int subsetsExamined = 0;
    int factors = 0;
};

/// max over subsets A of max(||f_A||, ||g_A||) for the extremal corona pairs.
/// Exhaustive when 2^m <= subsetBudget, otherwise a seeded uniform sample of
/// subsetBudget subsets (always including the empty and full sets).
inline CarlesonReport generalizedCarlesonConstant(std::span<const BlaschkeProduct> family,
                                                  int subsetBudget = kSubsetBudget, std::uint64_t seed = 0) {
    requirePairwiseCoprime(family);
    const int m = static_cast<int>(family.size());
    if (m > 62) throw Error(ErrorCode::SizeCapExceeded, "at most 62 factors are supported");
    CarlesonReport r;
    r.factors = m;
    const SubsetMask full = m == 0 ? 0 : (~SubsetMask{0} >> (64 - m));
    std::vector<SubsetMask> masks;
    if (std::ldexp(1.0, m) <= subsetBudget) {
        for (SubsetMask a = 0; a <= full; ++a) {
            masks.push_back(a);
            if (a == full) break;
        }
    } else {
        r.exhaustive = false;
        std::mt19937_64 rng(seed);
        masks = {0, full};
        while (static_cast<int>(masks.size()) < subsetBudget) masks.push_back(rng() & full);
    }
    const BlaschkeProduct theta = productOf(family);
    for (SubsetMask a : masks) {
        const BlaschkeProduct thetaA = subsetProduct(family, a);
        const BlaschkeProduct comp = subsetProduct(family, full & ~a);
        CoronaCertificate c = coronaSolve(thetaA, comp);
        r.table.push_back({a, c.fNorm, c.gNorm, c.bezoutResidual, c.minimalFNorm});
        r.constant = std::max({r.constant, c.fNorm, c.gNorm});
    }
    r.subsetsExamined = static_cast<int>(masks.size());
    return r;
}

/// phi_A(T) = (g_A theta/theta_A)(T) from the interpolating corona solution.
inline Matrix idempotentOf(const Matrix& t, const BlaschkeProduct& theta, const BlaschkeProduct& thetaA,
                           const BlaschkeProduct& comp) {
    const Eigen::Index n = t.rows();
    if (thetaA.empty()) return Matrix::Zero(n, n);
    if (comp.empty()) return Matrix::Identity(n, n);
    FunctionRep f0 = coronaInterpolant(thetaA, comp);
    FunctionRep g = FunctionRep::quotient(FunctionRep::constant(1.0) - f0 * FunctionRep::blaschke(thetaA), comp);
    return applyFunction(g * FunctionRep::blaschke(comp), t, theta);
}

/// Same idempotent from an arbitrary corona pair (f, g).
inline Matrix idempotentOf(const Matrix& t, const BlaschkeProduct& theta, const BlaschkeProduct& comp,
                           const CoronaCertificate& c) {
    return applyFunction(c.g * FunctionRep::blaschke(comp), t, theta);
}

struct GroupLawReport {
    double involution = 0;    // max ||k_A^2 - I|| / scale
    double product = 0;       // max ||k_A k_B - k_{complement of A xor B}|| / scale
    double intersection = 0;  // max ||phi_A phi_B - phi_{A and B}|| / scale
    double fullIsIdentity = 0;
    std::int64_t pairsChecked = 0;
    bool exhaustive = true;

    double worst() const { return std::max({involution, product, intersection, fullIsIdentity}); }
};

struct InvolutionGroup {
    std::vector<BlaschkeProduct> family;
    std::vector<Matrix> idempotents;  // index = subset mask
    std::vector<Matrix> elements;     // k_A = 2 phi_A - I
    double normSup = 0;
    GroupLawReport laws;

    SubsetMask fullMask() const {
        return family.empty() ? 0 : (~SubsetMask{0} >> (64 - family.size()));
    }
};

inline GroupLawReport checkGroupLaws(const InvolutionGroup& g, std::int64_t pairBudget = 65536, std::uint64_t seed = 0) {
    GroupLawReport r;
    const Eigen::Index n = g.elements.empty() ? 0 : g.elements.front().rows();
    const Matrix eye = Matrix::Identity(n, n);
    const SubsetMask full = g.fullMask();
    const std::size_t count = g.elements.size();
    std::vector<double> norms(count);
    for (std::size_t a = 0; a < count; ++a) {
        norms[a] = linalg::spectralNorm(g.elements[a]);
        const double scale = std::max(1.0, norms[a] * norms[a]);
        r.involution = std::max(r.involution, linalg::spectralNorm(Matrix(g.elements[a] * g.elements[a] - eye)) / scale);
    }
    r.fullIsIdentity = linalg::spectralNorm(Matrix(g.elements[full] - eye));
    auto pair = [&](SubsetMask a, SubsetMask b) {
        const double scale = std::max(1.0, norms[a] * norms[b]);
        const SubsetMask c = full & ~(a ^ b);
        r.product = std::max(r.product,
                             linalg::spectralNorm(Matrix(g.elements[a] * g.elements[b] - g.elements[c])) / scale);
        r.intersection = std::max(
            r.intersection,
            linalg::spectralNorm(Matrix(g.idempotents[a] * g.idempotents[b] - g.idempotents[a & b])) / scale);
        ++r.pairsChecked;
    };
    if (static_cast<double>(count) * static_cast<double>(count) <= static_cast<double>(pairBudget)) {
        for (SubsetMask a = 0; a < count; ++a)
            for (SubsetMask b = 0; b < count; ++b) pair(a, b);
    } else {
        r.exhaustive = false;
        std::mt19937_64 rng(seed);
        for (std::int64_t i = 0; i < pairBudget; ++i) pair(rng() & full, rng() & full);
    }
    return r;
}

/// The commuting involutions k_A of a C0 operator whose minimal function is
/// the product of a pairwise coprime family.
inline InvolutionGroup buildInvolutionGroup(const Matrix& t, std::span<const BlaschkeProduct> family,
                                            double lawTol = 1e-8) {
    requirePairwiseCoprime(family);
    const int m = static_cast<int>(family.size());
    if (std::ldexp(1.0, m) > kSubsetBudget) throw Error(ErrorCode::SizeCapExceeded, "group has more than 4096 elements");
    const BlaschkeProduct theta = productOf(family);
    if (theta.degree() != t.rows()) throw Error(ErrorCode::HypothesisViolated, "family degree differs from the dimension");
    InvolutionGroup g;
    g.family.assign(family.begin(), family.end());
    const SubsetMask full = g.fullMask();
    const Matrix eye = Matrix::Identity(t.rows(), t.cols());
    for (SubsetMask a = 0;; ++a) {
        Matrix phi = idempotentOf(t, theta, subsetProduct(family, a), subsetProduct(family, full & ~a));
        g.elements.push_back(2.0 * phi - eye);
        g.idempotents.push_back(std::move(phi));
        g.normSup = std::max(g.normSup, linalg::spectralNorm(g.elements.back()));
        if (a == full) break;
    }
    g.laws = checkGroupLaws(g);
    if (g.laws.worst() > lawTol) {
        std::ostringstream os;
        os << "group law residual " << g.laws.worst() << " exceeds " << lawTol;
        throw Error(ErrorCode::GroupLawViolation, os.str());
    }
    return g;
}

/// Largest difference between phi_A(T) computed from the interpolating
/// corona pair and from the extremal one, over the given subsets.
inline double wellDefinednessGap(const Matrix& t, std::span<const BlaschkeProduct> family,
                                 const std::vector<SubsetMask>& masks) {
    const BlaschkeProduct theta = productOf(family);
    const SubsetMask full = family.empty() ? 0 : (~SubsetMask{0} >> (64 - family.size()));
    double gap = 0;
    for (SubsetMask a : masks) {
        const BlaschkeProduct thetaA = subsetProduct(family, a);
        const BlaschkeProduct comp = subsetProduct(family, full & ~a);
        if (thetaA.empty() || comp.empty()) continue;
        Matrix p1 = idempotentOf(t, theta, thetaA, comp);
        Matrix p2 = idempotentOf(t, theta, comp, coronaSolve(thetaA, comp));
        gap = std::max(gap, linalg::spectralNorm(Matrix(p1 - p2)) / std::max(1.0, linalg::spectralNorm(p1)));
    }
    return gap;
}

struct DixmierReport {
    Matrix x;
    Matrix xInverse;
    double normX = 0;
    double normXinv = 0;
    double unitarityResidual = 0;
    double normSup = 0;  // measured sup of ||k|| over the group
};

/// X = (mean of k* k)^{1/2}; X k X^{-1} is unitary for every k of the
/// finite group.
inline DixmierReport dixmierUnitarizer(const std::vector<Matrix>& group) {
    if (group.empty()) throw Error(ErrorCode::NotApplicable, "empty group");
    const Eigen::Index n = group.front().rows();
    Matrix m = Matrix::Zero(n, n);
    DixmierReport r;
    for (const auto& k : group) {
        m += k.adjoint() * k;
        r.normSup = std::max(r.normSup, linalg::spectralNorm(k));
    }
    m /= static_cast<double>(group.size());
    m = 0.5 * (m + m.adjoint()).eval();
    double minEig = 0;
    r.x = linalg::hermitianSqrt(m, &minEig);
    if (!(minEig > 0)) throw Error(ErrorCode::NotPositiveDefinite, "averaged Gram operator is not positive definite");
    r.xInverse = r.x.inverse();
    r.normX = linalg::spectralNorm(r.x);
    r.normXinv = linalg::spectralNorm(r.xInverse);
    const Matrix eye = Matrix::Identity(n, n);
    for (const auto& k : group) {
        Matrix u = r.x * k * r.xInverse;
        r.unitarityResidual = std::max(r.unitarityResidual, linalg::spectralNorm(Matrix(u.adjoint() * u - eye)));
    }
    return r;
}

inline DixmierReport dixmierUnitarizer(const InvolutionGroup& group) { return dixmierUnitarizer(group.elements); }

struct BlockDecomposition {
    Matrix y;         // Y T Y^{-1} = blockdiag(blocks)
    Matrix yInverse;  // columns: orthonormal bases of ker theta_n(T), in family order
    std::vector<Matrix> blocks;
    double normY = 0;
    double normYinv = 0;
    double residual = 0;  // ||Y T Y^{-1} - blockdiag(blocks)||
    double carlesonConstant = 0;
    double bound = 0;     // (2C + 1)^2
    double groupNormSup = 0;
    double unitarityResidual = 0;
    GroupLawReport laws;
};

/// Y T Y^{-1} = direct sum of T restricted to ker theta_n(T).
///
/// The Dixmier conjugate of phi_{n}(T) is an orthogonal projection; its
/// range, pulled back by X^{-1}, is ker theta_n(T). Y^{-1} stacks orthonormal
/// bases of those kernels, so every block is the restriction written in an
/// orthonormal basis.
inline BlockDecomposition blockDecompose(const Matrix& t, std::span<const BlaschkeProduct> family) {
    InvolutionGroup group = buildInvolutionGroup(t, family);
    DixmierReport dix = dixmierUnitarizer(group);
    CarlesonReport carleson = generalizedCarlesonConstant(family);
    const Eigen::Index n = t.rows();
    BlockDecomposition d;
    d.yInverse = Matrix(n, n);
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const int dim = family[i].degree();
        Matrix p = dix.x * group.idempotents[SubsetMask{1} << i] * dix.xInverse;
        Matrix q = linalg::rangeBasis(Matrix(0.5 * (p + p.adjoint())), dim);
        Matrix pulled = dix.xInverse * q;
        Eigen::HouseholderQR<Matrix> qr(pulled);
        Matrix k = qr.householderQ() * Matrix::Identity(n, dim);
        d.yInverse.middleCols(col, dim) = k;
        d.blocks.push_back(k.adjoint() * t * k);
        col += dim;
    }
    d.y = d.yInverse.inverse();
    d.normY = linalg::spectralNorm(d.y);
    d.normYinv = linalg::spectralNorm(d.yInverse);
    d.residual = linalg::spectralNorm(Matrix(d.y * t * d.yInverse - linalg::blockDiagonal(d.blocks)));
    d.carlesonConstant = carleson.constant;
    d.bound = std::pow(2.0 * carleson.constant + 1.0, 2);
    d.groupNormSup = group.normSup;
    d.unitarityResidual = dix.unitarityResidual;
    d.laws = group.laws;
    return d;
}

struct DiagonalWitness {
    std::vector<double> values;  // ||psi_n(T)|| for T = diag(lambda)
    std::vector<double> direct;  // |psi_n(lambda_n)|
    double minimum = 1.0;
    bool pass = true;
};

/// For T = diag(lambda_1, ..., lambda_m): ||psi_n(T)|| = |psi_n(lambda_n)|,
/// compared against beta.
inline DiagonalWitness diagonalWitness(std::span<const DiskPoint> zeros, double beta) {
    computeCarlesonConstant(zeros);  // rejects duplicates
    const int m = static_cast<int>(zeros.size());
    BlaschkeProduct theta(std::vector<DiskPoint>(zeros.begin(), zeros.end()));
    Matrix t = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = zeros[static_cast<std::size_t>(i)].value();
    DiagonalWitness w;
    for (int i = 0; i < m; ++i) {
        BlaschkeProduct psi = theta.withoutIndex(i);
        w.values.push_back(linalg::spectralNorm(evaluateBlaschke(psi, t)));
        w.direct.push_back(std::abs(psi(zeros[static_cast<std::size_t>(i)].value())));
        w.minimum = std::min(w.minimum, w.values.back());
        w.pass = w.pass && w.values.back() >= beta;
    }
    return w;
}

} // namespace msk
