#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msk/carleson.hpp"
#include "msk/similarity.hpp"

namespace msk {

struct PipelineBlock {
    int index = 0;
    int degree = 0;
    std::string route;  // "scalar", "dim2" or "isomorphism-bound"
    double normX = 1;
    double normXinv = 1;
    double bound = 1;
};

struct PipelineReport {
    SimilarityCertificate certificate;
    std::vector<PipelineBlock> blocks;
    std::string route;  // "two-root" when every factor has at most two zeros, else "general"
    double eta = 0;
    double effectiveBeta = 0;  // beta - 5 sqrt2 eta on the general route
    double gate = 0;
    double worstRestrictedRatio = 0;  // min restrictedNorm / (beta quotientNorm) over spot checks
    double decompositionBoundT = 0;
    double decompositionBoundS = 0;
};

namespace detail {

inline double blockBound(const SimilarityCertificate& c) {
    double b = c.theoreticalBound.value_or(std::max(c.normX, c.normXinv));
    if (c.inverseBound) b = std::max(b, *c.inverseBound);
    return b;
}

} // namespace detail

/// Similarity of T to S(theta) through the factorization theta = prod theta_n:
/// split both operators along the family, build a similarity per block, and
/// reassemble.
inline PipelineReport similarityPipeline(const C0Instance& t, std::span<const BlaschkeProduct> family, double beta,
                                         std::uint64_t seed = 0, int maxSamples = kDefaultMaxSamples) {
    const BlaschkeProduct theta = productOf(family);
    detail::hypothesis(theta.sameZeroMultiset(t.theta), "product of the family differs from the minimal function");
    detail::hypothesis(beta > 0 && beta <= 1, "beta must lie in (0, 1]");
    requirePairwiseCoprime(family);
    PipelineReport r;
    int nMax = 0;
    bool twoRoot = true;
    for (const auto& f : family) {
        nMax = std::max(nMax, f.degree());
        twoRoot = twoRoot && f.degree() <= 2;
    }
    r.eta = computeEta(family);
    r.route = twoRoot ? "two-root" : "general";
    r.gate = betaGate(nMax);
    r.effectiveBeta = beta - kFiveRootTwo * r.eta;
    if (!twoRoot) {
        detail::hypothesis(r.gate < r.effectiveBeta && r.effectiveBeta < 1,
                           "beta - 5 sqrt2 eta = " + detail::fmt(r.effectiveBeta) + " is outside (" +
                               detail::fmt(r.gate) + ", 1)");
    }

    // Spot check of ||u(T)|ker theta_n(T)|| >= beta ||u||_{H^inf / theta_n H^inf}.
    std::mt19937_64 rng(seed);
    r.worstRestrictedRatio = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < family.size(); ++n) {
        const BlaschkeProduct& fn = family[n];
        std::vector<FunctionRep> probes;
        for (int j = 0; j < fn.degree(); ++j) {
            probes.push_back(FunctionRep::blaschke(fn.withoutIndex(j)));
            probes.push_back(FunctionRep::blaschke(BlaschkeProduct({fn.zero(j)})));
        }
        for (int k = 0; k < 3; ++k) {
            Vector c = linalg::gaussianVector(rng, fn.degree() + 1);
            probes.push_back(FunctionRep::polynomial(std::vector<Complex>(c.data(), c.data() + c.size())));
        }
        ModelOperator local = buildModelOperator(fn);
        for (const auto& u : probes) {
            const double q = quotientNorm(u, local);
            if (q < 1e-12) continue;
            const double ratio = restrictedNorm(u, t.matrix, fn, theta) / (beta * q);
            r.worstRestrictedRatio = std::min(r.worstRestrictedRatio, ratio);
            detail::hypothesis(ratio >= 1 - 1e-9, "restricted-norm bound fails on block " + std::to_string(n) +
                                                      " (ratio " + detail::fmt(ratio) + ")");
        }
    }

    const Matrix s = buildModelOperator(theta).shift;
    BlockDecomposition dt = blockDecompose(t.matrix, family);
    BlockDecomposition ds = blockDecompose(s, family);
    r.decompositionBoundT = dt.bound;
    r.decompositionBoundS = ds.bound;
    std::vector<Matrix> pieces;
    double worst = 1;
    for (std::size_t n = 0; n < family.size(); ++n) {
        const BlaschkeProduct& fn = family[n];
        PipelineBlock b;
        b.index = static_cast<int>(n);
        b.degree = fn.degree();
        Matrix xn;
        if (fn.degree() == 1) {
            b.route = "scalar";
            xn = Matrix::Identity(1, 1);
        } else {
            C0Instance bt{dt.blocks[n], fn, {}};
            C0Instance bs{ds.blocks[n], fn, {}};
            const std::uint64_t blockSeed = seed * 1000003ULL + n;
            SimilarityCertificate ct, cs;
            if (twoRoot && !fn.hasRepeatedZero()) {
                b.route = "dim2";
                ct = buildSimilarityDim2(bt, 1.0 / beta, blockSeed, maxSamples);
                cs = buildSimilarityDim2(bs, 1.0 / beta, blockSeed, maxSamples);
            } else {
                b.route = "isomorphism-bound";
                ct = buildSimilarityFromIsomorphismBound(bt, 1.0 / beta, blockSeed, maxSamples);
                cs = buildSimilarityFromIsomorphismBound(bs, 1.0 / beta, blockSeed, maxSamples);
            }
            // X_n carries block n of T to block n of S(theta).
            xn = cs.x.inverse() * ct.x;
            b.bound = detail::blockBound(ct) * detail::blockBound(cs);
        }
        b.normX = linalg::spectralNorm(xn);
        b.normXinv = 1.0 / linalg::smallestSingularValue(xn);
        worst = std::max(worst, b.bound);
        pieces.push_back(std::move(xn));
        r.blocks.push_back(b);
    }
    SimilarityCertificate& c = r.certificate;
    c.x = ds.yInverse * linalg::blockDiagonal(pieces) * dt.y;
    c.theoreticalBound = dt.bound * ds.bound * worst;
    c.params = {beta, beta, 1.0 / beta, theta.degree(), r.eta};
    c.branch = "pipeline-" + r.route;
    detail::measure(c, t.matrix, s);
    return r;
}

} // namespace msk
