#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "msk/blaschke.hpp"
#include "msk/linalg.hpp"
#include "msk/modelspace.hpp"
#include "msk/types.hpp"

namespace msk {

enum class GeneratorKind { UnitaryConjugate, InvertibleConjugate, ModelItself, DiagonalIfDistinct };

inline std::string_view toString(GeneratorKind k) {
    switch (k) {
    case GeneratorKind::UnitaryConjugate: return "unitaryConjugate";
    case GeneratorKind::InvertibleConjugate: return "invertibleConjugate";
    case GeneratorKind::ModelItself: return "modelItself";
    case GeneratorKind::DiagonalIfDistinct: return "diagonalIfDistinct";
    }
    return "unknown";
}

inline GeneratorKind parseGeneratorKind(std::string_view s) {
    for (auto k : {GeneratorKind::UnitaryConjugate, GeneratorKind::InvertibleConjugate, GeneratorKind::ModelItself,
                   GeneratorKind::DiagonalIfDistinct})
        if (s == toString(k)) return k;
    throw Error(ErrorCode::ParseError, "unknown generator kind '" + std::string(s) + "'");
}

struct GeneratorSpec {
    BlaschkeProduct theta;
    double conditioning = 1.0;  // target cond(V) for invertible conjugates
    std::uint64_t seed = 0;
    GeneratorKind kind = GeneratorKind::UnitaryConjugate;
};

namespace detail {

/// G = sum_k (A*)^k R A^k for a contraction A with spectral radius < 1, by
/// doubling: G += A* G A, A = A^2.
inline Matrix steinSum(const Matrix& a, const Matrix& r) {
    Matrix g = r;
    Matrix p = a;
    for (int it = 0; it < 64; ++it) {
        Matrix next = g + p.adjoint() * g * p;
        const double change = linalg::spectralNorm(Matrix(next - g));
        g = std::move(next);
        p = (p * p).eval();
        if (change <= 1e-16 * linalg::spectralNorm(g)) break;
    }
    return 0.5 * (g + g.adjoint());
}

struct SteinConjugator {
    Matrix v;
    double cond = 1.0;
};

/// V = Q G^{1/2} with G - S* G S = (I - S* S) + tau P, P positive
/// semidefinite. Then V S V^{-1} is a contraction and cond(V)^2 = cond(G).
inline SteinConjugator steinConjugator(const Matrix& s, const Matrix& q, const Matrix& p, double tau) {
    const Eigen::Index n = s.rows();
    Matrix r = Matrix::Identity(n, n) - s.adjoint() * s + tau * p;
    Matrix g = steinSum(s, r);
    SteinConjugator out;
    out.v = q * linalg::hermitianSqrt(g);
    out.cond = linalg::conditionNumber(out.v);
    return out;
}

} // namespace detail

/// A C0 operator with minimal function spec.theta.
///
/// Invertible conjugates come from the cone of Stein solutions, which keeps
/// V S(theta) V^{-1} a contraction for every admissible V; the spread tau is
/// bisected until cond(V) reaches the requested conditioning.
inline C0Instance generate(const GeneratorSpec& spec) {
    const BlaschkeProduct& theta = spec.theta;
    ModelOperator model = buildModelOperator(theta);
    const int n = theta.degree();
    C0Instance inst;
    inst.theta = theta;
    inst.provenance.seed = spec.seed;
    inst.provenance.conditioning = 1.0;
    GeneratorKind kind = spec.kind;
    if (kind == GeneratorKind::InvertibleConjugate && spec.conditioning <= 1.0) kind = GeneratorKind::UnitaryConjugate;
    if (kind == GeneratorKind::DiagonalIfDistinct && theta.hasRepeatedZero()) kind = GeneratorKind::ModelItself;
    inst.provenance.generator = std::string(toString(kind));
    std::mt19937_64 rng(spec.seed);
    switch (kind) {
    case GeneratorKind::ModelItself:
        inst.matrix = model.shift;
        return inst;
    case GeneratorKind::DiagonalIfDistinct:
        inst.matrix = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) inst.matrix(i, i) = theta.zero(i).value();
        return inst;
    case GeneratorKind::UnitaryConjugate: {
        Matrix q = linalg::randomUnitary(rng, n);
        inst.matrix = q * model.shift * q.adjoint();
        return inst;
    }
    case GeneratorKind::InvertibleConjugate: break;
    }
    const double target = spec.conditioning;
    // Eigenvectors of S(theta)*: the projected kernels at the distinct zeros.
    std::vector<Vector> kernels;
    for (const auto& d : theta.distinctZeros()) {
        Vector k(n);
        for (int j = 0; j < n; ++j) k(j) = std::conj(takenakaMalmquist(theta, j, d.point.value()));
        kernels.push_back(k.normalized());
    }
    if (n == 1) {
        inst.matrix = model.shift;
        inst.provenance.generator = std::string(toString(GeneratorKind::UnitaryConjugate));
        return inst;
    }
    for (int attempt = 0; attempt < 16; ++attempt) {
        Matrix q2 = linalg::randomUnitary(rng, n);
        // Random positive mix of fewer than n eigenvectors, so the Stein sum
        // of P is singular and cond(V) grows without bound in tau.
        std::vector<std::size_t> order(kernels.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t cap = std::min<std::size_t>(kernels.size(), static_cast<std::size_t>(n - 1));
        const std::size_t used = std::uniform_int_distribution<std::size_t>(1, cap)(rng);
        std::uniform_real_distribution<double> weight(0.1, 1.0);
        Matrix p = Matrix::Zero(n, n);
        for (std::size_t i = 0; i < used; ++i) p += weight(rng) * kernels[order[i]] * kernels[order[i]].adjoint();
        double lo = 0, hi = 1;
        detail::SteinConjugator best = detail::steinConjugator(model.shift, q2, p, hi);
        for (int grow = 0; grow < 60 && best.cond < target; ++grow) {
            lo = hi;
            hi *= 4;
            best = detail::steinConjugator(model.shift, q2, p, hi);
        }
        if (best.cond < target) continue;
        for (int it = 0; it < 80 && std::abs(best.cond - target) > 1e-12 * target; ++it) {
            const double mid = 0.5 * (lo + hi);
            detail::SteinConjugator c = detail::steinConjugator(model.shift, q2, p, mid);
            (c.cond < target ? lo : hi) = mid;
            best = c;
        }
        // Contraction repair: shrink the spread, never the matrix.
        double tau = 0.5 * (lo + hi);
        for (int shrink = 0; shrink < 16; ++shrink) {
            detail::SteinConjugator c = detail::steinConjugator(model.shift, q2, p, tau);
            Matrix t = c.v * model.shift * c.v.inverse();
            if (linalg::spectralNorm(t) <= 1.0 + 1e-10) {
                inst.matrix = std::move(t);
                inst.provenance.conditioning = c.cond;
                return inst;
            }
            tau *= 0.5;
        }
    }
    throw Error(ErrorCode::ContractionRepairFailed, "could not produce a contraction with the requested conditioning");
}

struct ValidationClause {
    std::string name;
    double measured = 0;
    double bound = 0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<ValidationClause> clauses;
    std::vector<int> psiKernelDims;

    bool pass() const {
        return std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.pass; });
    }
};

/// Re-checks that `inst.matrix` is a multiplicity-free C0 contraction with
/// minimal function `inst.theta`.
inline ValidationReport validate(const C0Instance& inst, std::uint64_t seed = 0) {
    ValidationReport r;
    const Matrix& t = inst.matrix;
    const int n = inst.theta.degree();
    const bool square = t.rows() == t.cols() && t.rows() == n;
    r.clauses.push_back({"dimension", static_cast<double>(t.rows()), static_cast<double>(n), square});
    if (!square) return r;
    const bool finite = t.allFinite();
    r.clauses.push_back({"finite", finite ? 0.0 : 1.0, 0.0, finite});
    if (!finite) return r;
    const double norm = linalg::spectralNorm(t);
    r.clauses.push_back({"contraction", norm, 1.0 + 1e-10, norm <= 1.0 + 1e-10});
    double annihilation = std::numeric_limits<double>::infinity();
    double minimality = 0;
    try {
        annihilation = linalg::spectralNorm(evaluateBlaschke(inst.theta, t));
        minimality = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            Matrix psi = evaluateBlaschke(inst.theta.withoutIndex(j), t);
            minimality = std::min(minimality, linalg::spectralNorm(psi));
            r.psiKernelDims.push_back(n - linalg::numericalRank(psi, 1e-8));
        }
    } catch (const Error&) {
        // I - conj(l) T singular: T has spectrum on the circle.
    }
    r.clauses.push_back({"annihilation", annihilation, 1e-9, annihilation <= 1e-9});
    r.clauses.push_back({"minimality", minimality, 1e-8, minimality > 1e-8});
    std::mt19937_64 rng(seed);
    double krylov = 0;
    for (int trial = 0; trial < 8 && krylov <= 1e-10; ++trial)
        krylov = std::max(krylov, linalg::krylovSigmaMin(t, linalg::randomUnitVector(rng, n)));
    r.clauses.push_back({"multiplicityFree", krylov, 1e-10, krylov > 1e-10});
    bool dimsOk = static_cast<int>(r.psiKernelDims.size()) == n;
    for (int d : r.psiKernelDims) dimsOk = dimsOk && d == n - 1;
    r.clauses.push_back({"psiKernelDims", dimsOk ? n - 1.0 : -1.0, n - 1.0, dimsOk});
    return r;
}

} // namespace msk
