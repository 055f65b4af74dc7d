#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msk/blaschke.hpp"
#include "msk/carleson.hpp"
#include "msk/linalg.hpp"
#include "msk/modelspace.hpp"
#include "msk/types.hpp"

namespace msk {

inline constexpr int kDefaultMaxSamples = 10000;
inline constexpr int kDivisorBudget = 4096;
inline constexpr double kKrylovFloor = 1e-10;
inline constexpr double kBasisCondCap = 1e12;

struct DivisorFloor {
    double value = 1.0;
    int examined = 0;
    bool exhaustive = true;
};

/// min ||phi(T) xi|| over inner divisors phi of theta other than theta itself.
/// Divisors are exponent vectors over the distinct zeros; enumerated when at
/// most `budget` of them exist, sampled otherwise (every psi_j always included).
inline DivisorFloor divisorFloor(const Matrix& t, const BlaschkeProduct& theta, const Vector& xi,
                                 int budget = kDivisorBudget, std::uint64_t seed = 0) {
    const auto distinct = theta.distinctZeros();
    const std::size_t d = distinct.size();
    std::vector<Matrix> moebius;
    for (const auto& z : distinct) moebius.push_back(evaluateBlaschke(BlaschkeProduct({z.point}), t));
    double count = 1;
    for (const auto& z : distinct) count *= z.multiplicity + 1;
    DivisorFloor out;
    auto apply = [&](const std::vector<int>& e) {
        Vector v = xi;
        for (std::size_t i = 0; i < d; ++i)
            for (int k = 0; k < e[i]; ++k) v = moebius[i] * v;
        return v.norm();
    };
    auto isFull = [&](const std::vector<int>& e) {
        for (std::size_t i = 0; i < d; ++i)
            if (e[i] != distinct[i].multiplicity) return false;
        return true;
    };
    if (count - 1 <= budget) {
        std::vector<int> e(d, 0);
        // Depth-first walk that carries the partial product along.
        std::function<void(std::size_t, const Vector&)> walk = [&](std::size_t i, const Vector& v) {
            if (i == d) {
                if (!isFull(e)) {
                    out.value = std::min(out.value, v.norm());
                    ++out.examined;
                }
                return;
            }
            Vector w = v;
            for (int k = 0; k <= distinct[i].multiplicity; ++k) {
                e[i] = k;
                walk(i + 1, w);
                w = moebius[i] * w;
            }
            e[i] = 0;
        };
        walk(0, xi);
        return out;
    }
    out.exhaustive = false;
    std::mt19937_64 rng(seed);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<int> e(d);
        for (std::size_t i = 0; i < d; ++i) e[i] = distinct[i].multiplicity - (i == j ? 1 : 0);
        out.value = std::min(out.value, apply(e));
        ++out.examined;
    }
    while (out.examined < budget) {
        std::vector<int> e(d);
        for (std::size_t i = 0; i < d; ++i)
            e[i] = std::uniform_int_distribution<int>(0, distinct[i].multiplicity)(rng);
        if (isFull(e)) continue;
        out.value = std::min(out.value, apply(e));
        ++out.examined;
    }
    return out;
}

struct CyclicVectorReport {
    Vector vector;
    double psiNNorm = 0;  // ||target xi||
    double krylovSigmaMin = 0;
    double divisorFloor = 0;
    bool divisorsExhaustive = true;
    int samplesTried = 0;
    bool found = false;
};

using VectorPredicate = std::function<bool(const Vector&)>;

/// Unit cyclic vector with ||target xi|| > threshold.
///
/// Candidates alternate between uniform samples on the sphere and
/// perturbations v + t g of the top right singular vector v of `target`, with
/// t cycling through four scales; the first candidate is v itself. On
/// exhaustion the best candidate seen is returned with found = false.
inline CyclicVectorReport searchCyclicVector(const Matrix& t, const BlaschkeProduct& theta, const Matrix& target,
                                             double threshold, int maxSamples, std::uint64_t seed,
                                             const VectorPredicate& accept = {}) {
    const double targetNorm = linalg::spectralNorm(target);
    if (!(threshold < targetNorm)) {
        std::ostringstream os;
        os << "threshold " << threshold << " is not below the operator norm " << targetNorm;
        throw Error(ErrorCode::ThresholdUnreachable, os.str());
    }
    const int n = static_cast<int>(t.rows());
    Eigen::JacobiSVD<Matrix> svd(target, Eigen::ComputeFullV);
    const Vector top = svd.matrixV().col(0);
    static constexpr double kScales[] = {1e-3, 1e-2, 1e-1, 1.0};
    std::mt19937_64 rng(seed);
    CyclicVectorReport best;
    best.psiNNorm = -1;
    for (int i = 0; i < maxSamples; ++i) {
        Vector xi;
        if (i == 0) {
            xi = top;
        } else if (i % 2 == 1) {
            xi = linalg::randomUnitVector(rng, n);
        } else {
            Vector g = linalg::randomUnitVector(rng, n);
            xi = top + kScales[(i / 2 - 1) % 4] * g;
            xi.normalize();
        }
        const double value = (target * xi).norm();
        const double sigma = linalg::krylovSigmaMin(t, xi);
        const bool ok = value > threshold && sigma > kKrylovFloor && (!accept || accept(xi));
        if (ok || (!best.found && value > best.psiNNorm)) {
            best.vector = xi;
            best.psiNNorm = value;
            best.krylovSigmaMin = sigma;
            best.samplesTried = i + 1;
            best.found = ok;
        }
        if (ok) break;
    }
    if (!best.found) best.samplesTried = maxSamples;
    DivisorFloor floor = divisorFloor(t, theta, best.vector, kDivisorBudget, seed);
    best.divisorFloor = floor.value;
    best.divisorsExhaustive = floor.exhaustive;
    return best;
}

inline Matrix psiLast(const BlaschkeProduct& theta, const Matrix& t) {
    return evaluateBlaschke(theta.withoutIndex(theta.degree() - 1), t);
}

inline CyclicVectorReport findCyclicVector(const C0Instance& inst, double threshold,
                                           int maxSamples = kDefaultMaxSamples, std::uint64_t seed = 0,
                                           const VectorPredicate& accept = {}) {
    return searchCyclicVector(inst.matrix, inst.theta, psiLast(inst.theta, inst.matrix), threshold, maxSamples, seed,
                              accept);
}

/// Columns alpha_k(T) xi, alpha_k = b_{l_1} ... b_{l_k}, alpha_0 = 1.
inline Matrix alphaBasis(const Matrix& t, const BlaschkeProduct& theta, const Vector& xi) {
    const int n = theta.degree();
    Matrix b(t.rows(), n);
    b.col(0) = xi;
    for (int k = 1; k < n; ++k)
        b.col(k) = evaluateBlaschke(BlaschkeProduct({theta.zero(k - 1)}), t) * b.col(k - 1);
    const double cond = linalg::conditionNumber(b);
    if (!(cond <= kBasisCondCap)) {
        std::ostringstream os;
        os << "alpha basis condition number " << cond << " exceeds " << kBasisCondCap;
        throw Error(ErrorCode::SingularBasis, os.str());
    }
    return b;
}

struct AngleReport {
    bool pass = true;
    double worstCosine = 0;  // max |<a_j, a_k>| / (||a_j|| ||a_k||) over j < k
    int worstJ = -1;
    int worstK = -1;
    double cosineBound = 1;  // sqrt(1 - beta^2)
    double divisorFloor = 1;
};

/// Pairwise angles of the alpha-basis against sqrt(1 - beta^2), and every
/// proper divisor keeping ||phi(T) xi|| >= beta.
inline AngleReport angleCheck(const Matrix& t, const BlaschkeProduct& theta, const Vector& xi, double beta) {
    static constexpr double kSlack = 1e-12;
    AngleReport r;
    r.cosineBound = std::sqrt(std::max(0.0, 1.0 - beta * beta));
    const int n = theta.degree();
    Matrix b(t.rows(), n);
    b.col(0) = xi;
    for (int k = 1; k < n; ++k)
        b.col(k) = evaluateBlaschke(BlaschkeProduct({theta.zero(k - 1)}), t) * b.col(k - 1);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const double denom = b.col(j).norm() * b.col(k).norm();
            const double c = denom > 0 ? std::abs(b.col(j).dot(b.col(k))) / denom : 1.0;
            if (c > r.worstCosine || r.worstJ < 0) {
                r.worstCosine = c;
                r.worstJ = j;
                r.worstK = k;
            }
        }
    r.divisorFloor = divisorFloor(t, theta, xi).value;
    r.pass = r.worstCosine <= r.cosineBound + kSlack && r.divisorFloor >= beta - kSlack;
    return r;
}

/// sqrt(1 - 1/(N-1)^2), the lower limit for beta; 0 when N <= 2.
inline double betaGate(int n) {
    if (n <= 2) return 0.0;
    const double m = n - 1.0;
    return std::sqrt(1.0 - 1.0 / (m * m));
}

/// sqrt(N) / (beta sqrt(1 - (N-1) sqrt(1 - beta^2))).
inline double alphaBasisBound(double beta, int n) {
    const double inner = 1.0 - (n - 1) * std::sqrt(std::max(0.0, 1.0 - beta * beta));
    if (!(inner > 0) || !(beta > 0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(static_cast<double>(n) / (beta * beta * inner));
}

struct BoundParams {
    double beta1 = 0;
    double beta2 = 0;
    double psiNorm = 0;  // 0 when not supplied
    int n = 0;
    double eta = 0;
};

struct SimilarityCertificate {
    Matrix x;
    double normX = 0;
    double normXinv = 0;
    double intertwineResidual = 0;  // ||X T1 - T2 X||
    std::optional<double> theoreticalBound;
    std::optional<double> inverseBound;  // separate bound on ||X^{-1}|| where the construction has one
    BoundParams params;
    std::string branch;
    double residTol = 0;
    std::vector<Vector> vectors;  // cyclic vectors used (xi_1, xi_2 or xi, zeta)

    bool residualOk() const { return intertwineResidual <= residTol; }
    bool withinBound(double rel = 1e-6) const {
        if (!theoreticalBound) return true;
        const double limit = *theoreticalBound * (1 + rel);
        if (inverseBound) return normX <= limit && normXinv <= *inverseBound * (1 + rel);
        return std::max(normX, normXinv) <= limit;
    }
};

namespace detail {

inline void measure(SimilarityCertificate& c, const Matrix& t1, const Matrix& t2) {
    c.normX = linalg::spectralNorm(c.x);
    const double smin = linalg::smallestSingularValue(c.x);
    c.normXinv = smin > 0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
    c.intertwineResidual = linalg::spectralNorm(Matrix(c.x * t1 - t2 * c.x));
    c.residTol = 1e-8 * static_cast<double>(t1.rows());
    if (!(c.intertwineResidual <= c.residTol)) {
        std::ostringstream os;
        os << "intertwining residual " << c.intertwineResidual << " exceeds " << c.residTol;
        throw Error(ErrorCode::LowAccuracy, os.str());
    }
}

inline void hypothesis(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::HypothesisViolated, what);
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace detail

/// X with X T1 = T2 X from alpha-bases at two qualifying cyclic vectors.
inline SimilarityCertificate buildSimilarity(const C0Instance& t1, const C0Instance& t2, double beta1, double beta2,
                                             std::uint64_t seed = 0, int maxSamples = kDefaultMaxSamples) {
    detail::hypothesis(t1.theta.zeros() == t2.theta.zeros(), "instances must share the same ordered zero list");
    const BlaschkeProduct& theta = t1.theta;
    const int n = theta.degree();
    const double gate = betaGate(n);
    const double eta = computeEta(theta);
    const double beta[2] = {beta1, beta2};
    const C0Instance* inst[2] = {&t1, &t2};
    for (int i = 0; i < 2; ++i) {
        const std::string name = "beta" + std::to_string(i + 1);
        detail::hypothesis(beta[i] > gate, name + " = " + detail::fmt(beta[i]) + " is not above the gate " + detail::fmt(gate));
        detail::hypothesis(beta[i] < 1, name + " must be below 1");
        const double psi = linalg::spectralNorm(psiLast(theta, inst[i]->matrix));
        const double need = beta[i] + kFiveRootTwo * eta;
        detail::hypothesis(psi > need, "||psi_N(T" + std::to_string(i + 1) + ")|| = " + detail::fmt(psi) +
                                           " is not above " + name + " + 5 sqrt2 eta = " + detail::fmt(need));
    }
    SimilarityCertificate c;
    Matrix basis[2];
    for (int i = 0; i < 2; ++i) {
        const Matrix& t = inst[i]->matrix;
        const double b = beta[i];
        auto accept = [&](const Vector& xi) { return angleCheck(t, theta, xi, b).pass; };
        CyclicVectorReport r =
            findCyclicVector(*inst[i], b + kFiveRootTwo * eta, maxSamples, seed * 2 + static_cast<std::uint64_t>(i), accept);
        if (!r.found) throw Error(ErrorCode::SearchExhausted, "no qualifying cyclic vector for T" + std::to_string(i + 1));
        basis[i] = alphaBasis(t, theta, r.vector);
        c.vectors.push_back(r.vector);
    }
    c.x = basis[1] * basis[0].inverse();
    c.theoreticalBound = std::max(alphaBasisBound(beta1, n), alphaBasisBound(beta2, n));
    c.params = {beta1, beta2, 0.0, n, eta};
    c.branch = "alpha-basis";
    detail::measure(c, t1.matrix, t2.matrix);
    return c;
}

inline C0Instance modelInstance(const BlaschkeProduct& theta) {
    C0Instance m;
    m.theta = theta;
    m.matrix = buildModelOperator(theta).shift;
    m.provenance.generator = "model";
    return m;
}

/// Similarity to S(theta) from a bound psiNorm on the functional-calculus map
/// u(T) -> u(S(theta)).
inline SimilarityCertificate buildSimilarityFromIsomorphismBound(const C0Instance& t, double psiNorm,
                                                                 std::uint64_t seed = 0,
                                                                 int maxSamples = kDefaultMaxSamples) {
    detail::hypothesis(psiNorm >= 1, "psiNorm must be at least 1");
    const int n = t.theta.degree();
    const double eta = computeEta(t.theta);
    const double beta = 1.0 / psiNorm - kFiveRootTwo * eta;
    const double gate = betaGate(n);
    detail::hypothesis(gate < beta && beta < 1, "beta = 1/psiNorm - 5 sqrt2 eta = " + detail::fmt(beta) +
                                                    " is outside (" + detail::fmt(gate) + ", 1)");
    const double psi = linalg::spectralNorm(psiLast(t.theta, t.matrix));
    detail::hypothesis(psi >= 1.0 / psiNorm, "||psi_N(T)|| = " + detail::fmt(psi) + " is below 1/psiNorm");
    SimilarityCertificate c = buildSimilarity(t, modelInstance(t.theta), beta, beta, seed, maxSamples);
    c.params.psiNorm = psiNorm;
    c.branch = "isomorphism-bound";
    return c;
}

/// sqrt((1-|mu|)^2 - (1-|mu|^2)(1-beta^2)) - |mu|.
inline double dim2LowerBound(Complex mu, double beta) {
    const double m = std::abs(mu);
    if (!(m < 1)) throw Error(ErrorCode::NotApplicable, "|mu| must be below 1");
    const double arg = (1 - m) * (1 - m) - (1 - m * m) * (1 - beta * beta);
    if (arg < 0) throw Error(ErrorCode::NotApplicable, "square-root argument is negative");
    return std::sqrt(arg) - m;
}

/// Largest r in [0, 1/4] with dim2LowerBound(r, beta) >= beta/2, by bisection
/// to 1e-12. The bound decreases in |mu|, and 1 - 2|mu| > 1/2 caps r at 1/4.
inline double dim2Radius(double beta) {
    auto good = [&](double m) {
        try {
            return dim2LowerBound(m, beta) > beta / 2;
        } catch (const Error&) {
            return false;
        }
    };
    if (good(0.25)) return 0.25;
    double lo = 0, hi = 0.25;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (good(mid) ? lo : hi) = mid;
    }
    return lo;
}

/// Two-dimensional similarity to S(b_{l1} b_{l2}) from a bound psiNorm.
/// Close roots use the normalized kernel at l1 as the model-side cyclic
/// vector; separated roots split both operators into eigenlines.
inline SimilarityCertificate buildSimilarityDim2(const C0Instance& t, double psiNorm, std::uint64_t seed = 0,
                                                 int maxSamples = kDefaultMaxSamples) {
    const BlaschkeProduct& theta = t.theta;
    detail::hypothesis(theta.degree() == 2, "minimal function must have exactly two zeros");
    detail::hypothesis(!theta.hasRepeatedZero(), "the two zeros must be distinct");
    detail::hypothesis(psiNorm >= 1, "psiNorm must be at least 1");
    const DiskPoint l1 = theta.zero(0), l2 = theta.zero(1);
    const double beta = 0.95 / psiNorm;
    const Complex mu = blaschkeFactor(l2, l1.value());
    const double r = dim2Radius(beta);
    const C0Instance model = modelInstance(theta);
    SimilarityCertificate c;
    c.params = {beta, beta, psiNorm, 2, computeEta(theta)};
    if (std::abs(mu) < r) {
        const Matrix b2 = evaluateBlaschke(BlaschkeProduct({l2}), t.matrix);
        const Matrix b1 = evaluateBlaschke(BlaschkeProduct({l1}), t.matrix);
        detail::hypothesis(linalg::spectralNorm(b2) >= 1.0 / psiNorm, "||b_l2(T)|| is below 1/psiNorm");
        const double cosBound = std::sqrt(1 - beta * beta);
        auto accept = [&](const Vector& xi) {
            const Vector bx = b1 * xi;
            const double nb = bx.norm();
            return nb >= beta / 2 && std::abs(xi.dot(bx)) <= cosBound * nb;
        };
        CyclicVectorReport rep = searchCyclicVector(t.matrix, theta, b2, beta, maxSamples, seed, accept);
        if (!rep.found) throw Error(ErrorCode::SearchExhausted, "no qualifying cyclic vector");
        const Vector zeta = Vector::Unit(2, 0);
        Matrix from(2, 2), to(2, 2);
        from << rep.vector, b1 * rep.vector;
        to << zeta, evaluateBlaschke(BlaschkeProduct({l1}), model.matrix) * zeta;
        c.x = to * from.inverse();
        c.theoreticalBound = std::sqrt(8.0 / (beta * beta * (1 - std::sqrt(1 - beta * beta))));
        c.inverseBound = std::sqrt(8.0);
        c.branch = "close-roots";
        c.vectors = {rep.vector, zeta};
    } else {
        std::vector<BlaschkeProduct> family{BlaschkeProduct({l1}), BlaschkeProduct({l2})};
        BlockDecomposition dt = blockDecompose(t.matrix, family);
        BlockDecomposition ds = blockDecompose(model.matrix, family);
        c.x = ds.yInverse * dt.y;
        c.theoreticalBound = dt.bound * ds.bound;
        c.branch = "separated-roots";
    }
    detail::measure(c, t.matrix, model.matrix);
    return c;
}

} // namespace msk
