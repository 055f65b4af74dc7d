#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

#include "msk/blaschke.hpp"
#include "msk/function_rep.hpp"
#include "msk/linalg.hpp"
#include "msk/types.hpp"

namespace msk {

inline constexpr int kDefaultSizeCap = 64;

/// H(theta) with the Takenaka-Malmquist orthonormal basis
///   phi_k(z) = sqrt(1-|l_k|^2)/(1 - conj(l_k) z) * prod_{j<k} b_{l_j}(z)
/// and the matrix of S(theta) in that basis.
struct ModelOperator {
    BlaschkeProduct theta;
    std::string basis = "takenaka-malmquist";
    Matrix shift;

    int dimension() const { return theta.degree(); }
};

struct Provenance {
    std::uint64_t seed = 0;
    std::string generator = "external";
    double conditioning = 1.0;
};

/// A matrix together with the finite Blaschke product claimed as its minimal
/// function.
struct C0Instance {
    Matrix matrix;
    BlaschkeProduct theta;
    Provenance provenance;

    int dimension() const { return static_cast<int>(matrix.rows()); }
};

/// phi_k(z) for the basis attached to theta's zero order.
inline Complex takenakaMalmquist(const BlaschkeProduct& theta, int k, Complex z) {
    const DiskPoint l = theta.zero(k);
    Complex v = std::sqrt(1.0 - std::norm(l.value())) * kernel(l, z);
    for (int j = 0; j < k; ++j) v *= blaschkeFactor(theta.zero(j), z);
    return v;
}

/// Closed form of the compressed shift in the Takenaka-Malmquist basis:
/// lower triangular, diagonal l_k, entry (i,j), i>j, equal to
/// sqrt(1-|l_i|^2) sqrt(1-|l_j|^2) prod_{j<k<i} (-conj(l_k)).
inline Matrix takenakaMalmquistShift(const BlaschkeProduct& theta) {
    const int n = theta.degree();
    Matrix s = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const Complex lj = theta.zero(j).value();
        s(j, j) = lj;
        Complex running(1.0);
        for (int i = j + 1; i < n; ++i) {
            const Complex li = theta.zero(i).value();
            s(i, j) = std::sqrt(1.0 - std::norm(li)) * std::sqrt(1.0 - std::norm(lj)) * running;
            running *= -std::conj(li);
        }
    }
    return s;
}

/// u(T) through Hermite interpolation of u at the zeros of theta.
/// Requires theta(T) = 0.
inline Matrix applyFunctionHermite(const FunctionRep& u, const Matrix& t, const BlaschkeProduct& theta) {
    return hermiteDataOf(u, theta).evaluate(t);
}

/// u(T) for T annihilated by theta. Functions analytic across the circle are
/// evaluated directly (Horner, Moebius products); the rest go through the
/// Hermite interpolant, which agrees with u modulo theta H^infinity.
inline Matrix applyFunction(const FunctionRep& u, const Matrix& t, const BlaschkeProduct& theta) {
    FunctionRep s = u.simplified();
    if (s.directlyEvaluable()) return s.evaluate(t);
    return applyFunctionHermite(s, t, theta);
}

inline Matrix evaluateBlaschke(const BlaschkeProduct& b, const Matrix& t) {
    return FunctionRep::blaschke(b).evaluate(t);
}

inline ModelOperator buildModelOperator(const BlaschkeProduct& theta, int sizeCap = kDefaultSizeCap) {
    const int n = theta.degree();
    if (n < 1) throw Error(ErrorCode::SizeCapExceeded, "model space needs at least one zero");
    if (n > sizeCap) {
        std::ostringstream os;
        os << "dimension " << n << " exceeds size cap " << sizeCap;
        throw Error(ErrorCode::SizeCapExceeded, os.str());
    }
    ModelOperator op{theta, "takenaka-malmquist", takenakaMalmquistShift(theta)};
    const double residual = linalg::spectralNorm(evaluateBlaschke(theta, op.shift));
    if (residual > 1e-9) {
        std::ostringstream os;
        os << "theta(S) residual " << residual << " exceeds 1e-9";
        throw Error(ErrorCode::LowAccuracy, os.str());
    }
    return op;
}

/// ||u||_{H^inf / theta H^inf} as the norm of u(S(theta)).
inline double quotientNorm(const FunctionRep& u, const ModelOperator& model) {
    return linalg::spectralNorm(applyFunction(u, model.shift, model.theta));
}

inline double quotientNorm(const FunctionRep& u, const BlaschkeProduct& theta) {
    return quotientNorm(u, buildModelOperator(theta));
}

namespace detail {

inline double hankelNorm(const FunctionRep& u, const BlaschkeProduct& theta, int m) {
    const int grid = 4 * m;
    std::vector<Complex> samples(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        const Complex z = std::polar(1.0, 2.0 * kPi * i / grid);
        samples[static_cast<std::size_t>(i)] = std::conj(theta(z)) * u(z);
    }
    // inv() returns (1/L) sum_i h_i e^{+2 pi i n i / L}, i.e. the coefficient c_{-n}.
    Eigen::FFT<double> fft;
    std::vector<Complex> negative;
    fft.inv(negative, samples);
    Matrix h(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) h(j, k) = negative[static_cast<std::size_t>(j + k + 1)];
    Eigen::BDCSVD<Matrix> svd(h);
    return svd.singularValues()(0);
}

} // namespace detail

/// Nehari: dist(u, theta H^inf) = ||Hankel(conj(theta) u)||. Independent of the
/// compressed-shift route; `m` is the Hankel truncation, sampled on 4m points.
inline double hankelQuotientNormOracle(const FunctionRep& u, const BlaschkeProduct& theta, int m = 256,
                                       double crossTol = 1e-4) {
    if (m < 4 * theta.degree()) throw Error(ErrorCode::NotApplicable, "Hankel truncation must be at least 4N");
    const double value = detail::hankelNorm(u, theta, m);
    const double doubled = detail::hankelNorm(u, theta, 2 * m);
    if (std::abs(doubled - value) > crossTol) {
        std::ostringstream os;
        os << "Hankel norm moved from " << value << " to " << doubled << " when doubling the truncation";
        throw Error(ErrorCode::LowAccuracy, os.str());
    }
    return value;
}

/// Orthonormal basis of ker phi(T); dimension deg(phi) is known a priori.
inline Matrix kernelOf(const BlaschkeProduct& phi, const Matrix& t) {
    const int dim = phi.degree();
    if (dim == 0) return Matrix(t.rows(), 0);
    Matrix a = evaluateBlaschke(phi, t);
    linalg::KernelBasis kb = linalg::trailingRightSingularVectors(a, dim);
    const double nullTol = 1e-8 * std::max(kb.sigmaMax, 1.0);
    if (kb.largestKept > nullTol) {
        std::ostringstream os;
        os << "ker phi(T) has dimension below " << dim << " (singular value " << kb.largestKept << ")";
        throw Error(ErrorCode::DegenerateKernel, os.str());
    }
    return kb.basis;
}

/// ||u(T) restricted to ker phi(T)||.
inline double restrictedNorm(const FunctionRep& u, const Matrix& t, const BlaschkeProduct& phi,
                             const BlaschkeProduct& theta) {
    if (!theta.isDivisibleBy(phi)) throw Error(ErrorCode::NotApplicable, "phi must divide theta");
    Matrix k = kernelOf(phi, t);
    return linalg::spectralNorm(Matrix(applyFunction(u, t, theta) * k));
}

struct KernelSpanReport {
    bool spans = false;
    int rank = 0;
    int dimension = 0;
};

/// Whether the kernels of theta_n(T) together span the whole space.
inline KernelSpanReport kernelSpanCheck(const Matrix& t, std::span<const BlaschkeProduct> family) {
    const Eigen::Index n = t.rows();
    Matrix stacked(n, 0);
    for (const auto& f : family) {
        Matrix k = kernelOf(f, t);
        Matrix next(n, stacked.cols() + k.cols());
        next << stacked, k;
        stacked = std::move(next);
    }
    KernelSpanReport r;
    r.dimension = static_cast<int>(n);
    r.rank = stacked.cols() == 0 ? 0 : linalg::numericalRank(stacked, 1e-8);
    r.spans = r.rank == r.dimension;
    return r;
}

} // namespace msk
