#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "msk/types.hpp"

namespace msk::linalg {

/// Singular values in decreasing order.
inline Eigen::VectorXd singularValues(const Matrix& a) {
    if (a.size() == 0) return Eigen::VectorXd();
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues();
}

inline double spectralNorm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return singularValues(a)(0);
}

inline double spectralNorm(const Vector& v) { return v.norm(); }

inline double conditionNumber(const Matrix& a) {
    Eigen::VectorXd s = singularValues(a);
    if (s.size() == 0) return 1.0;
    double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

inline double smallestSingularValue(const Matrix& a) {
    Eigen::VectorXd s = singularValues(a);
    return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

/// Rank with singular values above relTol * sigma_max.
inline int numericalRank(const Matrix& a, double relTol = 1e-8) {
    Eigen::VectorXd s = singularValues(a);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > relTol * s(0)) ++rank;
    return rank;
}

struct KernelBasis {
    Matrix basis;            // orthonormal columns
    double largestKept = 0;  // largest singular value among the kept directions
    double sigmaMax = 0;
};

/// Orthonormal basis for the `dim` right singular directions of `a` with the
/// smallest singular values. The caller knows the kernel dimension a priori, so
/// no threshold decides how many columns come back.
inline KernelBasis trailingRightSingularVectors(const Matrix& a, int dim) {
    const int n = static_cast<int>(a.cols());
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    KernelBasis out;
    out.basis = svd.matrixV().rightCols(dim);
    out.sigmaMax = s.size() > 0 ? s(0) : 0.0;
    // Non-square inputs pad the spectrum with exact zeros.
    out.largestKept = 0.0;
    for (int i = n - dim; i < n; ++i)
        out.largestKept = std::max(out.largestKept, i < s.size() ? s(i) : 0.0);
    return out;
}

/// Orthonormal basis of the column space of `a`, `dim` columns, via
/// column-pivoted Householder QR.
inline Matrix rangeBasis(const Matrix& a, int dim) {
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    return q.leftCols(dim);
}

/// Principal square root of a Hermitian positive definite matrix.
inline Matrix hermitianSqrt(const Matrix& m, double* minEigenvalue = nullptr) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Eigen::VectorXd ev = es.eigenvalues();
    if (minEigenvalue) *minEigenvalue = ev.size() ? ev.minCoeff() : 0.0;
    Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

/// Complex standard normal vector; its normalization is uniform on the sphere.
template <typename Rng>
Vector gaussianVector(Rng& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) {
        double re = normal(rng);
        double im = normal(rng);
        v(i) = Complex(re, im);
    }
    return v;
}

template <typename Rng>
Vector randomUnitVector(Rng& rng, int n) {
    Vector v = gaussianVector(rng, n);
    return v / v.norm();
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fix.
template <typename Rng>
Matrix randomUnitary(Rng& rng, int n) {
    Matrix g(n, n);
    for (int j = 0; j < n; ++j) g.col(j) = gaussianVector(rng, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        Complex d = r(j, j);
        double m = std::abs(d);
        if (m > 0) q.col(j) *= d / m;
    }
    return q;
}

/// sigma_min of the column-normalized Krylov matrix [x, Tx, ..., T^{n-1}x].
inline double krylovSigmaMin(const Matrix& t, const Vector& x) {
    const int n = static_cast<int>(t.rows());
    Matrix k(n, n);
    Vector v = x;
    for (int j = 0; j < n; ++j) {
        double nv = v.norm();
        k.col(j) = nv > 0 ? Vector(v / nv) : v;
        v = t * v;
    }
    return smallestSingularValue(k);
}

/// Uniform grid of L points on the unit circle.
inline std::vector<Complex> circleGrid(int count) {
    std::vector<Complex> z(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) z[static_cast<std::size_t>(i)] = std::polar(1.0, 2.0 * kPi * i / count);
    return z;
}

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline Matrix blockDiagonal(const std::vector<Matrix>& blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.rows();
    Matrix out = Matrix::Zero(n, n);
    Eigen::Index offset = 0;
    for (const auto& b : blocks) {
        out.block(offset, offset, b.rows(), b.cols()) = b;
        offset += b.rows();
    }
    return out;
}

} // namespace msk::linalg
