#pragma once

// Independent verification routes. Nothing here is used by the constructions
// it checks: inner products come from boundary quadrature, never from the
// closed forms in blaschke.hpp / modelspace.hpp.

#include <cmath>
#include <functional>
#include <sstream>

#include "msk/blaschke.hpp"
#include "msk/modelspace.hpp"
#include "msk/types.hpp"

namespace msk::oracle {

using BoundaryFunction = std::function<Complex(Complex)>;

/// <f, g>_{H^2} by the L-point trapezoid rule on the circle (spectrally
/// accurate for functions analytic across the circle).
inline Complex circleInnerProduct(const BoundaryFunction& f, const BoundaryFunction& g, int gridSize) {
    Complex acc(0.0);
    for (int i = 0; i < gridSize; ++i) {
        const Complex z = std::polar(1.0, 2.0 * kPi * i / gridSize);
        acc += f(z) * std::conj(g(z));
    }
    return acc / static_cast<double>(gridSize);
}

/// Quadrature with a grid-doubling accuracy check.
inline Complex checkedInnerProduct(const BoundaryFunction& f, const BoundaryFunction& g, int gridSize = 4096,
                                   double tol = 1e-10) {
    const Complex a = circleInnerProduct(f, g, gridSize);
    const Complex b = circleInnerProduct(f, g, 2 * gridSize);
    if (std::abs(a - b) > tol) {
        std::ostringstream os;
        os << "quadrature changed by " << std::abs(a - b) << " on grid doubling";
        throw Error(ErrorCode::LowAccuracy, os.str());
    }
    return b;
}

inline double h2Norm(const BoundaryFunction& f, int gridSize = 4096) {
    return std::sqrt(std::max(0.0, circleInnerProduct(f, f, gridSize).real()));
}

inline Complex blaschkeInnerProductQuadrature(DiskPoint lj, DiskPoint lk, int gridSize = 4096) {
    return checkedInnerProduct([lj](Complex z) { return blaschkeFactor(lj, z); },
                               [lk](Complex z) { return blaschkeFactor(lk, z); }, gridSize);
}

/// Coefficient of z^n in b_lambda: -lambda for n = 0, (1-|lambda|^2) conj(lambda)^{n-1} after.
inline Complex blaschkeTaylorCoefficient(DiskPoint lambda, int n) {
    const Complex l = lambda.value();
    if (n == 0) return -l;
    return (1.0 - std::norm(l)) * std::pow(std::conj(l), n - 1);
}

/// <b_lj, b_lk> from truncated power series (both coefficient sequences).
inline Complex blaschkeInnerProductSeries(DiskPoint lj, DiskPoint lk, int terms = 4000) {
    Complex acc(0.0);
    for (int n = 0; n < terms; ++n) acc += blaschkeTaylorCoefficient(lj, n) * std::conj(blaschkeTaylorCoefficient(lk, n));
    return acc;
}

/// Matrix of S(theta) from <z phi_j, phi_i> by quadrature.
inline Matrix shiftMatrixQuadrature(const BlaschkeProduct& theta, int gridSize = 4096) {
    const int n = theta.degree();
    Matrix s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s(i, j) = circleInnerProduct([&](Complex z) { return z * takenakaMalmquist(theta, j, z); },
                                         [&](Complex z) { return takenakaMalmquist(theta, i, z); }, gridSize);
    return s;
}

/// Gram matrix of the basis by quadrature; identity for an orthonormal basis.
inline Matrix basisGramQuadrature(const BlaschkeProduct& theta, int gridSize = 4096) {
    const int n = theta.degree();
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = circleInnerProduct([&](Complex z) { return takenakaMalmquist(theta, j, z); },
                                         [&](Complex z) { return takenakaMalmquist(theta, i, z); }, gridSize);
    return g;
}

/// (T - mu)(I - conj(mu) T)^{-1}, assembled independently of FunctionRep.
inline Matrix moebius(Complex mu, const Matrix& t) {
    const Eigen::Index n = t.rows();
    Matrix eye = Matrix::Identity(n, n);
    return (t - mu * eye) * (eye - std::conj(mu) * t).inverse();
}

} // namespace msk::oracle
