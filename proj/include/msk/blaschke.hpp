#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "msk/types.hpp"

namespace msk {

/// A point of the open unit disk, kept away from the boundary.
///
/// Points with modulus above kMaxModulus are rejected: kernels of near-boundary
/// points make Gram matrices numerically singular long before the mathematics
/// degenerates.
class DiskPoint {
public:
    static constexpr double kMaxModulus = 0.999;

    DiskPoint() = default;

    explicit DiskPoint(Complex value) : value_(value) {
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) || std::abs(value) > kMaxModulus) {
            std::ostringstream os;
            os << "point " << value << " is outside the admissible disk |z| <= " << kMaxModulus;
            throw Error(ErrorCode::InvalidPoint, os.str());
        }
    }

    DiskPoint(double re, double im) : DiskPoint(Complex(re, im)) {}

    Complex value() const noexcept { return value_; }
    double modulus() const noexcept { return std::abs(value_); }

    friend bool operator==(const DiskPoint& a, const DiskPoint& b) { return a.value_ == b.value_; }

private:
    Complex value_{0.0, 0.0};
};

/// b_lambda(z) = (z - lambda) / (1 - conj(lambda) z).
inline Complex blaschkeFactor(DiskPoint lambda, Complex z) {
    const Complex l = lambda.value();
    return (z - l) / (1.0 - std::conj(l) * z);
}

/// Szego reproducing kernel 1 / (1 - conj(lambda) z) of H^2.
inline Complex kernel(DiskPoint lambda, Complex z) {
    return 1.0 / (1.0 - std::conj(lambda.value()) * z);
}

/// kappa_lambda / ||kappa_lambda||^2 = (1 - |lambda|^2) kappa_lambda.
inline Complex normalizedKernel(DiskPoint lambda, Complex z) {
    return (1.0 - std::norm(lambda.value())) * kernel(lambda, z);
}

/// Pseudo-hyperbolic distance |b_a(b)|; symmetric in its arguments.
inline double pseudoHyperbolic(DiskPoint a, DiskPoint b) { return std::abs(blaschkeFactor(a, b.value())); }

/// Closed form of <b_lj, b_lk> in H^2.
inline Complex blaschkeInnerProduct(DiskPoint lj, DiskPoint lk) {
    const Complex a = lj.value();
    const Complex b = lk.value();
    const Complex denom = 1.0 - std::conj(a) * b;
    return 1.0 + std::conj(a) * (b - a) / denom + std::conj(b) * (a - b) / denom;
}

/// Finite Blaschke product given by its zero list (repetitions allowed).
/// The empty list is the constant function 1.
class BlaschkeProduct {
public:
    struct DistinctZero {
        DiskPoint point;
        int multiplicity = 0;
    };

    BlaschkeProduct() = default;
    explicit BlaschkeProduct(std::vector<DiskPoint> zeros) : zeros_(std::move(zeros)) {}

    static BlaschkeProduct fromValues(std::span<const Complex> values) {
        std::vector<DiskPoint> pts;
        pts.reserve(values.size());
        for (Complex v : values) pts.emplace_back(v);
        return BlaschkeProduct(std::move(pts));
    }

    static BlaschkeProduct fromValues(std::initializer_list<Complex> values) {
        return fromValues(std::span<const Complex>(values.begin(), values.size()));
    }

    int degree() const noexcept { return static_cast<int>(zeros_.size()); }
    bool empty() const noexcept { return zeros_.empty(); }
    const std::vector<DiskPoint>& zeros() const noexcept { return zeros_; }
    DiskPoint zero(int i) const { return zeros_.at(static_cast<std::size_t>(i)); }

    Complex operator()(Complex z) const {
        Complex out(1.0, 0.0);
        for (const auto& p : zeros_) out *= blaschkeFactor(p, z);
        return out;
    }

    /// theta / b_{lambda_j}, zero-based index.
    BlaschkeProduct withoutIndex(int j) const {
        std::vector<DiskPoint> z = zeros_;
        z.erase(z.begin() + j);
        return BlaschkeProduct(std::move(z));
    }

    /// b_{lambda_1} ... b_{lambda_k}; prefix(0) is the constant 1.
    BlaschkeProduct prefix(int k) const {
        return BlaschkeProduct(std::vector<DiskPoint>(zeros_.begin(), zeros_.begin() + k));
    }

    BlaschkeProduct operator*(const BlaschkeProduct& other) const {
        std::vector<DiskPoint> z = zeros_;
        z.insert(z.end(), other.zeros_.begin(), other.zeros_.end());
        return BlaschkeProduct(std::move(z));
    }

    /// Distinct zeros in order of first appearance. Equality is exact: nearly
    /// coincident zeros are distinct zeros.
    std::vector<DistinctZero> distinctZeros() const {
        std::vector<DistinctZero> out;
        for (const auto& p : zeros_) {
            auto it = std::find_if(out.begin(), out.end(), [&](const DistinctZero& d) { return d.point == p; });
            if (it == out.end())
                out.push_back({p, 1});
            else
                ++it->multiplicity;
        }
        return out;
    }

    int multiplicityOf(DiskPoint p) const {
        return static_cast<int>(std::count(zeros_.begin(), zeros_.end(), p));
    }

    /// True when `divisor`'s zero multiset is contained in this one's.
    bool isDivisibleBy(const BlaschkeProduct& divisor) const {
        for (const auto& d : divisor.distinctZeros())
            if (multiplicityOf(d.point) < d.multiplicity) return false;
        return true;
    }

    /// Remove the zeros of `divisor`; requires isDivisibleBy(divisor).
    BlaschkeProduct dividedBy(const BlaschkeProduct& divisor) const {
        if (!isDivisibleBy(divisor)) throw Error(ErrorCode::NotApplicable, "divisor does not divide the product");
        std::vector<DiskPoint> z = zeros_;
        for (const auto& p : divisor.zeros_) z.erase(std::find(z.begin(), z.end(), p));
        return BlaschkeProduct(std::move(z));
    }

    bool sharesZeroWith(const BlaschkeProduct& other) const {
        for (const auto& p : zeros_)
            if (other.multiplicityOf(p) > 0) return true;
        return false;
    }

    bool sameZeroMultiset(const BlaschkeProduct& other) const {
        return degree() == other.degree() && isDivisibleBy(other);
    }

    bool hasRepeatedZero() const { return static_cast<int>(distinctZeros().size()) != degree(); }

    friend bool operator==(const BlaschkeProduct& a, const BlaschkeProduct& b) { return a.zeros_ == b.zeros_; }

private:
    std::vector<DiskPoint> zeros_;
};

inline BlaschkeProduct productOf(std::span<const BlaschkeProduct> family) {
    BlaschkeProduct out;
    for (const auto& f : family) out = out * f;
    return out;
}

/// Ratio |b_a(b)|^{1/2} / (1 - max(|a|,|b|)^2)^{1/2}; the quantity whose sup is eta.
inline double etaRatio(DiskPoint a, DiskPoint b) {
    const double m = std::max(a.modulus(), b.modulus());
    return std::sqrt(pseudoHyperbolic(a, b)) / std::sqrt(1.0 - m * m);
}

/// sup over ordered pairs (j,k), diagonal included (it contributes 0).
inline double computeEta(const BlaschkeProduct& theta) {
    double eta = 0.0;
    const auto& z = theta.zeros();
    for (const auto& a : z)
        for (const auto& b : z) eta = std::max(eta, etaRatio(a, b));
    return eta;
}

/// eta of a factorization: sup over factors of the per-factor eta.
inline double computeEta(std::span<const BlaschkeProduct> family) {
    double eta = 0.0;
    for (const auto& f : family) eta = std::max(eta, computeEta(f));
    return eta;
}

/// inf_k prod_{j != k} |b_{lambda_j}(lambda_k)| for distinct points.
inline double computeCarlesonConstant(std::span<const DiskPoint> zeros) {
    for (std::size_t i = 0; i < zeros.size(); ++i)
        for (std::size_t j = i + 1; j < zeros.size(); ++j)
            if (zeros[i] == zeros[j]) {
                std::ostringstream os;
                os << "zero " << zeros[i].value() << " appears more than once";
                throw Error(ErrorCode::DuplicatePoint, os.str());
            }
    double best = 1.0;
    for (std::size_t k = 0; k < zeros.size(); ++k) {
        double prod = 1.0;
        for (std::size_t j = 0; j < zeros.size(); ++j)
            if (j != k) prod *= pseudoHyperbolic(zeros[j], zeros[k]);
        best = std::min(best, prod);
    }
    return best;
}

/// inf_n inf over distinct-index zero pairs of theta_n of |b_lambda(mu)|^{1/2}.
/// A family with no pairs at all (only single-zero factors) yields 1.
inline double computeDelta(std::span<const BlaschkeProduct> family) {
    double delta = 1.0;
    for (const auto& f : family) {
        const auto& z = f.zeros();
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t j = i + 1; j < z.size(); ++j)
                delta = std::min(delta, std::sqrt(pseudoHyperbolic(z[i], z[j])));
    }
    return delta;
}

struct SequenceConstants {
    double eta = 0.0;
    double delta = 1.0;
    double carleson = 1.0;     // classical constant of all zeros; 0 if a zero repeats
    bool hasZeroPair = false;  // some factor has at least two zeros
};

inline SequenceConstants computeSequenceConstants(std::span<const BlaschkeProduct> family) {
    SequenceConstants c;
    c.eta = computeEta(family);
    c.delta = computeDelta(family);
    BlaschkeProduct all = productOf(family);
    c.carleson = all.hasRepeatedZero() ? 0.0 : computeCarlesonConstant(all.zeros());
    for (const auto& f : family) c.hasZeroPair = c.hasZeroPair || f.degree() >= 2;
    return c;
}

} // namespace msk
