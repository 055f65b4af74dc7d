#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>
#include <vector>

#include "msk/blaschke.hpp"
#include "msk/types.hpp"

namespace msk {

/// Truncated Taylor series: coefficient k is f^{(k)}(z0) / k!.
using Series = std::vector<Complex>;

namespace series {

inline Series multiply(const Series& a, const Series& b, int order) {
    Series out(static_cast<std::size_t>(order), Complex(0.0));
    for (int i = 0; i < order && i < static_cast<int>(a.size()); ++i)
        for (int j = 0; i + j < order && j < static_cast<int>(b.size()); ++j)
            out[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return out;
}

/// a / b with b[0] != 0.
inline Series divide(const Series& a, const Series& b, int order) {
    Series out(static_cast<std::size_t>(order), Complex(0.0));
    for (int n = 0; n < order; ++n) {
        Complex acc = n < static_cast<int>(a.size()) ? a[static_cast<std::size_t>(n)] : Complex(0.0);
        for (int k = 1; k <= n && k < static_cast<int>(b.size()); ++k)
            acc -= b[static_cast<std::size_t>(k)] * out[static_cast<std::size_t>(n - k)];
        out[static_cast<std::size_t>(n)] = acc / b[0];
    }
    return out;
}

/// Expansion of b_lambda about z0.
inline Series blaschkeFactor(DiskPoint lambda, Complex z0, int order) {
    const Complex c = std::conj(lambda.value());
    const Complex a = z0 - lambda.value();
    const Complex d = 1.0 - c * z0;
    Series out(static_cast<std::size_t>(order));
    Complex q = 1.0 / d;  // (c/d)^n / d
    Complex prev(0.0);
    for (int n = 0; n < order; ++n) {
        out[static_cast<std::size_t>(n)] = a * q + prev;
        prev = q;
        q *= c / d;
    }
    return out;
}

/// Taylor shift of an ascending-coefficient polynomial to z0.
inline Series polynomial(const std::vector<Complex>& coeffs, Complex z0, int order) {
    std::vector<Complex> work = coeffs;
    Series out(static_cast<std::size_t>(order), Complex(0.0));
    for (int k = 0; k < order && !work.empty(); ++k) {
        // Synthetic division by (z - z0): remainder is the next Taylor coefficient.
        const std::size_t n = work.size();
        Complex carry(0.0);
        std::vector<Complex> quotient(n > 0 ? n - 1 : 0);
        for (std::size_t i = n; i-- > 0;) {
            Complex v = work[i] + carry * z0;
            if (i == 0)
                out[static_cast<std::size_t>(k)] = v;
            else
                quotient[i - 1] = v;
            carry = v;
        }
        work = std::move(quotient);
    }
    return out;
}

} // namespace series

/// Confluent Newton form of a Hermite interpolant. Nodes are listed with
/// repetition, equal nodes adjacent.
struct NewtonForm {
    std::vector<Complex> nodes;
    std::vector<Complex> coeffs;

    Complex operator()(Complex z) const {
        const int n = static_cast<int>(coeffs.size());
        if (n == 0) return Complex(0.0);
        Complex acc = coeffs[static_cast<std::size_t>(n - 1)];
        for (int k = n - 2; k >= 0; --k) acc = coeffs[static_cast<std::size_t>(k)] + (z - nodes[static_cast<std::size_t>(k)]) * acc;
        return acc;
    }

    Matrix operator()(const Matrix& t) const {
        const Eigen::Index dim = t.rows();
        const int n = static_cast<int>(coeffs.size());
        Matrix eye = Matrix::Identity(dim, dim);
        if (n == 0) return Matrix::Zero(dim, dim);
        Matrix acc = coeffs[static_cast<std::size_t>(n - 1)] * eye;
        for (int k = n - 2; k >= 0; --k)
            acc = coeffs[static_cast<std::size_t>(k)] * eye + (t - nodes[static_cast<std::size_t>(k)] * eye) * acc;
        return acc;
    }

    /// Ascending monomial coefficients.
    std::vector<Complex> monomialCoefficients() const {
        std::vector<Complex> poly{Complex(0.0)};
        std::vector<Complex> basis{Complex(1.0)};  // prod_{i<k} (z - x_i)
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (poly.size() < basis.size()) poly.resize(basis.size(), Complex(0.0));
            for (std::size_t i = 0; i < basis.size(); ++i) poly[i] += coeffs[k] * basis[i];
            std::vector<Complex> next(basis.size() + 1, Complex(0.0));
            for (std::size_t i = 0; i < basis.size(); ++i) {
                next[i + 1] += basis[i];
                next[i] -= nodes[k] * basis[i];
            }
            basis = std::move(next);
        }
        return poly;
    }
};

/// Confluent divided differences. `jets[i]` holds Taylor coefficients at the
/// distinct node `distinct[i]`, its length being the multiplicity.
inline NewtonForm newtonFromJets(const std::vector<Complex>& distinct, const std::vector<Series>& jets) {
    NewtonForm nf;
    std::vector<Complex> first;  // Taylor coefficients per expanded slot
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < distinct.size(); ++i)
        for (std::size_t k = 0; k < jets[i].size(); ++k) {
            nf.nodes.push_back(distinct[i]);
            owner.push_back(i);
        }
    const std::size_t n = nf.nodes.size();
    std::vector<Complex> dd(n);
    for (std::size_t i = 0; i < n; ++i) dd[i] = jets[owner[i]][0];
    nf.coeffs.assign(n, Complex(0.0));
    if (n == 0) return nf;
    nf.coeffs[0] = dd[0];
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t i = n - 1; i >= k; --i) {
            if (nf.nodes[i] == nf.nodes[i - k])
                dd[i] = jets[owner[i]][k];
            else
                dd[i] = (dd[i] - dd[i - 1]) / (nf.nodes[i] - nf.nodes[i - k]);
            if (i == k) break;
        }
        nf.coeffs[k] = dd[k];
    }
    return nf;
}

/// A representable element of H^infinity.
///
/// Alternatives: polynomial, finite Blaschke product, quotient by a Blaschke
/// product (bounded on the circle), Hermite node data, plus linear
/// combinations and products of those. HermiteData stands for the coset of its
/// interpolating polynomial, which is also how it evaluates off the nodes.
class FunctionRep {
public:
    struct Polynomial {
        std::vector<Complex> coeffs;  // ascending
    };
    struct Blaschke {
        BlaschkeProduct product;
    };
    struct RationalQuotient {
        std::vector<FunctionRep> numerator;  // exactly one element
        BlaschkeProduct denominator;
    };
    struct HermiteData {
        std::vector<Complex> nodes;  // distinct
        std::vector<Series> taylor;  // taylor[i].size() == multiplicity of nodes[i]
        NewtonForm newton;
    };
    struct Sum {
        std::vector<Complex> weights;
        std::vector<FunctionRep> terms;
    };
    struct Product {
        std::vector<FunctionRep> factors;
    };
    /// sum_k coords[k] phi_k, phi_k the Takenaka-Malmquist basis of H(theta).
    struct ModelVector {
        BlaschkeProduct theta;
        std::vector<Complex> coords;
    };
    /// numerator / denominator, analytic wherever it is evaluated.
    struct Ratio {
        std::vector<FunctionRep> numerator;    // exactly one element
        std::vector<FunctionRep> denominator;  // exactly one element
    };

    using Node = std::variant<Polynomial, Blaschke, RationalQuotient, HermiteData, Sum, Product, ModelVector, Ratio>;

    FunctionRep() : node_(Polynomial{{Complex(0.0)}}) {}
    explicit FunctionRep(Node node) : node_(std::move(node)) {}

    static FunctionRep constant(Complex c) { return FunctionRep(Polynomial{{c}}); }
    static FunctionRep polynomial(std::vector<Complex> coeffs) { return FunctionRep(Polynomial{std::move(coeffs)}); }
    static FunctionRep identity() { return polynomial({Complex(0.0), Complex(1.0)}); }
    static FunctionRep blaschke(BlaschkeProduct b) { return FunctionRep(Blaschke{std::move(b)}); }
    static FunctionRep quotient(FunctionRep numerator, BlaschkeProduct denominator) {
        return FunctionRep(RationalQuotient{{std::move(numerator)}, std::move(denominator)});
    }
    static FunctionRep modelVector(BlaschkeProduct theta, std::vector<Complex> coords) {
        if (static_cast<int>(coords.size()) != theta.degree())
            throw Error(ErrorCode::NotApplicable, "model vector needs one coordinate per zero");
        return FunctionRep(ModelVector{std::move(theta), std::move(coords)});
    }
    static FunctionRep ratio(FunctionRep numerator, FunctionRep denominator) {
        return FunctionRep(Ratio{{std::move(numerator)}, {std::move(denominator)}});
    }
    static FunctionRep hermite(std::vector<Complex> nodes, std::vector<Series> taylor) {
        if (nodes.size() != taylor.size()) throw Error(ErrorCode::NodeEvaluationFailure, "node/jet count mismatch");
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = i + 1; j < nodes.size(); ++j)
                if (nodes[i] == nodes[j]) throw Error(ErrorCode::NodeEvaluationFailure, "hermite nodes must be distinct");
        HermiteData h{std::move(nodes), std::move(taylor), {}};
        h.newton = newtonFromJets(h.nodes, h.taylor);
        return FunctionRep(std::move(h));
    }

    const Node& node() const noexcept { return node_; }

    template <typename T>
    const T* as() const noexcept { return std::get_if<T>(&node_); }

    friend FunctionRep operator+(const FunctionRep& a, const FunctionRep& b) {
        return FunctionRep(Sum{{Complex(1.0), Complex(1.0)}, {a, b}});
    }
    friend FunctionRep operator-(const FunctionRep& a, const FunctionRep& b) {
        return FunctionRep(Sum{{Complex(1.0), Complex(-1.0)}, {a, b}});
    }
    friend FunctionRep operator*(Complex s, const FunctionRep& a) { return FunctionRep(Sum{{s}, {a}}); }
    friend FunctionRep operator*(const FunctionRep& a, const FunctionRep& b) { return FunctionRep(Product{{a, b}}); }

    Complex operator()(Complex z) const {
        return std::visit([&](const auto& n) { return evalNode(n, z); }, node_);
    }

    /// Taylor coefficients at z0 up to (excluding) `order`, computed analytically.
    Series taylor(Complex z0, int order) const {
        return std::visit([&](const auto& n) { return taylorNode(n, z0, order); }, node_);
    }

    /// True when the function is analytic on a neighbourhood of the closed disk
    /// in a form that can be evaluated on a contraction directly.
    bool directlyEvaluable() const {
        return std::visit(
            [](const auto& n) -> bool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, RationalQuotient> || std::is_same_v<T, Ratio>)
                    return false;
                else if constexpr (std::is_same_v<T, Sum>)
                    return std::all_of(n.terms.begin(), n.terms.end(), [](const auto& t) { return t.directlyEvaluable(); });
                else if constexpr (std::is_same_v<T, Product>)
                    return std::all_of(n.factors.begin(), n.factors.end(), [](const auto& t) { return t.directlyEvaluable(); });
                else
                    return true;
            },
            node_);
    }

    /// u(T) for a contraction T, valid when directlyEvaluable().
    Matrix evaluate(const Matrix& t) const {
        return std::visit([&](const auto& n) { return evaluateNode(n, t); }, node_);
    }

    /// Cancels quotient denominators against Blaschke factors of a product
    /// (e.g. g_A * theta/theta_A), and Blaschke numerators over divisors.
    FunctionRep simplified() const;

private:
    static Complex evalNode(const Polynomial& p, Complex z) {
        Complex acc(0.0);
        for (std::size_t i = p.coeffs.size(); i-- > 0;) acc = acc * z + p.coeffs[i];
        return acc;
    }
    static Complex evalNode(const Blaschke& b, Complex z) { return b.product(z); }
    static Complex evalNode(const RationalQuotient& q, Complex z) {
        Complex den = q.denominator(z);
        if (den == Complex(0.0)) return q.numerator.front().taylorQuotient(q.denominator, z, 1)[0];
        return q.numerator.front()(z) / den;
    }
    static Complex evalNode(const HermiteData& h, Complex z) { return h.newton(z); }
    static Complex evalNode(const Sum& s, Complex z) {
        Complex acc(0.0);
        for (std::size_t i = 0; i < s.terms.size(); ++i) acc += s.weights[i] * s.terms[i](z);
        return acc;
    }
    static Complex evalNode(const Product& p, Complex z) {
        Complex acc(1.0);
        for (const auto& f : p.factors) acc *= f(z);
        return acc;
    }

    static Complex evalNode(const ModelVector& v, Complex z) {
        Complex acc(0.0), alpha(1.0);
        for (int k = 0; k < v.theta.degree(); ++k) {
            const DiskPoint l = v.theta.zero(k);
            acc += v.coords[static_cast<std::size_t>(k)] * std::sqrt(1.0 - std::norm(l.value())) * kernel(l, z) * alpha;
            alpha *= blaschkeFactor(l, z);
        }
        return acc;
    }
    static Complex evalNode(const Ratio& r, Complex z) { return r.numerator.front()(z) / r.denominator.front()(z); }

    static Series taylorNode(const Polynomial& p, Complex z0, int order) { return series::polynomial(p.coeffs, z0, order); }
    static Series taylorNode(const Blaschke& b, Complex z0, int order) {
        Series out(static_cast<std::size_t>(order), Complex(0.0));
        if (order > 0) out[0] = 1.0;
        for (const auto& p : b.product.zeros()) out = series::multiply(out, series::blaschkeFactor(p, z0, order), order);
        return out;
    }
    static Series taylorNode(const RationalQuotient& q, Complex z0, int order) {
        return q.numerator.front().taylorQuotient(q.denominator, z0, order);
    }
    static Series taylorNode(const HermiteData& h, Complex z0, int order) {
        for (std::size_t i = 0; i < h.nodes.size(); ++i)
            if (h.nodes[i] == z0 && static_cast<int>(h.taylor[i].size()) >= order)
                return Series(h.taylor[i].begin(), h.taylor[i].begin() + order);
        return series::polynomial(h.newton.monomialCoefficients(), z0, order);
    }
    static Series taylorNode(const Sum& s, Complex z0, int order) {
        Series out(static_cast<std::size_t>(order), Complex(0.0));
        for (std::size_t i = 0; i < s.terms.size(); ++i) {
            Series t = s.terms[i].taylor(z0, order);
            for (int k = 0; k < order; ++k) out[static_cast<std::size_t>(k)] += s.weights[i] * t[static_cast<std::size_t>(k)];
        }
        return out;
    }
    static Series taylorNode(const Product& p, Complex z0, int order) {
        Series out(static_cast<std::size_t>(order), Complex(0.0));
        if (order > 0) out[0] = 1.0;
        for (const auto& f : p.factors) out = series::multiply(out, f.taylor(z0, order), order);
        return out;
    }

    static Series taylorNode(const ModelVector& v, Complex z0, int order) {
        Series out(static_cast<std::size_t>(order), Complex(0.0));
        Series alpha(static_cast<std::size_t>(order), Complex(0.0));
        if (order > 0) alpha[0] = 1.0;
        for (int k = 0; k < v.theta.degree(); ++k) {
            const DiskPoint l = v.theta.zero(k);
            const Complex c = std::conj(l.value());
            const Complex d = 1.0 - c * z0;
            Series kern(static_cast<std::size_t>(order));
            Complex q = 1.0 / d;
            for (int n = 0; n < order; ++n) {
                kern[static_cast<std::size_t>(n)] = q;
                q *= c / d;
            }
            Series term = series::multiply(kern, alpha, order);
            const Complex w = v.coords[static_cast<std::size_t>(k)] * std::sqrt(1.0 - std::norm(l.value()));
            for (int n = 0; n < order; ++n) out[static_cast<std::size_t>(n)] += w * term[static_cast<std::size_t>(n)];
            alpha = series::multiply(alpha, series::blaschkeFactor(l, z0, order), order);
        }
        return out;
    }
    static Series taylorNode(const Ratio& r, Complex z0, int order) {
        Series n = r.numerator.front().taylor(z0, order);
        Series d = r.denominator.front().taylor(z0, order);
        double scale = 0.0;
        for (const auto& c : d) scale = std::max(scale, std::abs(c));
        if (order > 0 && std::abs(d[0]) <= 1e-14 * scale) {
            std::ostringstream os;
            os << "ratio denominator vanishes at " << z0;
            throw Error(ErrorCode::NodeEvaluationFailure, os.str());
        }
        return series::divide(n, d, order);
    }

    /// Taylor coefficients of (*this) / den at z0, removing a singularity where
    /// den vanishes at z0 provided the numerator vanishes to the same order.
    Series taylorQuotient(const BlaschkeProduct& den, Complex z0, int order) const {
        int r = 0;
        for (const auto& p : den.zeros())
            if (p.value() == z0) ++r;
        Series d = taylorNode(Blaschke{den}, z0, order + r);
        Series n = taylor(z0, order + r);
        double scale = 1.0;
        for (const auto& c : n) scale = std::max(scale, std::abs(c));
        for (int i = 0; i < r; ++i)
            if (std::abs(n[static_cast<std::size_t>(i)]) > 1e-8 * scale) {
                std::ostringstream os;
                os << "quotient has a pole at " << z0;
                throw Error(ErrorCode::NodeEvaluationFailure, os.str());
            }
        Series ns(n.begin() + r, n.end());
        Series ds(d.begin() + r, d.end());
        return series::divide(ns, ds, order);
    }

    static Matrix evaluateNode(const Polynomial& p, const Matrix& t) {
        const Eigen::Index n = t.rows();
        Matrix acc = Matrix::Zero(n, n);
        for (std::size_t i = p.coeffs.size(); i-- > 0;) {
            acc = acc * t;
            acc.diagonal().array() += p.coeffs[i];
        }
        return acc;
    }
    static Matrix evaluateNode(const Blaschke& b, const Matrix& t) {
        const Eigen::Index n = t.rows();
        Matrix eye = Matrix::Identity(n, n);
        Matrix acc = eye;
        for (const auto& p : b.product.zeros()) {
            const Complex l = p.value();
            Matrix rhs = (t - l * eye) * acc;
            acc = (eye - std::conj(l) * t).partialPivLu().solve(rhs);
        }
        return acc;
    }
    static Matrix evaluateNode(const RationalQuotient&, const Matrix&) {
        throw Error(ErrorCode::NodeEvaluationFailure, "quotient with interior poles needs Hermite interpolation");
    }
    static Matrix evaluateNode(const HermiteData& h, const Matrix& t) { return h.newton(t); }
    static Matrix evaluateNode(const ModelVector& v, const Matrix& t) {
        const Eigen::Index n = t.rows();
        Matrix eye = Matrix::Identity(n, n);
        Matrix acc = Matrix::Zero(n, n);
        Matrix alpha = eye;
        for (int k = 0; k < v.theta.degree(); ++k) {
            const Complex l = v.theta.zero(k).value();
            Eigen::PartialPivLU<Matrix> lu(eye - std::conj(l) * t);
            acc += v.coords[static_cast<std::size_t>(k)] * std::sqrt(1.0 - std::norm(l)) * lu.solve(alpha);
            alpha = lu.solve(Matrix((t - l * eye) * alpha));
        }
        return acc;
    }
    static Matrix evaluateNode(const Ratio&, const Matrix&) {
        throw Error(ErrorCode::NodeEvaluationFailure, "ratio needs Hermite interpolation");
    }
    static Matrix evaluateNode(const Sum& s, const Matrix& t) {
        Matrix acc = Matrix::Zero(t.rows(), t.cols());
        for (std::size_t i = 0; i < s.terms.size(); ++i) acc += s.weights[i] * s.terms[i].evaluate(t);
        return acc;
    }
    static Matrix evaluateNode(const Product& p, const Matrix& t) {
        Matrix acc = Matrix::Identity(t.rows(), t.cols());
        for (const auto& f : p.factors) acc = acc * f.evaluate(t);
        return acc;
    }

    Node node_;
};

inline FunctionRep FunctionRep::simplified() const {
    if (const auto* q = as<RationalQuotient>()) {
        FunctionRep num = q->numerator.front().simplified();
        if (const auto* b = num.as<Blaschke>(); b && b->product.isDivisibleBy(q->denominator))
            return blaschke(b->product.dividedBy(q->denominator));
        return quotient(std::move(num), q->denominator);
    }
    if (const auto* r = as<Ratio>()) return ratio(r->numerator.front().simplified(), r->denominator.front().simplified());
    if (const auto* s = as<Sum>()) {
        Sum out{s->weights, {}};
        for (const auto& t : s->terms) out.terms.push_back(t.simplified());
        return FunctionRep(std::move(out));
    }
    if (const auto* p = as<Product>()) {
        // Flatten, pool Blaschke factors, then cancel quotient denominators.
        std::vector<FunctionRep> flat;
        std::vector<FunctionRep> stack(p->factors.rbegin(), p->factors.rend());
        while (!stack.empty()) {
            FunctionRep f = stack.back().simplified();
            stack.pop_back();
            if (const auto* inner = f.as<Product>())
                stack.insert(stack.end(), inner->factors.rbegin(), inner->factors.rend());
            else
                flat.push_back(std::move(f));
        }
        BlaschkeProduct pooled;
        std::vector<FunctionRep> rest;
        for (auto& f : flat) {
            if (const auto* b = f.as<Blaschke>())
                pooled = pooled * b->product;
            else
                rest.push_back(std::move(f));
        }
        for (auto& f : rest) {
            if (const auto* q = f.as<RationalQuotient>(); q && pooled.isDivisibleBy(q->denominator)) {
                pooled = pooled.dividedBy(q->denominator);
                FunctionRep num = q->numerator.front();
                f = std::move(num);
            }
        }
        Product out;
        if (!pooled.empty()) out.factors.push_back(blaschke(pooled));
        for (auto& f : rest) out.factors.push_back(std::move(f));
        if (out.factors.empty()) return constant(1.0);
        if (out.factors.size() == 1) return out.factors.front();
        return FunctionRep(std::move(out));
    }
    return *this;
}

/// Hermite data of u at the zeros of theta (multiplicities as derivative orders).
inline FunctionRep hermiteDataOf(const FunctionRep& u, const BlaschkeProduct& theta) {
    std::vector<Complex> nodes;
    std::vector<Series> jets;
    for (const auto& d : theta.distinctZeros()) {
        nodes.push_back(d.point.value());
        jets.push_back(u.taylor(d.point.value(), d.multiplicity));
    }
    return FunctionRep::hermite(std::move(nodes), std::move(jets));
}

/// Sup of |u| over an L-point boundary grid.
inline double boundarySupNorm(const FunctionRep& u, int gridSize) {
    double best = 0.0;
    for (int i = 0; i < gridSize; ++i) best = std::max(best, std::abs(u(std::polar(1.0, 2.0 * kPi * i / gridSize))));
    return best;
}

} // namespace msk
