#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msk/blaschke.hpp"
#include "msk/function_rep.hpp"
#include "msk/modelspace.hpp"
#include "msk/similarity.hpp"
#include "msk/types.hpp"

namespace msk {

using Json = nlohmann::ordered_json;

/// %.17g for finite values; JSON has no encoding for the rest, so those
/// become null.
inline std::string formatDouble(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace detail {

inline void dumpJson(const Json& j, std::string& out, int indent, int depth) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += pad;
            out += Json(it.key()).dump();
            out += sep;
            dumpJson(it.value(), out, indent, depth + 1);
        }
        out += close;
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        bool flat = true;
        for (const auto& e : j) flat = flat && !e.is_structured();
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += flat && indent > 0 ? ", " : ",";
            first = false;
            if (!flat) out += pad;
            dumpJson(e, out, indent, depth + 1);
        }
        if (!flat) out += close;
        out += ']';
        return;
    }
    case Json::value_t::number_float: out += formatDouble(j.get<double>()); return;
    default: out += j.dump(); return;
    }
}

} // namespace detail

/// JSON text with every float printed to 17 significant digits.
inline std::string dumpJson(const Json& j, int indent = 2) {
    std::string out;
    detail::dumpJson(j, out, indent, 0);
    return out;
}

inline Json complexToJson(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complexFromJson(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object() && j.contains("re")) return {j.at("re").get<double>(), j.value("im", 0.0)};
    throw Error(ErrorCode::ParseError, "expected a complex number as [re, im] or {re, im}");
}

/// [{re, im, mult}] with consecutive repeats grouped.
inline Json zerosToJson(const BlaschkeProduct& theta) {
    Json out = Json::array();
    const auto& z = theta.zeros();
    for (std::size_t i = 0; i < z.size();) {
        std::size_t j = i;
        while (j < z.size() && z[j] == z[i]) ++j;
        out.push_back({{"re", z[i].value().real()}, {"im", z[i].value().imag()}, {"mult", j - i}});
        i = j;
    }
    return out;
}

inline BlaschkeProduct zerosFromJson(const Json& j) {
    const Json& arr = j.is_object() && j.contains("zeros") ? j.at("zeros") : j;
    if (!arr.is_array()) throw Error(ErrorCode::ParseError, "zeros must be a JSON array");
    std::vector<DiskPoint> zeros;
    try {
        for (const auto& e : arr) {
            const Complex z = complexFromJson(e);
            const int mult = e.is_object() ? e.value("mult", 1) : 1;
            if (mult < 1) throw Error(ErrorCode::ParseError, "mult must be at least 1");
            for (int k = 0; k < mult; ++k) zeros.emplace_back(z);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return BlaschkeProduct(std::move(zeros));
}

inline Json familyToJson(std::span<const BlaschkeProduct> family) {
    Json out = Json::array();
    for (const auto& f : family) out.push_back(zerosToJson(f));
    return out;
}

inline std::vector<BlaschkeProduct> familyFromJson(const Json& j) {
    const Json& arr = j.is_object() && j.contains("family") ? j.at("family") : j;
    if (!arr.is_array()) throw Error(ErrorCode::ParseError, "family must be an array of zero arrays");
    std::vector<BlaschkeProduct> out;
    for (const auto& e : arr) out.push_back(zerosFromJson(e));
    return out;
}

/// Row-major rows of [re, im] pairs.
inline Json matrixToJson(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complexToJson(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrixFromJson(const Json& j) {
    if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, "matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(ErrorCode::ParseError, "matrix rows must all have the same length");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complexFromJson(row[static_cast<std::size_t>(k)]);
    }
    return m;
}

inline Json instanceToJson(const C0Instance& inst) {
    return {{"theta", zerosToJson(inst.theta)},
            {"matrix", matrixToJson(inst.matrix)},
            {"provenance",
             {{"seed", inst.provenance.seed},
              {"generator", inst.provenance.generator},
              {"conditioning", inst.provenance.conditioning}}}};
}

inline C0Instance instanceFromJson(const Json& j) {
    try {
        C0Instance inst;
        inst.theta = zerosFromJson(j.at("theta"));
        inst.matrix = matrixFromJson(j.at("matrix"));
        if (j.contains("provenance")) {
            const Json& p = j.at("provenance");
            inst.provenance.seed = p.value("seed", std::uint64_t{0});
            inst.provenance.generator = p.value("generator", std::string("external"));
            inst.provenance.conditioning = p.value("conditioning", 1.0);
        }
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

inline Json modelToJson(const ModelOperator& m) {
    return {{"theta", zerosToJson(m.theta)}, {"basis", m.basis}, {"matrix", matrixToJson(m.shift)}};
}

inline Json vectorToJson(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complexToJson(v(i)));
    return out;
}

inline Json certificateToJson(const SimilarityCertificate& c) {
    Json j = {{"branch", c.branch},
              {"X", matrixToJson(c.x)},
              {"normX", c.normX},
              {"normXinv", c.normXinv},
              {"intertwineResidual", c.intertwineResidual},
              {"residTol", c.residTol}};
    j["theoreticalBound"] = c.theoreticalBound ? Json(*c.theoreticalBound) : Json(nullptr);
    if (c.inverseBound) j["inverseBound"] = *c.inverseBound;
    j["boundParams"] = {{"beta1", c.params.beta1},
                        {"beta2", c.params.beta2},
                        {"psiNorm", c.params.psiNorm},
                        {"N", c.params.n},
                        {"eta", c.params.eta}};
    Json vs = Json::array();
    for (const auto& v : c.vectors) vs.push_back(vectorToJson(v));
    j["vectors"] = std::move(vs);
    return j;
}

/// Function descriptions accepted on input:
///   {"polynomial": [c0, c1, ...]}    coefficients as numbers or [re, im]
///   {"blaschke": zeros}
///   {"psi": j}                       theta with its j-th zero removed
///   {"quotient": {"numerator": f, "denominator": zeros}}
inline FunctionRep functionRepFromJson(const Json& j, const BlaschkeProduct& theta) {
    try {
        if (j.contains("polynomial")) {
            std::vector<Complex> c;
            for (const auto& e : j.at("polynomial")) c.push_back(complexFromJson(e));
            if (c.empty()) throw Error(ErrorCode::ParseError, "polynomial needs at least one coefficient");
            return FunctionRep::polynomial(std::move(c));
        }
        if (j.contains("blaschke")) return FunctionRep::blaschke(zerosFromJson(j.at("blaschke")));
        if (j.contains("psi")) {
            const int idx = j.at("psi").get<int>();
            if (idx < 0 || idx >= theta.degree()) throw Error(ErrorCode::ParseError, "psi index out of range");
            return FunctionRep::blaschke(theta.withoutIndex(idx));
        }
        if (j.contains("quotient")) {
            const Json& q = j.at("quotient");
            return FunctionRep::quotient(functionRepFromJson(q.at("numerator"), theta), zerosFromJson(q.at("denominator")));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    throw Error(ErrorCode::ParseError, "function must have one of: polynomial, blaschke, psi, quotient");
}

inline Json readJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
}

inline std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void writeTextFile(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
    out << text;
}

} // namespace msk
