#include "kl/problem_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "kl/error.hpp"

namespace kl {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw KlError(ErrorKind::ParseError, (where.empty() ? std::string("/") : where) + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) schema_error(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(where + "/" + key, "missing field");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "Infinity") return std::numeric_limits<double>::infinity();
        if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    }
    schema_error(where, "expected a number");
}

Vector vec(const json& v, const std::string& where) {
    if (!v.is_array()) schema_error(where, "expected an array of numbers");
    Vector out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "/" + std::to_string(i)));
    return out;
}

Matrix mat(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) schema_error(where, "expected a nonempty array of rows");
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < v.size(); ++i) {
        rows.push_back(vec(v[i], where + "/" + std::to_string(i)));
        if (rows.back().size() != rows.front().size()) schema_error(where + "/" + std::to_string(i), "ragged matrix");
    }
    if (rows.front().empty()) schema_error(where, "empty rows");
    return Matrix::from_rows(rows);
}

OraclePtr smooth_payload(const json& obj, std::size_t n, const std::string& where) {
    if (!obj.is_object()) schema_error(where, "expected an object with a quadratic or polynomial payload");
    if (obj.contains("quadratic")) {
        const std::string w = where + "/quadratic";
        const json& q = obj["quadratic"];
        Matrix qm = mat(field(q, "Q", w), w + "/Q");
        if (qm.rows() != n || qm.cols() != n) schema_error(w + "/Q", "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
        Vector c = q.contains("c") ? vec(q["c"], w + "/c") : Vector(n, 0.0);
        if (c.size() != n) schema_error(w + "/c", "expected " + std::to_string(n) + " entries");
        const double d = q.contains("d") ? number(q["d"], w + "/d") : 0.0;
        return std::make_shared<Quadratic>(std::move(qm), std::move(c), d);
    }
    if (obj.contains("polynomial")) {
        const std::string w = where + "/polynomial";
        const json& p = obj["polynomial"];
        const json* terms = &p;
        const json* abs_terms = nullptr;
        if (p.is_object()) {
            terms = &field(p, "terms", w);
            if (p.contains("abs_powers")) abs_terms = &p["abs_powers"];
        }
        if (!terms->is_array()) schema_error(w + "/terms", "expected an array");
        std::vector<Monomial> mons;
        for (std::size_t i = 0; i < terms->size(); ++i) {
            const std::string tw = w + "/terms/" + std::to_string(i);
            const json& t = (*terms)[i];
            Monomial m;
            m.coef = number(field(t, "coef", tw), tw + "/coef");
            const json& e = field(t, "exponents", tw);
            if (!e.is_array()) schema_error(tw + "/exponents", "expected an array of integers");
            for (std::size_t k = 0; k < e.size(); ++k) {
                if (!e[k].is_number_integer()) schema_error(tw + "/exponents/" + std::to_string(k), "expected an integer");
                m.exponents.push_back(e[k].get<int>());
            }
            mons.push_back(std::move(m));
        }
        std::vector<AbsPowerTerm> abs;
        if (abs_terms) {
            if (!abs_terms->is_array()) schema_error(w + "/abs_powers", "expected an array");
            for (std::size_t i = 0; i < abs_terms->size(); ++i) {
                const std::string tw = w + "/abs_powers/" + std::to_string(i);
                const json& t = (*abs_terms)[i];
                AbsPowerTerm a;
                a.coef = number(field(t, "coef", tw), tw + "/coef");
                const json& idx = field(t, "index", tw);
                if (!idx.is_number_unsigned()) schema_error(tw + "/index", "expected a nonnegative integer");
                a.index = idx.get<std::size_t>();
                a.power = number(field(t, "power", tw), tw + "/power");
                abs.push_back(a);
            }
        }
        return std::make_shared<PolynomialOracle>(n, std::move(mons), std::move(abs));
    }
    schema_error(where, "expected a quadratic or polynomial payload");
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ProblemFile parse_problem(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports the byte just past the failure point, 1-based
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = line_column(text, byte);
        throw KlError(ErrorKind::ParseError, "malformed JSON at byte " + std::to_string(byte) + " (line " +
                                                 std::to_string(line) + ", column " + std::to_string(col) + ")");
    }
    if (!doc.is_object()) schema_error("", "expected a JSON object");
    const json& kind_j = field(doc, "kind", "");
    if (!kind_j.is_string()) schema_error("/kind", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    const json& dim_j = field(doc, "dimension", "");
    if (!dim_j.is_number_unsigned() || dim_j.get<std::size_t>() == 0) schema_error("/dimension", "expected a positive integer");
    const std::size_t n = dim_j.get<std::size_t>();

    std::optional<StructuredFunction> f;
    if (kind == "smooth") {
        f = StructuredFunction::smooth(smooth_payload(doc, n, ""));
    } else if (kind == "max") {
        const json& arr = field(doc, "max", "");
        if (!arr.is_array() || arr.empty()) schema_error("/max", "expected a nonempty array of smooth payloads");
        std::vector<OraclePtr> members;
        for (std::size_t i = 0; i < arr.size(); ++i) members.push_back(smooth_payload(arr[i], n, "/max/" + std::to_string(i)));
        f = StructuredFunction::max_of(std::move(members));
    } else if (kind == "l1") {
        const json& p = field(doc, "l1", "");
        const double mu = number(field(p, "mu", "/l1"), "/l1/mu");
        f = StructuredFunction::l1(smooth_payload(field(p, "smooth", "/l1"), n, "/l1/smooth"), mu);
    } else if (kind == "lp") {
        const json& p = field(doc, "lp", "");
        Matrix a = mat(field(p, "A", "/lp"), "/lp/A");
        if (a.cols() != n) schema_error("/lp/A", "expected " + std::to_string(n) + " columns");
        f = StructuredFunction::lp(std::move(a), vec(field(p, "b", "/lp"), "/lp/b"), number(field(p, "mu", "/lp"), "/lp/mu"),
                                   number(field(p, "p", "/lp"), "/lp/p"));
    } else if (kind == "staircase") {
        if (n != 1) schema_error("/dimension", "the staircase function is one-dimensional");
        f = StructuredFunction::staircase();
    } else {
        schema_error("/kind", "unknown kind '" + kind + "'");
    }

    Vector xbar = vec(field(doc, "xbar", ""), "/xbar");
    if (xbar.size() != n) schema_error("/xbar", "expected " + std::to_string(n) + " entries");
    ProblemFile out{KLQuery{std::move(*f), Point(std::move(xbar))}, {}, fnv1a_hex(text)};
    if (doc.contains("theta")) out.query.theta = number(doc["theta"], "/theta");
    if (doc.contains("radius_eps")) out.query.radius_eps = number(doc["radius_eps"], "/radius_eps");
    if (doc.contains("level_nu")) out.query.level_nu = number(doc["level_nu"], "/level_nu");
    if (doc.contains("directions")) {
        const json& d = doc["directions"];
        if (!d.is_array()) schema_error("/directions", "expected an array of vectors");
        for (std::size_t i = 0; i < d.size(); ++i) {
            out.directions.push_back(vec(d[i], "/directions/" + std::to_string(i)));
            if (out.directions.back().size() != n) schema_error("/directions/" + std::to_string(i), "wrong dimension");
        }
    }
    out.query.validate();
    return out;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw KlError(ErrorKind::InvalidArgument, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

}  // namespace kl
