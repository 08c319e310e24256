#include "kl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "kl/format.hpp"

namespace kl {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}

std::string num(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return quote(format_double(v));
    return format_double(v);
}

std::string boolean(bool b) { return b ? "true" : "false"; }

std::string array(const Vector& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
    return out + "]";
}

std::string certificate_json(const KLCertificate& c, const std::string& ind) {
    std::string out = "{\n";
    out += ind + "  \"verdict\": " + quote(std::string(to_string(c.verdict))) + ",\n";
    out += ind + "  \"modulus\": " + num(c.modulus) + ",\n";
    out += ind + "  \"sharp\": " + boolean(c.sharp) + ",\n";
    out += ind + "  \"infimum_attained\": " + boolean(c.infimum_attained) + ",\n";
    out += ind + "  \"witness_w\": " + (c.witness_w ? array(*c.witness_w) : "null") + ",\n";
    out += ind + "  \"diagnostics\": [";
    for (std::size_t i = 0; i < c.diagnostics.size(); ++i) out += (i ? ", " : "") + quote(c.diagnostics[i]);
    out += "]\n" + ind + "}";
    return out;
}

}  // namespace

bool agreement(std::optional<double> certified, std::optional<double> oracle) {
    if (!certified || !oracle || !std::isfinite(*certified) || !std::isfinite(*oracle)) return false;
    const double band = std::max(0.05 * *certified, 0.02);
    return std::abs(*certified - *oracle) <= band;
}

std::string to_json(const Report& r) {
    std::optional<double> certified;
    if (r.certificate && r.certificate->verdict == Verdict::KlHoldsHalf) certified = r.certificate->modulus;

    std::string out = "{\n";
    out += "  \"schema\": " + quote(kReportSchema) + ",\n";
    out += "  \"command\": " + quote(r.command) + ",\n";
    out += "  \"problem_digest\": " + quote(r.problem_digest) + ",\n";
    out += "  \"kind\": " + quote(r.kind) + ",\n";
    out += "  \"certificate\": " + (r.certificate ? certificate_json(*r.certificate, "  ") : "null") + ",\n";
    out += "  \"certificate_error\": " + (r.certificate_error ? quote(*r.certificate_error) : "null") + ",\n";
    out += "  \"oracle_estimate\": " + (r.oracle_estimate ? num(*r.oracle_estimate) : "null") + ",\n";
    out += "  \"exponent_estimate\": ";
    if (r.exponent_estimate)
        out += "{\"theta_hat\": " + num(r.exponent_estimate->theta_hat) + ", \"r2\": " + num(r.exponent_estimate->r2) +
               ", \"bins\": " + std::to_string(r.exponent_estimate->bins_used) + "}";
    else
        out += "null";
    out += ",\n  \"sweep\": ";
    if (r.sweep) {
        const auto& s = *r.sweep;
        out += "{\n    \"lambdas\": " + array(s.lambdas) + ",\n    \"moduli\": " + array(s.moduli) +
               ",\n    \"limit_modulus\": " + num(s.limit_modulus) + ",\n    \"monotone\": " + boolean(s.monotone) +
               ",\n    \"bounded\": " + boolean(s.bounded) + ",\n    \"converged\": " + boolean(s.converged) + "\n  }";
    } else {
        out += "null";
    }
    out += ",\n  \"records_csv\": " + (r.records_csv ? quote(*r.records_csv) : "null") + ",\n";
    out += "  \"sweep_csv\": " + (r.sweep_csv ? quote(*r.sweep_csv) : "null") + ",\n";
    out += "  \"agreement\": " + boolean(agreement(certified, r.oracle_estimate)) + "\n}\n";
    return out;
}

}  // namespace kl
