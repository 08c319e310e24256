#pragma once

#include <optional>
#include <string>

#include "kl/certifier.hpp"
#include "kl/moreau.hpp"
#include "kl/sampler.hpp"

namespace kl {

inline constexpr const char* kReportSchema = "kl-analyzer/1";

struct Report {
    std::string command;
    std::string problem_digest;
    std::string kind;
    std::optional<KLCertificate> certificate;
    std::optional<std::string> certificate_error;
    std::optional<double> oracle_estimate;
    std::optional<ExponentEstimate> exponent_estimate;
    std::optional<EnvelopeSweep> sweep;
    std::optional<std::string> records_csv;
    std::optional<std::string> sweep_csv;
};

/// |certified - oracle| <= max(0.05 certified, 0.02) when both are finite; false otherwise.
bool agreement(std::optional<double> certified, std::optional<double> oracle);

/// Serializes with a fixed key order and 17 significant digits; infinities as the string "Infinity".
std::string to_json(const Report& r);

}  // namespace kl
