#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kl {

enum class ErrorKind {
    DimensionMismatch,
    DomainError,
    NotStationary,
    SingularHessian,
    PatternExplosion,
    UnsupportedClass,
    EmptyBudget,
    InsufficientSamples,
    NoConvergence,
    ProxDiverged,
    InvalidArgument,
    ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; the kind is the stable part of the contract.
class KlError : public std::runtime_error {
public:
    KlError(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace kl
