#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kl/linalg.hpp"
#include "kl/model.hpp"
#include "kl/subdiff.hpp"

namespace kl {

enum class Verdict { KlHoldsHalf, KlHoldsZeroNotSharp, NotCertified };

std::string_view to_string(Verdict v) noexcept;

struct KLCertificate {
    Verdict verdict = Verdict::NotCertified;
    /// KL(f, xbar, 1/2); +inf when no direction has positive second subderivative.
    double modulus = 0.0;
    bool sharp = false;
    /// Element of W for sharp certificates; the offending direction for NOT_CERTIFIED.
    std::optional<Vector> witness_w;
    /// False when the reported modulus is an infimum approached as <v,w> -> 0+.
    bool infimum_attained = true;
    std::vector<std::string> diagnostics;
};

/// A tuple satisfying the max-function optimality system at direction w; kappa = d^2 f(xbar|0)(w).
struct MaxKKTPoint {
    double kappa = 0.0;
    Vector lambda;  // aligned with ActiveSetData::active
    Vector beta;    // aligned with ActiveSetData::active
    Vector w;
    Vector z;
};

struct CertifierOptions {
    double stationarity_tol = 1e-8;
    int multistart = 64;
    int max_iterations = 500;
    double step_tol = 1e-12;
    std::uint64_t seed = 0x6b6c2d63657274ULL;
    std::size_t max_active = 12;
    std::size_t max_boundary = 20;
};

/// sqrt(lambda_min^+ / 2) for the smallest positive eigenvalue of H, or +inf if none.
double smooth_modulus_from_hessian(const Matrix& h);

KLCertificate certify_smooth(const SmoothOracle& f, const Point& xbar, const CertifierOptions& opts = {});
KLCertificate certify_max(const StructuredFunction& f, const Point& xbar, const CertifierOptions& opts = {});
KLCertificate certify_l1(const StructuredFunction& f, const Point& xbar, const CertifierOptions& opts = {});
KLCertificate certify_lp(const StructuredFunction& f, const Point& xbar, const CertifierOptions& opts = {});

/// Dispatches on the function class; the staircase fixture is rejected with UnsupportedClass.
KLCertificate certify(const StructuredFunction& f, const Point& xbar, const CertifierOptions& opts = {});

/// d^2 f(xbar|0)(w) for the max class: optimal value of the multiplier LP, or +inf outside the critical cone.
double max_second_subderivative(const ActiveSetData& data, const Vector& w);

/// Builds (kappa, lambda, beta, w, z) at a critical direction w; throws DomainError if w leaves the cone.
MaxKKTPoint max_kkt_point(const ActiveSetData& data, const Vector& w);

/// Largest violation of the multiplier equations, sign conditions and complementarity.
double kkt_violation(const ActiveSetData& data, const MaxKKTPoint& point);

struct CorollaryReport {
    bool quadratic_growth = false;         // (i)
    bool second_subderivative_pos = false; // (ii)
    bool level_set_bounded = false;        // (iii)
    bool graphical_derivative_pd = false;  // (iv)
    bool nonsingular = false;              // (v)
    bool chain_consistent = false;
    double growth_constant = 0.0;
    double level_set_radius = 0.0;  // +inf when unbounded
    std::optional<Vector> unbounded_direction;
};

/// Evaluates the quadratic-growth / positive-definiteness / nonsingularity conditions for the smooth class.
CorollaryReport corollary_conditions(const StructuredFunction& f, const Point& xbar);

}  // namespace kl
