#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kl/linalg.hpp"
#include "kl/model.hpp"

namespace kl {

struct SampleBudget {
    std::size_t levels = 10;                // K: annuli r_{k+1} <= |x - xbar| <= r_k for k = 0..K, r_k = eps 2^-k
    std::size_t samples_per_annulus = 2000; // N uniform samples per annulus
    std::uint64_t seed = 0;
    /// Extra samples along these directions (normalized internally), log-uniform radius inside each annulus.
    std::vector<Vector> directions;
    std::size_t directed_per_annulus = 200;
};

struct SampleRecord {
    Vector x;
    double gap = 0.0;
    double dist = 0.0;
    double ratio = 0.0;
    double radius = 0.0;
    std::size_t annulus = 0;
};

struct ModulusEstimate {
    /// Min ratio over the two innermost nonempty annuli; +inf when no sample had 0 < gap < nu.
    double estimate = 0.0;
    std::vector<SampleRecord> records;
    std::size_t rejected_ambiguous = 0;  // max-class samples inside the activity band
    std::size_t discarded_gap = 0;       // gap <= 0 or gap >= nu
};

/// (1 - theta) d(0, dF(x)) / (F(x) - F(xbar))^theta sampled on shrinking annuli around xbar.
ModulusEstimate estimate_modulus(const KLQuery& q, const SampleBudget& budget);

struct ExponentEstimate {
    double theta_hat = 0.0;
    double r2 = 0.0;
    std::size_t bins_used = 0;
};

inline constexpr std::size_t kExponentBins = 50;

/// Least-squares slope of log dist against log gap over the per-bin lower envelope of the records.
ExponentEstimate estimate_exponent(const std::vector<SampleRecord>& records);

/// Convenience form: samples with theta = 1/2 and regresses.
ExponentEstimate estimate_exponent(const StructuredFunction& f, const Point& xbar, double radius_eps,
                                   const SampleBudget& budget);

struct GridSpec {
    Vector taus;            // decreasing
    double delta = 1e-3;    // radius of the w' ball around w
    std::size_t m = 32;     // directions w' besides w itself
    std::uint64_t seed = 0;
};

/// taus 1e-2 * 2^-k for k = 0..13
GridSpec default_grid();

inline constexpr double kCapInf = 1e12;
inline constexpr double kTolPos = 1e-9;

struct SubderivativeEstimate {
    Vector w;               // as passed in
    double theta = 0.5;
    Vector tau_grid;
    std::vector<Vector> directions;  // w' used in the quotients (unit w and its perturbations)
    std::vector<Vector> quotients;   // quotients[t][j] for tau_grid[t], directions[j]
    double scale = 1.0;              // |w|^(1/(1-theta)), applied to the estimate
    double liminf_estimate = 0.0;
    bool infinite = false;
};

/// Difference quotients (f(xbar + tau w') - f(xbar)) / ((1 - theta) tau^(1/(1-theta))) near w.
SubderivativeEstimate estimate_theta_subderivative(const StructuredFunction& f, const Point& xbar, const Vector& w,
                                                   double theta, const GridSpec& grid = default_grid());

/// First candidate whose subderivative estimate lies in (kTolPos, kCapInf), if any.
std::optional<Vector> check_W_nonempty(const StructuredFunction& f, const Point& xbar, double theta,
                                       const std::vector<Vector>& candidates, const GridSpec& grid = default_grid());

/// CSV with header "radius,gap,dist,ratio".
std::string records_csv(const std::vector<SampleRecord>& records);

}  // namespace kl
