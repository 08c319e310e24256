#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kl/linalg.hpp"
#include "kl/model.hpp"

namespace kl {

/// Tolerance used for activity and index-boundary decisions: 1e-8 * (1 + |F(x)|).
double activity_tolerance(double function_value) noexcept;

/// The l1 index sets at a stationary point: I (zero, strictly inside), J (nonzero),
/// K+ / K- (zero, gradient on the boundary +mu / -mu).
struct IndexPartition {
    std::vector<std::size_t> interior;  // I
    std::vector<std::size_t> support;   // J
    std::vector<std::size_t> kplus;
    std::vector<std::size_t> kminus;

    /// K+ and K- both empty, i.e. 0 lies in the relative interior of the subdifferential.
    bool relative_interior() const noexcept { return kplus.empty() && kminus.empty(); }
};

struct ActiveSetData {
    std::vector<std::size_t> active;
    std::vector<Vector> gradients;  // aligned with active
    std::vector<Matrix> hessians;   // aligned with active
    double value = 0.0;
};

/// d(0, dF(x)) for each supported class.
double subgrad_distance(const StructuredFunction& f, std::span<const double> x);
inline double subgrad_distance(const StructuredFunction& f, const Point& x) { return subgrad_distance(f, x.coords()); }

/// d(0, dF(x)) <= tol; for the max class the multiplier polytope must also be nonempty.
bool is_stationary(const StructuredFunction& f, const Point& x, double tol);

IndexPartition classify_l1_indices(const StructuredFunction& f, const Point& xbar);

ActiveSetData active_set(const StructuredFunction& f, const Point& xbar);

/// Some lambda >= 0 with sum 1 and sum lambda_i grad_i = 0 exists.
bool multiplier_polytope_nonempty(const std::vector<Vector>& gradients);

/// True when some max member sits strictly below the max at x but within 10 tau of it; exact ties are not ambiguous.
bool max_activity_ambiguous(const MaxOfSmooth& f, std::span<const double> x);

/// Restriction of the lp objective to supp(x): F_I(y) = ||A_I y - b||^2 + mu ||y||_p^p.
struct LpRestriction {
    std::vector<std::size_t> support;
    Vector gradient;
    Matrix hessian;
};

LpRestriction lp_restriction(const LpLeastSquares& f, std::span<const double> x);

}  // namespace kl
