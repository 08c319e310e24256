#pragma once

#include <limits>
#include <span>
#include <vector>

#include "kl/linalg.hpp"

namespace kl::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct EigenDecomposition {
    Vector values;   // descending
    Matrix vectors;  // column i pairs with values[i]
};

/// Cyclic-by-row Jacobi. Input is symmetrized first. Eigenvectors are sign-normalized so the first
/// nonzero component is positive; ties keep the rotation order, so output is deterministic.
EigenDecomposition jacobi_eigen(const Matrix& a, int max_sweeps = 100);

/// An eigenvalue counts as positive iff it exceeds 1e-10 * max(1, spectral radius).
double positive_threshold(std::span<const double> eigenvalues);
double spectral_radius(std::span<const double> eigenvalues);

struct MinNormResult {
    Vector point;
    Vector weights;  // on the simplex, one per input point
};

/// Wolfe's min-norm-point algorithm over conv(points).
MinNormResult min_norm_point(const std::vector<Vector>& points);

/// max_i -<v, p_i - v>; nonpositive (up to rounding) exactly when v is the min-norm point.
double wolfe_gap(const Vector& v, const std::vector<Vector>& points);

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// min (or max) c^T x  s.t.  a_eq x = b_eq,  a_ub x <= b_ub,  lower <= x <= upper.
/// Empty lower/upper default to 0 and +inf. -inf lower bounds are allowed.
struct LinearProgram {
    Vector c;
    bool maximize = false;
    Matrix a_eq;
    Vector b_eq;
    Matrix a_ub;
    Vector b_ub;
    Vector lower;
    Vector upper;
};

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vector x;
    double value = 0.0;
    /// Objective of the dual solution read off the final basis; equals value at optimality.
    double dual_value = 0.0;
    int pivots = 0;
};

/// Two-phase dense tableau simplex with Bland's rule. Variable count is expected to stay small.
LpResult solve_lp(const LinearProgram& lp);

struct QpResult {
    Vector x;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// min 1/2 x^T P x + q^T x  s.t.  a_eq x = b_eq, x >= 0, by a primal active-set method.
/// P must be positive semidefinite and x0 feasible. Equality-constrained subproblems are solved
/// with a symmetric pseudo-inverse so redundant rows are tolerated.
QpResult solve_nonneg_qp(const Matrix& p, const Vector& q, const Matrix& a_eq, const Vector& b_eq,
                         const Vector& x0, int max_iterations = 500);

/// Orthonormal basis (as columns) of {x : ||Ax|| <= tol * ||A|| * ||x||}, via one-sided Jacobi SVD.
Matrix null_space(const Matrix& a, double tol = 1e-9);

/// Solves A x = b by Gaussian elimination with partial pivoting; throws DomainError if singular.
Vector solve_linear(Matrix a, Vector b);

/// Least-norm solution of a symmetric system M x = b through its eigendecomposition.
Vector solve_symmetric_pinv(const Matrix& m, const Vector& b, double rel_cutoff = 1e-12);

}  // namespace kl::numerics
