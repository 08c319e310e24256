#include "kl/subdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kl/error.hpp"
#include "kl/numerics.hpp"

namespace kl {

double activity_tolerance(double function_value) noexcept { return 1e-8 * (1.0 + std::abs(function_value)); }

namespace {

double max_distance(const MaxOfSmooth& f, std::span<const double> x) {
    double fmax = -std::numeric_limits<double>::infinity();
    Vector values;
    for (const auto& m : f.members) {
        values.push_back(m->value(x));
        fmax = std::max(fmax, values.back());
    }
    const double tau = activity_tolerance(fmax);
    std::vector<Vector> grads;
    for (std::size_t i = 0; i < f.members.size(); ++i)
        if (values[i] >= fmax - tau) grads.push_back(f.members[i]->gradient(x));
    if (grads.size() == 1) return norm2(grads.front());
    return norm2(numerics::min_norm_point(grads).point);
}

Vector lp_smooth_gradient(const LpLeastSquares& f, std::span<const double> x) {
    Vector r = f.a * x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= f.b[i];
    return scaled(2.0, transpose_times(f.a, r));
}

}  // namespace

LpRestriction lp_restriction(const LpLeastSquares& f, std::span<const double> x) {
    if (x.size() != f.a.cols()) throw KlError(ErrorKind::DimensionMismatch, "lp restriction");
    LpRestriction out;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) out.support.push_back(i);
    const Vector full = lp_smooth_gradient(f, x);
    const std::size_t k = out.support.size();
    out.gradient.resize(k);
    out.hessian = Matrix(k, k);
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t i = out.support[a];
        const double ax = std::abs(x[i]);
        out.gradient[a] = full[i] + f.mu * f.p * std::copysign(1.0, x[i]) * std::pow(ax, f.p - 1.0);
        for (std::size_t b = 0; b < k; ++b) {
            const std::size_t j = out.support[b];
            double s = 0.0;
            for (std::size_t r = 0; r < f.a.rows(); ++r) s += f.a(r, i) * f.a(r, j);
            out.hessian(a, b) = 2.0 * s;
        }
        out.hessian(a, a) += f.mu * f.p * (f.p - 1.0) * std::pow(ax, f.p - 2.0);
    }
    return out;
}

double subgrad_distance(const StructuredFunction& f, std::span<const double> x) {
    if (x.size() != f.dimension()) throw KlError(ErrorKind::DimensionMismatch, "subgrad_distance: dimension");
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, SmoothClass>) {
                return norm2(g.oracle->gradient(x));
            } else if constexpr (std::is_same_v<T, MaxOfSmooth>) {
                return max_distance(g, x);
            } else if constexpr (std::is_same_v<T, L1Regularized>) {
                const Vector grad = g.oracle->gradient(x);
                Vector r(grad.size());
                for (std::size_t i = 0; i < grad.size(); ++i)
                    r[i] = x[i] != 0.0 ? grad[i] + g.mu * std::copysign(1.0, x[i]) : std::max(std::abs(grad[i]) - g.mu, 0.0);
                return norm2(r);
            } else if constexpr (std::is_same_v<T, LpLeastSquares>) {
                // off-support components are free, so only supp(x) contributes
                return norm2(lp_restriction(g, x).gradient);
            } else {
                return staircase_subgrad_distance(x[0]);
            }
        },
        f.data());
}

bool multiplier_polytope_nonempty(const std::vector<Vector>& gradients) {
    if (gradients.empty()) return false;
    const std::size_t m = gradients.size();
    const std::size_t n = gradients.front().size();
    numerics::LinearProgram lp;
    lp.c.assign(m, 0.0);
    lp.a_eq = Matrix(n + 1, m);
    lp.b_eq.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        lp.a_eq(0, i) = 1.0;
        for (std::size_t k = 0; k < n; ++k) lp.a_eq(k + 1, i) = gradients[i][k];
    }
    lp.b_eq[0] = 1.0;
    return numerics::solve_lp(lp).status == numerics::LpStatus::Optimal;
}

bool is_stationary(const StructuredFunction& f, const Point& x, double tol) {
    if (subgrad_distance(f, x) > tol) return false;
    if (f.kind() == FunctionKind::Max) return multiplier_polytope_nonempty(active_set(f, x).gradients);
    return true;
}

IndexPartition classify_l1_indices(const StructuredFunction& f, const Point& xbar) {
    const auto* l1 = f.as<L1Regularized>();
    if (!l1) throw KlError(ErrorKind::UnsupportedClass, "classify_l1_indices needs an l1-regularized function");
    if (xbar.size() != f.dimension()) throw KlError(ErrorKind::DimensionMismatch, "classify_l1_indices: dimension");
    if (!is_stationary(f, xbar, 1e-8)) throw KlError(ErrorKind::NotStationary, "0 is not a subgradient at xbar");

    const double tau = activity_tolerance(evaluate(f, xbar));
    const Vector grad = l1->oracle->gradient(xbar.coords());
    IndexPartition part;
    for (std::size_t i = 0; i < xbar.size(); ++i) {
        if (std::abs(xbar[i]) > tau) {
            part.support.push_back(i);
        } else if (std::abs(grad[i] - l1->mu) <= tau) {
            part.kplus.push_back(i);
        } else if (std::abs(grad[i] + l1->mu) <= tau) {
            part.kminus.push_back(i);
        } else {
            part.interior.push_back(i);
        }
    }
    return part;
}

ActiveSetData active_set(const StructuredFunction& f, const Point& xbar) {
    const auto* mx = f.as<MaxOfSmooth>();
    if (!mx) throw KlError(ErrorKind::UnsupportedClass, "active_set needs a max-of-smooth function");
    if (xbar.size() != f.dimension()) throw KlError(ErrorKind::DimensionMismatch, "active_set: dimension");
    ActiveSetData data;
    Vector values;
    data.value = -std::numeric_limits<double>::infinity();
    for (const auto& m : mx->members) {
        values.push_back(m->value(xbar.coords()));
        data.value = std::max(data.value, values.back());
    }
    const double tau = activity_tolerance(data.value);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= data.value - tau) {
            data.active.push_back(i);
            data.gradients.push_back(mx->members[i]->gradient(xbar.coords()));
            data.hessians.push_back(mx->members[i]->hessian(xbar.coords()));
        }
    }
    return data;
}

bool max_activity_ambiguous(const MaxOfSmooth& f, std::span<const double> x) {
    Vector values;
    double fmax = -std::numeric_limits<double>::infinity();
    for (const auto& m : f.members) {
        values.push_back(m->value(x));
        fmax = std::max(fmax, values.back());
    }
    const double tau = activity_tolerance(fmax);
    for (double v : values) {
        const double gap = fmax - v;
        if (gap > 0.0 && gap < 10.0 * tau) return true;
    }
    return false;
}

}  // namespace kl
