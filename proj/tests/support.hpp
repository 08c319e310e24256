#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "kl/linalg.hpp"
#include "kl/model.hpp"
#include "kl/rng.hpp"

namespace kltest {

using kl::Matrix;
using kl::Vector;

inline std::shared_ptr<const kl::Quadratic> quad(Matrix q, Vector c = {}, double d = 0.0) {
    if (c.empty()) c.assign(q.rows(), 0.0);
    return std::make_shared<kl::Quadratic>(std::move(q), std::move(c), d);
}

inline kl::StructuredFunction smooth_quad(Matrix q, Vector c = {}, double d = 0.0) {
    return kl::StructuredFunction::smooth(quad(std::move(q), std::move(c), d));
}

inline kl::Point origin(std::size_t n) { return kl::Point(Vector(n, 0.0)); }

inline Matrix random_symmetric(std::size_t n, kl::CounterRng& rng) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = 2.0 * rng.uniform() - 1.0;
    return a;
}

inline Vector random_vector(std::size_t n, kl::CounterRng& rng, double scale = 1.0) {
    Vector v(n);
    for (auto& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
    return v;
}

/// Number of eigenvalues of symmetric A strictly below t, by Sylvester inertia of an unpivoted LDL^T of A - tI.
inline std::size_t eigen_count_below(const Matrix& a, double t) {
    const std::size_t n = a.rows();
    Matrix m = a;
    for (std::size_t i = 0; i < n; ++i) m(i, i) -= t;
    std::size_t neg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double d = m(k, k);
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++neg;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = m(i, k) / d;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
        }
    }
    return neg;
}

/// Eigenvalues (descending) located by bisection on the characteristic polynomial's sign-change count.
inline Vector bisection_eigenvalues(const Matrix& a) {
    const std::size_t n = a.rows();
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += std::abs(a(i, j));
        bound = std::max(bound, r);
    }
    bound += 1.0;
    Vector out;
    for (std::size_t k = n; k-- > 0;) {
        // k-th smallest eigenvalue: smallest t with count_below(t) > k
        double lo = -bound, hi = bound;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * bound; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (eigen_count_below(a, mid) > k) hi = mid; else lo = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

inline std::string fixture(const std::string& name) { return std::string(KL_FIXTURE_DIR) + "/" + name; }

}  // namespace kltest
