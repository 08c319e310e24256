#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "kl/error.hpp"
#include "kl/numerics.hpp"
#include "support.hpp"

using namespace kl;
using namespace kl::numerics;
using kltest::bisection_eigenvalues;
using kltest::random_symmetric;

namespace {

double reconstruction_residual(const Matrix& a, const EigenDecomposition& e) {
    const std::size_t n = a.rows();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
            worst = std::max(worst, std::abs(s - a(i, j)));
        }
    return worst;
}

double orthogonality_residual(const Matrix& v) {
    const Matrix g = v.transpose() * v;
    return (g - Matrix::identity(v.rows())).max_abs();
}

}  // namespace

TEST_CASE("jacobi on a diagonal matrix") {
    const auto e = jacobi_eigen(Matrix{{2, 0}, {0, -1}});
    CHECK(e.values[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e.values[1] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 1)) == doctest::Approx(1.0));
    CHECK(e.vectors(0, 0) > 0.0);
}

TEST_CASE("jacobi on the singular 2x2 block") {
    const Matrix a{{2, -2}, {-2, 2}};
    const auto e = jacobi_eigen(a);
    CHECK(std::abs(e.values[0] - 4.0) < 1e-10);
    CHECK(std::abs(e.values[1]) < 1e-10);
    // sign normalization: first nonzero component positive
    CHECK(e.vectors(0, 0) > 0.0);
    CHECK(e.vectors(0, 1) > 0.0);
}

TEST_CASE("jacobi reconstruction and orthogonality on random matrices") {
    CounterRng rng(11, 0);
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 20u}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Matrix a = random_symmetric(n, rng);
            const auto e = jacobi_eigen(a);
            CHECK(reconstruction_residual(a, e) < 1e-9);
            CHECK(orthogonality_residual(e.vectors) < 1e-10);
            CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
            for (std::size_t i = 0; i < n; ++i) {
                const Vector v = e.vectors.column(i);
                const Vector av = a * v;
                CHECK(norm2(sub(av, scaled(e.values[i], v))) <= 1e-9 * (1.0 + a.max_abs() * double(n)));
            }
        }
    }
}

TEST_CASE("jacobi matches characteristic polynomial bisection for n <= 4") {
    CounterRng rng(5, 1);
    std::vector<Matrix> cases{Matrix{{2, 0}, {0, -1}}, Matrix{{2, -2}, {-2, 2}}, Matrix::identity(3),
                              Matrix{{4, 1, 0, 0}, {1, 4, 1, 0}, {0, 1, 4, 1}, {0, 0, 1, 4}}};
    for (std::size_t n = 1; n <= 4; ++n)
        for (int rep = 0; rep < 10; ++rep) cases.push_back(random_symmetric(n, rng));
    for (const auto& a : cases) {
        const auto e = jacobi_eigen(a);
        const Vector b = bisection_eigenvalues(a);
        REQUIRE(b.size() == e.values.size());
        for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(b[i] - e.values[i]) < 1e-9);
    }
}

TEST_CASE("positive threshold scales with the spectral radius") {
    const Vector vals{1e6, 1e-5, -3.0};
    CHECK(spectral_radius(vals) == 1e6);
    CHECK(positive_threshold(vals) == doctest::Approx(1e-4));
    CHECK(positive_threshold(Vector{0.5, -0.1}) == doctest::Approx(1e-10));
}

TEST_CASE("min-norm point examples") {
    auto r = min_norm_point({{1, 0}, {-1, 0}});
    CHECK(norm2(r.point) < 1e-15);
    CHECK(r.weights[0] == doctest::Approx(0.5));
    CHECK(r.weights[1] == doctest::Approx(0.5));

    r = min_norm_point({{2, 0}});
    CHECK(r.point[0] == 2.0);
    CHECK(r.point[1] == 0.0);

    r = min_norm_point({{1, 1}, {1, -1}});
    CHECK(r.point[0] == doctest::Approx(1.0));
    CHECK(std::abs(r.point[1]) < 1e-15);
}

TEST_CASE("min-norm point on segments agrees with the closed form") {
    CounterRng rng(3, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const Vector a = kltest::random_vector(3, rng, 2.0);
        const Vector b = kltest::random_vector(3, rng, 2.0);
        const Vector d = sub(b, a);
        const double t = std::clamp(-dot(a, d) / dot(d, d), 0.0, 1.0);
        const Vector expected = add(a, scaled(t, d));
        const auto r = min_norm_point({a, b});
        CHECK(norm2(sub(r.point, expected)) < 1e-12);
    }
}

TEST_CASE("min-norm point beats random convex combinations") {
    CounterRng rng(4, 0);
    for (int fixture = 0; fixture < 6; ++fixture) {
        const std::size_t m = 2 + static_cast<std::size_t>(fixture), n = 3;
        std::vector<Vector> pts;
        for (std::size_t i = 0; i < m; ++i) pts.push_back(add(kltest::random_vector(n, rng), Vector(n, 0.3)));
        const auto r = min_norm_point(pts);
        const double best = norm2(r.point);
        CHECK(wolfe_gap(r.point, pts) <= 1e-12);
        CHECK(std::accumulate(r.weights.begin(), r.weights.end(), 0.0) == doctest::Approx(1.0));
        for (const auto& p : pts) CHECK(best <= norm2(p) + 1e-14);
        for (int trial = 0; trial < 1000; ++trial) {
            Vector wts(m);
            double s = 0.0;
            for (auto& w : wts) s += (w = -std::log(rng.uniform_open()));
            Vector c(n, 0.0);
            for (std::size_t i = 0; i < m; ++i) axpy(wts[i] / s, pts[i], c);
            CHECK(best <= norm2(c) + 1e-12);
        }
    }
}

TEST_CASE("lp examples") {
    LinearProgram lp;
    lp.c = {3, 1};
    lp.maximize = true;
    lp.a_eq = Matrix{{1, 1}};
    lp.b_eq = {1};
    auto r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(3.0));
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(std::abs(r.x[1]) < 1e-12);

    // multiplier polytope for gradients e1, -e1
    LinearProgram feas;
    feas.c = {0, 0};
    feas.a_eq = Matrix{{1, 1}, {1, -1}, {0, 0}};
    feas.b_eq = {1, 0, 0};
    r = solve_lp(feas);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[0] == doctest::Approx(0.5));
    CHECK(r.x[1] == doctest::Approx(0.5));

    LinearProgram bad;
    bad.c = {0, 0};
    bad.a_eq = Matrix{{1, 1}, {0, 0}};
    bad.b_eq = {1, 1};
    CHECK(solve_lp(bad).status == LpStatus::Infeasible);

    LinearProgram unb;
    unb.c = {1, 0};
    unb.maximize = true;
    unb.a_ub = Matrix{{-1, 1}};
    unb.b_ub = {1};
    CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("lp strong duality and row permutation invariance") {
    CounterRng rng(21, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 4, m = 5;
        LinearProgram lp;
        lp.c = kltest::random_vector(n, rng);
        lp.maximize = rep % 2 == 0;
        lp.a_ub = Matrix(m, n);
        lp.b_ub.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) lp.a_ub(i, j) = 2.0 * rng.uniform() - 1.0;
            lp.b_ub[i] = 0.5 + rng.uniform();
        }
        lp.a_eq = Matrix(1, n, 1.0);
        lp.b_eq = {0.5};
        lp.upper.assign(n, 1.0);
        lp.lower.assign(n, 0.0);
        const auto r = solve_lp(lp);
        REQUIRE(r.status == LpStatus::Optimal);
        CHECK(std::abs(r.value - r.dual_value) <= 1e-9);
        CHECK(std::abs(dot(lp.c, r.x) - r.value) <= 1e-9);

        LinearProgram perm = lp;
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::reverse(order.begin(), order.end());
        std::swap(order[0], order[2]);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) perm.a_ub(i, j) = lp.a_ub(order[i], j);
            perm.b_ub[i] = lp.b_ub[order[i]];
        }
        const auto rp = solve_lp(perm);
        REQUIRE(rp.status == LpStatus::Optimal);
        CHECK(std::abs(rp.value - r.value) <= 1e-9);
    }
}

TEST_CASE("null space examples") {
    Matrix z = null_space(Matrix{{1, 0}});
    REQUIRE(z.cols() == 1);
    CHECK(std::abs(z(0, 0)) < 1e-15);
    CHECK(std::abs(z(1, 0)) == doctest::Approx(1.0));

    z = null_space(Matrix{{2, -2}, {-2, 2}});
    REQUIRE(z.cols() == 1);
    const auto e = jacobi_eigen(Matrix{{2, -2}, {-2, 2}});
    const Vector v0 = e.vectors.column(1);
    CHECK(std::abs(std::abs(z(0, 0) * v0[0] + z(1, 0) * v0[1]) - 1.0) < 1e-12);

    z = null_space(Matrix{{1, 2}, {3, 4}});
    CHECK(z.cols() == 0);
}

TEST_CASE("nonnegative qp on a simplex") {
    // min 1/2 |x - (1, 0)|^2 on the simplex in R^2 -> (1, 0)
    const Matrix p = Matrix::identity(2);
    const auto r = solve_nonneg_qp(p, {-1, 0}, Matrix{{1, 1}}, {1}, {0.5, 0.5});
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(std::abs(r.x[1]) < 1e-12);
}

TEST_CASE("linear solves") {
    const Vector x = solve_linear(Matrix{{2, 1}, {1, 3}}, {3, 5});
    CHECK(x[0] == doctest::Approx(0.8));
    CHECK(x[1] == doctest::Approx(1.4));
    CHECK_THROWS_AS(solve_linear(Matrix{{1, 2}, {2, 4}}, {1, 1}), KlError);
    const Vector y = solve_symmetric_pinv(Matrix{{1, 0}, {0, 0}}, {2, 0});
    CHECK(y[0] == doctest::Approx(2.0));
    CHECK(y[1] == 0.0);
}
