#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "kl/subdiff.hpp"
#include "support.hpp"

using namespace kl;
using kltest::quad;

namespace {

OraclePtr linear(Vector c) {
    const std::size_t n = c.size();
    return quad(Matrix(n, n), std::move(c));
}

void check_partition(const IndexPartition& p, std::size_t n) {
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto* s : {&p.interior, &p.support, &p.kplus, &p.kminus}) {
        total += s->size();
        seen.insert(s->begin(), s->end());
    }
    CHECK(total == n);
    CHECK(seen.size() == n);
    if (!seen.empty()) CHECK(*seen.rbegin() == n - 1);
}

}  // namespace

TEST_CASE("subgradient distance examples") {
    CHECK(subgrad_distance(kltest::smooth_quad(Matrix::identity(2)), Point({3.0, 4.0})) == doctest::Approx(5.0));
    CHECK(subgrad_distance(StructuredFunction::l1(quad(Matrix::identity(2)), 1.0), kltest::origin(2)) == 0.0);
    const auto lp = StructuredFunction::lp(Matrix{{1}}, {0}, 1.0, 0.5);
    // d/dt (t^2 + sqrt t) at t = 4
    CHECK(subgrad_distance(lp, Point({4.0})) == doctest::Approx(8.25).epsilon(1e-15));
}

TEST_CASE("l1 distance uses the clamped off-support rule") {
    // grad at 0 is c = (3, -0.5, 0); mu = 1 -> excess (2, 0, 0)
    const auto f = StructuredFunction::l1(linear({3, -0.5, 0}), 1.0);
    CHECK(subgrad_distance(f, kltest::origin(3)) == doctest::Approx(2.0));
    // on the support the sign term is exact: 3 + 1 at x1 > 0
    CHECK(subgrad_distance(f, Point({0.2, 0.0, 0.0})) == doctest::Approx(4.0));
}

TEST_CASE("lp off-support coordinates contribute nothing") {
    const auto f = StructuredFunction::lp(Matrix{{1, 0}, {0, 1}}, {3, 5}, 1.0, 0.5);
    const double t = 2.0;
    const double on = 2.0 * (t - 3.0) + 0.5 / std::sqrt(t);
    CHECK(subgrad_distance(f, Point({t, 0.0})) == doctest::Approx(std::abs(on)));
}

TEST_CASE("stationarity examples") {
    CHECK(is_stationary(kltest::smooth_quad(Matrix{{2, 0}, {0, -1}}), kltest::origin(2), 1e-9));
    CHECK(is_stationary(StructuredFunction::smooth(make_singular_fixture()), Point({1.0, 1.0}), 1e-9));
    CHECK(is_stationary(StructuredFunction::l1(linear({1}), 2.0), kltest::origin(1), 1e-9));
    CHECK_FALSE(is_stationary(StructuredFunction::l1(linear({3}), 2.0), kltest::origin(1), 1e-9));
    CHECK(is_stationary(StructuredFunction::max_of({linear({1, 0}), linear({-1, 0})}), kltest::origin(2), 1e-9));
    CHECK_FALSE(is_stationary(StructuredFunction::max_of({linear({1, 0}), linear({0, 1})}), kltest::origin(2), 1e-9));
}

TEST_CASE("l1 index classification") {
    auto p = classify_l1_indices(StructuredFunction::l1(quad(Matrix{{1}}), 1.0), kltest::origin(1));
    CHECK(p.interior == std::vector<std::size_t>{0});
    CHECK(p.support.empty());
    CHECK(p.relative_interior());

    p = classify_l1_indices(StructuredFunction::l1(linear({1}), 1.0), kltest::origin(1));
    CHECK(p.kplus == std::vector<std::size_t>{0});
    CHECK(p.interior.empty());
    CHECK(p.kminus.empty());

    // 1/2 (x - 2)^2 at x = 1
    p = classify_l1_indices(StructuredFunction::l1(quad(Matrix{{1}}, {-2}, 2.0), 1.0), Point({1.0}));
    CHECK(p.support == std::vector<std::size_t>{0});

    p = classify_l1_indices(StructuredFunction::l1(linear({-1, 0.5, 1, 0}), 1.0), Point({0.0, 0.0, 0.0, 0.0}));
    CHECK(p.kminus == std::vector<std::size_t>{0});
    CHECK(p.kplus == std::vector<std::size_t>{2});
    check_partition(p, 4);
}

TEST_CASE("classification is always a partition") {
    CounterRng rng(8, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 1 + rep % 5;
        const double mu = 0.5 + rng.uniform();
        Vector x(n, 0.0), c(n, 0.0);
        // 1/2 |x|^2 + c.x + mu |x|_1 made stationary at x
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rng.uniform();
            if (u < 0.4) {
                x[i] = rng.uniform() - 0.5;
                c[i] = -x[i] - (x[i] > 0 ? mu : -mu);
            } else if (u < 0.55) {
                c[i] = mu;
            } else if (u < 0.7) {
                c[i] = -mu;
            } else {
                c[i] = mu * (2.0 * rng.uniform() - 1.0);
            }
        }
        const auto p = classify_l1_indices(StructuredFunction::l1(quad(Matrix::identity(n), c), mu), Point(x));
        check_partition(p, n);
    }
}

TEST_CASE("max active sets") {
    auto a = active_set(StructuredFunction::max_of({linear({1, 0}), linear({-1, 0})}), kltest::origin(2));
    CHECK(a.active == std::vector<std::size_t>{0, 1});
    a = active_set(StructuredFunction::max_of({quad(Matrix{{0}}, {1}), quad(Matrix{{0}}, {1}, -1.0)}), kltest::origin(1));
    CHECK(a.active == std::vector<std::size_t>{0});
    a = active_set(StructuredFunction::max_of({quad(Matrix::identity(2)), quad(2.0 * Matrix::identity(2))}), kltest::origin(2));
    CHECK(a.active == std::vector<std::size_t>{0, 1});
    CHECK(a.hessians[1](0, 0) == 2.0);
}

TEST_CASE("max with one active member matches the smooth distance") {
    CounterRng rng(9, 0);
    const auto member = quad(Matrix{{2, 1}, {1, 3}}, {1, -1}, 5.0);
    const auto f = StructuredFunction::max_of({member, quad(Matrix::identity(2), {0, 0}, -10.0)});
    const auto g = StructuredFunction::smooth(member);
    for (int k = 0; k < 20; ++k) {
        const Vector x = kltest::random_vector(2, rng);
        CHECK(subgrad_distance(f, x) == subgrad_distance(g, x));
    }
}

TEST_CASE("distance is permutation invariant") {
    CounterRng rng(10, 0);
    const Matrix q{{2, 1, 0}, {1, 3, -1}, {0, -1, 1}};
    const Vector c{1, -2, 0.5};
    const std::vector<std::size_t> perm{2, 0, 1};
    Matrix qp(3, 3);
    Vector cp(3);
    for (std::size_t i = 0; i < 3; ++i) {
        cp[i] = c[perm[i]];
        for (std::size_t j = 0; j < 3; ++j) qp(i, j) = q(perm[i], perm[j]);
    }
    const Matrix a{{1, 2, 0}, {0, 1, 1}};
    Matrix ap(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) ap(i, j) = a(i, perm[j]);
    const std::vector<std::pair<StructuredFunction, StructuredFunction>> pairs{
        {kltest::smooth_quad(q, c), kltest::smooth_quad(qp, cp)},
        {StructuredFunction::l1(quad(q, c), 0.8), StructuredFunction::l1(quad(qp, cp), 0.8)},
        {StructuredFunction::lp(a, {1, 2}, 0.5, 0.5), StructuredFunction::lp(ap, {1, 2}, 0.5, 0.5)},
        {StructuredFunction::max_of({quad(q, c), quad(Matrix::identity(3))}),
         StructuredFunction::max_of({quad(qp, cp), quad(Matrix::identity(3))})},
    };
    for (int k = 0; k < 20; ++k) {
        Vector x = kltest::random_vector(3, rng);
        if (k % 4 == 0) x[1] = 0.0;
        Vector xp(3);
        for (std::size_t i = 0; i < 3; ++i) xp[i] = x[perm[i]];
        for (const auto& [f, g] : pairs) CHECK(subgrad_distance(f, x) == doctest::Approx(subgrad_distance(g, xp)).epsilon(1e-14));
    }
}

TEST_CASE("l1 distance at the origin is nonincreasing in mu") {
    const auto oracle = quad(Matrix{{1, 0}, {0, 1}}, {2.5, -1.5});
    double prev = std::numeric_limits<double>::infinity();
    for (double mu : {0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 10.0}) {
        const double d = subgrad_distance(StructuredFunction::l1(oracle, mu), kltest::origin(2));
        CHECK(d <= prev);
        prev = d;
    }
    CHECK(prev == 0.0);
}

TEST_CASE("activity ambiguity band") {
    const MaxOfSmooth f{{quad(Matrix{{0}}, {1}), quad(Matrix{{0}}, {0})}};
    CHECK_FALSE(max_activity_ambiguous(f, std::vector<double>{0.0}));  // exact tie
    CHECK(max_activity_ambiguous(f, std::vector<double>{1e-8}));
    CHECK_FALSE(max_activity_ambiguous(f, std::vector<double>{1e-3}));
}

TEST_CASE("lp restriction on the support") {
    const LpLeastSquares f{Matrix{{1, 0}, {0, 1}}, {3, 0}, 1.0, 0.5};
    const double t = 2.0;
    const auto r = lp_restriction(f, std::vector<double>{t, 0.0});
    CHECK(r.support == std::vector<std::size_t>{0});
    CHECK(r.hessian(0, 0) == doctest::Approx(2.0 - 0.25 * std::pow(t, -1.5)));
}
