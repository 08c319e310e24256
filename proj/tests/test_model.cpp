#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kl/error.hpp"
#include "kl/numerics.hpp"
#include "support.hpp"

using namespace kl;
using kltest::quad;

namespace {

std::vector<std::pair<std::string, OraclePtr>> all_oracles() {
    return {
        {"diag(2,-1)", quad(Matrix{{2, 0}, {0, -1}})},
        {"dense 3x3", quad(Matrix{{2, 1, 0}, {1, 2, 0}, {0, 0, 1}}, {-4, -4, 0.3}, 1.5)},
        {"cubic", std::make_shared<PolynomialOracle>(2, std::vector<Monomial>{{1.0, {3, 0}}, {-2.0, {1, 2}}, {0.5, {0, 4}}})},
        {"f0", make_singular_fixture()},
    };
}

}  // namespace

TEST_CASE("evaluate examples") {
    CHECK(evaluate(kltest::smooth_quad(Matrix::identity(2)), kltest::origin(2)) == 0.0);
    const auto lp = StructuredFunction::lp(Matrix{{1}}, {0}, 1.0, 0.5);
    CHECK(evaluate(lp, Point({4.0})) == doctest::Approx(18.0).epsilon(1e-15));
    const auto f0 = StructuredFunction::smooth(make_singular_fixture());
    CHECK(evaluate(f0, Point({1.0, 1.0})) == doctest::Approx(-48.0).epsilon(1e-15));
    const auto l1 = StructuredFunction::l1(quad(Matrix::identity(2)), 2.0);
    CHECK(evaluate(l1, Point({1.0, -2.0})) == doctest::Approx(2.5 + 6.0));
    const auto mx = StructuredFunction::max_of({quad(Matrix{{0, 0}, {0, 0}}, {1, 0}), quad(Matrix{{0, 0}, {0, 0}}, {-1, 0})});
    CHECK(evaluate(mx, Point({-3.0, 7.0})) == 3.0);
}

TEST_CASE("staircase values") {
    CHECK(staircase_value(0.0) == 0.0);
    CHECK(staircase_value(0.6) == doctest::Approx(0.36 + 0.25));
    CHECK(staircase_value(-0.4) == doctest::Approx(0.16 + 1.0 / 3.0 - 1.0 / 9.0));
    CHECK(staircase_value(0.3) == doctest::Approx(0.09 + 0.25 - 1.0 / 16.0));
    CHECK(staircase_subgrad_distance(-0.3) == doctest::Approx(0.6));
    // a jump at each 1/n: values just above exceed the limit from below
    for (int n = 3; n < 40; ++n) {
        const double x = 1.0 / n;
        CHECK(staircase_value(x) > 0.0);
        CHECK(staircase_value(x) < staircase_value(x + 1e-9));
    }
}

TEST_CASE("hessian check examples") {
    const auto q = quad(Matrix{{2, 0}, {0, -1}});
    CHECK(hessian_check(*q, Point({0.3, -1.7}), 1e-4) < 1e-6);
    CHECK(hessian_check(*make_singular_fixture(), Point({1.0, 1.0}), 1e-4) < 1e-3);
    const PolynomialOracle cube(1, {{1.0, {3}}});
    CHECK(std::abs(cube.hessian(std::vector<double>{2.0})(0, 0) - 12.0) < 1e-4);
    CHECK(hessian_check(cube, Point({2.0}), 1e-4) < 1e-4);
}

TEST_CASE("f0 derivatives at (1,1)") {
    const auto f0 = make_singular_fixture();
    const Vector x{1.0, 1.0};
    const Vector g = f0->gradient(x);
    CHECK(std::abs(g[0]) < 1e-14);
    CHECK(std::abs(g[1]) < 1e-14);
    const Matrix h = f0->hessian(x);
    CHECK(h(0, 0) == doctest::Approx(2.0));
    CHECK(h(1, 1) == doctest::Approx(2.0));
    CHECK(h(0, 1) == doctest::Approx(-2.0));
    const auto e = numerics::jacobi_eigen(h);
    CHECK(std::abs(e.values[0] - 4.0) < 1e-10);
    CHECK(std::abs(e.values[1]) < 1e-10);
    CHECK_THROWS_AS(f0->value(std::vector<double>{0.0, 1.0}), KlError);
}

TEST_CASE("finite-difference checks at random points") {
    CounterRng rng(17, 0);
    for (const auto& [name, oracle] : all_oracles()) {
        CAPTURE(name);
        for (int k = 0; k < 20; ++k) {
            Vector x = kltest::random_vector(oracle->dimension(), rng, 1.5);
            if (name == "f0")
                for (auto& v : x) v = 1.0 + 0.5 * v;  // keep away from the axes
            CHECK(gradient_check(*oracle, Point(x), 1e-6) < 1e-5);
            CHECK(hessian_check(*oracle, Point(x), 1e-4) < 1e-3);
        }
    }
}

TEST_CASE("value gap keeps relative accuracy along the f0 valley") {
    const auto f0 = make_singular_fixture();
    const Vector base{1.0, 1.0};
    // f0(1-t,1-t) + 48 = 32 - 16t - 4t^2 - 32 sqrt(1-t) = -32 sum_{k>=3} binom(1/2,k) (-t)^k
    for (double t : {1e-2, 1e-4, 1e-6, 1e-7}) {
        double expected = 0.0, coef = 1.0;
        for (int k = 1; k <= 12; ++k) {
            coef *= (0.5 - (k - 1)) / k;
            if (k >= 3) expected += -32.0 * coef * std::pow(-t, k);
        }
        const Vector x{1.0 - t, 1.0 - t};
        CAPTURE(t);
        CHECK(f0->value_gap(x, base) == doctest::Approx(expected).epsilon(1e-9));
        CHECK(value_gap(StructuredFunction::smooth(f0), x, base) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("value gap agrees with plain differences away from cancellation") {
    CounterRng rng(2, 0);
    const auto f = StructuredFunction::lp(Matrix{{1, 2}, {3, 4}}, {1, 1}, 0.7, 0.5);
    const auto g = StructuredFunction::l1(quad(Matrix{{2, 1}, {1, 3}}, {1, -1}), 0.4);
    for (int k = 0; k < 20; ++k) {
        const Vector x = kltest::random_vector(2, rng), y = kltest::random_vector(2, rng);
        for (const auto* fn : {&f, &g}) {
            const double plain = evaluate(*fn, Point(x)) - evaluate(*fn, Point(y));
            CHECK(value_gap(*fn, x, y) == doctest::Approx(plain).epsilon(1e-12));
        }
    }
    CHECK(abs_power_difference(4.0, 1.0, 0.5) == doctest::Approx(1.0));
    CHECK(abs_power_difference(-4.0, 0.0, 0.5) == doctest::Approx(2.0));
    CHECK(abs_power_difference(1.0 + 1e-12, 1.0, 0.5) == doctest::Approx(0.5e-12).epsilon(1e-6));
}

TEST_CASE("query validation") {
    KLQuery q{kltest::smooth_quad(Matrix::identity(2)), kltest::origin(2)};
    CHECK_NOTHROW(q.validate());
    q.theta = 1.0;
    CHECK_THROWS_AS(q.validate(), KlError);
    KLQuery bad{kltest::smooth_quad(Matrix::identity(2)), kltest::origin(3)};
    CHECK_THROWS_AS(bad.validate(), KlError);
    CHECK_THROWS_AS(Point(Vector{}), KlError);
    CHECK_THROWS_AS(Point(Vector{std::nan("")}), KlError);
    CHECK_THROWS_AS(StructuredFunction::lp(Matrix{{1}}, {1}, 1.0, 1.0), KlError);
    CHECK_THROWS_AS(StructuredFunction::l1(quad(Matrix::identity(1)), 0.0), KlError);
}
