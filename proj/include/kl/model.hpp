#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "kl/linalg.hpp"

namespace kl {

/// A point of R^n with finite coordinates, n >= 1.
class Point {
public:
    explicit Point(Vector coords);

    std::size_t size() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    std::span<const double> coords() const noexcept { return coords_; }
    const Vector& vec() const noexcept { return coords_; }

private:
    Vector coords_;
};

/// C^2 evaluation contract. Hessians are symmetrized on return.
class SmoothOracle {
public:
    virtual ~SmoothOracle() = default;

    virtual std::size_t dimension() const = 0;
    virtual double value(std::span<const double> x) const = 0;
    virtual Vector gradient(std::span<const double> x) const = 0;

    Matrix hessian(std::span<const double> x) const { return hessian_raw(x).symmetrized(); }

    /// value(x) - value(base). Overridden where the difference can be formed without cancellation.
    virtual double value_gap(std::span<const double> x, std::span<const double> base) const {
        return value(x) - value(base);
    }

protected:
    virtual Matrix hessian_raw(std::span<const double> x) const = 0;
    void check_dimension(std::span<const double> x) const;
};

using OraclePtr = std::shared_ptr<const SmoothOracle>;

/// 1/2 x^T Q x + c^T x + d
class Quadratic final : public SmoothOracle {
public:
    Quadratic(Matrix q, Vector c, double d = 0.0);
    explicit Quadratic(Matrix q);

    std::size_t dimension() const override { return c_.size(); }
    double value(std::span<const double> x) const override;
    Vector gradient(std::span<const double> x) const override;
    double value_gap(std::span<const double> x, std::span<const double> base) const override;

    const Matrix& q() const noexcept { return q_; }
    const Vector& c() const noexcept { return c_; }
    double d() const noexcept { return d_; }

protected:
    Matrix hessian_raw(std::span<const double>) const override { return q_; }

private:
    Matrix q_;
    Vector c_;
    double d_;
};

struct Monomial {
    double coef = 0.0;
    std::vector<int> exponents;
};

/// coef * |x_index|^power with power in (0, 2); only defined away from x_index = 0.
struct AbsPowerTerm {
    double coef = 0.0;
    std::size_t index = 0;
    double power = 1.0;
};

class PolynomialOracle final : public SmoothOracle {
public:
    PolynomialOracle(std::size_t dimension, std::vector<Monomial> terms, std::vector<AbsPowerTerm> abs_terms = {});

    std::size_t dimension() const override { return dim_; }
    double value(std::span<const double> x) const override;
    Vector gradient(std::span<const double> x) const override;
    double value_gap(std::span<const double> x, std::span<const double> base) const override;

    const std::vector<Monomial>& terms() const noexcept { return terms_; }
    const std::vector<AbsPowerTerm>& abs_terms() const noexcept { return abs_terms_; }

protected:
    Matrix hessian_raw(std::span<const double> x) const override;

private:
    void check_domain(std::span<const double> x) const;

    std::size_t dim_;
    std::vector<Monomial> terms_;
    std::vector<AbsPowerTerm> abs_terms_;
};

struct SmoothClass {
    OraclePtr oracle;
};

struct MaxOfSmooth {
    std::vector<OraclePtr> members;
};

/// f(x) + mu ||x||_1
struct L1Regularized {
    OraclePtr oracle;
    double mu = 1.0;
};

/// ||Ax - b||^2 + mu ||x||_p^p, 0 < p < 1
struct LpLeastSquares {
    Matrix a;
    Vector b;
    double mu = 1.0;
    double p = 0.5;
};

/// One-dimensional staircase: f(0)=0, x^2+1/4 for |x|>1/2, x^2+1/n-1/n^2 on 1/n<|x|<=1/(n-1).
/// Not prox-regular at 0; used only as a sampling fixture.
struct Staircase {};

enum class FunctionKind { Smooth, Max, L1, Lp, Staircase };

std::string_view to_string(FunctionKind kind) noexcept;

class StructuredFunction {
public:
    using Variant = std::variant<SmoothClass, MaxOfSmooth, L1Regularized, LpLeastSquares, Staircase>;

    static StructuredFunction smooth(OraclePtr oracle);
    static StructuredFunction max_of(std::vector<OraclePtr> members);
    static StructuredFunction l1(OraclePtr oracle, double mu);
    static StructuredFunction lp(Matrix a, Vector b, double mu, double p);
    static StructuredFunction staircase();

    std::size_t dimension() const noexcept { return dim_; }
    FunctionKind kind() const noexcept;
    const Variant& data() const noexcept { return data_; }

    template <class T>
    const T* as() const noexcept {
        return std::get_if<T>(&data_);
    }

private:
    StructuredFunction(Variant data, std::size_t dim) : data_(std::move(data)), dim_(dim) {}

    Variant data_;
    std::size_t dim_;
};

struct KLQuery {
    StructuredFunction function;
    Point xbar;
    double theta = 0.5;
    double radius_eps = 0.1;
    double level_nu = std::numeric_limits<double>::infinity();

    /// Throws InvalidArgument / DimensionMismatch when the query is malformed.
    void validate() const;
};

double evaluate(const StructuredFunction& f, const Point& x);
double evaluate(const StructuredFunction& f, std::span<const double> x);

/// F(x) - F(base), formed term by term so that small gaps near base keep their relative accuracy.
double value_gap(const StructuredFunction& f, std::span<const double> x, std::span<const double> base);

/// |x|^q - |y|^q without cancellation when x and y are close.
double abs_power_difference(double x, double y, double q);

/// Max entrywise deviation between the oracle's Hessian and central second differences of value.
double hessian_check(const SmoothOracle& oracle, const Point& x, double h);
/// Max relative deviation between the gradient and central first differences of value.
double gradient_check(const SmoothOracle& oracle, const Point& x, double h);

/// -(x1+x2-6)^2 - 16 sqrt|x1| - 16 sqrt|x2|, stationary at (1,1) with a singular Hessian.
std::shared_ptr<const PolynomialOracle> make_singular_fixture();

double staircase_value(double x);
/// d(0, df(x)) for the staircase; 2|x| away from the origin.
double staircase_subgrad_distance(double x);

}  // namespace kl
