#include "kl/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kl/error.hpp"

namespace kl {

namespace {

double ipow(double x, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= x;
    return r;
}

// x^e - y^e = (x - y) * sum_j x^j y^(e-1-j)
double ipow_difference(double x, double y, int e) {
    if (e == 0) return 0.0;
    double s = 0.0;
    for (int j = 0; j < e; ++j) s += ipow(x, j) * ipow(y, e - 1 - j);
    return (x - y) * s;
}

}  // namespace

Point::Point(Vector coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw KlError(ErrorKind::InvalidArgument, "point must have dimension >= 1");
    for (double v : coords_)
        if (!std::isfinite(v)) throw KlError(ErrorKind::InvalidArgument, "point has a non-finite coordinate");
}

void SmoothOracle::check_dimension(std::span<const double> x) const {
    if (x.size() != dimension())
        throw KlError(ErrorKind::DimensionMismatch,
                      "expected dimension " + std::to_string(dimension()) + ", got " + std::to_string(x.size()));
}

Quadratic::Quadratic(Matrix q, Vector c, double d) : q_(q.symmetrized()), c_(std::move(c)), d_(d) {
    if (q_.rows() != c_.size()) throw KlError(ErrorKind::DimensionMismatch, "quadratic: Q and c disagree");
    if (c_.empty()) throw KlError(ErrorKind::InvalidArgument, "quadratic: empty dimension");
}

Quadratic::Quadratic(Matrix q) : Quadratic(q, Vector(q.rows(), 0.0), 0.0) {}

double Quadratic::value(std::span<const double> x) const {
    check_dimension(x);
    return 0.5 * quad_form(q_, x) + dot(c_, x) + d_;
}

Vector Quadratic::gradient(std::span<const double> x) const {
    check_dimension(x);
    return add(q_ * x, c_);
}

double Quadratic::value_gap(std::span<const double> x, std::span<const double> base) const {
    check_dimension(x);
    check_dimension(base);
    const Vector d = sub(x, base);
    const Vector s = add(x, base);
    return 0.5 * dot(q_ * d, s) + dot(c_, d);
}

PolynomialOracle::PolynomialOracle(std::size_t dimension, std::vector<Monomial> terms, std::vector<AbsPowerTerm> abs_terms)
    : dim_(dimension), terms_(std::move(terms)), abs_terms_(std::move(abs_terms)) {
    if (dim_ == 0) throw KlError(ErrorKind::InvalidArgument, "polynomial: empty dimension");
    for (const auto& t : terms_) {
        if (t.exponents.size() != dim_) throw KlError(ErrorKind::DimensionMismatch, "polynomial: exponent vector length");
        for (int e : t.exponents)
            if (e < 0) throw KlError(ErrorKind::InvalidArgument, "polynomial: negative exponent");
    }
    for (const auto& t : abs_terms_) {
        if (t.index >= dim_) throw KlError(ErrorKind::DimensionMismatch, "polynomial: abs-power index out of range");
        if (!(t.power > 0.0 && t.power < 2.0)) throw KlError(ErrorKind::InvalidArgument, "polynomial: abs-power exponent must lie in (0,2)");
    }
}

void PolynomialOracle::check_domain(std::span<const double> x) const {
    check_dimension(x);
    for (const auto& t : abs_terms_)
        if (x[t.index] == 0.0)
            throw KlError(ErrorKind::DomainError, "|x_" + std::to_string(t.index) + "|^q is not smooth at 0");
}

double PolynomialOracle::value(std::span<const double> x) const {
    check_domain(x);
    double s = 0.0;
    for (const auto& t : terms_) {
        double m = t.coef;
        for (std::size_t i = 0; i < dim_; ++i) m *= ipow(x[i], t.exponents[i]);
        s += m;
    }
    for (const auto& t : abs_terms_) s += t.coef * std::pow(std::abs(x[t.index]), t.power);
    return s;
}

double PolynomialOracle::value_gap(std::span<const double> x, std::span<const double> base) const {
    check_domain(x);
    check_domain(base);
    double s = 0.0;
    for (const auto& t : terms_) {
        // telescoping: prod x_i^e_i - prod y_i^e_i = sum_k (prod_{i<k} x_i^e_i)(x_k^e_k - y_k^e_k)(prod_{i>k} y_i^e_i)
        double m = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
            if (t.exponents[k] == 0) continue;
            double p = ipow_difference(x[k], base[k], t.exponents[k]);
            for (std::size_t i = 0; i < k; ++i) p *= ipow(x[i], t.exponents[i]);
            for (std::size_t i = k + 1; i < dim_; ++i) p *= ipow(base[i], t.exponents[i]);
            m += p;
        }
        s += t.coef * m;
    }
    for (const auto& t : abs_terms_) s += t.coef * abs_power_difference(x[t.index], base[t.index], t.power);
    return s;
}

Vector PolynomialOracle::gradient(std::span<const double> x) const {
    check_domain(x);
    Vector g(dim_, 0.0);
    for (const auto& t : terms_) {
        for (std::size_t i = 0; i < dim_; ++i) {
            if (t.exponents[i] == 0) continue;
            double m = t.coef * t.exponents[i];
            for (std::size_t k = 0; k < dim_; ++k) m *= ipow(x[k], k == i ? t.exponents[k] - 1 : t.exponents[k]);
            g[i] += m;
        }
    }
    for (const auto& t : abs_terms_) {
        const double xi = x[t.index];
        g[t.index] += t.coef * t.power * std::copysign(1.0, xi) * std::pow(std::abs(xi), t.power - 1.0);
    }
    return g;
}

Matrix PolynomialOracle::hessian_raw(std::span<const double> x) const {
    check_domain(x);
    Matrix h(dim_, dim_);
    for (const auto& t : terms_) {
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                std::vector<int> e = t.exponents;
                double m = t.coef;
                if (e[i] == 0) continue;
                m *= e[i];
                --e[i];
                if (e[j] == 0) continue;
                m *= e[j];
                --e[j];
                for (std::size_t k = 0; k < dim_; ++k) m *= ipow(x[k], e[k]);
                h(i, j) += m;
            }
        }
    }
    for (const auto& t : abs_terms_) {
        const double xi = std::abs(x[t.index]);
        h(t.index, t.index) += t.coef * t.power * (t.power - 1.0) * std::pow(xi, t.power - 2.0);
    }
    return h;
}

std::string_view to_string(FunctionKind kind) noexcept {
    switch (kind) {
        case FunctionKind::Smooth: return "smooth";
        case FunctionKind::Max: return "max";
        case FunctionKind::L1: return "l1";
        case FunctionKind::Lp: return "lp";
        case FunctionKind::Staircase: return "staircase";
    }
    return "unknown";
}

StructuredFunction StructuredFunction::smooth(OraclePtr oracle) {
    if (!oracle) throw KlError(ErrorKind::InvalidArgument, "null oracle");
    const std::size_t n = oracle->dimension();
    return StructuredFunction(SmoothClass{std::move(oracle)}, n);
}

StructuredFunction StructuredFunction::max_of(std::vector<OraclePtr> members) {
    if (members.empty()) throw KlError(ErrorKind::InvalidArgument, "max needs at least one member");
    for (const auto& m : members)
        if (!m) throw KlError(ErrorKind::InvalidArgument, "null oracle");
    const std::size_t n = members.front()->dimension();
    for (const auto& m : members)
        if (m->dimension() != n) throw KlError(ErrorKind::DimensionMismatch, "max members differ in dimension");
    return StructuredFunction(MaxOfSmooth{std::move(members)}, n);
}

StructuredFunction StructuredFunction::l1(OraclePtr oracle, double mu) {
    if (!oracle) throw KlError(ErrorKind::InvalidArgument, "null oracle");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw KlError(ErrorKind::InvalidArgument, "l1: mu must be positive");
    const std::size_t n = oracle->dimension();
    return StructuredFunction(L1Regularized{std::move(oracle), mu}, n);
}

StructuredFunction StructuredFunction::lp(Matrix a, Vector b, double mu, double p) {
    if (a.rows() != b.size() || a.cols() == 0) throw KlError(ErrorKind::DimensionMismatch, "lp: A and b disagree");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw KlError(ErrorKind::InvalidArgument, "lp: mu must be positive");
    if (!(p > 0.0 && p < 1.0)) throw KlError(ErrorKind::InvalidArgument, "lp: p must lie in (0,1)");
    const std::size_t n = a.cols();
    return StructuredFunction(LpLeastSquares{std::move(a), std::move(b), mu, p}, n);
}

StructuredFunction StructuredFunction::staircase() { return StructuredFunction(Staircase{}, 1); }

FunctionKind StructuredFunction::kind() const noexcept {
    switch (data_.index()) {
        case 0: return FunctionKind::Smooth;
        case 1: return FunctionKind::Max;
        case 2: return FunctionKind::L1;
        case 3: return FunctionKind::Lp;
        default: return FunctionKind::Staircase;
    }
}

void KLQuery::validate() const {
    if (xbar.size() != function.dimension()) throw KlError(ErrorKind::DimensionMismatch, "xbar dimension differs from the function");
    if (!(theta >= 0.0 && theta < 1.0)) throw KlError(ErrorKind::InvalidArgument, "theta must lie in [0,1)");
    if (!(radius_eps > 0.0)) throw KlError(ErrorKind::InvalidArgument, "radius_eps must be positive");
    if (!(level_nu > 0.0)) throw KlError(ErrorKind::InvalidArgument, "level_nu must be positive");
}

double staircase_value(double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    if (ax > 0.5) return x * x + 0.25;
    const double n = std::floor(1.0 / ax) + 1.0;
    return x * x + 1.0 / n - 1.0 / (n * n);
}

double staircase_subgrad_distance(double x) { return 2.0 * std::abs(x); }

double evaluate(const StructuredFunction& f, std::span<const double> x) {
    if (x.size() != f.dimension())
        throw KlError(ErrorKind::DimensionMismatch,
                      "expected dimension " + std::to_string(f.dimension()) + ", got " + std::to_string(x.size()));
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, SmoothClass>) {
                return g.oracle->value(x);
            } else if constexpr (std::is_same_v<T, MaxOfSmooth>) {
                double best = -std::numeric_limits<double>::infinity();
                for (const auto& m : g.members) best = std::max(best, m->value(x));
                return best;
            } else if constexpr (std::is_same_v<T, L1Regularized>) {
                double s = 0.0;
                for (double v : x) s += std::abs(v);
                return g.oracle->value(x) + g.mu * s;
            } else if constexpr (std::is_same_v<T, LpLeastSquares>) {
                Vector r = g.a * x;
                for (std::size_t i = 0; i < r.size(); ++i) r[i] -= g.b[i];
                double reg = 0.0;
                for (double v : x)
                    if (v != 0.0) reg += std::pow(std::abs(v), g.p);
                return dot(r, r) + g.mu * reg;
            } else {
                return staircase_value(x[0]);
            }
        },
        f.data());
}

double evaluate(const StructuredFunction& f, const Point& x) { return evaluate(f, x.coords()); }

double abs_power_difference(double x, double y, double q) {
    const double a = std::abs(x);
    const double b = std::abs(y);
    if (b == 0.0) return a == 0.0 ? 0.0 : std::pow(a, q);
    if (a == 0.0) return -std::pow(b, q);
    return std::pow(b, q) * std::expm1(q * std::log1p((a - b) / b));
}

double value_gap(const StructuredFunction& f, std::span<const double> x, std::span<const double> base) {
    if (x.size() != f.dimension() || base.size() != f.dimension())
        throw KlError(ErrorKind::DimensionMismatch, "value_gap: dimension");
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, SmoothClass>) {
                return g.oracle->value_gap(x, base);
            } else if constexpr (std::is_same_v<T, MaxOfSmooth>) {
                // max_i f_i(x) - max_j f_j(base) = max_i [(f_i(x) - f_i(base)) + (f_i(base) - F(base))]
                Vector at_base;
                double fb = -std::numeric_limits<double>::infinity();
                for (const auto& m : g.members) {
                    at_base.push_back(m->value(base));
                    fb = std::max(fb, at_base.back());
                }
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < g.members.size(); ++i)
                    best = std::max(best, g.members[i]->value_gap(x, base) + (at_base[i] - fb));
                return best;
            } else if constexpr (std::is_same_v<T, L1Regularized>) {
                double s = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i]) - std::abs(base[i]);
                return g.oracle->value_gap(x, base) + g.mu * s;
            } else if constexpr (std::is_same_v<T, LpLeastSquares>) {
                // ||Ax-b||^2 - ||Ay-b||^2 = <A(x-y), A(x+y) - 2b>
                const Vector d = g.a * sub(x, base);
                Vector s = g.a * add(x, base);
                for (std::size_t i = 0; i < s.size(); ++i) s[i] -= 2.0 * g.b[i];
                double reg = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) reg += abs_power_difference(x[i], base[i], g.p);
                return dot(d, s) + g.mu * reg;
            } else {
                return staircase_value(x[0]) - staircase_value(base[0]);
            }
        },
        f.data());
}

double hessian_check(const SmoothOracle& oracle, const Point& x, double h) {
    if (!(h > 0.0)) throw KlError(ErrorKind::InvalidArgument, "step must be positive");
    const std::size_t n = x.size();
    const Matrix hess = oracle.hessian(x.coords());
    Vector y = x.vec();
    auto f_at = [&](std::size_t i, double si, std::size_t j, double sj) {
        y = x.vec();
        y[i] += si;
        y[j] += sj;
        return oracle.value(y);
    };
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double fd = (f_at(i, h, j, h) - f_at(i, h, j, -h) - f_at(i, -h, j, h) + f_at(i, -h, j, -h)) / (4.0 * h * h);
            dev = std::max(dev, std::abs(fd - hess(i, j)));
        }
    }
    return dev;
}

double gradient_check(const SmoothOracle& oracle, const Point& x, double h) {
    const Vector g = oracle.gradient(x.coords());
    double dev = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vector up = x.vec(), dn = x.vec();
        up[i] += h;
        dn[i] -= h;
        const double fd = (oracle.value(up) - oracle.value(dn)) / (2.0 * h);
        dev = std::max(dev, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
    }
    return dev;
}

std::shared_ptr<const PolynomialOracle> make_singular_fixture() {
    // -(x1+x2-6)^2 expanded
    std::vector<Monomial> terms{
        {-1.0, {2, 0}}, {-1.0, {0, 2}}, {-2.0, {1, 1}}, {12.0, {1, 0}}, {12.0, {0, 1}}, {-36.0, {0, 0}},
    };
    std::vector<AbsPowerTerm> abs_terms{{-16.0, 0, 0.5}, {-16.0, 1, 0.5}};
    return std::make_shared<PolynomialOracle>(2, std::move(terms), std::move(abs_terms));
}

}  // namespace kl
