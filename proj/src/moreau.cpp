#include "kl/moreau.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "kl/certifier.hpp"
#include "kl/error.hpp"
#include "kl/format.hpp"
#include "kl/numerics.hpp"
#include "kl/parallel.hpp"
#include "kl/rng.hpp"

namespace kl {

namespace {

using numerics::kInf;

constexpr int kPerturbedStarts = 8;
constexpr std::uint64_t kProxSeed = 0x70726f78ULL;

double soft(double v, double t) { return std::copysign(std::max(std::abs(v) - t, 0.0), v); }

double min_eigenvalue(const Matrix& h) { return numerics::jacobi_eigen(h).values.back(); }

struct Candidate {
    Vector w;
    double objective = kInf;
};

/// Runs `solve` from x and from kPerturbedStarts perturbed copies; keeps the lowest objective,
/// ties broken by distance to x.
Point multistart(const Point& x, double lambda, const std::function<std::optional<Candidate>(Vector)>& solve) {
    std::optional<Candidate> best;
    const double delta = 1e-2 * lambda * (1.0 + norm2(x.vec()));
    for (int s = 0; s <= kPerturbedStarts; ++s) {
        Vector start = x.vec();
        if (s > 0) {
            CounterRng rng(kProxSeed, static_cast<std::uint64_t>(s));
            for (double& v : start) v += delta * rng.normal();
        }
        const auto c = solve(std::move(start));
        if (!c) continue;
        if (!best) {
            best = c;
            continue;
        }
        const double tie = 1e-12 * (1.0 + std::abs(best->objective));
        if (c->objective < best->objective - tie ||
            (std::abs(c->objective - best->objective) <= tie && norm2(sub(c->w, x.vec())) < norm2(sub(best->w, x.vec()))))
            best = c;
    }
    if (!best) throw KlError(ErrorKind::ProxDiverged, "no start converged to a locally strongly convex prox point");
    return Point(best->w);
}

double safe_value(const std::function<double(const Vector&)>& f, const Vector& w) {
    try {
        const double v = f(w);
        return std::isfinite(v) ? v : kInf;
    } catch (const KlError& e) {
        if (e.kind() == ErrorKind::DomainError) return kInf;
        throw;
    }
}

/// Damped Newton with a step cap on phi(w) = f(w) + ||w - x||^2 / (2 lambda).
std::optional<Candidate> newton_prox(const SmoothOracle& f, const Vector& x, double lambda, Vector w) {
    const std::size_t n = x.size();
    auto phi = [&](const Vector& y) { return f.value(y) + dot(sub(y, x), sub(y, x)) / (2.0 * lambda); };
    const double cap = 1.0 + norm2(x);
    double val = safe_value(phi, w);
    if (!std::isfinite(val)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        Vector g = f.gradient(w);
        axpy(1.0 / lambda, sub(w, x), g);
        if (norm2(g) <= 1e-11 * (1.0 + norm2(x) / lambda)) break;
        Matrix h = f.hessian(w) + (1.0 / lambda) * Matrix::identity(n);
        Vector step;
        if (min_eigenvalue(h) > 0.0) step = scaled(-1.0, numerics::solve_linear(h, g));
        else step = scaled(-lambda, g);
        const double len = norm2(step);
        if (len > cap) step = scaled(cap / len, step);
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            Vector trial = w;
            axpy(t, step, trial);
            const double v = safe_value(phi, trial);
            if (v <= val + 1e-4 * t * dot(g, step)) {
                w = std::move(trial);
                val = v;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    Vector g = f.gradient(w);
    axpy(1.0 / lambda, sub(w, x), g);
    if (norm2(g) > 1e-7 * (1.0 + norm2(x) / lambda)) return std::nullopt;
    if (min_eigenvalue(f.hessian(w) + (1.0 / lambda) * Matrix::identity(n)) <= 0.0) return std::nullopt;
    return Candidate{w, val};
}

/// Proximal gradient for phi(w) = s(w) + r(w) with s = f + ||w - x||^2 / (2 lambda) smooth and
/// r separable with the given scalar prox.
std::optional<Candidate> prox_gradient(const std::function<double(const Vector&)>& smooth_value,
                                       const std::function<Vector(const Vector&)>& smooth_grad,
                                       const std::function<double(const Vector&)>& reg_value,
                                       const std::function<double(double, double)>& reg_prox, double lambda, Vector w) {
    double step = lambda;
    auto total = [&](const Vector& y) { return smooth_value(y) + reg_value(y); };
    double val = total(w);
    bool done = false;
    for (int it = 0; it < 20000 && !done; ++it) {
        const Vector g = smooth_grad(w);
        const double sv = smooth_value(w);
        for (int ls = 0; ls < 60; ++ls) {
            Vector trial(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) trial[i] = reg_prox(w[i] - step * g[i], step);
            const Vector d = sub(trial, w);
            const double model = sv + dot(g, d) + dot(d, d) / (2.0 * step);
            if (smooth_value(trial) <= model + 1e-14 * (1.0 + std::abs(sv))) {
                const double moved = norm2(d);
                w = std::move(trial);
                val = total(w);
                done = moved <= 1e-13 * (1.0 + norm2(w));
                break;
            }
            step *= 0.5;
        }
    }
    if (!done || !std::isfinite(val)) return std::nullopt;
    return Candidate{w, val};
}

/// argmin_t mu |t|^p + (t - u)^2 / (2 s), choosing t = 0 on ties.
double lp_scalar_prox(double u, double s, double mu, double p) {
    const double a = std::abs(u);
    if (a == 0.0) return 0.0;
    auto h = [&](double t) { return mu * std::pow(t, p) + (t - a) * (t - a) / (2.0 * s); };
    auto dh = [&](double t) { return mu * p * std::pow(t, p - 1.0) + (t - a) / s; };
    const double tstar = std::pow(mu * p * (1.0 - p) * s, 1.0 / (2.0 - p));
    if (tstar >= a || dh(tstar) >= 0.0) return 0.0;
    double lo = tstar, hi = a;
    for (int k = 0; k < 200 && hi - lo > 1e-16 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (dh(mid) < 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    return h(t) < a * a / (2.0 * s) ? std::copysign(t, u) : 0.0;
}

Point prox_smooth(const SmoothOracle& o, const Point& x, double lambda) {
    if (const auto* q = dynamic_cast<const Quadratic*>(&o)) {
        const double lmin = min_eigenvalue(q->q());
        if (lmin < 0.0 && !(lambda < 1.0 / -lmin))
            throw KlError(ErrorKind::ProxDiverged, "lambda must be below 1/rho = " + format_double(-1.0 / lmin));
        const std::size_t n = x.size();
        Vector rhs = x.vec();
        axpy(-lambda, q->c(), rhs);
        return Point(numerics::solve_linear(Matrix::identity(n) + lambda * q->q(), rhs));
    }
    return multistart(x, lambda, [&](Vector w) { return newton_prox(o, x.vec(), lambda, std::move(w)); });
}

bool is_diagonal(const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0.0) return false;
    return true;
}

Point prox_l1(const L1Regularized& l1, const Point& x, double lambda) {
    const Vector& xv = x.vec();
    if (const auto* q = dynamic_cast<const Quadratic*>(l1.oracle.get()); q && is_diagonal(q->q())) {
        Vector p(xv.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double den = 1.0 + lambda * q->q()(i, i);
            if (!(den > 0.0)) throw KlError(ErrorKind::ProxDiverged, "lambda exceeds the prox-regularity threshold");
            p[i] = soft(xv[i] - lambda * q->c()[i], lambda * l1.mu) / den;
        }
        return Point(std::move(p));
    }
    const SmoothOracle& o = *l1.oracle;
    const std::size_t n = xv.size();
    auto sval = [&](const Vector& w) { return o.value(w) + dot(sub(w, xv), sub(w, xv)) / (2.0 * lambda); };
    auto sgrad = [&](const Vector& w) {
        Vector g = o.gradient(w);
        axpy(1.0 / lambda, sub(w, xv), g);
        return g;
    };
    auto rval = [&](const Vector& w) {
        double s = 0.0;
        for (double v : w) s += std::abs(v);
        return l1.mu * s;
    };
    auto rprox = [&](double v, double s) { return soft(v, s * l1.mu); };
    return multistart(x, lambda, [&](Vector w) -> std::optional<Candidate> {
        auto c = prox_gradient(sval, sgrad, rval, rprox, lambda, std::move(w));
        if (!c) return c;
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i)
            if (c->w[i] != 0.0) free.push_back(i);
        if (!free.empty()) {
            const Matrix h = o.hessian(c->w).principal(free) + (1.0 / lambda) * Matrix::identity(free.size());
            if (min_eigenvalue(h) <= 0.0) return std::nullopt;
        }
        return c;
    });
}

Point prox_lp(const LpLeastSquares& lp, const Point& x, double lambda) {
    const Vector& xv = x.vec();
    const std::size_t n = xv.size();
    auto residual = [&](const Vector& w) {
        Vector r = lp.a * w;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lp.b[i];
        return r;
    };
    auto sval = [&](const Vector& w) {
        const Vector r = residual(w);
        return dot(r, r) + dot(sub(w, xv), sub(w, xv)) / (2.0 * lambda);
    };
    auto sgrad = [&](const Vector& w) {
        Vector g = scaled(2.0, transpose_times(lp.a, residual(w)));
        axpy(1.0 / lambda, sub(w, xv), g);
        return g;
    };
    auto rval = [&](const Vector& w) {
        double s = 0.0;
        for (double v : w)
            if (v != 0.0) s += std::pow(std::abs(v), lp.p);
        return lp.mu * s;
    };
    auto rprox = [&](double v, double s) { return lp_scalar_prox(v, s, lp.mu, lp.p); };
    return multistart(x, lambda, [&](Vector w) -> std::optional<Candidate> {
        auto c = prox_gradient(sval, sgrad, rval, rprox, lambda, std::move(w));
        if (!c) return c;
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i)
            if (c->w[i] != 0.0) free.push_back(i);
        if (!free.empty()) {
            Matrix h(free.size(), free.size());
            for (std::size_t a = 0; a < free.size(); ++a) {
                for (std::size_t b = 0; b < free.size(); ++b) {
                    double s = 0.0;
                    for (std::size_t r = 0; r < lp.a.rows(); ++r) s += lp.a(r, free[a]) * lp.a(r, free[b]);
                    h(a, b) = 2.0 * s;
                }
                h(a, a) += 1.0 / lambda + lp.mu * lp.p * (lp.p - 1.0) * std::pow(std::abs(c->w[free[a]]), lp.p - 2.0);
            }
            if (min_eigenvalue(h) <= 0.0) return std::nullopt;
        }
        return c;
    });
}

/// Prox-linear iterations: each step minimizes max_i (f_i(w) + <g_i, d>) + ||w + d - x||^2 / (2 lambda)
/// through its dual QP over the simplex, followed by a backtracking line search.
std::optional<Candidate> max_prox_linear(const MaxOfSmooth& mx, const Vector& x, double lambda, Vector w) {
    const std::size_t m = mx.members.size();
    const std::size_t n = x.size();
    auto fmax = [&](const Vector& y) {
        double v = -kInf;
        for (const auto& f : mx.members) v = std::max(v, f->value(y));
        return v;
    };
    auto phi = [&](const Vector& y) { return fmax(y) + dot(sub(y, x), sub(y, x)) / (2.0 * lambda); };
    double val = safe_value(phi, w);
    if (!std::isfinite(val)) return std::nullopt;
    bool done = false;
    for (int it = 0; it < 5000 && !done; ++it) {
        Vector a(m);
        Matrix g(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = mx.members[i]->value(w);
            const Vector gi = mx.members[i]->gradient(w);
            for (std::size_t k = 0; k < n; ++k) g(i, k) = gi[k];
        }
        const Vector r = sub(x, w);
        Vector lin = add(a, g * r);
        const Matrix p = lambda * (g * g.transpose());
        Matrix aeq(1, m, 1.0);
        const auto qp = numerics::solve_nonneg_qp(p, scaled(-1.0, lin), aeq, Vector{1.0},
                                                  Vector(m, 1.0 / static_cast<double>(m)));
        Vector d = r;
        axpy(-lambda, transpose_times(g, qp.x), d);
        double model = -kInf;
        for (std::size_t i = 0; i < m; ++i) model = std::max(model, a[i] + dot(g.row(i), d));
        model += dot(sub(d, r), sub(d, r)) / (2.0 * lambda);
        const double decrease = val - model;
        if (norm2(d) <= 1e-13 * (1.0 + norm2(w)) || decrease <= 0.0) {
            done = true;
            break;
        }
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            Vector trial = w;
            axpy(t, d, trial);
            const double v = safe_value(phi, trial);
            if (v <= val - 1e-4 * t * decrease) {
                w = std::move(trial);
                val = v;
                moved = true;
                break;
            }
        }
        if (!moved) done = true;
    }
    if (!done) return std::nullopt;
    const double f0 = fmax(w);
    const double tau = 1e-8 * (1.0 + std::abs(f0));
    for (const auto& f : mx.members) {
        if (f->value(w) < f0 - tau) continue;
        if (min_eigenvalue(f->hessian(w) + (1.0 / lambda) * Matrix::identity(n)) <= 0.0) return std::nullopt;
    }
    return Candidate{w, val};
}

}  // namespace

Point prox(const StructuredFunction& f, const Point& x, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw KlError(ErrorKind::InvalidArgument, "lambda must be positive");
    if (x.size() != f.dimension()) throw KlError(ErrorKind::DimensionMismatch, "prox: dimension");
    return std::visit(
        [&](const auto& g) -> Point {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, SmoothClass>) {
                return prox_smooth(*g.oracle, x, lambda);
            } else if constexpr (std::is_same_v<T, MaxOfSmooth>) {
                return multistart(x, lambda, [&](Vector w) { return max_prox_linear(g, x.vec(), lambda, std::move(w)); });
            } else if constexpr (std::is_same_v<T, L1Regularized>) {
                return prox_l1(g, x, lambda);
            } else if constexpr (std::is_same_v<T, LpLeastSquares>) {
                return prox_lp(g, x, lambda);
            } else {
                throw KlError(ErrorKind::UnsupportedClass, "the staircase function is not prox-regular at 0");
            }
        },
        f.data());
}

double envelope(const StructuredFunction& f, const Point& x, double lambda) {
    const Point p = prox(f, x, lambda);
    const Vector d = sub(p.vec(), x.vec());
    return evaluate(f, p) + dot(d, d) / (2.0 * lambda);
}

double envelope_modulus_smooth(const Matrix& h, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw KlError(ErrorKind::InvalidArgument, "lambda must be >= 0");
    const auto eig = numerics::jacobi_eigen(h);
    const double rho = numerics::spectral_radius(eig.values);
    for (double v : eig.values)
        if (rho == 0.0 || std::abs(v) <= 1e-10 * rho)
            throw KlError(ErrorKind::SingularHessian, "envelope modulus needs a nonsingular Hessian");
    const double pos = numerics::positive_threshold(eig.values);
    double best = kInf;
    for (double v : eig.values)
        if (v > pos) best = std::min(best, std::sqrt(v / (2.0 * (1.0 + lambda * v))));
    return best;
}

Vector default_sweep_lambdas() {
    Vector out;
    for (int k = 0; k <= 6; ++k) out.push_back(0.5 * std::ldexp(1.0, -k));
    return out;
}

EnvelopeSweep sweep(const StructuredFunction& f, const Point& xbar, const Vector& lambdas) {
    const auto* sm = f.as<SmoothClass>();
    if (!sm) throw KlError(ErrorKind::UnsupportedClass, "the envelope sweep is closed-form only for the smooth class");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i]))
            throw KlError(ErrorKind::InvalidArgument, "sweep lambdas must be positive");
        if (i > 0 && lambdas[i] > lambdas[i - 1])
            throw KlError(ErrorKind::InvalidArgument, "sweep lambdas must be nonincreasing");
    }
    const KLCertificate cert = certify_smooth(*sm->oracle, xbar);
    const Matrix h = sm->oracle->hessian(xbar.coords());

    EnvelopeSweep s;
    s.lambdas = lambdas;
    s.limit_modulus = cert.modulus;
    s.moduli.assign(lambdas.size(), 0.0);
    parallel_for(lambdas.size(), [&](std::size_t i) { s.moduli[i] = envelope_modulus_smooth(h, lambdas[i]); });

    for (std::size_t i = 1; i < s.moduli.size(); ++i)
        if (s.moduli[i] < s.moduli[i - 1] - 1e-9) s.monotone = false;
    for (double m : s.moduli)
        if (m > s.limit_modulus + 1e-9) s.bounded = false;
    if (!s.moduli.empty() && std::isfinite(s.limit_modulus)) {
        const double lmax = numerics::jacobi_eigen(h).values.front();
        const double bound = s.limit_modulus * s.lambdas.back() * lmax;
        s.converged = std::abs(s.moduli.back() - s.limit_modulus) <= bound + 1e-12;
    }
    return s;
}

std::string sweep_csv(const EnvelopeSweep& s) {
    std::string out = "lambda,modulus,limit_modulus\n";
    for (std::size_t i = 0; i < s.lambdas.size(); ++i)
        out += format_double(s.lambdas[i]) + "," + format_double(s.moduli[i]) + "," + format_double(s.limit_modulus) + "\n";
    return out;
}

}  // namespace kl
