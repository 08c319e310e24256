#include "kl/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include "kl/error.hpp"
#include "kl/numerics.hpp"
#include "kl/rng.hpp"

namespace kl {

namespace {

using numerics::kInf;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double tol_singular(const Vector& eigs) { return 1e-10 * numerics::spectral_radius(eigs); }

/// Index of the smallest positive eigenvalue (descending order), first in order among ties; -1 if none.
int smallest_positive_index(const Vector& eigs) {
    const double pos = numerics::positive_threshold(eigs);
    int idx = -1;
    for (std::size_t i = 0; i < eigs.size(); ++i)
        if (eigs[i] > pos) idx = static_cast<int>(i);
    if (idx < 0) return idx;
    const double tie = 1e-12 * std::max(1.0, numerics::spectral_radius(eigs));
    while (idx > 0 && std::abs(eigs[idx - 1] - eigs[idx]) <= tie) --idx;
    return idx;
}

/// Prop 5.1 logic on a Hessian; `embed` lifts an eigenvector to the ambient space.
KLCertificate certify_from_hessian(const Matrix& h, const std::function<Vector(const Vector&)>& embed) {
    const auto eig = numerics::jacobi_eigen(h);
    const double sing = tol_singular(eig.values);
    double min_abs = kInf;
    for (double v : eig.values) min_abs = std::min(min_abs, std::abs(v));
    if (eig.values.empty() || min_abs <= sing || numerics::spectral_radius(eig.values) == 0.0)
        throw KlError(ErrorKind::SingularHessian,
                      "Hessian is singular (min |eigenvalue| " + fmt(min_abs) + "); use the sampling oracle instead");

    KLCertificate cert;
    cert.diagnostics.push_back("eigenvalues: " + [&] {
        std::string s;
        for (double v : eig.values) s += (s.empty() ? "" : " ") + fmt(v);
        return s;
    }());
    const int idx = smallest_positive_index(eig.values);
    if (idx < 0) {
        cert.verdict = Verdict::KlHoldsZeroNotSharp;
        cert.modulus = kInf;
        cert.sharp = false;
        cert.diagnostics.push_back("negative definite: strict local max, d>f(xbar) is empty, exponent 0");
        return cert;
    }
    const double lam = eig.values[idx];
    cert.verdict = Verdict::KlHoldsHalf;
    cert.modulus = std::sqrt(lam / 2.0);
    cert.sharp = true;
    cert.witness_w = embed(eig.vectors.column(static_cast<std::size_t>(idx)));
    cert.diagnostics.push_back("smallest positive eigenvalue " + fmt(lam));
    return cert;
}

struct SearchOptions {
    int max_iterations = 500;
    double step_tol = 1e-12;
};

struct SearchResult {
    Vector y;
    double value = kInf;
};

/// Compass search on the unit sphere. `project` maps a trial point back onto the feasible part of
/// the sphere (returning false if it cannot); `objective` may return +inf for excluded points.
SearchResult sphere_search(const std::function<double(const Vector&)>& objective,
                           const std::function<bool(Vector&)>& project, Vector y, const SearchOptions& opts) {
    SearchResult best{y, objective(y)};
    if (!std::isfinite(best.value)) return best;
    const std::size_t d = y.size();
    double step = 0.5;
    for (int it = 0; it < opts.max_iterations && step > opts.step_tol; ++it) {
        bool improved = false;
        for (std::size_t k = 0; k < d && !improved; ++k) {
            for (double sgn : {1.0, -1.0}) {
                Vector trial = best.y;
                trial[k] += sgn * step;
                if (!project(trial)) continue;
                const double v = objective(trial);
                if (v < best.value - 1e-15 * std::abs(best.value)) {
                    best = {std::move(trial), v};
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

bool normalize_in_place(Vector& y) {
    const double nrm = norm2(y);
    if (!(nrm > 1e-14)) return false;
    for (double& v : y) v /= nrm;
    return true;
}

// ---------------------------------------------------------------- max class

struct MaxEval {
    bool feasible = false;
    double sigma = 0.0;
    double inner = kInf;  // min 1/2 ||sum lambda H w + sum beta g||^2 over the optimal face
    Vector lambda;
    Vector beta;
};

double cone_tolerance(const ActiveSetData& data) {
    double s = 1.0;
    for (const auto& g : data.gradients) s = std::max(s, norm2(g));
    return 1e-10 * s;
}

/// Primal multiplier LP: max sum lambda_i <H_i w, w> over the multiplier polytope.
numerics::LpResult sigma_lp(const ActiveSetData& data, const Vector& w) {
    const std::size_t m = data.active.size();
    const std::size_t n = w.size();
    numerics::LinearProgram lp;
    lp.maximize = true;
    lp.c.resize(m);
    for (std::size_t i = 0; i < m; ++i) lp.c[i] = quad_form(data.hessians[i], w);
    lp.a_eq = Matrix(n + 1, m);
    lp.b_eq.assign(n + 1, 0.0);
    lp.b_eq[0] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        lp.a_eq(0, i) = 1.0;
        for (std::size_t k = 0; k < n; ++k) lp.a_eq(k + 1, i) = data.gradients[i][k];
    }
    return numerics::solve_lp(lp);
}

bool in_max_cone(const ActiveSetData& data, const Vector& w) {
    const double tol = cone_tolerance(data);
    for (const auto& g : data.gradients)
        if (dot(g, w) > tol) return false;
    return true;
}

/// Evaluates sigma(w) and the inner min-norm problem with beta allowed on `tight`.
MaxEval evaluate_max(const ActiveSetData& data, const Vector& w, const std::vector<bool>& tight) {
    MaxEval out;
    if (!in_max_cone(data, w)) return out;
    const auto lp = sigma_lp(data, w);
    if (lp.status != numerics::LpStatus::Optimal) return out;
    out.feasible = true;
    out.sigma = lp.value;

    const std::size_t m = data.active.size();
    const std::size_t n = w.size();
    std::vector<std::size_t> beta_idx;
    for (std::size_t i = 0; i < m; ++i)
        if (tight[i]) beta_idx.push_back(i);
    const std::size_t nv = m + beta_idx.size();

    Matrix b(n, nv);
    for (std::size_t i = 0; i < m; ++i) {
        const Vector hw = data.hessians[i] * w;
        for (std::size_t k = 0; k < n; ++k) b(k, i) = hw[k];
    }
    for (std::size_t j = 0; j < beta_idx.size(); ++j)
        for (std::size_t k = 0; k < n; ++k) b(k, m + j) = data.gradients[beta_idx[j]][k];

    Matrix aeq(n + 2, nv);
    Vector beq(n + 2, 0.0);
    beq[0] = 1.0;
    beq[n + 1] = out.sigma;
    for (std::size_t i = 0; i < m; ++i) {
        aeq(0, i) = 1.0;
        for (std::size_t k = 0; k < n; ++k) aeq(k + 1, i) = data.gradients[i][k];
        aeq(n + 1, i) = quad_form(data.hessians[i], w);
    }
    Vector x0(nv, 0.0);
    for (std::size_t i = 0; i < m; ++i) x0[i] = std::max(0.0, lp.x[i]);
    const auto qp = numerics::solve_nonneg_qp(b.transpose() * b, Vector(nv, 0.0), aeq, beq, x0);
    out.inner = std::max(0.0, qp.value);
    out.lambda.assign(qp.x.begin(), qp.x.begin() + static_cast<std::ptrdiff_t>(m));
    out.beta.assign(m, 0.0);
    for (std::size_t j = 0; j < beta_idx.size(); ++j) out.beta[beta_idx[j]] = qp.x[m + j];
    return out;
}

std::vector<bool> tight_set(const ActiveSetData& data, const Vector& w) {
    const double tol = cone_tolerance(data);
    std::vector<bool> t(data.active.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::abs(dot(data.gradients[i], w)) <= tol;
    return t;
}

double hessian_scale(const ActiveSetData& data) {
    double s = 0.0;
    for (const auto& h : data.hessians) s = std::max(s, h.max_abs());
    return std::max(1.0, s);
}

struct PatternSearch {
    double best_inner = kInf;
    Vector inner_w;
    double best_ratio = kInf;
    Vector ratio_w;
    double ratio_sigma = 0.0;
    double random_ratio = kInf;
    double random_inner = kInf;
};

}  // namespace

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::KlHoldsHalf: return "KL_HOLDS_HALF";
        case Verdict::KlHoldsZeroNotSharp: return "KL_HOLDS_ZERO_NOT_SHARP";
        case Verdict::NotCertified: return "NOT_CERTIFIED";
    }
    return "UNKNOWN";
}

double smooth_modulus_from_hessian(const Matrix& h) {
    const auto eig = numerics::jacobi_eigen(h);
    const int idx = smallest_positive_index(eig.values);
    return idx < 0 ? kInf : std::sqrt(eig.values[idx] / 2.0);
}

KLCertificate certify_smooth(const SmoothOracle& f, const Point& xbar, const CertifierOptions& opts) {
    if (xbar.size() != f.dimension()) throw KlError(ErrorKind::DimensionMismatch, "certify_smooth: dimension");
    const double g = norm2(f.gradient(xbar.coords()));
    if (g > opts.stationarity_tol) throw KlError(ErrorKind::NotStationary, "||grad f(xbar)|| = " + fmt(g));
    return certify_from_hessian(f.hessian(xbar.coords()), [](const Vector& v) { return v; });
}

double max_second_subderivative(const ActiveSetData& data, const Vector& w) {
    if (!in_max_cone(data, w)) return kInf;
    const auto lp = sigma_lp(data, w);
    return lp.status == numerics::LpStatus::Optimal ? lp.value : kInf;
}

MaxKKTPoint max_kkt_point(const ActiveSetData& data, const Vector& w) {
    if (data.active.empty()) throw KlError(ErrorKind::InvalidArgument, "empty active set");
    if (!in_max_cone(data, w)) throw KlError(ErrorKind::DomainError, "w is outside the critical cone");
    const MaxEval ev = evaluate_max(data, w, tight_set(data, w));
    if (!ev.feasible) throw KlError(ErrorKind::DomainError, "multiplier polytope is empty");

    // dual of the multiplier LP: min kappa s.t. kappa >= <g_i, z> + <H_i w, w>
    const std::size_t m = data.active.size();
    const std::size_t n = w.size();
    numerics::LinearProgram lp;
    lp.c.assign(n + 1, 0.0);
    lp.c[0] = 1.0;
    lp.a_ub = Matrix(m, n + 1);
    lp.b_ub.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        lp.a_ub(i, 0) = -1.0;
        for (std::size_t k = 0; k < n; ++k) lp.a_ub(i, k + 1) = data.gradients[i][k];
        lp.b_ub[i] = -quad_form(data.hessians[i], w);
    }
    lp.lower.assign(n + 1, -kInf);
    const auto dual = numerics::solve_lp(lp);
    if (dual.status != numerics::LpStatus::Optimal) throw KlError(ErrorKind::NoConvergence, "dual multiplier LP");

    MaxKKTPoint p;
    p.kappa = ev.sigma;
    p.lambda = ev.lambda;
    p.beta = ev.beta;
    p.w = w;
    p.z.assign(dual.x.begin() + 1, dual.x.end());
    return p;
}

double kkt_violation(const ActiveSetData& data, const MaxKKTPoint& p) {
    const std::size_t m = data.active.size();
    if (p.lambda.size() != m || p.beta.size() != m || p.w.size() != p.z.size())
        throw KlError(ErrorKind::DimensionMismatch, "kkt point shape");
    double viol = 0.0;
    double sum = 0.0;
    Vector comb(p.w.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        sum += p.lambda[i];
        axpy(p.lambda[i], data.gradients[i], comb);
        const double gw = dot(data.gradients[i], p.w);
        const double bracket = p.kappa - dot(data.gradients[i], p.z) - quad_form(data.hessians[i], p.w);
        viol = std::max({viol, -p.lambda[i], -p.beta[i], gw, -bracket, std::abs(p.lambda[i] * bracket),
                         std::abs(p.beta[i] * gw)});
    }
    viol = std::max({viol, std::abs(sum - 1.0), norm_inf(comb)});
    return viol;
}

KLCertificate certify_max(const StructuredFunction& f, const Point& xbar, const CertifierOptions& opts) {
    const auto* mx = f.as<MaxOfSmooth>();
    if (!mx) throw KlError(ErrorKind::UnsupportedClass, "certify_max needs a max-of-smooth function");
    if (xbar.size() != f.dimension()) throw KlError(ErrorKind::DimensionMismatch, "certify_max: dimension");
    if (!is_stationary(f, xbar, opts.stationarity_tol))
        throw KlError(ErrorKind::NotStationary, "0 is not in the subdifferential at xbar");
    const ActiveSetData data = active_set(f, xbar);
    const std::size_t m = data.active.size();
    const std::size_t n = xbar.size();
    if (m > opts.max_active)
        throw KlError(ErrorKind::PatternExplosion,
                      std::to_string(m) + " active pieces exceed the cap of " + std::to_string(opts.max_active));

    if (m == 1) {
        const auto eig = numerics::jacobi_eigen(data.hessians[0]);
        double min_abs = kInf;
        for (double v : eig.values) min_abs = std::min(min_abs, std::abs(v));
        if (min_abs > tol_singular(eig.values) && numerics::spectral_radius(eig.values) > 0.0) {
            KLCertificate cert = certify_from_hessian(data.hessians[0], [](const Vector& v) { return v; });
            cert.diagnostics.insert(cert.diagnostics.begin(), "single active piece: smooth reduction");
            return cert;
        }
    }

    const double scale = hessian_scale(data);
    const double sigma_floor = 1e-12 * scale;
    const SearchOptions sopts{opts.max_iterations, opts.step_tol};
    KLCertificate cert;
    PatternSearch total;
    std::size_t patterns_used = 0;

    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        std::vector<bool> tight(m);
        std::vector<Vector> rows;
        for (std::size_t i = 0; i < m; ++i) {
            tight[i] = (mask >> i) & 1U;
            if (tight[i]) rows.push_back(data.gradients[i]);
        }
        const Matrix z = rows.empty() ? Matrix::identity(n) : numerics::null_space(Matrix::from_rows(rows));
        const std::size_t d = z.cols();
        if (d == 0) continue;

        std::vector<Vector> h;  // constraints h^T y <= 0 for inactive-in-pattern gradients
        for (std::size_t i = 0; i < m; ++i)
            if (!tight[i]) h.push_back(transpose_times(z, data.gradients[i]));

        // relative interior of the pattern cone
        numerics::LinearProgram ip;
        ip.maximize = true;
        ip.c.assign(d + 1, 0.0);
        ip.c[d] = 1.0;
        ip.lower.assign(d + 1, -1.0);
        ip.upper.assign(d + 1, 1.0);
        if (!h.empty()) {
            ip.a_ub = Matrix(h.size(), d + 1);
            ip.b_ub.assign(h.size(), 0.0);
            for (std::size_t r = 0; r < h.size(); ++r) {
                for (std::size_t k = 0; k < d; ++k) ip.a_ub(r, k) = h[r][k];
                ip.a_ub(r, d) = 1.0;
            }
        }
        const auto interior = numerics::solve_lp(ip);
        if (interior.status != numerics::LpStatus::Optimal || interior.value <= 1e-9) continue;
        ++patterns_used;

        auto feasible = [&](const Vector& y) {
            for (const auto& hr : h)
                if (dot(hr, y) > 1e-12) return false;
            return true;
        };
        auto project = [&](Vector& y) { return normalize_in_place(y) && feasible(y); };
        auto lift = [&](const Vector& y) { return z * y; };
        auto inner_obj = [&](const Vector& y) {
            const MaxEval ev = evaluate_max(data, lift(y), tight);
            return ev.feasible ? ev.inner : kInf;
        };
        auto ratio_obj = [&](const Vector& y) {
            const MaxEval ev = evaluate_max(data, lift(y), tight);
            if (!ev.feasible || ev.sigma <= sigma_floor) return kInf;
            return ev.inner / ev.sigma;
        };

        std::vector<Vector> starts;
        auto add_start = [&](Vector y) {
            if (project(y)) starts.push_back(std::move(y));
        };
        if (d == 1) {
            add_start(Vector{1.0});
            add_start(Vector{-1.0});
        } else {
            Vector y0(interior.x.begin(), interior.x.begin() + static_cast<std::ptrdiff_t>(d));
            add_start(y0);
            Matrix avg(d, d);
            for (std::size_t i = 0; i < m; ++i) {
                const Matrix reduced = z.transpose() * data.hessians[i] * z;
                avg = avg + (1.0 / static_cast<double>(m)) * reduced;
                const auto e = numerics::jacobi_eigen(reduced);
                for (std::size_t c = 0; c < d; ++c) {
                    add_start(e.vectors.column(c));
                    add_start(scaled(-1.0, e.vectors.column(c)));
                }
            }
            const auto e = numerics::jacobi_eigen(avg);
            for (std::size_t c = 0; c < d; ++c) {
                add_start(e.vectors.column(c));
                add_start(scaled(-1.0, e.vectors.column(c)));
            }
            CounterRng rng(opts.seed, mask);
            const Vector y0n = normalized(y0);
            for (int tries = 0; static_cast<int>(starts.size()) < opts.multistart && tries < 20 * opts.multistart; ++tries) {
                Vector y(d);
                for (double& v : y) v = rng.normal();
                normalize_in_place(y);
                const double s = rng.uniform();
                for (std::size_t k = 0; k < d; ++k) y[k] = (1.0 - s) * y0n[k] + s * y[k];
                add_start(std::move(y));
            }
            if (starts.size() > static_cast<std::size_t>(opts.multistart)) starts.resize(static_cast<std::size_t>(opts.multistart));
        }

        for (const auto& y : starts) {
            total.random_inner = std::min(total.random_inner, inner_obj(y));
            total.random_ratio = std::min(total.random_ratio, ratio_obj(y));
        }
        for (const auto& y : starts) {
            const auto r = d == 1 ? SearchResult{y, inner_obj(y)} : sphere_search(inner_obj, project, y, sopts);
            if (r.value < total.best_inner) {
                total.best_inner = r.value;
                total.inner_w = lift(r.y);
            }
        }
        for (const auto& y : starts) {
            const auto r = d == 1 ? SearchResult{y, ratio_obj(y)} : sphere_search(ratio_obj, project, y, sopts);
            if (r.value < total.best_ratio) {
                total.best_ratio = r.value;
                total.ratio_w = lift(r.y);
                total.ratio_sigma = evaluate_max(data, total.ratio_w, tight).sigma;
            }
        }
    }

    cert.diagnostics.push_back("active pieces: " + std::to_string(m) + ", patterns with nonempty interior: " +
                               std::to_string(patterns_used));
    cert.diagnostics.push_back("nonsingularity value min 1/2||v||^2 over W-sphere: " + fmt(total.best_inner));
    if (total.best_inner <= 1e-12 * scale * scale) {
        cert.verdict = Verdict::NotCertified;
        cert.modulus = 0.0;
        cert.sharp = false;
        cert.witness_w = total.inner_w;
        cert.diagnostics.push_back("nonsingularity fails: 0 is in D(df)(xbar|0)(w) for the witness w");
        return cert;
    }
    if (total.random_ratio < total.best_ratio - 1e-9 * std::max(1.0, total.best_ratio))
        cert.diagnostics.push_back("warning: random starts beat the local searches (" + fmt(total.random_ratio) + ")");
    cert.diagnostics.push_back("random-start cross-check: ratio " + fmt(total.random_ratio) + ", descended " +
                               fmt(total.best_ratio));

    cert.verdict = Verdict::KlHoldsHalf;
    if (!std::isfinite(total.best_ratio)) {
        cert.modulus = kInf;
        cert.sharp = false;
        cert.diagnostics.push_back("no critical direction with positive second subderivative; modulus +inf");
        return cert;
    }
    cert.modulus = std::sqrt(total.best_ratio);
    cert.sharp = true;
    cert.witness_w = total.ratio_w;
    if (total.ratio_sigma < 1e-6 * scale) {
        cert.infimum_attained = false;
        cert.diagnostics.push_back("ratio infimum approached as <v,w> -> 0+; not attained");
    }
    return cert;
}

// ---------------------------------------------------------------- l1 class

namespace {

struct L1Geometry {
    IndexPartition part;
    Matrix h;
    std::vector<int> sign;  // per coordinate: 0 free (J), -1 must be <= 0 (K+), +1 must be >= 0 (K-), 2 fixed zero (I)
};

Vector l1_v(const L1Geometry& g, const Vector& w) {
    const Vector hw = g.h * w;
    Vector v(w.size(), 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) {
        switch (g.sign[j]) {
            case 2: v[j] = 0.0; break;
            case 0: v[j] = hw[j]; break;
            case -1: v[j] = w[j] < 0.0 ? hw[j] : std::max(hw[j], 0.0); break;
            case 1: v[j] = w[j] > 0.0 ? hw[j] : std::min(hw[j], 0.0); break;
        }
    }
    return v;
}

bool l1_project(const L1Geometry& g, Vector& w) {
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (g.sign[j] == 2 || (g.sign[j] == -1 && w[j] > 0.0) || (g.sign[j] == 1 && w[j] < 0.0)) w[j] = 0.0;
    }
    return normalize_in_place(w);
}

/// Looks for a nonzero w with w_Z = 0, (Hw)_F = 0 restricted to F = J u E, and the sign conditions.
std::optional<Vector> l1_pattern_null(const L1Geometry& g, const std::vector<std::size_t>& kset, std::size_t mask) {
    const std::size_t n = g.h.rows();
    std::vector<std::size_t> f = g.part.support;
    std::vector<std::size_t> zero_branch;
    for (std::size_t b = 0; b < kset.size(); ++b) {
        if ((mask >> b) & 1U) zero_branch.push_back(kset[b]);
        else f.push_back(kset[b]);
    }
    if (f.empty()) return std::nullopt;
    std::sort(f.begin(), f.end());
    const Matrix hff = g.h.principal(f);
    const Matrix nb = numerics::null_space(hff);
    const std::size_t k = nb.cols();
    if (k == 0) return std::nullopt;

    // rows s with s^T y <= 0
    std::vector<Vector> s;
    for (std::size_t a = 0; a < f.size(); ++a) {
        const int sg = g.sign[f[a]];
        if (sg == 0) continue;
        Vector row(k);
        for (std::size_t c = 0; c < k; ++c) row[c] = (sg == -1 ? 1.0 : -1.0) * nb(a, c);
        s.push_back(std::move(row));
    }
    for (std::size_t j : zero_branch) {
        Vector row(k, 0.0);
        for (std::size_t a = 0; a < f.size(); ++a)
            for (std::size_t c = 0; c < k; ++c) row[c] += g.h(j, f[a]) * nb(a, c);
        if (g.sign[j] == 1) row = scaled(-1.0, row);
        s.push_back(std::move(row));
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (double dir : {1.0, -1.0}) {
            numerics::LinearProgram lp;
            lp.maximize = true;
            lp.c.assign(k, 0.0);
            lp.c[c] = dir;
            lp.lower.assign(k, -1.0);
            lp.upper.assign(k, 1.0);
            if (!s.empty()) {
                lp.a_ub = Matrix::from_rows(s);
                lp.b_ub.assign(s.size(), 0.0);
            }
            const auto r = numerics::solve_lp(lp);
            if (r.status == numerics::LpStatus::Optimal && r.value > 1e-9) {
                Vector w(n, 0.0);
                const Vector wf = nb * r.x;
                for (std::size_t a = 0; a < f.size(); ++a) w[f[a]] = wf[a];
                if (normalize_in_place(w)) {
                    l1_project(g, w);  // clears round-off sign violations
                    return w;
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace

KLCertificate certify_l1(const StructuredFunction& f, const Point& xbar, const CertifierOptions& opts) {
    const auto* l1 = f.as<L1Regularized>();
    if (!l1) throw KlError(ErrorKind::UnsupportedClass, "certify_l1 needs an l1-regularized function");
    L1Geometry g;
    g.part = classify_l1_indices(f, xbar);
    g.h = l1->oracle->hessian(xbar.coords());
    const std::size_t n = xbar.size();
    g.sign.assign(n, 2);
    for (std::size_t j : g.part.support) g.sign[j] = 0;
    for (std::size_t j : g.part.kplus) g.sign[j] = -1;
    for (std::size_t j : g.part.kminus) g.sign[j] = 1;
    std::vector<std::size_t> kset = g.part.kplus;
    kset.insert(kset.end(), g.part.kminus.begin(), g.part.kminus.end());
    std::sort(kset.begin(), kset.end());

    KLCertificate cert;
    cert.diagnostics.push_back("index sets: |I|=" + std::to_string(g.part.interior.size()) + " |J|=" +
                               std::to_string(g.part.support.size()) + " |K+|=" + std::to_string(g.part.kplus.size()) +
                               " |K-|=" + std::to_string(g.part.kminus.size()));

    auto embed_j = [&](const Vector& v) {
        Vector w(n, 0.0);
        for (std::size_t a = 0; a < g.part.support.size(); ++a) w[g.part.support[a]] = v[a];
        return w;
    };

    if (g.part.relative_interior()) {
        if (g.part.support.empty()) {
            cert.verdict = Verdict::KlHoldsHalf;
            cert.modulus = kInf;
            cert.sharp = false;
            cert.diagnostics.push_back("critical cone is {0}: modulus +inf");
            return cert;
        }
        const Matrix hjj = g.h.principal(g.part.support);
        const auto eig = numerics::jacobi_eigen(hjj);
        double min_abs = kInf;
        for (double v : eig.values) min_abs = std::min(min_abs, std::abs(v));
        if (min_abs <= tol_singular(eig.values) || numerics::spectral_radius(eig.values) == 0.0) {
            // a null vector of H_JJ is a nonsingularity violation
            std::size_t at = 0;
            for (std::size_t i = 0; i < eig.values.size(); ++i)
                if (std::abs(eig.values[i]) < std::abs(eig.values[at])) at = i;
            cert.verdict = Verdict::NotCertified;
            cert.witness_w = embed_j(eig.vectors.column(at));
            cert.diagnostics.push_back("H_JJ is singular");
            return cert;
        }
        const int idx = smallest_positive_index(eig.values);
        cert.verdict = Verdict::KlHoldsHalf;
        if (idx < 0) {
            cert.modulus = kInf;
            cert.sharp = false;
            cert.diagnostics.push_back("H_JJ negative definite: no direction with positive second subderivative");
            return cert;
        }
        cert.modulus = std::sqrt(eig.values[idx] / 2.0);
        cert.sharp = true;
        cert.witness_w = embed_j(eig.vectors.column(static_cast<std::size_t>(idx)));
        cert.diagnostics.push_back("relative-interior case: smallest positive eigenvalue of H_JJ " + fmt(eig.values[idx]));
        return cert;
    }

    if (kset.size() > opts.max_boundary)
        throw KlError(ErrorKind::PatternExplosion, std::to_string(kset.size()) + " boundary indices exceed the cap of " +
                                                       std::to_string(opts.max_boundary));

    const std::size_t npat = std::size_t{1} << kset.size();
    for (std::size_t mask = 0; mask < npat; ++mask) {
        if (auto w = l1_pattern_null(g, kset, mask)) {
            cert.verdict = Verdict::NotCertified;
            cert.witness_w = *w;
            cert.diagnostics.push_back("nonsingularity fails on complementarity pattern " + std::to_string(mask));
            return cert;
        }
    }
    cert.diagnostics.push_back("nonsingularity holds on all " + std::to_string(npat) + " patterns");

    const double scale = std::max(1.0, g.h.max_abs());
    const double sigma_floor = 1e-12 * scale;
    auto ratio = [&](const Vector& w) {
        const double sigma = quad_form(g.h, w);
        if (sigma <= sigma_floor) return kInf;
        const Vector v = l1_v(g, w);
        return 0.5 * dot(v, v) / sigma;
    };
    auto project = [&](Vector& w) { return l1_project(g, w); };

    // starts: positive eigenvectors of H_FF for each pattern of zeroed boundary indices, then random
    std::vector<std::pair<double, Vector>> candidates;
    for (std::size_t mask = 0; mask < npat && candidates.size() < 4096; ++mask) {
        std::vector<std::size_t> free = g.part.support;
        for (std::size_t b = 0; b < kset.size(); ++b)
            if (!((mask >> b) & 1U)) free.push_back(kset[b]);
        if (free.empty()) continue;
        std::sort(free.begin(), free.end());
        const auto e = numerics::jacobi_eigen(g.h.principal(free));
        for (std::size_t c = 0; c < free.size(); ++c) {
            for (double sgn : {1.0, -1.0}) {
                Vector w(n, 0.0);
                for (std::size_t a = 0; a < free.size(); ++a) w[free[a]] = sgn * e.vectors(a, c);
                if (!project(w)) continue;
                const double r = ratio(w);
                if (std::isfinite(r)) candidates.emplace_back(r, std::move(w));
            }
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (candidates.size() > static_cast<std::size_t>(opts.multistart)) candidates.resize(static_cast<std::size_t>(opts.multistart));

    CounterRng rng(opts.seed, 0x11);
    double random_best = kInf;
    std::vector<Vector> starts;
    for (auto& c : candidates) starts.push_back(std::move(c.second));
    for (int tries = 0; tries < 20 * opts.multistart && static_cast<int>(starts.size()) < 2 * opts.multistart; ++tries) {
        Vector w(n);
        for (double& v : w) v = rng.normal();
        if (!project(w)) continue;
        random_best = std::min(random_best, ratio(w));
        starts.push_back(std::move(w));
    }

    const SearchOptions sopts{opts.max_iterations, opts.step_tol};
    SearchResult best;
    for (const auto& w : starts) {
        auto r = sphere_search(ratio, project, w, sopts);
        if (r.value < best.value) best = std::move(r);
    }
    cert.diagnostics.push_back("random sphere samples: best ratio " + fmt(random_best) + ", descended " + fmt(best.value));

    cert.verdict = Verdict::KlHoldsHalf;
    if (!std::isfinite(best.value)) {
        cert.modulus = kInf;
        cert.sharp = false;
        cert.diagnostics.push_back("no critical direction with positive second subderivative; modulus +inf");
        return cert;
    }
    cert.modulus = std::sqrt(best.value);
    cert.sharp = true;
    cert.witness_w = best.y;
    if (quad_form(g.h, best.y) < 1e-6 * scale) {
        cert.infimum_attained = false;
        cert.diagnostics.push_back("ratio infimum approached as <v,w> -> 0+; not attained");
    }
    return cert;
}

KLCertificate certify_lp(const StructuredFunction& f, const Point& xbar, const CertifierOptions& opts) {
    const auto* lp = f.as<LpLeastSquares>();
    if (!lp) throw KlError(ErrorKind::UnsupportedClass, "certify_lp needs an lp-regularized least-squares function");
    if (xbar.size() != f.dimension()) throw KlError(ErrorKind::DimensionMismatch, "certify_lp: dimension");
    const LpRestriction r = lp_restriction(*lp, xbar.coords());
    if (r.support.empty()) {
        KLCertificate cert;
        cert.verdict = Verdict::KlHoldsZeroNotSharp;
        cert.modulus = kInf;
        cert.sharp = false;
        cert.diagnostics.push_back("xbar = 0: d>F(0) is empty, exponent 0");
        return cert;
    }
    const double g = norm2(r.gradient);
    if (g > opts.stationarity_tol) throw KlError(ErrorKind::NotStationary, "||grad F_I(xbar_I)|| = " + fmt(g));
    const std::size_t n = xbar.size();
    KLCertificate cert = certify_from_hessian(r.hessian, [&](const Vector& v) {
        Vector w(n, 0.0);
        for (std::size_t a = 0; a < r.support.size(); ++a) w[r.support[a]] = v[a];
        return w;
    });
    cert.diagnostics.insert(cert.diagnostics.begin(), "restricted to a support of size " + std::to_string(r.support.size()));
    return cert;
}

KLCertificate certify(const StructuredFunction& f, const Point& xbar, const CertifierOptions& opts) {
    switch (f.kind()) {
        case FunctionKind::Smooth: return certify_smooth(*f.as<SmoothClass>()->oracle, xbar, opts);
        case FunctionKind::Max: return certify_max(f, xbar, opts);
        case FunctionKind::L1: return certify_l1(f, xbar, opts);
        case FunctionKind::Lp: return certify_lp(f, xbar, opts);
        case FunctionKind::Staircase: break;
    }
    throw KlError(ErrorKind::UnsupportedClass, "no analytic certificate for the staircase function");
}

CorollaryReport corollary_conditions(const StructuredFunction& f, const Point& xbar) {
    const auto* sm = f.as<SmoothClass>();
    if (!sm) throw KlError(ErrorKind::UnsupportedClass, "corollary conditions are evaluated for the smooth class only");
    if (xbar.size() != f.dimension()) throw KlError(ErrorKind::DimensionMismatch, "corollary_conditions: dimension");
    const SmoothOracle& o = *sm->oracle;
    const Matrix h = o.hessian(xbar.coords());
    const std::size_t n = h.rows();
    const auto eig = numerics::jacobi_eigen(h);
    const double rho = std::max(1.0, numerics::spectral_radius(eig.values));
    const double pos = numerics::positive_threshold(eig.values);
    CorollaryReport rep;

    // (i) quadratic growth, from sampled function values
    std::vector<Vector> dirs;
    for (std::size_t c = 0; c < n; ++c) {
        dirs.push_back(eig.vectors.column(c));
        dirs.push_back(scaled(-1.0, eig.vectors.column(c)));
    }
    CounterRng rng(0x636f726fULL, 0);
    for (int k = 0; k < 64; ++k) {
        Vector u(n);
        for (double& v : u) v = rng.normal();
        if (normalize_in_place(u)) dirs.push_back(std::move(u));
    }
    const double t = 1e-4 * std::max(1.0, norm_inf(xbar.vec()));
    const double f0 = o.value(xbar.coords());
    double growth = kInf;
    for (const auto& u : dirs) {
        Vector x = xbar.vec();
        axpy(t, u, x);
        growth = std::min(growth, 2.0 * (o.value(x) - f0) / (t * t));
    }
    rep.growth_constant = growth;
    rep.quadratic_growth = growth > 1e-6 * rho;

    // (ii) d^2 f(xbar|0)(w) = <Hw, w> > 0 for w != 0
    rep.second_subderivative_pos = eig.values.back() > pos;

    // (iii) C = {w : <Hw,w> <= 1} bounded, via a Cholesky attempt
    {
        Matrix l(n, n);
        bool ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            double s = h(j, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
            if (s <= pos) {
                ok = false;
                break;
            }
            l(j, j) = std::sqrt(s);
            for (std::size_t i = j + 1; i < n; ++i) {
                double r = h(i, j);
                for (std::size_t k = 0; k < j; ++k) r -= l(i, k) * l(j, k);
                l(i, j) = r / l(j, j);
            }
        }
        rep.level_set_bounded = ok;
        if (ok) {
            rep.level_set_radius = 1.0 / std::sqrt(eig.values.back());
        } else {
            rep.level_set_radius = kInf;
            rep.unbounded_direction = eig.vectors.column(n - 1);
        }
    }

    // (iv) <v, w> > 0 for v in D(df)(xbar|0)(w) = {Hw}: leading principal minors
    {
        bool pd = true;
        for (std::size_t k = 1; k <= n && pd; ++k) {
            std::vector<std::size_t> idx(k);
            for (std::size_t i = 0; i < k; ++i) idx[i] = i;
            Matrix a = h.principal(idx);
            double det = 1.0;
            for (std::size_t c = 0; c < k; ++c) {
                std::size_t p = c;
                for (std::size_t r = c + 1; r < k; ++r)
                    if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
                if (a(p, c) == 0.0) {
                    det = 0.0;
                    break;
                }
                if (p != c) {
                    for (std::size_t j = 0; j < k; ++j) std::swap(a(p, j), a(c, j));
                    det = -det;
                }
                det *= a(c, c);
                for (std::size_t r = c + 1; r < k; ++r) {
                    const double fct = a(r, c) / a(c, c);
                    for (std::size_t j = c; j < k; ++j) a(r, j) -= fct * a(c, j);
                }
            }
            pd = det > std::pow(pos, static_cast<double>(k));
        }
        rep.graphical_derivative_pd = pd;
    }

    // (v) nonsingularity of D(df)(xbar|0)
    double min_abs = kInf;
    for (double v : eig.values) min_abs = std::min(min_abs, std::abs(v));
    rep.nonsingular = min_abs > tol_singular(eig.values) && numerics::spectral_radius(eig.values) > 0.0;

    const bool eq = rep.quadratic_growth == rep.second_subderivative_pos &&
                    rep.second_subderivative_pos == rep.level_set_bounded &&
                    rep.level_set_bounded == rep.graphical_derivative_pd;
    rep.chain_consistent = eq && (!rep.graphical_derivative_pd || rep.nonsingular);
    return rep;
}

}  // namespace kl
