#include "kl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kl/error.hpp"

namespace kl::numerics {

namespace {

void normalize_sign(Matrix& v, std::size_t col) {
    for (std::size_t i = 0; i < v.rows(); ++i) {
        if (std::abs(v(i, col)) > 1e-12) {
            if (v(i, col) < 0.0)
                for (std::size_t k = 0; k < v.rows(); ++k) v(k, col) = -v(k, col);
            return;
        }
    }
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& input, int max_sweeps) {
    if (input.rows() != input.cols()) throw KlError(ErrorKind::DimensionMismatch, "jacobi_eigen needs a square matrix");
    const std::size_t n = input.rows();
    Matrix a = input.symmetrized();
    Matrix v = Matrix::identity(n);

    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
    frob = std::sqrt(frob);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    bool converged = frob == 0.0 || off_norm() <= 1e-12 * frob;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        converged = off_norm() <= 1e-12 * frob;
    }
    if (!converged) throw KlError(ErrorKind::NoConvergence, "Jacobi eigensolver exceeded its sweep budget");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
        normalize_sign(out.vectors, k);
    }
    return out;
}

double spectral_radius(std::span<const double> eigenvalues) {
    double r = 0.0;
    for (double e : eigenvalues) r = std::max(r, std::abs(e));
    return r;
}

double positive_threshold(std::span<const double> eigenvalues) {
    return 1e-10 * std::max(1.0, spectral_radius(eigenvalues));
}

MinNormResult min_norm_point(const std::vector<Vector>& points) {
    if (points.empty()) throw KlError(ErrorKind::InvalidArgument, "min_norm_point needs at least one point");
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) throw KlError(ErrorKind::DimensionMismatch, "min_norm_point: points differ in dimension");

    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, dot(p, p));
    const double tol = 1e-12 * std::max(scale, 1e-300);

    std::size_t first = 0;
    for (std::size_t j = 1; j < points.size(); ++j)
        if (dot(points[j], points[j]) < dot(points[first], points[first])) first = j;

    std::vector<std::size_t> corral{first};
    Vector w{1.0};
    Vector x = points[first];

    auto combine = [&] {
        Vector r(dim, 0.0);
        for (std::size_t k = 0; k < corral.size(); ++k) axpy(w[k], points[corral[k]], r);
        return r;
    };

    for (int major = 0; major < 10000; ++major) {
        std::size_t j = 0;
        double best = dot(x, points[0]);
        for (std::size_t k = 1; k < points.size(); ++k) {
            const double v = dot(x, points[k]);
            if (v < best) {
                best = v;
                j = k;
            }
        }
        if (best >= dot(x, x) - tol) break;
        if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
        corral.push_back(j);
        w.push_back(0.0);

        for (int minor = 0; minor < 10000; ++minor) {
            const std::size_t s = corral.size();
            Matrix kkt(s + 1, s + 1);
            for (std::size_t a = 0; a < s; ++a) {
                for (std::size_t b = 0; b < s; ++b) kkt(a, b) = dot(points[corral[a]], points[corral[b]]);
                kkt(a, s) = 1.0;
                kkt(s, a) = 1.0;
            }
            Vector rhs(s + 1, 0.0);
            rhs[s] = 1.0;
            const Vector sol = solve_symmetric_pinv(kkt, rhs);
            Vector alpha(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(s));

            if (std::all_of(alpha.begin(), alpha.end(), [](double t) { return t > 1e-14; })) {
                w = alpha;
                break;
            }
            double theta = 1.0;
            for (std::size_t k = 0; k < s; ++k)
                if (alpha[k] <= 1e-14 && w[k] - alpha[k] > 0.0) theta = std::min(theta, w[k] / (w[k] - alpha[k]));
            for (std::size_t k = 0; k < s; ++k) w[k] = theta * alpha[k] + (1.0 - theta) * w[k];

            std::vector<std::size_t> kept_idx;
            Vector kept_w;
            for (std::size_t k = 0; k < s; ++k) {
                if (w[k] > 1e-14) {
                    kept_idx.push_back(corral[k]);
                    kept_w.push_back(w[k]);
                }
            }
            if (kept_idx.empty()) {
                // all weights collapsed through rounding; keep the newest point
                kept_idx.push_back(corral.back());
                kept_w.push_back(1.0);
            }
            const double total = std::accumulate(kept_w.begin(), kept_w.end(), 0.0);
            for (double& t : kept_w) t /= total;
            corral = std::move(kept_idx);
            w = std::move(kept_w);
        }
        x = combine();
    }

    MinNormResult out;
    out.point = combine();
    out.weights.assign(points.size(), 0.0);
    for (std::size_t k = 0; k < corral.size(); ++k) out.weights[corral[k]] += w[k];
    return out;
}

double wolfe_gap(const Vector& v, const std::vector<Vector>& points) {
    double gap = -kInf;
    for (const auto& p : points) gap = std::max(gap, -dot(v, sub(p, v)));
    return gap;
}

namespace {

struct StandardForm {
    // min c^T y  s.t.  A y = b, y >= 0; original x = offset + map * y
    Matrix a;
    Vector b;
    Vector c;
    double objective_offset = 0.0;
    std::vector<std::vector<std::pair<std::size_t, double>>> columns_of;  // per original variable
    Vector offset;
};

StandardForm to_standard_form(const LinearProgram& lp) {
    const std::size_t n = lp.c.size();
    const std::size_t me = lp.a_eq.rows();
    const std::size_t mu = lp.a_ub.rows();
    if (me > 0 && lp.a_eq.cols() != n) throw KlError(ErrorKind::DimensionMismatch, "solve_lp: a_eq columns");
    if (mu > 0 && lp.a_ub.cols() != n) throw KlError(ErrorKind::DimensionMismatch, "solve_lp: a_ub columns");
    if (lp.b_eq.size() != me || lp.b_ub.size() != mu) throw KlError(ErrorKind::DimensionMismatch, "solve_lp: rhs size");
    if ((!lp.lower.empty() && lp.lower.size() != n) || (!lp.upper.empty() && lp.upper.size() != n))
        throw KlError(ErrorKind::DimensionMismatch, "solve_lp: bounds size");

    StandardForm sf;
    sf.columns_of.resize(n);
    sf.offset.assign(n, 0.0);
    std::size_t ncols = 0;
    std::vector<std::size_t> bounded;  // original variables needing an upper-bound row
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = lp.lower.empty() ? 0.0 : lp.lower[j];
        const double hi = lp.upper.empty() ? kInf : lp.upper[j];
        if (lo > hi) throw KlError(ErrorKind::InvalidArgument, "solve_lp: lower bound exceeds upper bound");
        if (std::isfinite(lo)) {
            sf.offset[j] = lo;
            sf.columns_of[j].push_back({ncols++, 1.0});
            if (std::isfinite(hi)) bounded.push_back(j);
        } else if (std::isfinite(hi)) {
            sf.offset[j] = hi;
            sf.columns_of[j].push_back({ncols++, -1.0});
        } else {
            sf.columns_of[j].push_back({ncols++, 1.0});
            sf.columns_of[j].push_back({ncols++, -1.0});
        }
    }
    const std::size_t structural = ncols;
    const std::size_t rows = me + mu + bounded.size();
    const std::size_t total = structural + mu + bounded.size();
    sf.a = Matrix(rows, total);
    sf.b.assign(rows, 0.0);
    sf.c.assign(total, 0.0);

    const double sense = lp.maximize ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (auto [col, sgn] : sf.columns_of[j]) sf.c[col] = sense * lp.c[j] * sgn;
        sf.objective_offset += sense * lp.c[j] * sf.offset[j];
    }
    auto fill_row = [&](std::size_t r, const Matrix& m, std::size_t src, double rhs) {
        double shifted = rhs;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m(src, j);
            if (v == 0.0) continue;
            for (auto [col, sgn] : sf.columns_of[j]) sf.a(r, col) += v * sgn;
            shifted -= v * sf.offset[j];
        }
        sf.b[r] = shifted;
    };
    for (std::size_t i = 0; i < me; ++i) fill_row(i, lp.a_eq, i, lp.b_eq[i]);
    for (std::size_t i = 0; i < mu; ++i) {
        fill_row(me + i, lp.a_ub, i, lp.b_ub[i]);
        sf.a(me + i, structural + i) = 1.0;
    }
    for (std::size_t k = 0; k < bounded.size(); ++k) {
        const std::size_t j = bounded[k];
        const std::size_t r = me + mu + k;
        sf.a(r, sf.columns_of[j].front().first) = 1.0;
        sf.a(r, structural + mu + k) = 1.0;
        sf.b[r] = lp.upper[j] - sf.offset[j];
    }
    return sf;
}

class Tableau {
public:
    Tableau(const StandardForm& sf) : m_(sf.a.rows()), n_(sf.a.cols()), t_(m_, n_ + m_ + 1), basis_(m_), sign_(m_, 1.0) {
        for (std::size_t i = 0; i < m_; ++i) {
            sign_[i] = sf.b[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) t_(i, j) = sign_[i] * sf.a(i, j);
            t_(i, n_ + i) = 1.0;
            t_(i, rhs()) = sign_[i] * sf.b[i];
            basis_[i] = n_ + i;
        }
    }

    std::size_t rhs() const { return n_ + m_; }
    bool is_artificial(std::size_t col) const { return col >= n_; }

    /// Bland-rule simplex on the given column costs; returns false when unbounded.
    bool optimize(const Vector& cost, bool allow_artificial, int& pivots) {
        constexpr double kTol = 1e-11;
        Vector d = reduced_costs(cost);
        for (int iter = 0; iter < 100000; ++iter) {
            std::size_t enter = rhs();
            for (std::size_t j = 0; j < rhs(); ++j) {
                if (!allow_artificial && is_artificial(j)) continue;
                if (d[j] < -kTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == rhs()) return true;
            std::size_t leave = m_;
            double best = kInf;
            for (std::size_t r = 0; r < m_; ++r) {
                if (t_(r, enter) <= kTol) continue;
                const double ratio = t_(r, rhs()) / t_(r, enter);
                if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && leave < m_ && basis_[r] < basis_[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
            ++pivots;
            const double de = d[enter];
            for (std::size_t j = 0; j <= rhs(); ++j) d[j] -= de * t_(leave, j);
        }
        throw KlError(ErrorKind::NoConvergence, "simplex iteration budget exhausted");
    }

    /// Pivots zero-level artificials out of the basis where a structural column allows it.
    void drive_out_artificials(int& pivots) {
        for (std::size_t r = 0; r < m_; ++r) {
            if (!is_artificial(basis_[r])) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                if (std::abs(t_(r, j)) > 1e-9) {
                    pivot(r, j);
                    ++pivots;
                    break;
                }
            }
        }
    }

    double objective(const Vector& cost) const {
        double z = 0.0;
        for (std::size_t r = 0; r < m_; ++r) z += cost[basis_[r]] * t_(r, rhs());
        return z;
    }

    Vector primal() const {
        Vector y(n_, 0.0);
        for (std::size_t r = 0; r < m_; ++r)
            if (!is_artificial(basis_[r])) y[basis_[r]] = t_(r, rhs());
        return y;
    }

    /// Duals of the original (unflipped) rows, y = c_B^T B^{-1}.
    Vector duals(const Vector& cost) const {
        Vector y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double s = 0.0;
            for (std::size_t r = 0; r < m_; ++r) s += cost[basis_[r]] * t_(r, n_ + i);
            y[i] = sign_[i] * s;
        }
        return y;
    }

private:
    Vector reduced_costs(const Vector& cost) const {
        Vector d(rhs() + 1, 0.0);
        for (std::size_t j = 0; j < rhs(); ++j) d[j] = cost[j];
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= rhs(); ++j) d[j] -= cb * t_(r, j);
        }
        return d;
    }

    void pivot(std::size_t r, std::size_t e) {
        const double pv = t_(r, e);
        for (std::size_t j = 0; j <= rhs(); ++j) t_(r, j) /= pv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = t_(i, e);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= rhs(); ++j) t_(i, j) -= f * t_(r, j);
        }
        basis_[r] = e;
    }

    std::size_t m_;
    std::size_t n_;
    Matrix t_;
    std::vector<std::size_t> basis_;
    Vector sign_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const StandardForm sf = to_standard_form(lp);
    const std::size_t m = sf.a.rows();
    const std::size_t n = sf.a.cols();
    Tableau tab(sf);
    LpResult result;

    Vector phase1(n + m, 0.0);
    for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1.0;
    tab.optimize(phase1, true, result.pivots);
    double bnorm = 0.0;
    for (double v : sf.b) bnorm = std::max(bnorm, std::abs(v));
    if (tab.objective(phase1) > 1e-9 * (1.0 + bnorm)) {
        result.status = LpStatus::Infeasible;
        return result;
    }
    tab.drive_out_artificials(result.pivots);

    Vector phase2(n + m, 0.0);
    std::copy(sf.c.begin(), sf.c.end(), phase2.begin());
    if (!tab.optimize(phase2, false, result.pivots)) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    const Vector y = tab.primal();
    const Vector duals = tab.duals(phase2);
    const double sense = lp.maximize ? -1.0 : 1.0;

    result.status = LpStatus::Optimal;
    result.x = sf.offset;
    for (std::size_t j = 0; j < lp.c.size(); ++j)
        for (auto [col, sgn] : sf.columns_of[j]) result.x[j] += sgn * y[col];
    result.value = sense * (dot(sf.c, y) + sf.objective_offset);
    result.dual_value = sense * (dot(sf.b, duals) + sf.objective_offset);
    return result;
}

QpResult solve_nonneg_qp(const Matrix& p, const Vector& q, const Matrix& a_eq, const Vector& b_eq, const Vector& x0,
                         int max_iterations) {
    const std::size_t n = x0.size();
    const std::size_t me = a_eq.rows();
    if (p.rows() != n || p.cols() != n || q.size() != n || (me > 0 && a_eq.cols() != n) || b_eq.size() != me)
        throw KlError(ErrorKind::DimensionMismatch, "solve_nonneg_qp");

    QpResult res;
    res.x = x0;
    std::vector<bool> active(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        if (res.x[j] <= 1e-14) {
            res.x[j] = 0.0;
            active[j] = true;
        }
    }

    double scale = 1.0 + p.max_abs() + norm_inf(q);
    for (int it = 0; it < max_iterations; ++it) {
        res.iterations = it + 1;
        Vector g = p * res.x;
        for (std::size_t j = 0; j < n; ++j) g[j] += q[j];

        std::vector<std::size_t> free_idx;
        for (std::size_t j = 0; j < n; ++j)
            if (!active[j]) free_idx.push_back(j);
        const std::size_t nf = free_idx.size();

        Matrix kkt(nf + me, nf + me);
        Vector rhs(nf + me, 0.0);
        for (std::size_t a = 0; a < nf; ++a) {
            for (std::size_t b = 0; b < nf; ++b) kkt(a, b) = p(free_idx[a], free_idx[b]);
            for (std::size_t r = 0; r < me; ++r) {
                kkt(a, nf + r) = a_eq(r, free_idx[a]);
                kkt(nf + r, a) = a_eq(r, free_idx[a]);
            }
            rhs[a] = -g[free_idx[a]];
        }
        const Vector sol = solve_symmetric_pinv(kkt, rhs);

        double step_norm = 0.0;
        for (std::size_t a = 0; a < nf; ++a) step_norm = std::max(step_norm, std::abs(sol[a]));

        if (step_norm <= 1e-12 * (1.0 + norm_inf(res.x))) {
            // multipliers on the active bounds: mu = g + A^T nu
            std::size_t release = n;
            double most_negative = -1e-10 * scale;
            for (std::size_t j = 0; j < n; ++j) {
                if (!active[j]) continue;
                double mu = g[j];
                for (std::size_t r = 0; r < me; ++r) mu += a_eq(r, j) * sol[nf + r];
                if (mu < most_negative) {
                    most_negative = mu;
                    release = j;
                }
            }
            if (release == n) {
                res.converged = true;
                break;
            }
            active[release] = false;
            continue;
        }

        double alpha = 1.0;
        std::size_t blocking = n;
        for (std::size_t a = 0; a < nf; ++a) {
            const double pj = sol[a];
            if (pj < 0.0) {
                const double ratio = -res.x[free_idx[a]] / pj;
                if (ratio < alpha) {
                    alpha = ratio;
                    blocking = free_idx[a];
                }
            }
        }
        for (std::size_t a = 0; a < nf; ++a) res.x[free_idx[a]] += alpha * sol[a];
        if (blocking < n) {
            res.x[blocking] = 0.0;
            active[blocking] = true;
        }
    }
    for (double& v : res.x) v = std::max(v, 0.0);
    res.value = 0.5 * quad_form(p, res.x) + dot(q, res.x);
    return res;
}

Matrix null_space(const Matrix& a, double tol) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m == 0) {
        Matrix id = Matrix::identity(n);
        return id;
    }
    Matrix u = a;  // columns are rotated in place
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    Vector sigma(n, 0.0);
    double smax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sigma[j] = norm2(u.column(j));
        smax = std::max(smax, sigma[j]);
    }
    std::vector<std::size_t> kernel;
    for (std::size_t j = 0; j < n; ++j)
        if (sigma[j] <= tol * smax || smax == 0.0) kernel.push_back(j);
    Matrix basis = v.select_columns(kernel);
    for (std::size_t k = 0; k < basis.cols(); ++k) normalize_sign(basis, k);
    return basis;
}

Vector solve_linear(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw KlError(ErrorKind::DimensionMismatch, "solve_linear");
    const double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) <= 1e-14 * scale) throw KlError(ErrorKind::DomainError, "singular linear system");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    Vector x(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

Vector solve_symmetric_pinv(const Matrix& m, const Vector& b, double rel_cutoff) {
    if (m.rows() != b.size()) throw KlError(ErrorKind::DimensionMismatch, "solve_symmetric_pinv");
    if (b.empty()) return {};
    const EigenDecomposition ed = jacobi_eigen(m);
    const double cutoff = rel_cutoff * std::max(spectral_radius(ed.values), 1e-300);
    Vector x(b.size(), 0.0);
    for (std::size_t k = 0; k < ed.values.size(); ++k) {
        if (std::abs(ed.values[k]) <= cutoff) continue;
        const Vector vk = ed.vectors.column(k);
        axpy(dot(vk, b) / ed.values[k], vk, x);
    }
    return x;
}

}  // namespace kl::numerics
