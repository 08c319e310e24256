#include "kl/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kl/error.hpp"
#include "kl/format.hpp"
#include "kl/numerics.hpp"
#include "kl/parallel.hpp"
#include "kl/rng.hpp"
#include "kl/subdiff.hpp"

namespace kl {

namespace {

using numerics::kInf;

struct AnnulusResult {
    std::vector<SampleRecord> records;
    std::size_t rejected_ambiguous = 0;
    std::size_t discarded_gap = 0;
};

Vector random_unit(CounterRng& rng, std::size_t n) {
    Vector v(n);
    for (;;) {
        for (double& c : v) c = rng.normal();
        const double nrm = norm2(v);
        if (nrm > 1e-12) {
            for (double& c : v) c /= nrm;
            return v;
        }
    }
}

/// Evaluates one candidate sample; returns false when it is discarded.
bool record_sample(const KLQuery& q, const Vector& x, std::size_t annulus, AnnulusResult& out) {
    const auto& f = q.function;
    const auto xb = q.xbar.coords();
    if (std::equal(x.begin(), x.end(), xb.begin())) return false;
    double gap = 0.0;
    double dist = 0.0;
    try {
        if (const auto* mx = f.as<MaxOfSmooth>(); mx && max_activity_ambiguous(*mx, x)) {
            ++out.rejected_ambiguous;
            return false;
        }
        gap = value_gap(f, x, xb);
        if (!(gap > 0.0) || !(gap < q.level_nu)) {
            ++out.discarded_gap;
            return false;
        }
        dist = subgrad_distance(f, x);
    } catch (const KlError& e) {
        if (e.kind() != ErrorKind::DomainError) throw;
        ++out.discarded_gap;
        return false;
    }
    SampleRecord r;
    r.x = x;
    r.gap = gap;
    r.dist = dist;
    r.ratio = (1.0 - q.theta) * dist / std::pow(gap, q.theta);
    r.radius = norm2(sub(x, xb));
    r.annulus = annulus;
    out.records.push_back(std::move(r));
    return true;
}

}  // namespace

ModulusEstimate estimate_modulus(const KLQuery& q, const SampleBudget& budget) {
    q.validate();
    if (budget.samples_per_annulus == 0) throw KlError(ErrorKind::EmptyBudget, "samples per annulus must be positive");
    const std::size_t n = q.xbar.size();
    const auto& f = q.function;
    evaluate(f, q.xbar);  // domain check at xbar

    std::vector<Vector> dirs;
    for (const auto& d : budget.directions) {
        if (d.size() != n) throw KlError(ErrorKind::DimensionMismatch, "sampling direction has the wrong dimension");
        dirs.push_back(normalized(d));
    }
    // coordinates that may be pinned to xbar_i = 0 so off-support subgradient rules are exercised
    std::vector<std::size_t> pinnable;
    if (f.kind() == FunctionKind::L1 || f.kind() == FunctionKind::Lp)
        for (std::size_t i = 0; i < n; ++i)
            if (q.xbar[i] == 0.0) pinnable.push_back(i);

    const std::size_t annuli = budget.levels + 1;
    std::vector<AnnulusResult> results(annuli);
    parallel_for(annuli, [&](std::size_t k) {
        const double outer = q.radius_eps * std::ldexp(1.0, -static_cast<int>(k));
        const double inner = 0.5 * outer;
        const double inner_frac = std::pow(0.5, static_cast<double>(n));
        AnnulusResult& out = results[k];
        CounterRng rng(budget.seed, 2 * k);
        for (std::size_t s = 0; s < budget.samples_per_annulus; ++s) {
            const Vector dir = random_unit(rng, n);
            const double u = rng.uniform();
            const double rad = outer * std::pow(inner_frac + u * (1.0 - inner_frac), 1.0 / static_cast<double>(n));
            Vector x = q.xbar.vec();
            axpy(rad, dir, x);
            for (std::size_t i : pinnable)
                if (rng.uniform() < 0.5) x[i] = 0.0;
            record_sample(q, x, k, out);
        }
        CounterRng drng(budget.seed, 2 * k + 1);
        for (const auto& d : dirs) {
            for (std::size_t s = 0; s < budget.directed_per_annulus; ++s) {
                const double rad = inner * std::pow(2.0, drng.uniform());
                Vector x = q.xbar.vec();
                axpy(rad, d, x);
                record_sample(q, x, k, out);
            }
        }
    });

    ModulusEstimate est;
    std::vector<std::size_t> nonempty;
    for (std::size_t k = 0; k < annuli; ++k) {
        est.rejected_ambiguous += results[k].rejected_ambiguous;
        est.discarded_gap += results[k].discarded_gap;
        if (!results[k].records.empty()) nonempty.push_back(k);
        for (auto& r : results[k].records) est.records.push_back(std::move(r));
    }
    est.estimate = kInf;
    const std::size_t take = std::min<std::size_t>(2, nonempty.size());
    for (std::size_t t = 0; t < take; ++t) {
        const std::size_t k = nonempty[nonempty.size() - 1 - t];
        for (const auto& r : est.records)
            if (r.annulus == k) est.estimate = std::min(est.estimate, r.ratio);
    }
    return est;
}

ExponentEstimate estimate_exponent(const std::vector<SampleRecord>& records) {
    std::vector<const SampleRecord*> valid;
    for (const auto& r : records)
        if (r.gap > 0.0 && r.dist > 0.0 && std::isfinite(r.gap) && std::isfinite(r.dist)) valid.push_back(&r);
    if (valid.size() < 20)
        throw KlError(ErrorKind::InsufficientSamples, std::to_string(valid.size()) + " usable records, need 20");
    double lo = kInf, hi = -kInf;
    for (const auto* r : valid) {
        lo = std::min(lo, std::log(r->gap));
        hi = std::max(hi, std::log(r->gap));
    }
    if (!(hi > lo)) throw KlError(ErrorKind::InsufficientSamples, "all gaps coincide");
    std::vector<const SampleRecord*> lowest(kExponentBins, nullptr);
    const double width = (hi - lo) / static_cast<double>(kExponentBins);
    for (const auto* r : valid) {
        const auto b = std::min(kExponentBins - 1, static_cast<std::size_t>((std::log(r->gap) - lo) / width));
        if (!lowest[b] || r->dist < lowest[b]->dist) lowest[b] = r;
    }
    Vector xs, ys;
    for (const auto* r : lowest) {
        if (!r) continue;
        xs.push_back(std::log(r->gap));
        ys.push_back(std::log(r->dist));
    }
    if (xs.size() < 3) throw KlError(ErrorKind::InsufficientSamples, "fewer than 3 occupied gap bins");
    const double k = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    ExponentEstimate out;
    out.bins_used = xs.size();
    out.theta_hat = sxy / sxx;
    out.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return out;
}

ExponentEstimate estimate_exponent(const StructuredFunction& f, const Point& xbar, double radius_eps,
                                   const SampleBudget& budget) {
    KLQuery q{f, xbar, 0.5, radius_eps};
    return estimate_exponent(estimate_modulus(q, budget).records);
}

GridSpec default_grid() {
    GridSpec g;
    for (int k = 0; k <= 13; ++k) g.taus.push_back(1e-2 * std::ldexp(1.0, -k));
    g.delta = 1e-4;
    g.m = 32;
    return g;
}

SubderivativeEstimate estimate_theta_subderivative(const StructuredFunction& f, const Point& xbar, const Vector& w,
                                                   double theta, const GridSpec& grid) {
    if (!(theta >= 0.0 && theta < 1.0)) throw KlError(ErrorKind::InvalidArgument, "theta must lie in [0,1)");
    if (w.size() != xbar.size() || xbar.size() != f.dimension())
        throw KlError(ErrorKind::DimensionMismatch, "subderivative: dimension");
    if (grid.taus.size() < 2) throw KlError(ErrorKind::InvalidArgument, "tau grid needs at least two values");
    for (double t : grid.taus)
        if (!(t > 0.0)) throw KlError(ErrorKind::InvalidArgument, "tau values must be positive");
    const double nw = norm2(w);
    if (!(nw > 0.0)) throw KlError(ErrorKind::InvalidArgument, "direction must be nonzero");
    const double power = 1.0 / (1.0 - theta);
    const std::size_t n = w.size();

    SubderivativeEstimate est;
    est.w = w;
    est.theta = theta;
    est.tau_grid = grid.taus;
    est.scale = std::pow(nw, power);
    const Vector u = scaled(1.0 / nw, w);
    est.directions.push_back(u);
    CounterRng rng(grid.seed, 0x5d);
    for (std::size_t j = 0; j < grid.m; ++j) {
        const Vector b = random_unit(rng, n);
        const double rad = grid.delta * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
        Vector wp = u;
        axpy(rad, b, wp);
        est.directions.push_back(std::move(wp));
    }

    Vector per_tau_min;
    for (double tau : grid.taus) {
        Vector row;
        const double den = (1.0 - theta) * std::pow(tau, power);
        for (const auto& wp : est.directions) {
            Vector x = xbar.vec();
            axpy(tau, wp, x);
            row.push_back(value_gap(f, x, xbar.coords()) / den);
        }
        per_tau_min.push_back(*std::min_element(row.begin(), row.end()));
        est.quotients.push_back(std::move(row));
    }

    std::vector<std::size_t> order(grid.taus.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid.taus[a] > grid.taus[b]; });
    const double liminf = std::min(per_tau_min[order[order.size() - 1]], per_tau_min[order[order.size() - 2]]);

    // divergence: per-tau minima positive, increasing as tau shrinks over the finer half, with a log-log slope <= -1/2
    bool diverging = true;
    const std::size_t half = order.size() / 2;
    for (std::size_t i = half; i < order.size(); ++i) {
        const double cur = per_tau_min[order[i]];
        if (!(cur > 0.0) || (i > half && !(cur > per_tau_min[order[i - 1]]))) diverging = false;
    }
    if (diverging) {
        Vector xs, ys;
        for (std::size_t i = half; i < order.size(); ++i) {
            xs.push_back(std::log(grid.taus[order[i]]));
            ys.push_back(std::log(per_tau_min[order[i]]));
        }
        const double k = static_cast<double>(xs.size());
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        diverging = sxx > 0.0 && sxy / sxx <= -0.5;
    }
    est.infinite = liminf > kCapInf || diverging;
    est.liminf_estimate = est.infinite ? kInf : est.scale * liminf;
    return est;
}

std::optional<Vector> check_W_nonempty(const StructuredFunction& f, const Point& xbar, double theta,
                                       const std::vector<Vector>& candidates, const GridSpec& grid) {
    for (const auto& c : candidates) {
        try {
            const auto est = estimate_theta_subderivative(f, xbar, c, theta, grid);
            if (!est.infinite && est.liminf_estimate > kTolPos && est.liminf_estimate < kCapInf) return c;
        } catch (const KlError& e) {
            if (e.kind() != ErrorKind::DomainError) throw;
        }
    }
    return std::nullopt;
}

std::string records_csv(const std::vector<SampleRecord>& records) {
    std::string out = "radius,gap,dist,ratio\n";
    for (const auto& r : records)
        out += format_double(r.radius) + "," + format_double(r.gap) + "," + format_double(r.dist) + "," +
               format_double(r.ratio) + "\n";
    return out;
}

}  // namespace kl
