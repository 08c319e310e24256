// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kl/certifier.hpp"
#include "kl/numerics.hpp"
#include "kl/sampler.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kl;
using kltest::fixture;
using kltest::quad;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("kl-acceptance-" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun cli(const std::string& args, const fs::path& dir = scratch_dir()) {
    const std::string cmd = "cd '" + dir.string() + "' && '" KL_ANALYZER_PATH "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "stdout.txt")};
}

std::string fx(const std::string& name) { return "'" + fixture(name) + "'"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Vector kDiag{-1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};

Outcome smooth_modulus() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = cli("certify " + fx("smooth_indefinite.json"));
    const double m = json::parse(c.out)["certificate"]["modulus"].get<double>();
    o.require(c.code == 0 && std::abs(m - 1.0) <= 1e-9, "certified " + num(m));
    const auto r = cli("oracle " + fx("smooth_indefinite.json") + " --seed 7 --eps 0.1 --samples 2000 --levels 10");
    const double e = json::parse(r.out)["oracle_estimate"].get<double>();
    o.require(r.code == 0 && std::abs(e - 1.0) <= 0.05, "oracle " + num(e));
    const double t = seconds_since(t0);
    o.require(t < 5.0, "runtime " + num(t) + " s");
    return o;
}

Outcome paper_eigenvalues() {
    Outcome o;
    const Matrix h = make_singular_fixture()->hessian(std::vector<double>{1.0, 1.0});
    const auto e = numerics::jacobi_eigen(h);
    o.require(std::abs(e.values[0] - 4.0) <= 1e-10 && std::abs(e.values[1]) <= 1e-10,
              "eigenvalues {" + num(e.values[0]) + ", " + num(e.values[1]) + "}");
    // 1/2 d^2 f0(xbar|0)(w) = 1/2 <Hw, w> is the quadratic with Hessian H
    const double m = smooth_modulus_from_hessian(h);
    o.require(std::abs(m - std::sqrt(2.0)) <= 1e-9, "KL of the second-order model " + num(m));
    return o;
}

Outcome sharp_exponent() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cli("oracle " + fx("f0.json") + " --theta 0.6666666666666666 --seed 7 --eps 0.1");
    const auto ex = json::parse(r.out)["exponent_estimate"];
    const double th = ex["theta_hat"].get<double>(), r2 = ex["r2"].get<double>();
    o.require(r.code == 0 && th >= 0.60 && th <= 0.73 && r2 >= 0.9, "theta_hat " + num(th) + " r2 " + num(r2));
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    std::string trail;
    for (const char* eps : {"0.1", "0.01", "0.001"}) {
        const auto s = cli("oracle " + fx("f0.json") + " --theta 0.5 --seed 7 --eps " + eps);
        const double est = json::parse(s.out)["oracle_estimate"].get<double>();
        decreasing = decreasing && est < prev;
        prev = est;
        trail += (trail.empty() ? "" : " > ") + num(est);
    }
    o.require(decreasing && prev < 0.05, "theta=1/2 estimates " + trail);
    const double t = seconds_since(t0);
    o.require(t < 30.0, "runtime " + num(t) + " s");
    return o;
}

Outcome theta_subderivative() {
    Outcome o;
    const auto f0 = StructuredFunction::smooth(make_singular_fixture());
    const Point xbar({1.0, 1.0});
    const double expected = 3.0 / std::sqrt(2.0);
    GridSpec coarse = default_grid();
    coarse.taus.resize(10);
    GridSpec dense = default_grid();
    dense.taus.clear();
    for (int k = 0; k <= 26; ++k) dense.taus.push_back(1e-2 * std::pow(2.0, -0.5 * k));
    GridSpec narrow = dense;
    narrow.delta = 2.5e-5;
    narrow.m = 64;
    std::string vals;
    bool diag_ok = true, off_ok = true;
    for (const auto& g : {coarse, default_grid(), dense, narrow}) {
        const auto e = estimate_theta_subderivative(f0, xbar, kDiag, 2.0 / 3.0, g);
        diag_ok = diag_ok && !e.infinite && std::abs(e.liminf_estimate - expected) <= 0.02 * expected;
        vals += (vals.empty() ? "" : ", ") + num(e.liminf_estimate);
        const auto off = estimate_theta_subderivative(f0, xbar, {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}, 2.0 / 3.0, g);
        off_ok = off_ok && off.infinite;
    }
    o.require(diag_ok, "h(w) on the diagonal " + vals + " vs " + num(expected));
    o.require(off_ok, "off-diagonal classified +inf");
    return o;
}

Outcome staircase() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (const char* theta : {"0", "0.25", "0.5", "0.75"}) {
        const auto r = cli("oracle " + fx("staircase.json") + " --seed 7 --eps 0.001 --theta " + theta);
        const double e = json::parse(r.out)["oracle_estimate"].get<double>();
        o.require(r.code == 0 && e < 0.05, std::string("theta ") + theta + ": " + num(e));
    }
    const double t = seconds_since(t0);
    o.require(t < 30.0, "runtime " + num(t) + " s");
    return o;
}

Outcome l1_relative_interior() {
    Outcome o;
    const auto f = StructuredFunction::l1(quad(Matrix{{2, 1, 0}, {1, 2, 0}, {0, 0, 1}}, {-4, -4, 0.3}), 1.0);
    const auto ev = kltest::bisection_eigenvalues(Matrix{{2, 1}, {1, 2}});
    o.require(std::abs(ev[0] - 3.0) < 1e-12 && std::abs(ev[1] - 1.0) < 1e-12, "H_JJ eigenvalues {3, 1}");
    const auto r = cli("oracle " + fx("l1_ri.json") + " --seed 7");
    const auto j = json::parse(r.out);
    const double m = j["certificate"]["modulus"].get<double>(), e = j["oracle_estimate"].get<double>();
    o.require(std::abs(m - std::sqrt(0.5)) <= 1e-9, "certified " + num(m));
    o.require(std::abs(e - m) <= 0.05 * m, "oracle " + num(e));
    return o;
}

Outcome lp_support() {
    Outcome o;
    // stationary point of (t-3)^2 + sqrt t by bisection on 2(t-3) + 1/(2 sqrt t)
    double lo = 1.5, hi = 3.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (2.0 * (mid - 3.0) + 0.5 / std::sqrt(mid) < 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double h = 2.0 + 1.0 * 0.5 * (0.5 - 1.0) * std::pow(t, 0.5 - 2.0);
    const double expected = std::sqrt(h / 2.0);
    const double m1 = certify(StructuredFunction::lp(Matrix{{1}}, {3}, 1.0, 0.5), Point({t})).modulus;
    const double m2 = certify(StructuredFunction::lp(Matrix{{1, 0}, {0, 1}}, {3, 0}, 1.0, 0.5), Point({t, 0.0})).modulus;
    o.require(std::abs(m1 - expected) <= 1e-9, "t " + num(t) + ", 1-D " + num(m1) + " vs " + num(expected));
    o.require(std::abs(m2 - m1) <= 1e-9, "2-D " + num(m2));
    return o;
}

Outcome moreau_convergence() {
    Outcome o;
    const auto r = cli("moreau " + fx("smooth_indefinite.json") + " --lambdas 0.5,0.2,0.1,0.01");
    const auto s = json::parse(r.out)["sweep"];
    const auto lambdas = s["lambdas"].get<std::vector<double>>();
    const auto moduli = s["moduli"].get<std::vector<double>>();
    bool formula = moduli.size() == 4, increasing = true;
    std::string trail;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        formula = formula && std::abs(moduli[i] - std::sqrt(2.0 / (2.0 * (1.0 + 2.0 * lambdas[i])))) <= 1e-9;
        if (i > 0) increasing = increasing && moduli[i] > moduli[i - 1];
        trail += (trail.empty() ? "" : " < ") + num(moduli[i]);
    }
    o.require(r.code == 0 && formula && increasing, "moduli " + trail);
    const double limit = s["limit_modulus"].get<double>();
    o.require(std::abs(limit - 1.0) <= 1e-9 && s["converged"].get<bool>() && moduli.back() <= limit + 1e-9,
              "limit " + num(limit));
    return o;
}

Outcome property_suites() {
    Outcome o;
    CounterRng rng(2024, 0);

    double fd_grad = 0.0, fd_hess = 0.0;
    const std::vector<std::pair<OraclePtr, Vector>> oracles{
        {quad(Matrix{{2, 0}, {0, -1}}), {0, 0}},
        {quad(Matrix{{2, 1, 0}, {1, 2, 0}, {0, 0, 1}}, {-4, -4, 0.3}), {0, 0, 0}},
        {std::make_shared<PolynomialOracle>(2, std::vector<Monomial>{{1.0, {3, 0}}, {-2.0, {1, 2}}}), {0, 0}},
        {make_singular_fixture(), {1, 1}},
    };
    for (const auto& [f, centre] : oracles)
        for (int k = 0; k < 20; ++k) {
            const Point x(add(centre, kltest::random_vector(centre.size(), rng, 0.5)));
            fd_grad = std::max(fd_grad, gradient_check(*f, x, 1e-6));
            fd_hess = std::max(fd_hess, hessian_check(*f, x, 1e-4));
        }
    o.require(fd_grad <= 1e-5 && fd_hess <= 1e-3, "finite differences " + num(fd_grad) + " / " + num(fd_hess));

    double homog = 0.0;
    const auto g = kltest::smooth_quad(Matrix{{3, 1}, {1, 2}});
    for (double theta : {0.5, 0.25}) {
        const double a = estimate_theta_subderivative(g, kltest::origin(2), {0.6, 0.8}, theta).liminf_estimate;
        const double b = estimate_theta_subderivative(g, kltest::origin(2), {1.2, 1.6}, theta).liminf_estimate;
        homog = std::max(homog, std::abs(b / (std::pow(2.0, 1.0 / (1.0 - theta)) * a) - 1.0));
    }
    o.require(homog <= 1e-3, "homogeneity " + num(homog));

    double wolfe = -1.0;
    for (int k = 0; k < 50; ++k) {
        std::vector<Vector> pts;
        for (int i = 0; i < 2 + k % 5; ++i) pts.push_back(kltest::random_vector(3, rng));
        const auto r = numerics::min_norm_point(pts);
        wolfe = std::max(wolfe, numerics::wolfe_gap(r.point, pts));
    }
    o.require(wolfe <= 1e-12, "Wolfe gap " + num(wolfe));

    double duality = 0.0;
    for (int k = 0; k < 50; ++k) {
        numerics::LinearProgram lp;
        lp.c = kltest::random_vector(4, rng);
        lp.a_ub = Matrix(5, 4);
        lp.b_ub.assign(5, 0.0);
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 4; ++j) lp.a_ub(i, j) = 2.0 * rng.uniform() - 1.0;
            lp.b_ub[i] = 0.5 + rng.uniform();
        }
        lp.upper.assign(4, 1.0);
        const auto r = numerics::solve_lp(lp);
        duality = std::max(duality, r.status == numerics::LpStatus::Optimal ? std::abs(r.value - r.dual_value) : 1.0);
    }
    o.require(duality <= 1e-9, "LP duality gap " + num(duality));

    double recon = 0.0;
    for (std::size_t n : {2u, 3u, 5u, 10u}) {
        const Matrix a = kltest::random_symmetric(n, rng);
        const auto e = numerics::jacobi_eigen(a);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
                recon = std::max(recon, std::abs(s - a(i, j)));
            }
    }
    o.require(recon <= 1e-9, "eigen reconstruction " + num(recon));

    bool thm = true;
    for (const char* name : {"smooth_identity.json", "smooth_indefinite.json", "f0.json"}) {
        const auto r = cli("oracle " + fx(name) + " --seed 5 --samples 1000");
        const double est = json::parse(r.out)["oracle_estimate"].get<double>();
        const double bound = std::string(name) == "f0.json"
                                 ? std::sqrt(2.0)
                                 : json::parse(r.out)["certificate"]["modulus"].get<double>();
        thm = thm && est <= bound * 1.05;
    }
    o.require(thm, "sampled <= second-order modulus on smooth fixtures");
    return o;
}

Outcome determinism() {
    Outcome o;
    const std::vector<std::string> commands{
        "certify " + fx("smooth_indefinite.json"),
        "certify " + fx("l1_ri.json"),
        "certify " + fx("max_kink.json"),
        "certify " + fx("max_abs.json"),
        "certify " + fx("lp_2d.json"),
        "oracle " + fx("smooth_indefinite.json") + " --seed 7 --csv r.csv",
        "oracle " + fx("f0.json") + " --seed 7 --theta 0.5 --csv r.csv",
        "oracle " + fx("staircase.json") + " --seed 7 --theta 0.75 --csv r.csv",
        "oracle " + fx("l1_boundary.json") + " --seed 11 --csv r.csv",
        "moreau " + fx("smooth_indefinite.json") + " --csv s.csv",
    };
    std::size_t identical = 0;
    for (const auto& cmd : commands) {
        const fs::path a = scratch_dir() / "det-a", b = scratch_dir() / "det-b";
        fs::remove_all(a);
        fs::remove_all(b);
        fs::create_directories(a);
        fs::create_directories(b);
        const auto ra = cli(cmd, a), rb = cli(cmd, b);
        bool same = ra.code == rb.code && ra.out == rb.out && !ra.out.empty();
        for (const char* csv : {"r.csv", "s.csv"})
            if (fs::exists(a / csv)) same = same && slurp(a / csv) == slurp(b / csv);
        if (same) ++identical;
    }
    o.require(identical == commands.size(), std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands byte-identical");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"smooth modulus", smooth_modulus},
        {"f0 eigenvalues", paper_eigenvalues},
        {"sharp exponent 2/3", sharp_exponent},
        {"theta-subderivative", theta_subderivative},
        {"staircase non-KL", staircase},
        {"l1 relative interior", l1_relative_interior},
        {"lp support reduction", lp_support},
        {"Moreau convergence", moreau_convergence},
        {"property suites", property_suites},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    fs::remove_all(scratch_dir());
    return failures == 0 ? 0 : 1;
}
