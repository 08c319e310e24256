#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kl/certifier.hpp"
#include "kl/error.hpp"
#include "kl/format.hpp"
#include "kl/moreau.hpp"
#include "kl/problem_io.hpp"
#include "kl/report.hpp"
#include "kl/sampler.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

std::string default_csv(const std::string& input, const char* suffix) {
    return std::filesystem::path(input).stem().string() + suffix;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw kl::KlError(kl::ErrorKind::InvalidArgument, "cannot write " + path);
    out << content;
}

kl::Vector parse_lambdas(const std::string& text) {
    kl::Vector out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw kl::KlError(kl::ErrorKind::InvalidArgument, "bad lambda '" + item + "'");
        out.push_back(v);
    }
    return out;
}

void summarize(const kl::Report& r) {
    std::cerr << "kind: " << r.kind << "\n";
    if (r.certificate) {
        const auto& c = *r.certificate;
        std::cerr << "verdict: " << kl::to_string(c.verdict) << "\nmodulus: " << kl::format_double(c.modulus)
                  << "\nsharp: " << (c.sharp ? "yes" : "no") << "\n";
        for (const auto& d : c.diagnostics) std::cerr << "  " << d << "\n";
    }
    if (r.certificate_error) std::cerr << "certificate: " << *r.certificate_error << "\n";
    if (r.oracle_estimate) std::cerr << "oracle estimate: " << kl::format_double(*r.oracle_estimate) << "\n";
}

int cmd_certify(const std::string& file, bool verbose) {
    const auto problem = kl::load_problem(file);
    kl::Report r;
    r.command = "certify";
    r.problem_digest = problem.digest;
    r.kind = std::string(kl::to_string(problem.query.function.kind()));
    r.certificate = kl::certify(problem.query.function, problem.query.xbar);
    std::cout << kl::to_json(r);
    if (verbose) summarize(r);
    return r.certificate->verdict == kl::Verdict::NotCertified ? kExitNegative : kExitOk;
}

struct OracleFlags {
    std::uint64_t seed = 0;
    std::optional<double> eps;
    std::size_t samples = 2000;
    std::size_t levels = 10;
    std::optional<double> theta;
    std::size_t directed = 200;
    std::string csv;
};

int cmd_oracle(const std::string& file, const OracleFlags& fl, bool verbose) {
    auto problem = kl::load_problem(file);
    if (fl.eps) problem.query.radius_eps = *fl.eps;
    if (fl.theta) problem.query.theta = *fl.theta;
    problem.query.validate();

    kl::SampleBudget budget;
    budget.seed = fl.seed;
    budget.samples_per_annulus = fl.samples;
    budget.levels = fl.levels;
    budget.directions = problem.directions;
    budget.directed_per_annulus = fl.directed;
    const auto est = kl::estimate_modulus(problem.query, budget);

    kl::Report r;
    r.command = "oracle";
    r.problem_digest = problem.digest;
    r.kind = std::string(kl::to_string(problem.query.function.kind()));
    try {
        r.certificate = kl::certify(problem.query.function, problem.query.xbar);
    } catch (const kl::KlError& e) {
        r.certificate_error = e.what();
    }
    r.oracle_estimate = est.estimate;
    try {
        r.exponent_estimate = kl::estimate_exponent(est.records);
    } catch (const kl::KlError& e) {
        if (e.kind() != kl::ErrorKind::InsufficientSamples) throw;
    }
    r.records_csv = fl.csv.empty() ? default_csv(file, ".records.csv") : fl.csv;
    write_file(*r.records_csv, kl::records_csv(est.records));
    std::cout << kl::to_json(r);
    if (verbose) summarize(r);
    return kExitOk;
}

int cmd_moreau(const std::string& file, const std::string& lambdas, const std::string& csv, bool verbose) {
    const auto problem = kl::load_problem(file);
    const kl::Vector ladder = lambdas.empty() ? kl::default_sweep_lambdas() : parse_lambdas(lambdas);
    kl::Report r;
    r.command = "moreau";
    r.problem_digest = problem.digest;
    r.kind = std::string(kl::to_string(problem.query.function.kind()));
    r.sweep = kl::sweep(problem.query.function, problem.query.xbar, ladder);
    r.certificate = kl::certify(problem.query.function, problem.query.xbar);
    r.sweep_csv = csv.empty() ? default_csv(file, ".sweep.csv") : csv;
    write_file(*r.sweep_csv, kl::sweep_csv(*r.sweep));
    std::cout << kl::to_json(r);
    if (verbose) summarize(r);
    const auto& s = *r.sweep;
    return s.monotone && s.bounded && s.converged ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify and sample the KL property with exponent 1/2 at stationary points"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "human-readable summary on stderr");

    std::string file;
    auto* certify = app.add_subcommand("certify", "analytic certificate for the problem file");
    certify->add_option("file", file, "problem JSON")->required();
    certify->add_flag("-v,--verbose", verbose, "human-readable summary on stderr");

    OracleFlags fl;
    double eps = 0.0, theta = 0.0;
    auto* oracle = app.add_subcommand("oracle", "sampling estimate of the KL modulus");
    oracle->add_option("file", file, "problem JSON")->required();
    oracle->add_option("--seed", fl.seed, "RNG seed");
    auto* eps_opt = oracle->add_option("--eps", eps, "outer sampling radius");
    oracle->add_option("--samples", fl.samples, "uniform samples per annulus");
    oracle->add_option("--levels", fl.levels, "number of halvings of the radius");
    auto* theta_opt = oracle->add_option("--theta", theta, "KL exponent");
    oracle->add_option("--directed", fl.directed, "samples per annulus along each file direction");
    oracle->add_option("--csv", fl.csv, "records CSV path (default <stem>.records.csv)");
    oracle->add_flag("-v,--verbose", verbose, "human-readable summary on stderr");

    std::string lambdas, sweep_csv;
    auto* moreau = app.add_subcommand("moreau", "Moreau envelope modulus sweep");
    moreau->add_option("file", file, "problem JSON")->required();
    moreau->add_option("--lambdas", lambdas, "comma-separated, nonincreasing");
    moreau->add_option("--csv", sweep_csv, "sweep CSV path (default <stem>.sweep.csv)");
    moreau->add_flag("-v,--verbose", verbose, "human-readable summary on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*certify) return cmd_certify(file, verbose);
        if (*oracle) {
            if (*eps_opt) fl.eps = eps;
            if (*theta_opt) fl.theta = theta;
            return cmd_oracle(file, fl, verbose);
        }
        return cmd_moreau(file, lambdas, sweep_csv, verbose);
    } catch (const kl::KlError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitError;
    }
}
