#pragma once

#include <string>
#include <vector>

#include "kl/linalg.hpp"
#include "kl/model.hpp"

namespace kl {

/// argmin_w f(w) + ||w - x||^2 / (2 lambda), the local prox point.
Point prox(const StructuredFunction& f, const Point& x, double lambda);

/// f(prox) + ||prox - x||^2 / (2 lambda)
double envelope(const StructuredFunction& f, const Point& x, double lambda);

/// KL(e_lambda f, xbar, 1/2) for a smooth f with nonsingular Hessian H at xbar:
/// min over positive eigenvalues l of sqrt(l / (2 (1 + lambda l))), +inf if there are none.
double envelope_modulus_smooth(const Matrix& h, double lambda);

struct EnvelopeSweep {
    Vector lambdas;
    Vector moduli;
    double limit_modulus = 0.0;
    bool monotone = true;   // nondecreasing as lambda decreases, within 1e-9
    bool bounded = true;    // every modulus <= limit + 1e-9
    bool converged = true;  // |m(lambda_last) - limit| <= limit * lambda_last * lambda_max(H)
};

/// 0.5 * 2^-k for k = 0..6
Vector default_sweep_lambdas();

/// Envelope moduli of a smooth-class function along a nonincreasing lambda ladder.
EnvelopeSweep sweep(const StructuredFunction& f, const Point& xbar, const Vector& lambdas);

/// CSV with header "lambda,modulus,limit_modulus".
std::string sweep_csv(const EnvelopeSweep& s);

}  // namespace kl
