#pragma once

#include <functional>

namespace gafzero {

// Regularized lower incomplete gamma P(a,x) = gamma(a,x)/Gamma(a).
// Series/continued-fraction split as in the classic numerical literature;
// intended for moderate a (say a < 1e6).
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
double gamma_q(double a, double x);

// Riemann zeta on the reals, s != 1. Euler-Maclaurin for s >= 0.5, the
// functional equation below that. Good to ~1e-13 absolute, which is all the
// polylog expansions here need.
double riemann_zeta(double s);

// log(1 - exp(x)) for x < 0, stable near both ends.
double log1mexp(double x);

// log(exp(a) + exp(b)) without overflow.
double logaddexp(double a, double b);

// Sum of a positive series given log-terms, factored around the largest
// term. `log_term(n)` must be unimodal in n beyond n_start. Scans from
// n_peak_hint outward in both directions until terms fall below
// rel_tol * running sum. Returns log of the sum.
double log_series_sum(const std::function<double(long long)>& log_term, long long n_start,
                      long long n_peak_hint, double rel_tol = 1e-17);

}  // namespace gafzero
