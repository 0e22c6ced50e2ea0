#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gafzero/coeffs.hpp"
#include "gafzero/poly.hpp"
#include "gafzero/rng.hpp"

namespace gafzero {

// One truncated random-series draw F(z) = sum_{n<=N} a_n zeta_n z^n with the
// zeta_n independent standard complex Gaussians. tail_sigma bounds the L2
// size of the discarded tail at the working radius.
struct GafSample {
    std::string coeff_spec;
    std::uint64_t seed = 0;
    std::uint64_t sample_index = 0;
    int degree = 0;
    double working_radius = 0.0;
    double tail_sigma = 0.0;
    std::vector<cplx> coeff_products;

    Poly poly() const { return Poly{coeff_products}; }
    std::string to_json() const;
};

inline cplx evaluate(const Poly& f, cplx z) { return f.eval(z); }

// Smallest N with sum_{n>N} a_n^2 s^{2n} <= eps^2 * sum_{n>=0} a_n^2 s^{2n},
// certified through a geometric majorant on the term ratios past the argmax.
// Throws std::invalid_argument for s at or beyond the convergence radius.
int truncation_degree(const CoefficientSequence& a, double s, double eps_trunc = 1e-8);

GafSample sample_gaf(const CoefficientSequence& a, double s, std::uint64_t seed,
                     std::uint64_t sample_index, double eps_trunc = 1e-8);

// Trapezoid value of \int_0^1 |f(r e^{2 pi i theta})|^p dtheta with node
// doubling to 1e-9 relative agreement. `nodes` is a starting hint; the rule
// never uses fewer than 2*degree+16. If 2^16 nodes do not converge the best
// value is returned and *converged (when given) is set false.
double circle_mean_power(const Poly& f, double r, double p, int nodes = 0,
                         bool* converged = nullptr);

// exp of \int_0^1 log |f(r e^{2 pi i theta})|^p dtheta, evaluated exactly
// through the roots: |c|^p prod_k max(r, |z_k|)^p. When every root is well
// clear of the circle the value is cross-checked against a trapezoid rule.
double circle_mean_log(const Poly& f, double r, double p);

}  // namespace gafzero
