#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gafzero/measure.hpp"

namespace gafzero {

// Nonnegative coefficient sequences a_n with finite exponential growth rate,
// i.e. limsup a_n^{1/n} < inf. The radius R = 1/limsup is where the random
// series built on the sequence stops converging.
//
// Built-in families:
//   basis        a = (1, 0, 0, ...)
//   unit         a_n = 1
//   geometric    a_n = rho^n
//   fock         a_n = sqrt(alpha^n / Gamma(n + 2/p))
//   fock_log     the same with an extra (log n)^{-c/2} factor; log n is
//                replaced by log 2 at n in {0, 1} (any fixed positive value
//                preserves the asymptotics, this one keeps the factor
//                continuous at n = 2)
//   dyadic       supported on indices 2^m, m >= 1, with
//                a_{2^m}^2 = 2^{2m(alpha+1)/p} * m^{-2/p}
//   explicit     a finite list, zero beyond
//   flexible     blocks produced by flexible_sequence() below
//
// A shift of sigma replaces the sequence by n -> a_{n+sigma} (dropping the
// first sigma entries), which is how a leading run of zeros is removed to
// make a_0 nonzero.
enum class CoeffKind { basis, unit, geometric, fock, fock_log, dyadic, flexible, explicit_list };

// One block of the flexible construction: amplitude b_k at exponent n_k,
// normalized so (int_0^{r_mu} b_k^p r^{n_k p} dmu)^{2/p} = 2^{-k}.
//
// The cutoffs shrink toward r_mu at a doubly exponential rate, so n_k and
// b_k leave double range around k = 4 and long double range is needed up to
// K = 8; b_k can undershoot even that (fock blocks reach e^{-2*10^4}), so
// log_b is the authoritative amplitude field.
struct FlexibleBlock {
    long double n = 0.0L;      // exponent n_k, integer-valued
    long double log_b = 0.0L;  // natural log of b_k
    long double delta = 0.0L;  // r_mu - s_k for measures on [0,1); 0 for fock/atoms
    double s = 0.0;            // cutoff s_k when it is double-representable
    double residual = 0.0;     // normalization residual, dual-route relative
};

class FlexibleSequence {
  public:
    const std::vector<FlexibleBlock>& blocks() const { return blocks_; }
    double p() const { return p_; }
    const RadialMeasure& measure() const { return mu_; }

    // Sum_k ||b_k^2 r^{2 n_k}||_{p/2}^{min(1, p/2)} with each block norm
    // recomputed from the stored amplitude; this is the subadditivity route
    // to finiteness of the combined p/2-norm, and is <= 1 when p >= 2.
    double partial_norm_bound() const;

    // log of || b_k^2 r^{2 n_k} ||_{q/2} = b_k^2 (int r^{n_k q} dmu)^{2/q}
    // for the 1-based block k. The moment factor comes either from the
    // closed form or from an independent quadrature in transformed
    // coordinates; keeping both routes separate lets tests compare them.
    double log_block_norm(int k, double q, bool quadrature_route) const;

  private:
    friend FlexibleSequence flexible_sequence(const RadialMeasure&, double, int);
    std::vector<FlexibleBlock> blocks_;
    double p_ = 0.0;
    RadialMeasure mu_ = RadialMeasure::disk();
};

class CoefficientSequence {
  public:
    // Grammar: `basis` | `unit` | `geom:rho=<f>` | `fock:p=<f>,alpha=<f>` |
    // `focklog:p=<f>,alpha=<f>,c=<f>` | `dyadic:alpha=<f>,p=<f>` |
    // `explicit:<a0>,<a1>,...`, with optional suffix `;shift=<int>`.
    static CoefficientSequence parse(std::string_view descriptor);

    static CoefficientSequence basis();
    static CoefficientSequence unit();
    static CoefficientSequence geometric(double rho);
    static CoefficientSequence fock(double p, double alpha);
    static CoefficientSequence fock_log(double p, double alpha, double c);
    static CoefficientSequence dyadic(double alpha, double p);
    static CoefficientSequence explicit_list(std::vector<double> values);
    static CoefficientSequence from_flexible(std::shared_ptr<const FlexibleSequence> flex);

    CoefficientSequence with_shift(int shift) const;

    CoeffKind kind() const { return kind_; }
    int shift() const { return shift_; }
    double param_p() const { return p_; }
    double param_alpha() const { return alpha_; }
    double param_c() const { return c_; }
    double param_rho() const { return rho_; }
    const std::shared_ptr<const FlexibleSequence>& flexible_handle() const { return flex_; }

    // a_{n + shift}; for the flexible kind, exponents beyond int64 range are
    // not addressable pointwise (their amplitudes may also underflow): norm
    // evaluation goes through the block list instead.
    double coeff(std::int64_t n) const;

    // True for the finitely supported kinds (basis, explicit); reports the
    // last nonzero index so truncation can stop exactly there.
    bool finite_support(std::int64_t* last_nonzero = nullptr) const;

    // 1 / limsup a_n^{1/n}; +inf for entire-type families.
    double radius() const;

    // ||a^(r)||_2 = (sum a_n^2 r^{2n})^{1/2}, r < radius(). Tails are either
    // summed exactly (closed forms) or cut below 1e-14 relative.
    double weighted_l2_norm(double r) const;

    // log(sum a_n^2 r^{2n}); usable where the plain norm overflows, e.g.
    // Fock families at radii with e^{alpha r^2} beyond double range.
    double log_weighted_l2_norm_sq(double r) const;

    // max over 1 <= n <= n_max of a_n^{1/n}; finite growth witness.
    double root_growth_bound(int n_max = 10000) const;

    std::string descriptor() const;

  private:
    CoefficientSequence() = default;
    void validate() const;

    CoeffKind kind_ = CoeffKind::basis;
    int shift_ = 0;
    double rho_ = 0.0;
    double p_ = 0.0;
    double alpha_ = 0.0;
    double c_ = 0.0;
    std::vector<double> values_;
    std::shared_ptr<const FlexibleSequence> flex_;
};

// (int_0^s ||a^(r)||_2^p dmu)^{1/p}. Reports divergence either from the
// quadrature's own probe (s == r_mu) or immediately when mu puts mass beyond
// the sequence's radius of convergence, where the integrand is +inf.
IntegralResult lp_radial_norm(const CoefficientSequence& a, const RadialMeasure& mu, double p,
                              double s, QuadratureOptions opts = {});

// The block construction showing L^{p/2}(mu) membership can fail for every
// q > p: for M = 2^k it picks a cutoff s with mu(s, r_mu) <= M^{-pq/(q-p)}
// (q = p + 1/M), an exponent n_k = N with at least half of the N-th moment
// mass beyond s, and an amplitude b_k per the FlexibleBlock normalization.
// Throws range_error when K pushes the cutoffs past long double range
// (around K = 10 for p = 1 on the disk) and runtime_error when a search
// cannot settle, e.g. purely atomic measures with no mass beyond the last
// atom.
FlexibleSequence flexible_sequence(const RadialMeasure& mu, double p, int K);

// Sequences for the dyadic-block integral criterion. These carry closed
// block sums so depths up to 2^40 never materialize terms.
//   unit        c_k = 1
//   basis       c_0 = 1, rest 0
//   geometric   c_k = rho^k
//   power       c_k = k^beta (k >= 1), c_0 = 0
//   lacunary    c_k = 1 at k = 2^m, else 0
//   explicit    finite list
class MMSequence {
  public:
    enum class Kind { unit, basis, geometric, power, lacunary, explicit_list };

    // `unit` | `basis` | `geom:rho=<f>` | `power:beta=<f>` | `lacunary` |
    // `explicit:<c0>,<c1>,...`
    static MMSequence parse(std::string_view descriptor);
    static MMSequence unit();
    static MMSequence basis();
    static MMSequence geometric(double rho);
    static MMSequence power(double beta);
    static MMSequence lacunary();
    static MMSequence explicit_list(std::vector<double> values);

    Kind kind() const { return kind_; }
    double term(std::uint64_t k) const;
    // sum of c_k over the dyadic block [2^n, 2^{n+1})
    double block_sum(int n) const;
    // sum c_k r^k for 0 <= r < 1, closed form or tail-bounded summation
    double eval_series(double r) const;
    std::string descriptor() const;

  private:
    MMSequence() = default;
    Kind kind_ = Kind::unit;
    double rho_ = 0.0;
    double beta_ = 0.0;
    std::vector<double> values_;
};

struct MMVerdict {
    IntegralResult integral;    // int_0^1 (sum c_k r^k)^q (1-r)^alpha dr
    IntegralResult dyadic_sum;  // sum_n 2^{-n(alpha+1)} (block sum)^q
    bool agree = false;         // both finite or both divergent
};

// Both sides of the dyadic criterion, with the shared divergence rules from
// the measure module. Blocks run n = 0..depth-1 (k >= 1; c_0 only enters the
// integral side, where it cannot change the verdict).
MMVerdict mm_dyadic_check(const MMSequence& c, double q, double alpha, int depth);

// e^{-t} t^b (log t)^c sum_n t^n / (Gamma(n+b) (log n)^c), the normalization
// ratio of the exponential-type series; c = 0 is the plain variant. The sum
// starts at n = 1 when b = 0 (Gamma(0) is a pole) and replaces log n by
// log 2 at n in {0, 1}. Throws when `terms` is too small for the requested
// t, i.e. when the term at the last admissible index still matters at 1e-16
// relative.
double stokes_ratio(double t, double b, double c, std::int64_t terms);

// max over 1 <= n <= n_max of n^{-1/q} prod_{k<=n} 1/|z_k| over an
// increasing list of moduli, computed in log space (the raw products
// overflow well before n = 100 for small moduli).
double horowitz_statistic(const std::vector<double>& moduli, double q, std::size_t n_max);

}  // namespace gafzero
