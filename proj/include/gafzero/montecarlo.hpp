#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gafzero/coeffs.hpp"
#include "gafzero/measure.hpp"
#include "gafzero/poly.hpp"

namespace gafzero {

enum class Relation { leq, eq, geq };

const char* relation_name(Relation rel);

// Verdict for (estimate, bound) at three standard errors of slack. Reports
// without a bound are informational and always pass.
bool relation_pass(double estimate, double std_error, const std::optional<double>& bound,
                   Relation rel);

// One Monte Carlo experiment. `samples` counts the draws that entered the
// estimate; draws whose zero set could not be certified are excluded and
// counted in `censored`, never silently dropped. std_error is the sample
// standard deviation over the included draws divided by sqrt(samples).
struct McReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
    double estimate = 0.0;
    double std_error = 0.0;
    std::optional<double> bound;
    Relation relation = Relation::leq;
    bool pass = true;
    std::int64_t samples = 0;
    std::int64_t censored = 0;
    std::uint64_t seed = 0;
    double runtime_ms = 0.0;

    std::string to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

// E ||F||^p_{A^p(mu,s)} against the closed form Gamma(1+p/2) * int_0^s
// ||a^(r)||_2^p dmu, as an equality check. The two sides never share code:
// the estimate averages per-sample norms on a fixed radial rule, the bound
// comes from the adaptive coefficient-side quadrature. Throws when that
// integral diverges.
McReport run_tonelli_check(const CoefficientSequence& a, const RadialMeasure& mu, double p,
                           double s, std::int64_t samples, std::uint64_t seed);

// Witness polynomial for the extremal ratio: the monic polynomial over the
// certified zero multiset, optionally times a factor with no zeros in the
// closed disk (which can only lower the ratio, so the bound still applies).
enum class QuantWitness { pZ, pZ_times_shifted };

// E |f(0)| / ||f||_{A^p(mu,s)} over witnesses f against the closed bound
// sqrt(pi) * a_0 / (int_0^s ||a^(r)||_2^p dmu)^{1/p}. When s reaches the
// measure's endpoint or the denominator integral diverges, the bound tends
// to 0 and no single-point check exists; the run then walks an s-grid
// toward the endpoint and verifies the estimate at least halves from the
// first grid point to the last (estimate = last, bound = first/2).
McReport run_quant_check(const CoefficientSequence& a, const RadialMeasure& mu, double p,
                         double s, std::int64_t samples, std::uint64_t seed,
                         QuantWitness witness = QuantWitness::pZ);

// E [ geometric-mean-functional(F)^{-1/p} ] against sqrt(pi) / (int_0^s
// ||a^(r)||_2^p dmu)^{1/p}, with the same s-grid fallback as the quant
// check. Needs no witness: the functional is computed from |F(0)| and the
// certified zeros alone.
McReport run_noslepian_check(const CoefficientSequence& a, const RadialMeasure& mu, double p,
                             double s, std::int64_t samples, std::uint64_t seed);

// E [ |F(0)| * geometric-mean-functional(F)^{-1/p} ] against
// sqrt(pi) * Gamma(1+p/2)^{1/p} * a_0 / (Gamma(1+p/2) * int_0^s
// ||a^(r)||_2^p dmu)^{1/p}. Also reports, in params, the fraction of
// samples with a finite functional next to the finiteness verdict of the
// denominator integral (the two should agree).
McReport run_quant3_check(const CoefficientSequence& a, const RadialMeasure& mu, double p,
                          double s, std::int64_t samples, std::uint64_t seed);

// Witness bound for G = F^N + b0: estimate is the mean of
// (|f(0)| / ||f||_{A^{p/N}(mu,s)})^{1/N} over witnesses f for Z_s(G),
// bound c / (int_0^s ||a^(r)||_2^p dmu)^{1/p} with
// c = (a0^{4N} (2N)! + 4 |b0|^2 a0^{2N} N! + |b0|^4)^{1/(4N)}
//     * Gamma((2N-1)/(4N-1))^{(4N-1)/(4N)}.
McReport run_quant2_check(const CoefficientSequence& a, const RadialMeasure& mu, double p,
                          int N, cplx b0, double s, std::int64_t samples, std::uint64_t seed);

// E |zeta| / |G| for the jointly Gaussian pair G = rho zeta +
// sqrt(1-rho^2) zeta', against sqrt(pi).
McReport run_slepian_check(double rho, std::int64_t samples, std::uint64_t seed);

// Three scalar Gaussian facts behind the quant2 constant: the fourth-moment
// identity E |a0^N zeta^N + b0|^4 (equality), stochastic domination of
// |zeta^N| by |zeta^N - alpha_shift| on a t-grid of CDF differences
// (estimate = worst margin, relation geq against 0), and the negative
// moment E |zeta^N - alpha_shift|^{-beta} <= Gamma(1 - beta N / 2).
// Requires 0 < beta < 2/N.
std::vector<McReport> run_gaussian_moment_checks(int N, double a0, cplx b0, double beta,
                                                 cplx alpha_shift, std::int64_t samples,
                                                 std::uint64_t seed);

// Square-exponential tail recursion for the norm functional phi = ||F||.
// Norm homogeneity gives c = 1, c1 = c2 = sqrt(2), hence
// beta = log 2 / log(c c1^2 / c2) = 2; tau is the empirical quantile of phi
// at level e/(1+e) and the grid follows t_{n+1} = (c c1^2/c2) t_n + t_0
// with t_0 = (c c1/c2) tau.
struct FerniqueConfig {
    double c = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double tau = 0.0;
    double beta = 0.0;
    std::vector<double> t_grid;

    std::string to_json() const;
};

struct FerniqueResult {
    FerniqueConfig config;
    std::vector<McReport> reports;  // one per grid level: P(phi > t_n) vs e^{-2^n}
};

FerniqueResult run_fernique_tail(const CoefficientSequence& a, const RadialMeasure& mu, double p,
                                 double s, std::int64_t samples, std::uint64_t seed);

// Membership scan for the exponential-type families: for each q in q_list,
// the finite/divergent verdict of int_0^{s_j} ||a^(r)||_2^q dmu_{fock(q,alpha)}
// along the dyadic grid s_j = 2^{j/2}, computed in log space. log_c > 0
// selects the log-damped family. The reports are descriptive (no bound):
// params carry the verdict string and the grid increments.
std::vector<McReport> run_fock_membership_scan(double p, double alpha,
                                               const std::vector<double>& q_list, double log_c,
                                               std::uint64_t seed);

// The fixed-rule norm the sample loops use: a graded radial rule with a
// trapezoid angular mean at a node count tied to the degree. Orders of
// magnitude cheaper than the adaptive route and close enough that its bias
// drowns in the Monte Carlo standard error; the tests compare the two.
double fixed_rule_norm(const Poly& f, const RadialMeasure& mu, double p, double s);

// Worker count for the sample loops: GAFZERO_THREADS when set, otherwise
// hardware concurrency. Estimates are invariant to this: every sample is
// generated from its own counter-based stream and reduced in index order.
int worker_count();

}  // namespace gafzero
