#include "gafzero/gaf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gafzero/zeros.hpp"
#include "json.hpp"

namespace gafzero {

namespace {

struct Truncation {
    int degree = 0;
    double log_tail_sq = -std::numeric_limits<double>::infinity();
};

// Walks a_n^2 s^{2n} in log space past its argmax until the term ratios
// certify a geometric majorant, then cuts where the majorant tail drops
// below eps^2 times the full sum. Ratios are taken between consecutive
// nonzero terms so gapped supports (dyadic) work unchanged.
Truncation find_truncation(const CoefficientSequence& a, double s, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("truncation_degree: eps_trunc must be in (0,1)");
    if (!(s >= 0.0) || !(s < a.radius()))
        throw std::invalid_argument("truncation_degree: need 0 <= s < radius of the sequence");

    std::int64_t last_nonzero = 0;
    if (a.finite_support(&last_nonzero))
        return {static_cast<int>(last_nonzero), -std::numeric_limits<double>::infinity()};

    if (a.kind() == CoeffKind::flexible) {
        // Block exponents grow doubly exponentially; anything past the first
        // couple of blocks has no double-representable degree.
        long double max_n = 0.0L;
        for (const FlexibleBlock& b : a.flexible_handle()->blocks()) max_n = std::max(max_n, b.n);
        if (max_n > 2e6L)
            throw std::invalid_argument("truncation_degree: flexible exponents too large to sample");
        return {static_cast<int>(max_n), -std::numeric_limits<double>::infinity()};
    }

    if (s == 0.0) return {0, -std::numeric_limits<double>::infinity()};

    const double ls = std::log(s);
    const double log_target = 2.0 * std::log(eps) + a.log_weighted_l2_norm_sq(s);

    double best_lt = -std::numeric_limits<double>::infinity();
    double prev_lt = 0.0;
    std::int64_t prev_n = -1;
    double ratio_hist[3] = {0, 0, 0};
    int ratios_seen = 0;

    constexpr std::int64_t kMaxDegree = 2000000;
    for (std::int64_t n = 0; n <= kMaxDegree; ++n) {
        const double c = a.coeff(n);
        if (c == 0.0) continue;
        const double lt = 2.0 * (std::log(c) + static_cast<double>(n) * ls);
        if (lt > best_lt) {
            best_lt = lt;
            ratios_seen = 0;  // still climbing; majorant evidence resets
            prev_lt = lt;
            prev_n = n;
            continue;
        }
        if (prev_n >= 0) {
            const double rho = std::exp(lt - prev_lt);
            ratio_hist[2] = ratio_hist[1];
            ratio_hist[1] = ratio_hist[0];
            ratio_hist[0] = rho;
            ++ratios_seen;
            const bool settled =
                rho <= 0.5 ||
                (ratios_seen >= 3 && ratio_hist[0] <= ratio_hist[1] * (1.0 + 1e-9) &&
                 ratio_hist[1] <= ratio_hist[2] * (1.0 + 1e-9) && rho <= 0.9995);
            if (settled) {
                const double log_tail = lt - std::log1p(-rho);
                if (log_tail <= log_target)
                    return {static_cast<int>(prev_n), log_tail};
            }
        }
        prev_lt = lt;
        prev_n = n;
    }
    throw std::runtime_error("truncation_degree: no certified cut below degree 2e6");
}

}  // namespace

int truncation_degree(const CoefficientSequence& a, double s, double eps_trunc) {
    return find_truncation(a, s, eps_trunc).degree;
}

GafSample sample_gaf(const CoefficientSequence& a, double s, std::uint64_t seed,
                     std::uint64_t sample_index, double eps_trunc) {
    const Truncation t = find_truncation(a, s, eps_trunc);
    GafSample out;
    out.coeff_spec = a.descriptor();
    out.seed = seed;
    out.sample_index = sample_index;
    out.degree = t.degree;
    out.working_radius = s;
    out.tail_sigma = std::exp(0.5 * t.log_tail_sq);
    out.coeff_products.resize(t.degree + 1);
    RandomStream stream(seed, sample_index);
    // One draw per index, zero coefficients included, so every family
    // consumes the stream identically.
    for (int n = 0; n <= t.degree; ++n)
        out.coeff_products[n] = a.coeff(n) * stream.next_complex_gaussian();
    return out;
}

std::string GafSample::to_json() const {
    nlohmann::ordered_json j;
    j["coeff_spec"] = coeff_spec;
    j["seed"] = seed;
    j["sample_index"] = sample_index;
    j["degree"] = degree;
    j["working_radius"] = working_radius;
    auto arr = nlohmann::ordered_json::array();
    for (const cplx& z : coeff_products) arr.push_back({z.real(), z.imag()});
    j["coeffs"] = std::move(arr);
    return j.dump();
}

double circle_mean_power(const Poly& f, double r, double p, int nodes, bool* converged) {
    if (!(r >= 0.0)) throw std::invalid_argument("circle_mean_power: r must be >= 0");
    if (!(p > 0.0)) throw std::invalid_argument("circle_mean_power: p must be positive");
    if (converged) *converged = true;
    if (f.is_zero()) return 0.0;

    const int deg = f.degree();
    const long floor_nodes = std::max({static_cast<long>(nodes), 2L * deg + 16, 32L});
    int k = 1;
    while (k < floor_nodes) k <<= 1;

    double mean = 0.0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool conv = false;
    std::vector<double> pw;
    for (; k <= (1 << 16); k <<= 1) {
        int used = 0;
        const std::vector<cplx> vals = eval_on_circle(f, r, k, &used);
        pw.resize(used);
        for (int i = 0; i < used; ++i) pw[i] = std::pow(std::norm(vals[i]), 0.5 * p);
        mean = pairwise_sum(pw.data(), pw.size()) / used;
        if (!std::isnan(prev) &&
            std::abs(mean - prev) <= 1e-9 * std::max(std::abs(mean), 1e-300)) {
            conv = true;
            break;
        }
        prev = mean;
    }
    if (converged) *converged = conv;
    return mean;
}

double circle_mean_log(const Poly& f, double r, double p) {
    if (f.is_zero()) throw std::invalid_argument("circle_mean_log: zero polynomial");
    if (!(r >= 0.0)) throw std::invalid_argument("circle_mean_log: r must be >= 0");

    std::vector<cplx> c = f.c;
    while (c.size() > 1 && std::abs(c.back()) < 1e-300) c.pop_back();

    const std::vector<RootCluster> roots = find_roots(f);
    double lg = std::log(std::abs(c.back()));
    double min_gap = std::numeric_limits<double>::infinity();
    for (const RootCluster& rc : roots) {
        const double m = std::abs(rc.location);
        lg += rc.multiplicity * std::log(std::max(r, m));
        min_gap = std::min(min_gap, std::abs(m - r));
    }
    const double result = std::exp(p * lg);

    // Trapezoid cross-check of the root formula. Only meaningful when the
    // quadrature itself converges geometrically, i.e. every root is well
    // clear of the circle.
    if (r > 0.0 && min_gap >= 1e-3 * std::max(1.0, r) && std::isfinite(lg)) {
        int k = 1;
        while (k < std::max(512, f.degree() + 1)) k <<= 1;
        double lq = 0.0;
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (; k <= (1 << 15); k <<= 1) {
            int used = 0;
            const std::vector<cplx> vals = eval_on_circle(f, r, k, &used);
            std::vector<double> lv(used);
            for (int i = 0; i < used; ++i) lv[i] = std::log(std::abs(vals[i]));
            lq = pairwise_sum(lv.data(), lv.size()) / used;
            if (!std::isnan(prev) && std::abs(lq - prev) <= 1e-9 * std::max(1.0, std::abs(lq)))
                break;
            prev = lq;
        }
        if (std::abs(lq - lg) > 1e-6 * std::max(1.0, std::abs(lg)))
            throw std::runtime_error("circle_mean_log: root formula fails quadrature cross-check");
    }
    return result;
}

}  // namespace gafzero
