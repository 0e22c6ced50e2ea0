#include "gafzero/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace gafzero {

namespace {

constexpr double kChainSlack = 1e-8;
constexpr double kTwoPi = 6.283185307179586476925286766559;

double leading_log_abs(const Poly& f) {
    std::vector<cplx> c = f.c;
    while (c.size() > 1 && std::abs(c.back()) < 1e-300) c.pop_back();
    return std::log(std::abs(c.back()));
}

// log of the circle geometric mean of |f| at radius r from the full root
// list: log|c| + sum_k m_k log max(r, |z_k|).
double log_circle_gm(double log_lead, const std::vector<RootCluster>& roots, double r) {
    double acc = log_lead;
    for (const RootCluster& rc : roots)
        acc += rc.multiplicity * std::log(std::max(r, std::abs(rc.location)));
    return acc;
}

// Quadrature of exp(p * log_gm(r)) against mu on (0, s], panel edges pinned
// to the root moduli. Error from comparing two per-panel orders.
IntegralResult integrate_gm(const RadialMeasure& mu, double p, double log_lead,
                            const std::vector<RootCluster>& roots, double s) {
    auto g = [&](double r) { return std::exp(p * log_circle_gm(log_lead, roots, r)); };
    const bool rule_ok =
        mu.kind() != MeasureKind::atoms &&
        !(mu.kind() == MeasureKind::fock && !(s < mu.r_max()));
    if (!rule_ok) return integrate_radial(mu, g, s);

    std::vector<double> bps;
    for (const RootCluster& rc : roots) {
        const double m = std::abs(rc.location);
        if (m > 0.0 && m < s) bps.push_back(m);
    }
    std::sort(bps.begin(), bps.end());
    const RadialRule coarse = make_radial_rule(mu, s, bps, 24);
    const RadialRule fine = make_radial_rule(mu, s, bps, 48);
    const double v1 = apply_rule(coarse, g);
    const double v2 = apply_rule(fine, g);
    IntegralResult out;
    out.value = v2;
    out.abs_error = std::abs(v2 - v1) + 1e-14 * std::abs(v2);
    return out;
}

double trapezoid_log_mean(const Poly& f, double r) {
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
        if (!std::isnan(prev) && std::abs(lq - prev) <= 1e-10 * std::max(1.0, std::abs(lq)))
            break;
        prev = lq;
    }
    return lq;
}

template <typename G>
double gl_on(const GLRule& gl, const G& g, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) acc += gl.w[i] * g(c + h * gl.x[i]);
    return h * acc;
}

template <typename G>
double bisect_arc(const GLRule& gl, const G& g, double a, double b, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double whole = gl_on(gl, g, a, b);
    const double halves = gl_on(gl, g, a, m) + gl_on(gl, g, m, b);
    if (std::abs(halves - whole) <= tol || depth >= 44) return halves;
    return bisect_arc(gl, g, a, m, 0.5 * tol, depth + 1) +
           bisect_arc(gl, g, m, b, 0.5 * tol, depth + 1);
}

// Angular p-mean of |f| on |z| = r, used as the radial integrand of ap_norm.
//
// The trapezoid ladder in circle_mean_power needs about r/d nodes once a
// zero of f sits at distance d from the sampling circle, and the graded
// radial panels of integrate_radial place nodes arbitrarily close to every
// zero modulus, so a single norm evaluation can hit the ladder cap at
// thousands of radii. Splitting the circle at the zero angles and bisecting
// adaptively keeps the cost logarithmic in 1/d instead. Even p never dips
// this way: |f|^p is then a trigonometric polynomial and the ladder is
// already exact at its floor count, so that path is kept.
class AngularPMean {
  public:
    AngularPMean(const Poly& f, double p) : f_(f), p_(p) {
        const long long ip = std::llround(p);
        use_ladder_ = (p == static_cast<double>(ip)) && (ip % 2 == 0);
        if (use_ladder_) return;
        try {
            roots_ = find_roots(f_);
        } catch (const std::exception&) {
            use_ladder_ = true;  // no factorization available
            return;
        }
        log_lead_ = leading_log_abs(f_);
        for (const RootCluster& rc : roots_) {
            if (std::abs(rc.location) == 0.0) continue;
            double th = std::arg(rc.location);
            if (th < 0.0) th += kTwoPi;
            angles_.push_back(th);
        }
        std::sort(angles_.begin(), angles_.end());
    }

    double operator()(double r) const {
        if (use_ladder_ || r == 0.0) return circle_mean_power(f_, r, p_);
        auto g = [&](double th) {
            const cplx v = f_.eval(r * cplx(std::cos(th), std::sin(th)));
            return std::pow(std::norm(v), 0.5 * p_);
        };
        const GLRule& gl = gauss_legendre(16);
        // AM >= GM makes the circle geometric mean a safe absolute scale.
        const double scale =
            std::max(std::exp(p_ * log_circle_gm(log_lead_, roots_, r)), 1e-300);
        const double tol_total = 1e-11 * scale * kTwoPi;
        double total = 0.0;
        if (angles_.empty()) {
            total = bisect_arc(gl, g, 0.0, kTwoPi, tol_total, 0);
        } else {
            for (std::size_t i = 0; i < angles_.size(); ++i) {
                const double a = angles_[i];
                const double b =
                    (i + 1 < angles_.size()) ? angles_[i + 1] : angles_[0] + kTwoPi;
                if (!(b > a)) continue;
                total += bisect_arc(gl, g, a, b, tol_total * (b - a) / kTwoPi, 0);
            }
        }
        return total / kTwoPi;
    }

    bool ladder() const { return use_ladder_; }
    const std::vector<RootCluster>& roots() const { return roots_; }

  private:
    const Poly& f_;
    double p_ = 0.0;
    bool use_ladder_ = false;
    double log_lead_ = 0.0;
    std::vector<RootCluster> roots_;
    std::vector<double> angles_;
};

void check_chain(std::vector<ChainViolation>& out, const char* name, double lhs, double rhs) {
    // lhs >= rhs expected; slack is relative to the dominating side
    if (rhs <= 0.0) return;
    const double margin = lhs / rhs - 1.0;
    if (margin < -kChainSlack) out.push_back({name, margin});
}

}  // namespace

std::string ChainReport::to_json() const {
    nlohmann::ordered_json j;
    j["lhs_norm_p"] = lhs_norm_p;
    j["geo_functional_f"] = geo_functional_f;
    j["jensen_product_f"] = jensen_product_f;
    j["jensen_product_F"] = jensen_product_F;
    j["ratio_bound"] = ratio_bound;
    auto arr = nlohmann::ordered_json::array();
    for (const ChainViolation& v : violations) {
        nlohmann::ordered_json item;
        item["name"] = v.name;
        item["margin"] = v.margin;
        arr.push_back(std::move(item));
    }
    j["violations"] = std::move(arr);
    return j.dump();
}

IntegralResult ap_norm(const Poly& f, const RadialMeasure& mu, double p, double s,
                       QuadratureOptions opts) {
    if (!(p > 0.0)) throw std::invalid_argument("ap_norm: p must be positive");
    if (f.is_zero()) return {0.0, 0.0, false};
    const AngularPMean mean(f, p);
    auto g = [&](double r) { return mean(r); };
    IntegralResult in;
    const bool rule_ok =
        !mean.ladder() && mu.kind() != MeasureKind::atoms &&
        !(mu.kind() == MeasureKind::fock && !(s < mu.r_max()));
    if (rule_ok) {
        // The angular mean has a kink at each zero modulus. Without panel
        // edges pinned there, the error-driven doubling in integrate_radial
        // runs to its cap at every order; with them the panels are smooth
        // and two modest orders already agree to spectral accuracy. opts
        // only governs the other paths.
        std::vector<double> bps;
        for (const RootCluster& rc : mean.roots()) {
            const double m = std::abs(rc.location);
            if (m > 0.0 && m < s) bps.push_back(m);
        }
        std::sort(bps.begin(), bps.end());
        const double v1 = apply_rule(make_radial_rule(mu, s, bps, 24), g);
        const double v2 = apply_rule(make_radial_rule(mu, s, bps, 48), g);
        in.value = v2;
        in.abs_error = std::abs(v2 - v1) + 1e-14 * std::abs(v2);
    } else {
        in = integrate_radial(mu, g, s, opts);
    }
    if (in.diverged || !(in.value > 0.0)) return in;
    IntegralResult out;
    out.value = std::pow(in.value, 1.0 / p);
    out.abs_error = out.value * (in.abs_error / in.value) / p;
    return out;
}

IntegralResult geometric_mean_functional(const Poly& f, const RadialMeasure& mu, double p,
                                         double s) {
    if (f.is_zero()) throw std::invalid_argument("geometric_mean_functional: zero polynomial");
    if (!(p > 0.0)) throw std::invalid_argument("geometric_mean_functional: p must be positive");
    return integrate_gm(mu, p, leading_log_abs(f), find_roots(f), s);
}

double jensen_identity_residual(const Poly& f, double r) {
    if (f.is_zero() || f.c.empty() || std::abs(f.c[0]) == 0.0)
        throw std::invalid_argument("jensen_identity_residual: need f(0) != 0");
    if (!(r > 0.0)) throw std::invalid_argument("jensen_identity_residual: need r > 0");
    const std::vector<RootCluster> roots = find_roots(f);
    for (const RootCluster& rc : roots)
        if (std::abs(std::abs(rc.location) - r) < 1e-6)
            throw std::invalid_argument("jensen_identity_residual: root within 1e-6 of the circle");
    const double lg = log_circle_gm(leading_log_abs(f), roots, r);
    const double lq = trapezoid_log_mean(f, r);
    return std::abs(std::expm1(lq - lg));
}

ChainReport amgm_chain_report(const GafSample& F, const Poly& f, const RadialMeasure& mu,
                              double p, double s) {
    if (!(p > 0.0)) throw std::invalid_argument("amgm_chain_report: p must be positive");
    if (f.is_zero() || std::abs(f.c[0]) == 0.0)
        throw std::invalid_argument("amgm_chain_report: need f(0) != 0");
    if (F.coeff_products.empty() || std::abs(F.coeff_products[0]) == 0.0)
        throw std::invalid_argument("amgm_chain_report: need F(0) != 0");

    const Poly fp = F.poly();
    const ZeroMultiset zF = zero_multiset_contour(fp, s);
    const std::vector<RootCluster> zf = find_roots(f);

    // Containment: every zero of F inside the disk must be matched by a zero
    // of f of at least the same multiplicity.
    for (const RootCluster& rc : zF.zeros) {
        bool matched = false;
        for (const RootCluster& cand : zf)
            if (std::abs(cand.location - rc.location) < 1e-6 &&
                cand.multiplicity >= rc.multiplicity) {
                matched = true;
                break;
            }
        if (!matched)
            throw std::invalid_argument("amgm_chain_report: Z_s(F) not contained in Z(f)");
    }

    const double abs_f0 = std::abs(f.c[0]);
    const double abs_F0 = std::abs(F.coeff_products[0]);
    const double log_lead_f = leading_log_abs(f);

    ChainReport rep;
    const IntegralResult nf = ap_norm(f, mu, p, s);
    rep.lhs_norm_p = std::pow(nf.value, p);
    const IntegralResult geo_f = integrate_gm(mu, p, log_lead_f, zf, s);
    rep.geo_functional_f = geo_f.value;

    // Jensen for F needs only |F(0)| and the zeros inside the disk; the
    // degree-183 truncations never meet the global root finder here.
    std::vector<RootCluster> zF_zeros = zF.zeros;
    const double log_F0 = std::log(abs_F0);
    auto gm_F = [&](double r) {
        double acc = log_F0;
        for (const RootCluster& rc : zF_zeros) {
            const double m = std::abs(rc.location);
            if (m < r) acc += rc.multiplicity * (std::log(r) - std::log(m));
        }
        return acc;
    };
    IntegralResult geo_F;
    {
        auto g = [&](double r) { return std::exp(p * gm_F(r)); };
        const bool rule_ok =
            mu.kind() != MeasureKind::atoms &&
            !(mu.kind() == MeasureKind::fock && !(s < mu.r_max()));
        if (rule_ok) {
            std::vector<double> bps;
            for (const RootCluster& rc : zF_zeros) {
                const double m = std::abs(rc.location);
                if (m > 0.0 && m < s) bps.push_back(m);
            }
            std::sort(bps.begin(), bps.end());
            const double v1 = apply_rule(make_radial_rule(mu, s, bps, 24), g);
            const double v2 = apply_rule(make_radial_rule(mu, s, bps, 48), g);
            geo_F.value = v2;
            geo_F.abs_error = std::abs(v2 - v1);
        } else {
            geo_F = integrate_radial(mu, g, s);
        }
    }

    if (std::isfinite(s)) {
        double jp_f = p * std::log(abs_f0);
        for (const RootCluster& rc : zf) {
            const double m = std::abs(rc.location);
            if (m < s) jp_f += p * rc.multiplicity * (std::log(s) - std::log(m));
        }
        rep.jensen_product_f = std::exp(jp_f);
        rep.jensen_product_F = std::exp(p * gm_F(s));
    }
    rep.ratio_bound = abs_F0 * std::exp(-std::log(geo_F.value) / p);

    check_chain(rep.violations, "amgm_radial", rep.lhs_norm_p, rep.geo_functional_f);
    check_chain(rep.violations, "jensen_drop_radial", rep.geo_functional_f,
                std::pow(abs_f0 / abs_F0, p) * geo_F.value);
    if (std::isfinite(s)) {
        check_chain(rep.violations, "amgm_circle", circle_mean_power(f, s, p),
                    rep.jensen_product_f);
        check_chain(rep.violations, "jensen_drop_circle", rep.jensen_product_f,
                    std::pow(abs_f0 / abs_F0, p) * rep.jensen_product_F);
    }
    check_chain(rep.violations, "bound_by_F", rep.ratio_bound, abs_f0 / nf.value);
    return rep;
}

}  // namespace gafzero
