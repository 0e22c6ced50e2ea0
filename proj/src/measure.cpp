#include "gafzero/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "gafzero/poly.hpp"
#include "gafzero/util.hpp"

namespace gafzero {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPartialCap = 1e12;
constexpr int kGradeLevels = 48;
constexpr double kFockUCap = 700.0;

double expect_key(const std::string& field, const std::string& key, const std::string& ctx) {
    const auto eq = field.find('=');
    if (eq == std::string::npos || field.substr(0, eq) != key)
        throw std::invalid_argument(ctx + ": expected '" + key + "=<value>', got '" + field + "'");
    return parse_double_strict(field.substr(eq + 1), ctx + "." + key);
}

}  // namespace

RadialMeasure RadialMeasure::disk() {
    RadialMeasure m;
    m.kind_ = MeasureKind::disk;
    m.r_max_ = 1.0;
    return m;
}

RadialMeasure RadialMeasure::bergman(double alpha) {
    if (!(alpha > -1.0)) throw std::invalid_argument("bergman measure: need alpha > -1");
    RadialMeasure m;
    m.kind_ = MeasureKind::bergman;
    m.r_max_ = 1.0;
    m.alpha_ = alpha;
    return m;
}

RadialMeasure RadialMeasure::fock(double p, double alpha) {
    if (!(p > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("fock measure: need p > 0 and alpha > 0");
    RadialMeasure m;
    m.kind_ = MeasureKind::fock;
    m.r_max_ = kInf;
    m.p_ = p;
    m.alpha_ = alpha;
    return m;
}

RadialMeasure RadialMeasure::atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("atom measure: need at least one atom");
    for (const Atom& a : atoms) {
        if (!(a.radius > 0.0) || !std::isfinite(a.radius))
            throw std::invalid_argument("atom measure: radii must be positive and finite");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument("atom measure: weights must be positive and finite");
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.radius < y.radius; });
    RadialMeasure m;
    m.kind_ = MeasureKind::atoms;
    // r_max is the endpoint that carries no mass; for a finite atom set the
    // only consistent choice is +inf (the largest atom itself has mass).
    m.r_max_ = kInf;
    m.atoms_ = std::move(atoms);
    return m;
}

RadialMeasure RadialMeasure::parse(std::string_view descriptor) {
    const std::string text(descriptor);
    if (text == "disk") return disk();
    const auto colon = text.find(':');
    const std::string head = colon == std::string::npos ? text : text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    if (head == "bergman") {
        return bergman(expect_key(rest, "alpha", "bergman measure"));
    }
    if (head == "fock") {
        const auto fields = split(rest, ',');
        if (fields.size() != 2) throw std::invalid_argument("fock measure: expected 'fock:p=<f>,alpha=<f>'");
        return fock(expect_key(fields[0], "p", "fock measure"), expect_key(fields[1], "alpha", "fock measure"));
    }
    if (head == "atoms") {
        std::vector<Atom> list;
        for (const std::string& item : split(rest, ',')) {
            const auto fields = split(item, ':');
            if (fields.size() != 2) throw std::invalid_argument("atom measure: expected '<radius>:<weight>'");
            list.push_back({parse_double_strict(fields[0], "atom radius"),
                            parse_double_strict(fields[1], "atom weight")});
        }
        return atoms(std::move(list));
    }
    throw std::invalid_argument("unknown measure '" + text + "'");
}

double RadialMeasure::density(double r) const {
    switch (kind_) {
        case MeasureKind::disk:
            return 2.0 * r;
        case MeasureKind::bergman:
            return 2.0 * std::pow(1.0 - r * r, alpha_);
        case MeasureKind::fock:
            return p_ * alpha_ * r * std::exp(-0.5 * p_ * alpha_ * r * r);
        case MeasureKind::atoms:
            throw std::domain_error("density: atom measure has no density");
    }
    return 0.0;
}

double RadialMeasure::total_mass() const {
    switch (kind_) {
        case MeasureKind::disk:
            return 1.0;
        case MeasureKind::bergman:
            // int_0^1 2(1-r^2)^a dr = B(1/2, a+1)
            return std::exp(std::lgamma(0.5) + std::lgamma(alpha_ + 1.0) - std::lgamma(alpha_ + 1.5));
        case MeasureKind::fock:
            return 1.0;
        case MeasureKind::atoms: {
            double s = 0.0;
            for (const Atom& a : atoms_) s += a.weight;
            return s;
        }
    }
    return 0.0;
}

std::string RadialMeasure::descriptor() const {
    switch (kind_) {
        case MeasureKind::disk:
            return "disk";
        case MeasureKind::bergman:
            return "bergman:alpha=" + format_double(alpha_);
        case MeasureKind::fock:
            return "fock:p=" + format_double(p_) + ",alpha=" + format_double(alpha_);
        case MeasureKind::atoms: {
            std::string s = "atoms:";
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (i) s += ',';
                s += format_double(atoms_[i].radius) + ":" + format_double(atoms_[i].weight);
            }
            return s;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules

const GLRule& gauss_legendre(int n) {
    if (n < 1 || n > 1 << 14) throw std::invalid_argument("gauss_legendre: bad order");
    static std::map<int, GLRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GLRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const double pi = 3.14159265358979323846;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n and its derivative at x.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        rule.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

// ---------------------------------------------------------------------------
// Panelized integration

namespace {

enum class PanelMap {
    radial,          // coordinate is r, integrand g(r)*density(r)
    bergman_absorb,  // coordinate u = (1-r)^(a+1) on the boundary sliver
    fock_u,          // coordinate u = p*a*r^2/2, integrand g(r(u))*exp(-u)
    fock_u_sqrt,     // same, via t = sqrt(u) to smooth the r ~ sqrt(u) corner
};

struct Panel {
    double a = 0.0;
    double b = 0.0;
    PanelMap map = PanelMap::radial;
    // True when this panel is one step of the geometric progression toward
    // the endpoint; only such panels enter the increment-ratio analysis.
    bool geometric_step = false;
};

struct PanelPlan {
    std::vector<Panel> panels;
    bool probing = false;      // s == r_max: watch for divergence
    bool extrapolate = false;  // terminal sliver left for geometric extrapolation
};

double fock_r_of_u(const RadialMeasure& mu, double u) {
    return std::sqrt(2.0 * u / (mu.fock_p() * mu.alpha()));
}

PanelPlan build_plan(const RadialMeasure& mu, double lo, double hi) {
    PanelPlan plan;
    if (mu.kind() == MeasureKind::fock) {
        const double c = 0.5 * mu.fock_p() * mu.alpha();
        const double ulo = c * lo * lo;
        const double uhi = std::isinf(hi) ? kFockUCap : std::min(c * hi * hi, kFockUCap);
        plan.probing = std::isinf(hi);
        if (uhi <= ulo) return plan;
        std::vector<double> edges;
        edges.push_back(ulo);
        for (double e = 1.0; e < uhi; e *= 2.0)
            if (e > ulo) edges.push_back(e);
        edges.push_back(uhi);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            Panel p;
            p.a = edges[i];
            p.b = edges[i + 1];
            p.map = p.a == 0.0 ? PanelMap::fock_u_sqrt : PanelMap::fock_u;
            p.geometric_step = p.a > 0.0 && p.b == 2.0 * p.a;
            plan.panels.push_back(p);
        }
        return plan;
    }

    // disk / bergman: grade geometrically toward hi, which is where either
    // the weight or the integrand can misbehave (hi <= 1).
    plan.probing = hi == mu.r_max();
    const double width = hi - lo;
    if (width <= 0.0) return plan;
    std::vector<double> edges{lo};
    for (int j = 1; j <= kGradeLevels; ++j) {
        const double e = hi - width * std::ldexp(1.0, -j);
        if (e - edges.back() > std::max(1e-15 * hi, 1e-300)) edges.push_back(e);
    }
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Panel p;
        p.a = edges[i];
        p.b = edges[i + 1];
        p.geometric_step = i > 0;
        plan.panels.push_back(p);
    }
    // Terminal sliver [hi - width*2^-48, hi]: a bergman weight at the
    // boundary gets the exact absorbing substitution; otherwise, when
    // probing, the sliver is recovered by geometric extrapolation of the
    // graded increments (evaluating through an endpoint singularity with a
    // plain rule would poison the result). Away from r_max everything is
    // smooth and the sliver is integrated directly.
    const bool absorb = mu.kind() == MeasureKind::bergman && mu.alpha() != 0.0 && hi == 1.0;
    Panel last;
    last.a = edges.back();
    last.b = hi;
    if (absorb) {
        last.map = PanelMap::bergman_absorb;
        plan.panels.push_back(last);
    } else if (plan.probing) {
        plan.extrapolate = true;
    } else {
        plan.panels.push_back(last);
    }
    return plan;
}

double eval_panel(const RadialMeasure& mu, const Panel& panel, const std::function<double(double)>& g,
                  int order) {
    const GLRule& rule = gauss_legendre(order);
    double acc = 0.0;
    switch (panel.map) {
        case PanelMap::radial: {
            const double mid = 0.5 * (panel.a + panel.b), half = 0.5 * (panel.b - panel.a);
            for (int i = 0; i < order; ++i) {
                const double r = mid + half * rule.x[i];
                const double v = g(r) * mu.density(r);
                if (!std::isfinite(v))
                    throw std::runtime_error("integrate_radial: integrand not finite at r=" + format_double(r));
                acc += rule.w[i] * v;
            }
            return acc * half;
        }
        case PanelMap::bergman_absorb: {
            // int_a^1 2(1-r^2)^alpha g(r) dr with u = (1-r)^(alpha+1):
            // du = -(alpha+1)(1-r)^alpha dr, leaving 2(1+r)^alpha g smooth.
            const double ap1 = mu.alpha() + 1.0;
            const double ulim = std::pow(1.0 - panel.a, ap1);
            const double mid = 0.5 * ulim, half = 0.5 * ulim;
            for (int i = 0; i < order; ++i) {
                const double u = mid + half * rule.x[i];
                // keep r strictly below 1: the finest boundary gap g can see
                // is one ulp, and nodes map below that for large alpha
                const double w = std::max(std::pow(u, 1.0 / ap1), 2.220446049250313e-16);
                const double r = 1.0 - w;
                const double v = 2.0 * std::pow(1.0 + r, mu.alpha()) * g(r) / ap1;
                if (!std::isfinite(v))
                    throw std::runtime_error("integrate_radial: integrand not finite at r=" + format_double(r));
                acc += rule.w[i] * v;
            }
            return acc * half;
        }
        case PanelMap::fock_u: {
            const double mid = 0.5 * (panel.a + panel.b), half = 0.5 * (panel.b - panel.a);
            for (int i = 0; i < order; ++i) {
                const double u = mid + half * rule.x[i];
                const double v = g(fock_r_of_u(mu, u)) * std::exp(-u);
                if (!std::isfinite(v))
                    throw std::runtime_error("integrate_radial: integrand not finite at u=" + format_double(u));
                acc += rule.w[i] * v;
            }
            return acc * half;
        }
        case PanelMap::fock_u_sqrt: {
            const double t0 = std::sqrt(panel.a), t1 = std::sqrt(panel.b);
            const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
            for (int i = 0; i < order; ++i) {
                const double t = mid + half * rule.x[i];
                const double u = t * t;
                const double v = 2.0 * t * g(fock_r_of_u(mu, u)) * std::exp(-u);
                if (!std::isfinite(v))
                    throw std::runtime_error("integrate_radial: integrand not finite at u=" + format_double(u));
                acc += rule.w[i] * v;
            }
            return acc * half;
        }
    }
    return acc;
}

struct SweepResult {
    double value = 0.0;
    double tail = 0.0;  // geometric extrapolation past the last graded panel
    double tail_err = 0.0;
    bool diverged = false;
};

SweepResult sweep(const RadialMeasure& mu, const PanelPlan& plan, const std::function<double(double)>& g,
                  int order) {
    SweepResult out;
    std::vector<double> inc(plan.panels.size());
    double partial = 0.0;
    for (std::size_t i = 0; i < plan.panels.size(); ++i) {
        inc[i] = eval_panel(mu, plan.panels[i], g, order);
        partial += inc[i];
        if (plan.probing && std::fabs(partial) > kPartialCap) {
            out.diverged = true;
            out.value = partial > 0.0 ? kInf : -kInf;
            return out;
        }
    }
    out.value = pairwise_sum(inc);
    if (!plan.probing) return out;

    // Increment-ratio analysis over the trailing geometric panels. Their
    // contributions approach a geometric sequence: ratio >= 1 means the
    // integral cannot settle (log-type divergence gives ratio -> 1,
    // power-type gives > 1); ratio < 1 determines the unresolved tail.
    double rsum = 0.0;
    int rcount = 0;
    double last_inc = 0.0;
    for (std::size_t i = plan.panels.size(); i-- > 1 && rcount < 3;) {
        if (!plan.panels[i].geometric_step || !plan.panels[i - 1].geometric_step) continue;
        if (std::fabs(inc[i]) < 1e-300 || std::fabs(inc[i - 1]) < 1e-300) break;
        if (inc[i] * inc[i - 1] <= 0.0) break;
        if (rcount == 0) last_inc = inc[i];
        rsum += inc[i] / inc[i - 1];
        ++rcount;
    }
    if (rcount < 3) return out;  // increments died off; nothing left to resolve
    const double rho = rsum / rcount;
    if (rho >= 0.9999) {
        out.diverged = true;
        out.value = last_inc > 0.0 ? kInf : -kInf;
        return out;
    }
    if (plan.extrapolate && rho > 0.0) {
        out.tail = last_inc * rho / (1.0 - rho);
        out.tail_err = std::fabs(out.tail) * 0.05;
    }
    return out;
}

IntegralResult integrate_impl(const RadialMeasure& mu, const std::function<double(double)>& g,
                              double lo, double hi, const QuadratureOptions& opts) {
    if (mu.kind() == MeasureKind::atoms) {
        double acc = 0.0;
        for (const Atom& a : mu.atom_list())
            if (a.radius > lo && a.radius <= hi) acc += a.weight * g(a.radius);
        return {acc, 0.0, false};
    }
    const PanelPlan plan = build_plan(mu, lo, hi);
    if (plan.panels.empty()) return {0.0, 0.0, false};

    int order = std::max(2, opts.nodes_per_panel);
    SweepResult prev = sweep(mu, plan, g, order);
    if (prev.diverged) return {prev.value, kInf, true};
    for (int k = 0; k < opts.max_doublings; ++k) {
        order *= 2;
        const SweepResult cur = sweep(mu, plan, g, order);
        if (cur.diverged) return {cur.value, kInf, true};
        const double vp = prev.value + prev.tail;
        const double vc = cur.value + cur.tail;
        const double diff = std::fabs(vc - vp);
        if (diff <= opts.rel_tol * std::max(std::fabs(vc), 1e-300) || diff < 1e-305)
            return {vc, diff + cur.tail_err, false};
        prev = cur;
    }
    return {prev.value + prev.tail,
            prev.tail_err + std::fabs(prev.value) * opts.rel_tol * 10.0, false};
}

void check_range(const RadialMeasure& mu, double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo)) throw std::invalid_argument("integrate_radial: need 0 <= s_lo < s_hi");
    if (hi > mu.r_max() && !(std::isinf(hi) && std::isinf(mu.r_max())))
        throw std::invalid_argument("integrate_radial: s exceeds the measure's radial domain");
}

}  // namespace

IntegralResult integrate_radial(const RadialMeasure& mu, const std::function<double(double)>& g,
                                double s, QuadratureOptions opts) {
    check_range(mu, 0.0, s);
    return integrate_impl(mu, g, 0.0, s, opts);
}

IntegralResult integrate_radial_range(const RadialMeasure& mu, const std::function<double(double)>& g,
                                      double s_lo, double s_hi, QuadratureOptions opts) {
    check_range(mu, s_lo, s_hi);
    return integrate_impl(mu, g, s_lo, s_hi, opts);
}

RadialRule make_radial_rule(const RadialMeasure& mu, double s, const std::vector<double>& breakpoints,
                            int nodes_per_panel) {
    if (!(s > 0.0) || std::isinf(s)) throw std::invalid_argument("make_radial_rule: need finite s > 0");
    if (s > mu.r_max()) throw std::invalid_argument("make_radial_rule: s exceeds the measure's radial domain");
    RadialRule rule;
    if (mu.kind() == MeasureKind::atoms) {
        for (const Atom& a : mu.atom_list())
            if (a.radius <= s) {
                rule.r.push_back(a.radius);
                rule.w.push_back(a.weight);
            }
        return rule;
    }
    std::vector<double> edges{0.0};
    for (double b : breakpoints)
        if (b > 1e-12 && b < s * (1.0 - 1e-12)) edges.push_back(b);
    edges.push_back(s);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(), [](double a, double b) { return b - a < 1e-12; }),
                edges.end());
    if (edges.back() < s) edges.back() = s;

    // Keep panels no wider than the natural scale of the density so a
    // moderate per-panel order stays spectrally accurate.
    const double scale = mu.kind() == MeasureKind::fock ? 0.5 / std::sqrt(mu.fock_p() * mu.alpha()) : s / 3.0;
    const GLRule& gl = gauss_legendre(std::max(2, nodes_per_panel));
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const int parts = std::max(1, int(std::ceil((edges[i + 1] - edges[i]) / scale)));
        for (int q = 0; q < parts; ++q) {
            const double a = edges[i] + (edges[i + 1] - edges[i]) * q / parts;
            const double b = edges[i] + (edges[i + 1] - edges[i]) * (q + 1) / parts;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t j = 0; j < gl.x.size(); ++j) {
                const double r = mid + half * gl.x[j];
                rule.r.push_back(r);
                rule.w.push_back(gl.w[j] * half * mu.density(r));
            }
        }
    }
    return rule;
}

double apply_rule(const RadialRule& rule, const std::function<double(double)>& h) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.r.size(); ++i) acc += rule.w[i] * h(rule.r[i]);
    return acc;
}

}  // namespace gafzero
