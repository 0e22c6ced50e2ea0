#include "gafzero/coeffs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gafzero/poly.hpp"
#include "gafzero/special.hpp"
#include "gafzero/util.hpp"

namespace gafzero {

namespace {

using ld = long double;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr ld kLn2 = 0.693147180559945309417232121458L;

double expect_key(const std::string& field, const std::string& key, const std::string& ctx) {
    const auto eq = field.find('=');
    if (eq == std::string::npos || field.substr(0, eq) != key)
        throw std::invalid_argument(ctx + ": expected '" + key + "=<value>', got '" + field + "'");
    return parse_double_strict(field.substr(eq + 1), ctx + "." + key);
}

// log n with the small-index convention: log 2 at n in {0, 1}.
double log_conv(ld n) { return std::log(std::max<double>(double(n), 2.0)); }

// ---------------------------------------------------------------------------
// Log-space radial moments, int_0^{r_mu} r^m dmu. The flexible construction
// pushes m beyond 2^2000 on the disk, so everything runs on log quantities
// and long double exponents. Each moment has two routes: the closed form,
// and an independent quadrature in coordinates where the integrand is tame
// (u = -(m+const) log r for measures on [0,1), a Laplace window for the
// Gaussian weight). Tests and normalization residuals compare the routes.

// ln B(a, b) for possibly enormous a; Stirling difference past 1e8 where
// plain lgammal differences lose the significant digits.
ld log_beta_large_a(ld a, ld b) {
    if (a < 1e8L) return lgammal(a) + lgammal(b) - lgammal(a + b);
    const ld diff = -b * logl(a) - (a + b - 0.5L) * log1pl(b / a) + b +
                    (1.0L / 12.0L) * (1.0L / a - 1.0L / (a + b));
    return lgammal(b) + diff;
}

ld fock_weight_c(const RadialMeasure& mu) { return 0.5L * (ld)mu.fock_p() * (ld)mu.alpha(); }

ld log_atoms_moment(const RadialMeasure& mu, ld m, double above_s) {
    ld best = -std::numeric_limits<ld>::infinity();
    for (const Atom& a : mu.atom_list()) {
        if (a.radius <= above_s) continue;
        best = std::max(best, logl((ld)a.weight) + m * logl((ld)a.radius));
    }
    if (best == -std::numeric_limits<ld>::infinity()) return best;
    ld acc = 0.0L;
    for (const Atom& a : mu.atom_list()) {
        if (a.radius <= above_s) continue;
        acc += expl(logl((ld)a.weight) + m * logl((ld)a.radius) - best);
    }
    return best + logl(acc);
}

// Quadrature of exp(-u) over [0, 40] on a few panels; the exactly
// transformed residual factor for the [0,1) moment routes.
double quad_exp_decay() {
    const GLRule& gl = gauss_legendre(64);
    double acc = 0.0;
    const double edges[] = {0.0, 2.0, 6.0, 14.0, 26.0, 40.0};
    for (int pnl = 0; pnl + 1 < 6; ++pnl) {
        const double mid = 0.5 * (edges[pnl] + edges[pnl + 1]);
        const double half = 0.5 * (edges[pnl + 1] - edges[pnl]);
        for (std::size_t i = 0; i < gl.x.size(); ++i) acc += gl.w[i] * half * std::exp(-(mid + half * gl.x[i]));
    }
    return acc;
}

// int_0^1 r^m 2(1-r^2)^alpha dr via u = -(m+1) log r, where it becomes
// (2/(m+1))^{alpha+1} int u^alpha shat(u)^alpha e^{-u} du with
// shat = (1 - e^{-2u/(m+1)}) (m+1)/(2u) in (0, 1]. The u^alpha factor is
// absorbed by w = u^{alpha+1}.
ld log_bergman_moment_quad(const RadialMeasure& mu, ld m) {
    const double alpha = mu.alpha();
    const double U = 40.0;
    const double W = std::pow(U, alpha + 1.0);
    const GLRule& gl = gauss_legendre(64);
    double acc = 0.0;
    double hi = W;
    for (int lvl = 0; lvl < 54; ++lvl) {
        const double lo = lvl == 53 ? 0.0 : hi * 0.5;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            const double w = mid + half * gl.x[i];
            const double u = std::pow(w, 1.0 / (alpha + 1.0));
            const ld x = 2.0L * (ld)u / (m + 1.0L);
            const double shat = double(-expm1l(-x) / x);
            acc += gl.w[i] * half * std::pow(shat, alpha) * std::exp(-u) / (alpha + 1.0);
        }
        hi = lo;
        if (hi == 0.0) break;
    }
    return (alpha + 1.0L) * (kLn2 - logl(m + 1.0L)) + logl((ld)acc);
}

ld log_fock_moment_quad(const RadialMeasure& mu, ld m) {
    const ld c = fock_weight_c(mu);
    const double md = double(m);
    const double ustar = std::max(0.5 * md, 1.0);
    const double spread = std::sqrt(ustar);
    const double lo = std::max(0.0, ustar - 14.0 * spread);
    const double hi = ustar + 16.0 * spread + 25.0;
    const GLRule& gl = gauss_legendre(96);
    const int panels = 8;
    double acc = 0.0;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = lo + (hi - lo) * pnl / panels, b = lo + (hi - lo) * (pnl + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            const double u = mid + half * gl.x[i];
            acc += gl.w[i] * half * std::exp(0.5 * md * (std::log(u) - std::log(ustar)) - (u - ustar));
        }
    }
    return -0.5L * m * logl(c) + 0.5L * m * logl((ld)ustar) - (ld)ustar + logl((ld)acc);
}

ld log_moment(const RadialMeasure& mu, ld m, bool quadrature_route) {
    switch (mu.kind()) {
        case MeasureKind::disk: {
            const ld closed = kLn2 - logl(m + 2.0L);
            if (!quadrature_route) return closed;
            static const double q40 = quad_exp_decay();
            return closed + logl((ld)q40);
        }
        case MeasureKind::bergman:
            if (!quadrature_route) return log_beta_large_a(0.5L * (m + 1.0L), (ld)mu.alpha() + 1.0L);
            return log_bergman_moment_quad(mu, m);
        case MeasureKind::fock: {
            if (!quadrature_route)
                return -0.5L * m * logl(fock_weight_c(mu)) + lgammal(0.5L * m + 1.0L);
            return log_fock_moment_quad(mu, m);
        }
        case MeasureKind::atoms:
            return log_atoms_moment(mu, m, -1.0);
    }
    return 0.0L;
}

// Cutoff for the flexible construction. Measures on [0,1) keep delta =
// 1 - s as the working value (s itself rounds to 1 from k = 4 on); the
// Gaussian weight keeps s directly.
struct Cut {
    ld delta = 0.0L;
    double s = 0.0;
};

ld log_tail_mass(const RadialMeasure& mu, const Cut& cut) {
    switch (mu.kind()) {
        case MeasureKind::disk:
            return logl(cut.delta) + logl(2.0L - cut.delta);
        case MeasureKind::bergman: {
            // 2 int_0^delta w^alpha (2-w)^alpha dw, inner factor by quadrature
            const double alpha = mu.alpha();
            const double dd = double(std::min<ld>(cut.delta, 1.0L));
            const GLRule& gl = gauss_legendre(64);
            double inner = 0.0;
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                const double v = 0.5 + 0.5 * gl.x[i];
                const double y = std::pow(v, 1.0 / (alpha + 1.0));
                inner += 0.5 * gl.w[i] * std::pow(2.0 - dd * y, alpha) / (alpha + 1.0);
            }
            return kLn2 + (alpha + 1.0L) * logl(cut.delta) + logl((ld)inner);
        }
        case MeasureKind::fock:
            return -fock_weight_c(mu) * (ld)cut.s * (ld)cut.s;
        case MeasureKind::atoms:
            return log_atoms_moment(mu, 0.0L, cut.s);
    }
    return 0.0L;
}

ld log_tail_moment(const RadialMeasure& mu, ld m, const Cut& cut) {
    switch (mu.kind()) {
        case MeasureKind::disk: {
            const ld lgs = log1pl(-cut.delta);  // log s
            return kLn2 - logl(m + 2.0L) + logl(-expm1l((m + 2.0L) * lgs));
        }
        case MeasureKind::bergman: {
            const double alpha = mu.alpha();
            if (m < 1e6L && cut.delta > 1e-9L) {
                const double md = double(m), s = 1.0 - double(cut.delta);
                const auto res = integrate_radial_range(
                    mu, [md](double r) { return std::pow(r, md); }, s, 1.0);
                return logl((ld)res.value);
            }
            // Boundary-layer form: r^m ~ e^{-m w}, weight ~ 2^{1+a} w^a.
            const double x = double(std::min<ld>(m * cut.delta, 700.0L));
            return (1.0L + alpha) * kLn2 - (alpha + 1.0L) * logl(m) + (ld)std::lgamma(alpha + 1.0) +
                   logl((ld)gamma_p(alpha + 1.0, x));
        }
        case MeasureKind::fock: {
            const ld c = fock_weight_c(mu);
            const double a = double(0.5L * m + 1.0L);
            const double x = double(c) * cut.s * cut.s;
            const double q = gamma_q(a, x);
            return log_moment(mu, m, false) + (q > 0.0 ? logl((ld)q) : -std::numeric_limits<ld>::infinity());
        }
        case MeasureKind::atoms:
            return log_atoms_moment(mu, m, cut.s);
    }
    return 0.0L;
}

// sum_{k>=1} k^beta r^k. Direct summation away from r = 1, the convergent
// zeta expansion of the polylog in the boundary layer (valid for
// -log r < 2 pi; truncation at n = 40 is far below double noise).
double power_series_value(double beta, double r) {
    if (r <= 0.0) return 0.0;
    const double lam = -std::log(r);
    if (lam > 0.25) {
        double acc = 0.0;
        double rk = 1.0;
        for (std::uint64_t k = 1; k < 100000; ++k) {
            rk *= r;
            const double t = std::pow(double(k), beta) * rk;
            acc += t;
            if (t < 1e-17 * acc && double(k) * lam > beta + 5.0) break;
        }
        return acc;
    }
    double acc = std::exp(std::lgamma(beta + 1.0)) * std::pow(lam, -beta - 1.0);
    double pw = 1.0, fact = 1.0;
    for (int n = 0; n <= 40; ++n) {
        if (n > 0) {
            pw *= -lam;
            fact *= n;
        }
        acc += riemann_zeta(-beta - double(n)) * pw / fact;
    }
    return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// CoefficientSequence

CoefficientSequence CoefficientSequence::basis() {
    CoefficientSequence a;
    a.kind_ = CoeffKind::basis;
    return a;
}

CoefficientSequence CoefficientSequence::unit() {
    CoefficientSequence a;
    a.kind_ = CoeffKind::unit;
    return a;
}

CoefficientSequence CoefficientSequence::geometric(double rho) {
    CoefficientSequence a;
    a.kind_ = CoeffKind::geometric;
    a.rho_ = rho;
    a.validate();
    return a;
}

CoefficientSequence CoefficientSequence::fock(double p, double alpha) {
    CoefficientSequence a;
    a.kind_ = CoeffKind::fock;
    a.p_ = p;
    a.alpha_ = alpha;
    a.validate();
    return a;
}

CoefficientSequence CoefficientSequence::fock_log(double p, double alpha, double c) {
    CoefficientSequence a;
    a.kind_ = CoeffKind::fock_log;
    a.p_ = p;
    a.alpha_ = alpha;
    a.c_ = c;
    a.validate();
    return a;
}

CoefficientSequence CoefficientSequence::dyadic(double alpha, double p) {
    CoefficientSequence a;
    a.kind_ = CoeffKind::dyadic;
    a.alpha_ = alpha;
    a.p_ = p;
    a.validate();
    return a;
}

CoefficientSequence CoefficientSequence::explicit_list(std::vector<double> values) {
    CoefficientSequence a;
    a.kind_ = CoeffKind::explicit_list;
    a.values_ = std::move(values);
    a.validate();
    return a;
}

CoefficientSequence CoefficientSequence::from_flexible(std::shared_ptr<const FlexibleSequence> flex) {
    if (!flex) throw std::invalid_argument("from_flexible: null handle");
    CoefficientSequence a;
    a.kind_ = CoeffKind::flexible;
    a.flex_ = std::move(flex);
    return a;
}

CoefficientSequence CoefficientSequence::with_shift(int shift) const {
    if (shift < 0) throw std::invalid_argument("with_shift: need shift >= 0");
    CoefficientSequence a = *this;
    a.shift_ = shift;
    return a;
}

void CoefficientSequence::validate() const {
    switch (kind_) {
        case CoeffKind::geometric:
            if (!(rho_ > 0.0) || !std::isfinite(rho_))
                throw std::invalid_argument("geometric sequence: need rho > 0");
            break;
        case CoeffKind::fock:
        case CoeffKind::fock_log:
            if (!(p_ > 0.0) || !(alpha_ > 0.0))
                throw std::invalid_argument("fock sequence: need p > 0 and alpha > 0");
            if (kind_ == CoeffKind::fock_log && !std::isfinite(c_))
                throw std::invalid_argument("fock_log sequence: need finite c");
            break;
        case CoeffKind::dyadic:
            if (!(p_ > 0.0) || !std::isfinite(alpha_))
                throw std::invalid_argument("dyadic sequence: need p > 0 and finite alpha");
            break;
        case CoeffKind::explicit_list:
            if (values_.empty()) throw std::invalid_argument("explicit sequence: empty list");
            for (double v : values_)
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw std::invalid_argument("explicit sequence: entries must be finite and >= 0");
            break;
        default:
            break;
    }
}

CoefficientSequence CoefficientSequence::parse(std::string_view descriptor) {
    std::string text(descriptor);
    int shift = 0;
    const auto semi = text.find(';');
    if (semi != std::string::npos) {
        const std::string opt = text.substr(semi + 1);
        text = text.substr(0, semi);
        const auto eq = opt.find('=');
        if (eq == std::string::npos || opt.substr(0, eq) != "shift")
            throw std::invalid_argument("coefficient sequence: unknown option '" + opt + "'");
        const long long sv = parse_int_strict(opt.substr(eq + 1), "coefficient shift");
        if (sv < 0 || sv > 1000000) throw std::invalid_argument("coefficient shift out of range");
        shift = int(sv);
    }
    const auto colon = text.find(':');
    const std::string head = colon == std::string::npos ? text : text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);

    CoefficientSequence a;
    if (head == "basis" && rest.empty()) {
        a = basis();
    } else if (head == "unit" && rest.empty()) {
        a = unit();
    } else if (head == "geom") {
        a = geometric(expect_key(rest, "rho", "geom sequence"));
    } else if (head == "fock") {
        const auto f = split(rest, ',');
        if (f.size() != 2) throw std::invalid_argument("fock sequence: expected 'fock:p=<f>,alpha=<f>'");
        a = fock(expect_key(f[0], "p", "fock sequence"), expect_key(f[1], "alpha", "fock sequence"));
    } else if (head == "focklog") {
        const auto f = split(rest, ',');
        if (f.size() != 3)
            throw std::invalid_argument("focklog sequence: expected 'focklog:p=<f>,alpha=<f>,c=<f>'");
        a = fock_log(expect_key(f[0], "p", "focklog sequence"), expect_key(f[1], "alpha", "focklog sequence"),
                     expect_key(f[2], "c", "focklog sequence"));
    } else if (head == "dyadic") {
        const auto f = split(rest, ',');
        if (f.size() != 2) throw std::invalid_argument("dyadic sequence: expected 'dyadic:alpha=<f>,p=<f>'");
        a = dyadic(expect_key(f[0], "alpha", "dyadic sequence"), expect_key(f[1], "p", "dyadic sequence"));
    } else if (head == "explicit") {
        std::vector<double> vals;
        for (const std::string& item : split(rest, ','))
            vals.push_back(parse_double_strict(item, "explicit entry"));
        a = explicit_list(std::move(vals));
    } else {
        throw std::invalid_argument("unknown coefficient sequence '" + std::string(descriptor) + "'");
    }
    return shift ? a.with_shift(shift) : a;
}

double CoefficientSequence::coeff(std::int64_t n) const {
    if (n < 0) throw std::invalid_argument("coeff: need n >= 0");
    const std::int64_t m = n + shift_;
    switch (kind_) {
        case CoeffKind::basis:
            return m == 0 ? 1.0 : 0.0;
        case CoeffKind::unit:
            return 1.0;
        case CoeffKind::geometric:
            return std::pow(rho_, double(m));
        case CoeffKind::fock:
            return std::exp(0.5 * (double(m) * std::log(alpha_) - std::lgamma(double(m) + 2.0 / p_)));
        case CoeffKind::fock_log:
            return std::exp(0.5 * (double(m) * std::log(alpha_) - std::lgamma(double(m) + 2.0 / p_) -
                                   c_ * std::log(log_conv((ld)m))));
        case CoeffKind::dyadic: {
            if (m < 2 || !std::has_single_bit(std::uint64_t(m))) return 0.0;
            const double lvl = double(std::countr_zero(std::uint64_t(m)));
            return std::exp(lvl * (alpha_ + 1.0) / p_ * double(kLn2) - std::log(lvl) / p_);
        }
        case CoeffKind::explicit_list:
            return std::uint64_t(m) < values_.size() ? values_[m] : 0.0;
        case CoeffKind::flexible:
            for (const FlexibleBlock& blk : flex_->blocks())
                if (blk.n == (ld)m) return double(expl(blk.log_b));
            return 0.0;
    }
    return 0.0;
}

bool CoefficientSequence::finite_support(std::int64_t* last_nonzero) const {
    if (kind_ == CoeffKind::basis) {
        if (last_nonzero) *last_nonzero = 0;
        return true;
    }
    if (kind_ == CoeffKind::explicit_list) {
        std::int64_t last = 0;
        for (std::size_t m = shift_; m < values_.size(); ++m)
            if (values_[m] != 0.0) last = std::int64_t(m) - shift_;
        if (last_nonzero) *last_nonzero = last;
        return true;
    }
    return false;
}

double CoefficientSequence::radius() const {
    switch (kind_) {
        case CoeffKind::unit:
            return 1.0;
        case CoeffKind::geometric:
            return 1.0 / rho_;
        case CoeffKind::dyadic:
            return 1.0;
        case CoeffKind::flexible:
            return flex_->measure().r_max();
        default:
            return kInf;
    }
}

double CoefficientSequence::log_weighted_l2_norm_sq(double r) const {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("weighted_l2_norm: bad r");
    if (r >= radius()) throw std::domain_error("weighted_l2_norm: r outside the radius of convergence");
    if (r == 0.0) {
        const double a0 = coeff(0);
        return a0 > 0.0 ? 2.0 * std::log(a0) : -kInf;
    }
    const double lr = std::log(r);
    switch (kind_) {
        case CoeffKind::basis:
            return shift_ == 0 ? 0.0 : -kInf;
        case CoeffKind::unit:
            return -std::log1p(-r * r);
        case CoeffKind::geometric:
            return 2.0 * shift_ * std::log(rho_) - std::log1p(-rho_ * rho_ * r * r);
        case CoeffKind::explicit_list: {
            double acc = -kInf;
            for (std::size_t m = shift_; m < values_.size(); ++m)
                if (values_[m] > 0.0)
                    acc = logaddexp(acc, 2.0 * std::log(values_[m]) + 2.0 * double(m - shift_) * lr);
            return acc;
        }
        case CoeffKind::dyadic: {
            double acc = -kInf;
            double prev = kInf;
            for (int lvl = 1; lvl < 200; ++lvl) {
                const double idx_d = std::ldexp(1.0, lvl) - double(shift_);
                if (idx_d < 0.0) continue;
                const double lt = 2.0 * lvl * (alpha_ + 1.0) / p_ * double(kLn2) -
                                  2.0 / p_ * std::log(double(lvl)) + 2.0 * idx_d * lr;
                acc = logaddexp(acc, lt);
                if (lvl > 4 && lt < prev && lt < acc - 45.0) break;
                prev = lt;
            }
            return acc;
        }
        case CoeffKind::fock:
        case CoeffKind::fock_log: {
            const double la = std::log(alpha_);
            const double tp = 2.0 / p_, cc = kind_ == CoeffKind::fock_log ? c_ : 0.0;
            const int sh = shift_;
            auto log_term = [=](long long n) {
                const double m = double(n + sh);
                double t = m * la - std::lgamma(m + tp) + 2.0 * double(n) * lr;
                if (cc != 0.0) t -= cc * std::log(log_conv((ld)m));
                return t;
            };
            const long long hint = (long long)std::max(0.0, alpha_ * r * r - shift_);
            return log_series_sum(log_term, 0, hint, 1e-16);
        }
        case CoeffKind::flexible: {
            const ld lrl = logl((ld)r);
            ld best = -std::numeric_limits<ld>::infinity();
            for (const FlexibleBlock& blk : flex_->blocks())
                best = std::max(best, 2.0L * blk.log_b + 2.0L * (blk.n - (ld)shift_) * lrl);
            if (best == -std::numeric_limits<ld>::infinity()) return -kInf;
            ld acc = 0.0L;
            for (const FlexibleBlock& blk : flex_->blocks())
                acc += expl(2.0L * blk.log_b + 2.0L * (blk.n - (ld)shift_) * lrl - best);
            return double(best + logl(acc));
        }
    }
    return -kInf;
}

double CoefficientSequence::weighted_l2_norm(double r) const {
    switch (kind_) {
        case CoeffKind::basis:
        case CoeffKind::unit:
        case CoeffKind::geometric:
        case CoeffKind::explicit_list: {
            if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("weighted_l2_norm: bad r");
            if (r >= radius()) throw std::domain_error("weighted_l2_norm: r outside the radius of convergence");
            if (kind_ == CoeffKind::basis) return shift_ == 0 ? 1.0 : 0.0;
            if (kind_ == CoeffKind::unit) return std::sqrt(1.0 / (1.0 - r * r));
            if (kind_ == CoeffKind::geometric) {
                const double g = rho_ * r;
                return std::pow(rho_, double(shift_)) * std::sqrt(1.0 / (1.0 - g * g));
            }
            double acc = 0.0;
            double rp = 1.0;
            for (std::size_t m = shift_; m < values_.size(); ++m) {
                acc += values_[m] * values_[m] * rp;
                rp *= r * r;
            }
            return std::sqrt(acc);
        }
        default:
            return std::exp(0.5 * log_weighted_l2_norm_sq(r));
    }
}

double CoefficientSequence::root_growth_bound(int n_max) const {
    double best = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double a = coeff(n);
        if (a > 0.0) best = std::max(best, std::exp(std::log(a) / double(n)));
    }
    return best;
}

std::string CoefficientSequence::descriptor() const {
    std::string s;
    switch (kind_) {
        case CoeffKind::basis:
            s = "basis";
            break;
        case CoeffKind::unit:
            s = "unit";
            break;
        case CoeffKind::geometric:
            s = "geom:rho=" + format_double(rho_);
            break;
        case CoeffKind::fock:
            s = "fock:p=" + format_double(p_) + ",alpha=" + format_double(alpha_);
            break;
        case CoeffKind::fock_log:
            s = "focklog:p=" + format_double(p_) + ",alpha=" + format_double(alpha_) +
                ",c=" + format_double(c_);
            break;
        case CoeffKind::dyadic:
            s = "dyadic:alpha=" + format_double(alpha_) + ",p=" + format_double(p_);
            break;
        case CoeffKind::explicit_list:
            s = "explicit:";
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (i) s += ',';
                s += format_double(values_[i]);
            }
            break;
        case CoeffKind::flexible:
            s = "flexible:p=" + format_double(flex_->p()) +
                ",K=" + std::to_string(flex_->blocks().size()) + ",measure=" + flex_->measure().descriptor();
            break;
    }
    if (shift_) s += ";shift=" + std::to_string(shift_);
    return s;
}

// ---------------------------------------------------------------------------

IntegralResult lp_radial_norm(const CoefficientSequence& a, const RadialMeasure& mu, double p, double s,
                              QuadratureOptions opts) {
    if (!(p > 0.0)) throw std::invalid_argument("lp_radial_norm: need p > 0");
    if (!(s > 0.0)) throw std::invalid_argument("lp_radial_norm: need s > 0");
    const double R = a.radius();
    double s_eff = s;
    if (s > R) {
        // mu puts mass where the norm is infinite: divergence without quadrature
        if (mu.kind() != MeasureKind::atoms) return {kInf, kInf, true};
        bool beyond = false;
        for (const Atom& at : mu.atom_list())
            if (at.radius >= R * (1.0 - 1e-15) && at.radius <= s) beyond = true;
        if (beyond) return {kInf, kInf, true};
        s_eff = R;
    }
    const IntegralResult I = integrate_radial(
        mu, [&](double r) { return std::pow(a.weighted_l2_norm(r), p); }, s_eff, opts);
    if (I.diverged) return {kInf, kInf, true};
    if (I.value <= 0.0) return {0.0, 0.0, false};
    const double v = std::pow(I.value, 1.0 / p);
    return {v, v * (I.abs_error / I.value) / p, false};
}

// ---------------------------------------------------------------------------
// Flexible construction

double FlexibleSequence::partial_norm_bound() const {
    const double e = std::min(1.0, 0.5 * p_);
    double acc = 0.0;
    for (std::size_t k = 1; k <= blocks_.size(); ++k) {
        const FlexibleBlock& blk = blocks_[k - 1];
        const ld log_norm = (2.0L / (ld)p_) * ((ld)p_ * blk.log_b + log_moment(mu_, blk.n * (ld)p_, false));
        acc += double(expl((ld)e * log_norm));
    }
    return acc;
}

double FlexibleSequence::log_block_norm(int k, double q, bool quadrature_route) const {
    if (k < 1 || std::size_t(k) > blocks_.size()) throw std::invalid_argument("log_block_norm: bad block");
    if (!(q > 0.0)) throw std::invalid_argument("log_block_norm: need q > 0");
    const FlexibleBlock& blk = blocks_[k - 1];
    return double(2.0L * blk.log_b + (2.0L / (ld)q) * log_moment(mu_, blk.n * (ld)q, quadrature_route));
}

FlexibleSequence flexible_sequence(const RadialMeasure& mu, double p, int K) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("flexible_sequence: need p > 0");
    if (K < 1 || K > 16) throw std::invalid_argument("flexible_sequence: need 1 <= K <= 16");
    const bool on_unit = mu.kind() == MeasureKind::disk || mu.kind() == MeasureKind::bergman;
    const ld ln_half = -kLn2;

    FlexibleSequence fs;
    fs.p_ = p;
    fs.mu_ = mu;
    ld prev_n = 0.0L;
    for (int k = 1; k <= K; ++k) {
        const double M = std::ldexp(1.0, k);
        const double q = p + 1.0 / M;
        const ld log_theta = -(ld)p * (ld)q * (ld)M * logl((ld)M);  // exponent pq/(q-p) = pqM
        if (log_theta < -11000.0L)
            throw std::range_error("flexible_sequence: cutoffs for K=" + std::to_string(K) +
                                   " exceed long double range");

        // s(M): smallest cutoff whose tail mass drops below the threshold.
        Cut cut;
        if (on_unit) {
            ld lo = -11300.0L, hi = 0.0L;  // bisect on log delta; tail mass increases in delta
            if (log_tail_mass(mu, {expl(lo), 0.0}) > log_theta)
                throw std::runtime_error("flexible_sequence: tail threshold unreachable");
            for (int it = 0; it < 200; ++it) {
                const ld mid = 0.5L * (lo + hi);
                if (log_tail_mass(mu, {expl(mid), 0.0}) <= log_theta)
                    lo = mid;
                else
                    hi = mid;
            }
            cut.delta = expl(lo);
        } else {
            double hi = 1.0;
            int guard = 0;
            while (log_tail_mass(mu, {0.0L, hi}) > log_theta) {
                hi *= 2.0;
                if (++guard > 200) throw std::runtime_error("flexible_sequence: tail threshold unreachable");
            }
            double lo = 0.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (log_tail_mass(mu, {0.0L, mid}) <= log_theta)
                    hi = mid;
                else
                    lo = mid;
            }
            cut.s = hi;
        }

        // N(M): half of the N-th moment mass must sit beyond the cutoff.
        auto conc = [&](ld N) {
            return log_tail_moment(mu, N * (ld)p, cut) - log_moment(mu, N * (ld)p, false) >= ln_half;
        };
        ld n0;
        if (on_unit) {
            const ld lam = -log1pl(-cut.delta);
            const ld aeff = mu.kind() == MeasureKind::bergman ? (ld)mu.alpha() + 2.0L : 2.0L;
            n0 = std::max<ld>(1.0L, aeff * kLn2 / ((ld)p * lam));
        } else if (mu.kind() == MeasureKind::fock) {
            n0 = std::max<ld>(1.0L, 2.0L * fock_weight_c(mu) * (ld)cut.s * (ld)cut.s / (ld)p);
        } else {
            n0 = 1.0L;
        }
        ld nlo = std::max<ld>(1.0L, n0 / 8.0L);
        int guard = 0;
        ld nhi = nlo;
        while (!conc(nhi)) {
            nlo = nhi;
            nhi *= 2.0L;
            if (++guard > 200)
                throw std::runtime_error("flexible_sequence: no exponent concentrates beyond the cutoff "
                                         "(is the measure supported short of r_mu?)");
        }
        ld llo = logl(nlo), lhi = logl(nhi);
        for (int it = 0; it < 200; ++it) {
            const ld mid = 0.5L * (llo + lhi);
            if (conc(expl(mid)))
                lhi = mid;
            else
                llo = mid;
        }
        ld n = ceill(expl(lhi));
        for (int bump = 0; bump < 50 && !conc(n); ++bump) n = ceill(n * 1.05L) + 1.0L;
        if (!conc(n)) throw std::runtime_error("flexible_sequence: moment concentration search failed");
        if (n <= prev_n) n = prev_n + 1.0L;
        prev_n = n;

        const ld log_mom = log_moment(mu, n * (ld)p, false);
        const ld log_mom_q = log_moment(mu, n * (ld)p, true);
        FlexibleBlock blk;
        blk.n = n;
        blk.log_b = -0.5L * (ld)k * kLn2 - log_mom / (ld)p;
        blk.delta = on_unit ? cut.delta : 0.0L;
        blk.s = on_unit ? double(1.0L - cut.delta) : cut.s;
        blk.residual = std::fabs(double(expm1l((2.0L / (ld)p) * (log_mom_q - log_mom))));
        fs.blocks_.push_back(blk);
    }
    return fs;
}

// ---------------------------------------------------------------------------
// MM dyadic criterion

MMSequence MMSequence::unit() {
    MMSequence c;
    c.kind_ = Kind::unit;
    return c;
}

MMSequence MMSequence::basis() {
    MMSequence c;
    c.kind_ = Kind::basis;
    return c;
}

MMSequence MMSequence::geometric(double rho) {
    if (!(rho > 0.0) || !(rho < 1.0)) throw std::invalid_argument("mm geometric: need 0 < rho < 1");
    MMSequence c;
    c.kind_ = Kind::geometric;
    c.rho_ = rho;
    return c;
}

MMSequence MMSequence::power(double beta) {
    if (!(beta > -1.0) || !std::isfinite(beta)) throw std::invalid_argument("mm power: need beta > -1");
    MMSequence c;
    c.kind_ = Kind::power;
    c.beta_ = beta;
    return c;
}

MMSequence MMSequence::lacunary() {
    MMSequence c;
    c.kind_ = Kind::lacunary;
    return c;
}

MMSequence MMSequence::explicit_list(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("mm explicit: empty list");
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("mm explicit: entries must be finite and >= 0");
    MMSequence c;
    c.kind_ = Kind::explicit_list;
    c.values_ = std::move(values);
    return c;
}

MMSequence MMSequence::parse(std::string_view descriptor) {
    const std::string text(descriptor);
    if (text == "unit") return unit();
    if (text == "basis") return basis();
    if (text == "lacunary") return lacunary();
    const auto colon = text.find(':');
    const std::string head = colon == std::string::npos ? text : text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    if (head == "geom") return geometric(expect_key(rest, "rho", "mm geom"));
    if (head == "power") return power(expect_key(rest, "beta", "mm power"));
    if (head == "explicit") {
        std::vector<double> vals;
        for (const std::string& item : split(rest, ','))
            vals.push_back(parse_double_strict(item, "mm explicit entry"));
        return explicit_list(std::move(vals));
    }
    throw std::invalid_argument("unknown mm sequence '" + text + "'");
}

double MMSequence::term(std::uint64_t k) const {
    switch (kind_) {
        case Kind::unit:
            return 1.0;
        case Kind::basis:
            return k == 0 ? 1.0 : 0.0;
        case Kind::geometric:
            return std::pow(rho_, double(k));
        case Kind::power:
            return k == 0 ? 0.0 : std::pow(double(k), beta_);
        case Kind::lacunary:
            return k >= 1 && std::has_single_bit(k) ? 1.0 : 0.0;
        case Kind::explicit_list:
            return k < values_.size() ? values_[k] : 0.0;
    }
    return 0.0;
}

double MMSequence::block_sum(int n) const {
    if (n < 0) throw std::invalid_argument("block_sum: need n >= 0");
    const double a = std::ldexp(1.0, n), b = std::ldexp(1.0, n + 1);
    switch (kind_) {
        case Kind::unit:
            return a;
        case Kind::basis:
            return 0.0;
        case Kind::geometric: {
            // rho^a (1 - rho^a) / (1 - rho)
            const double ra = std::pow(rho_, a);
            return ra * (1.0 - ra) / (1.0 - rho_);
        }
        case Kind::power: {
            if (n <= 21) {
                double acc = 0.0;
                for (std::uint64_t k = std::uint64_t(a); k < std::uint64_t(b); ++k)
                    acc += std::pow(double(k), beta_);
                return acc;
            }
            // Euler-Maclaurin over [a, b); relative error ~ beta^4 / a^3
            const double I = (std::pow(b, beta_ + 1.0) - std::pow(a, beta_ + 1.0)) / (beta_ + 1.0);
            return I - 0.5 * (std::pow(b, beta_) - std::pow(a, beta_)) +
                   beta_ / 12.0 * (std::pow(b, beta_ - 1.0) - std::pow(a, beta_ - 1.0));
        }
        case Kind::lacunary:
            return 1.0;
        case Kind::explicit_list: {
            double acc = 0.0;
            for (std::uint64_t k = std::uint64_t(a); k < std::uint64_t(b) && k < values_.size(); ++k)
                acc += values_[k];
            return acc;
        }
    }
    return 0.0;
}

double MMSequence::eval_series(double r) const {
    if (!(r >= 0.0) || !(r < 1.0)) throw std::invalid_argument("eval_series: need 0 <= r < 1");
    switch (kind_) {
        case Kind::unit:
            return 1.0 / (1.0 - r);
        case Kind::basis:
            return 1.0;
        case Kind::geometric:
            return 1.0 / (1.0 - rho_ * r);
        case Kind::power:
            return power_series_value(beta_, r);
        case Kind::lacunary: {
            double acc = 0.0;
            for (int m = 0; m < 1100; ++m) {
                const double t = std::exp(std::ldexp(1.0, m) * std::log(r));
                acc += t;
                if (t < 1e-300) break;
            }
            return acc;
        }
        case Kind::explicit_list: {
            double acc = 0.0;
            for (std::size_t i = values_.size(); i-- > 0;) acc = acc * r + values_[i];
            return acc;
        }
    }
    return 0.0;
}

std::string MMSequence::descriptor() const {
    switch (kind_) {
        case Kind::unit:
            return "unit";
        case Kind::basis:
            return "basis";
        case Kind::geometric:
            return "geom:rho=" + format_double(rho_);
        case Kind::power:
            return "power:beta=" + format_double(beta_);
        case Kind::lacunary:
            return "lacunary";
        case Kind::explicit_list: {
            std::string s = "explicit:";
            for (std::size_t i = 0; i < values_.size(); ++i) {
                if (i) s += ',';
                s += format_double(values_[i]);
            }
            return s;
        }
    }
    return {};
}

MMVerdict mm_dyadic_check(const MMSequence& c, double q, double alpha, int depth) {
    if (!(q > 0.0)) throw std::invalid_argument("mm_dyadic_check: need q > 0");
    if (!(alpha > -1.0)) throw std::invalid_argument("mm_dyadic_check: need alpha > -1");
    if (depth < 4 || depth > 40) throw std::invalid_argument("mm_dyadic_check: need 4 <= depth <= 40");

    MMVerdict out;

    // Integral side, rewritten against the boundary-weight measure:
    // (1-r)^alpha = 2(1-r^2)^alpha / (2 (1+r)^alpha). The cap keeps an
    // integrable spike from turning into a non-finite evaluation; truly
    // divergent integrands trip the partial or ratio rules long before it.
    const RadialMeasure berg = RadialMeasure::bergman(alpha);
    auto g = [&](double r) {
        double v = std::pow(c.eval_series(r), q) / (2.0 * std::pow(1.0 + r, alpha));
        if (!std::isfinite(v) || v > 1e290) v = 1e290;
        return v;
    };
    out.integral = integrate_radial(berg, g, 1.0);

    // Dyadic side with the same divergence thresholds.
    std::vector<double> terms(depth);
    double partial = 0.0;
    bool diverged = false;
    for (int n = 0; n < depth && !diverged; ++n) {
        terms[n] = std::exp2(-double(n) * (alpha + 1.0)) * std::pow(c.block_sum(n), q);
        partial += terms[n];
        if (!std::isfinite(partial) || partial > 1e12) diverged = true;
    }
    if (diverged) {
        out.dyadic_sum = {kInf, kInf, true};
    } else {
        double rsum = 0.0;
        int rcount = 0;
        double last = 0.0;
        for (int n = depth - 1; n >= 1 && rcount < 3; --n) {
            if (terms[n] < 1e-300 || terms[n - 1] < 1e-300) break;
            if (rcount == 0) last = terms[n];
            rsum += terms[n] / terms[n - 1];
            ++rcount;
        }
        if (rcount == 3) {
            const double rho = rsum / 3.0;
            if (rho >= 0.9999) {
                out.dyadic_sum = {kInf, kInf, true};
            } else {
                const double tail = rho > 0.0 ? last * rho / (1.0 - rho) : 0.0;
                out.dyadic_sum = {pairwise_sum(terms) + tail, 0.05 * tail, false};
            }
        } else {
            out.dyadic_sum = {pairwise_sum(terms), 0.0, false};
        }
    }
    out.agree = out.integral.diverged == out.dyadic_sum.diverged;
    return out;
}

// ---------------------------------------------------------------------------

double stokes_ratio(double t, double b, double c, std::int64_t terms) {
    if (!(t > 0.0)) throw std::invalid_argument("stokes_ratio: need t > 0");
    if (!(b >= 0.0)) throw std::invalid_argument("stokes_ratio: need b >= 0");
    if (c != 0.0 && !(t > 1.0)) throw std::invalid_argument("stokes_ratio: log variant needs t > 1");
    if (terms < 2) throw std::invalid_argument("stokes_ratio: need terms >= 2");
    const long long n_start = b == 0.0 ? 1 : 0;
    const double lt = std::log(t);
    auto log_term = [=](long long n) {
        double v = double(n) * lt - std::lgamma(double(n) + b);
        if (c != 0.0) v -= c * std::log(log_conv((ld)n));
        return v;
    };
    const double ls = log_series_sum(log_term, n_start, (long long)t + 1, 1e-18);
    // the term sequence rises to its peak near n = t and then decays; the
    // budget is honest only if its boundary sits on the decaying side and
    // the boundary term no longer matters
    const long long edge = n_start + terms;
    if (log_term(edge) >= log_term(edge - 1) || log_term(edge) > ls + std::log(1e-16))
        throw std::invalid_argument("stokes_ratio: term budget too small for this t");
    double lead = -t + b * lt;
    if (c != 0.0) lead += c * std::log(lt);
    return std::exp(lead + ls);
}

double horowitz_statistic(const std::vector<double>& moduli, double q, std::size_t n_max) {
    if (moduli.empty()) throw std::invalid_argument("horowitz_statistic: empty modulus list");
    if (!(q > 0.0)) throw std::invalid_argument("horowitz_statistic: need q > 0");
    if (n_max < 1) throw std::invalid_argument("horowitz_statistic: need n_max >= 1");
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        if (!(moduli[i] > 0.0) || !std::isfinite(moduli[i]))
            throw std::invalid_argument("horowitz_statistic: moduli must be positive and finite");
        if (i && moduli[i] < moduli[i - 1])
            throw std::invalid_argument("horowitz_statistic: moduli must be sorted increasing");
    }
    double logprod = 0.0;
    double best = -kInf;
    const std::size_t nn = std::min(n_max, moduli.size());
    for (std::size_t n = 1; n <= nn; ++n) {
        logprod -= std::log(moduli[n - 1]);
        best = std::max(best, -std::log(double(n)) / q + logprod);
    }
    return std::exp(best);
}

}  // namespace gafzero
