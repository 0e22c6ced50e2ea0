#include "gafzero/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gafzero {

namespace {

// Lower incomplete gamma by series, returns P(a,x). Valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("gamma_p_series: no convergence");
}

// Upper incomplete gamma by Lentz continued fraction, returns Q(a,x).
// Valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500000; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw std::runtime_error("gamma_q_cf: no convergence");
}

}  // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: need x >= 0, a > 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: need x >= 0, a > 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double riemann_zeta(double s) {
    if (s == 1.0) throw std::domain_error("riemann_zeta: pole at s = 1");
    if (std::fabs(s) < 1e-12) return -0.5 - 0.918938533204672742 * s;  // -1/2 - s*log(sqrt(2pi))
    if (s < 0.5) {
        // Functional equation; sin picks up the trivial zeros at -2, -4, ...
        const double pi = 3.14159265358979323846;
        return std::pow(2.0, s) * std::pow(pi, s - 1.0) * std::sin(0.5 * pi * s) *
               std::exp(std::lgamma(1.0 - s)) * riemann_zeta(1.0 - s);
    }
    const int N = 32;
    double sum = 0.0;
    for (int n = N - 1; n >= 1; --n) sum += std::pow(double(n), -s);
    const double nsp = std::pow(double(N), -s);
    sum += nsp * double(N) / (s - 1.0) + 0.5 * nsp;
    // Euler-Maclaurin correction terms (B2, B4, B6).
    double fac = s * nsp / N;
    sum += fac / 12.0;
    fac *= (s + 1.0) * (s + 2.0) / double(N) / double(N);
    sum -= fac / 720.0;
    fac *= (s + 3.0) * (s + 4.0) / double(N) / double(N);
    sum += fac / 30240.0;
    return sum;
}

double log1mexp(double x) {
    if (x >= 0.0) throw std::domain_error("log1mexp: need x < 0");
    // Crossover at log(1/2) avoids cancellation on both branches.
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

double logaddexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_series_sum(const std::function<double(long long)>& log_term, long long n_start,
                      long long n_peak_hint, double rel_tol) {
    long long peak = std::max(n_peak_hint, n_start);
    double lt_peak = log_term(peak);
    // Walk uphill in case the hint missed the mode.
    for (int guard = 0; guard < 200000; ++guard) {
        const double up = log_term(peak + 1);
        const double dn = peak > n_start ? log_term(peak - 1) : -std::numeric_limits<double>::infinity();
        if (up > lt_peak) {
            ++peak;
            lt_peak = up;
        } else if (dn > lt_peak) {
            --peak;
            lt_peak = dn;
        } else {
            break;
        }
    }
    double sum = 1.0;  // the peak term, rescaled
    for (long long n = peak + 1;; ++n) {
        const double t = std::exp(log_term(n) - lt_peak);
        sum += t;
        if (t < rel_tol * sum) break;
        if (n - peak > 100000000LL) throw std::runtime_error("log_series_sum: tail too long");
    }
    for (long long n = peak - 1; n >= n_start; --n) {
        const double t = std::exp(log_term(n) - lt_peak);
        sum += t;
        if (t < rel_tol * sum) break;
    }
    return lt_peak + std::log(sum);
}

}  // namespace gafzero
