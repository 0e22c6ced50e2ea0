#include "gafzero/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace gafzero {

bool Poly::is_zero() const {
    for (const cplx& v : c)
        if (v != cplx(0.0, 0.0)) return false;
    return true;
}

void Poly::trim(double eps) {
    while (!c.empty() && std::abs(c.back()) <= eps) c.pop_back();
}

cplx Poly::eval(cplx z) const {
    cplx acc(0.0, 0.0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
    return acc;
}

void Poly::eval_with_derivative(cplx z, cplx& value, cplx& deriv) const {
    cplx p(0.0, 0.0), d(0.0, 0.0);
    for (std::size_t i = c.size(); i-- > 0;) {
        d = d * z + p;
        p = p * z + c[i];
    }
    value = p;
    deriv = d;
}

Poly Poly::derivative() const {
    if (c.size() <= 1) return Poly{};
    std::vector<cplx> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * double(i);
    return Poly(std::move(d));
}

Poly Poly::operator*(const Poly& rhs) const {
    if (c.empty() || rhs.c.empty()) return Poly{};
    std::vector<cplx> out(c.size() + rhs.c.size() - 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < rhs.c.size(); ++j) out[i + j] += c[i] * rhs.c[j];
    return Poly(std::move(out));
}

Poly Poly::operator+(const Poly& rhs) const {
    std::vector<cplx> out(std::max(c.size(), rhs.c.size()), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < c.size(); ++i) out[i] += c[i];
    for (std::size_t i = 0; i < rhs.c.size(); ++i) out[i] += rhs.c[i];
    return Poly(std::move(out));
}

Poly poly_from_roots(const std::vector<cplx>& roots, cplx leading) {
    std::vector<cplx> c{leading};
    for (const cplx& w : roots) {
        c.push_back(c.back());
        for (std::size_t i = c.size() - 2; i > 0; --i) c[i] = c[i - 1] - w * c[i];
        c[0] = -w * c[0];
    }
    return Poly(std::move(c));
}

void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_pow2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / double(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<cplx> eval_on_circle(const Poly& p, double r, int K, int* K_used) {
    std::size_t n = 1;
    const std::size_t need = std::max<std::size_t>(std::max(K, 1), p.c.size());
    while (n < need) n <<= 1;
    std::vector<cplx> a(n, cplx(0.0, 0.0));
    double rn = 1.0;
    for (std::size_t i = 0; i < p.c.size(); ++i) {
        a[i] = p.c[i] * rn;
        rn *= r;
    }
    // DFT with kernel e^{+2*pi*i*jk/n} so slot k holds p(r*e^{2*pi*i*k/n}).
    fft_pow2(a, +1);
    if (K_used) *K_used = static_cast<int>(n);
    return a;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace gafzero
