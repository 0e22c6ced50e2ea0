#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gafzero {

using cplx = std::complex<double>;

// Dense polynomial with coefficients in ascending degree order.
// An empty coefficient vector is the zero polynomial (degree -1).
struct Poly {
    std::vector<cplx> c;

    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : c(std::move(coeffs)) {}

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const;

    // Drops trailing coefficients with |c_n| below `eps` (absolute).
    void trim(double eps = 0.0);

    cplx operator()(cplx z) const { return eval(z); }
    cplx eval(cplx z) const;

    // Evaluates p and p' in one Horner pass.
    void eval_with_derivative(cplx z, cplx& value, cplx& deriv) const;

    Poly derivative() const;
    Poly operator*(const Poly& rhs) const;
    Poly operator+(const Poly& rhs) const;
};

Poly poly_from_roots(const std::vector<cplx>& roots, cplx leading = 1.0);

// In-place radix-2 FFT, size must be a power of two. sign=-1 forward.
void fft_pow2(std::vector<cplx>& a, int sign);

// Values of p(r * e^{2*pi*i*k/K}) for k = 0..K-1; K is rounded up to a
// power of two internally and must end up >= deg(p)+1. Returns the K used
// through `K_used`.
std::vector<cplx> eval_on_circle(const Poly& p, double r, int K, int* K_used = nullptr);

double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

}  // namespace gafzero
