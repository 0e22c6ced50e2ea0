#pragma once

#include <string>
#include <vector>

#include "gafzero/gaf.hpp"
#include "gafzero/measure.hpp"
#include "gafzero/poly.hpp"
#include "gafzero/zeros.hpp"

namespace gafzero {

struct ChainViolation {
    std::string name;
    double margin = 0.0;  // lhs/rhs - 1, negative past the allowed slack
};

// Every line of the per-sample inequality chain for a witness polynomial f
// whose zero set contains Z_s(F): the weighted p-norm dominates the radial
// geometric-mean functional, which in turn dominates the functional of F
// after rescaling by the constant terms, giving |f(0)|/||f|| <= ratio_bound.
struct ChainReport {
    double lhs_norm_p = 0.0;       // ||f||_{A^p(mu,s)}^p
    double geo_functional_f = 0.0;
    double jensen_product_f = 0.0;  // per-circle Jensen product of f at r = s
    double jensen_product_F = 0.0;  // same for the sample F
    double ratio_bound = 0.0;       // |F(0)| * geo_functional_F^{-1/p}
    std::vector<ChainViolation> violations;

    std::string to_json() const;
};

// (int_0^s int |f(r e^{2 pi i t})|^p dt dmu)^{1/p}: circle means through the
// trapezoid rule, the radial factor through the panel quadrature. The
// default options are leaner than the raw quadrature's: the integrand is a
// circle mean, smooth in r and itself costly, and 32-point panels already
// sit at spectral accuracy.
IntegralResult ap_norm(const Poly& f, const RadialMeasure& mu, double p, double s,
                       QuadratureOptions opts = {32, 1e-9, 2});

// int_0^s exp(int log |f(r e^{2 pi i t})|^p dt) dmu, each circle evaluated
// exactly from the roots; panel edges sit on the root moduli where the
// integrand has kinks.
IntegralResult geometric_mean_functional(const Poly& f, const RadialMeasure& mu, double p,
                                         double s);

// Relative disagreement between the trapezoid route and the root-formula
// route for the circle geometric mean at radius r. Requires f(0) != 0 and
// every root at least 1e-6 away from the circle.
double jensen_identity_residual(const Poly& f, double r);

ChainReport amgm_chain_report(const GafSample& F, const Poly& f, const RadialMeasure& mu,
                              double p, double s);

}  // namespace gafzero
