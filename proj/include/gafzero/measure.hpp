#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace gafzero {

// Radial weight on (0, r_max): the angular part is always normalized
// Lebesgue measure on the circle, so these weights fully describe the
// rotation-invariant measures the rest of the library integrates against.
//
// Kinds:
//   disk            2r dr on (0,1)
//   bergman(alpha)  2(1-r^2)^alpha dr on (0,1), alpha > -1
//   fock(p,alpha)   p*alpha*r*exp(-p*alpha*r^2/2) dr on (0,inf)
//   atoms           finite set of point masses
enum class MeasureKind { disk, bergman, fock, atoms };

struct Atom {
    double radius = 0.0;
    double weight = 0.0;
};

class RadialMeasure {
  public:
    // Parses "disk", "bergman:alpha=<f>", "fock:p=<f>,alpha=<f>",
    // "atoms:<r1>:<w1>[,<r2>:<w2>...]".
    static RadialMeasure parse(std::string_view descriptor);

    static RadialMeasure disk();
    static RadialMeasure bergman(double alpha);
    static RadialMeasure fock(double p, double alpha);
    static RadialMeasure atoms(std::vector<Atom> atoms);

    MeasureKind kind() const { return kind_; }

    // Upper endpoint of the radial domain: 1 for disk/bergman, +inf for
    // fock. Atom measures report +inf as well; the definition requires no
    // mass at the endpoint, which a maximal atom would violate.
    double r_max() const { return r_max_; }

    double alpha() const { return alpha_; }
    double fock_p() const { return p_; }
    const std::vector<Atom>& atom_list() const { return atoms_; }

    // Radial density w(r) for the continuous kinds.
    double density(double r) const;

    // Closed-form total mass (Beta function for bergman).
    double total_mass() const;

    std::string descriptor() const;

  private:
    RadialMeasure() = default;

    MeasureKind kind_ = MeasureKind::disk;
    double r_max_ = 1.0;
    double alpha_ = 0.0;  // bergman exponent or fock alpha
    double p_ = 0.0;      // fock p
    std::vector<Atom> atoms_;
};

struct IntegralResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool diverged = false;
};

struct QuadratureOptions {
    int nodes_per_panel = 256;
    double rel_tol = 1e-10;
    int max_doublings = 4;
};

// int_0^s g(r) dmu(r). Gauss-Legendre on geometrically graded panels; the
// fock kind is integrated in u = p*alpha*r^2/2 (truncated at u = 700) so
// the Gaussian weight is absorbed exactly, and the boundary panel of a
// bergman weight at s = 1 absorbs (1-r)^alpha by substitution.
//
// When s equals r_max the panel prefix sums double as a divergence probe:
// the result is flagged diverged when partial integrals pass 1e12 or the
// graded-panel increments stop decaying (covers both power-type blowup,
// where increments grow, and log-type blowup, where they stay constant).
// Detection assumes g is eventually of one sign near the endpoint.
// Power-law tails with decay slower than (distance)^1e-3 are beyond the
// resolution of the probe.
IntegralResult integrate_radial(const RadialMeasure& mu, const std::function<double(double)>& g,
                                double s, QuadratureOptions opts = {});

// Same engine on a sub-range (s_lo, s_hi]; used for additivity checks and
// grid increments.
IntegralResult integrate_radial_range(const RadialMeasure& mu, const std::function<double(double)>& g,
                                      double s_lo, double s_hi, QuadratureOptions opts = {});

// A materialized quadrature rule for repeated integrals against the same
// (mu, s): sum_i w[i]*h(r[i]) ~ int_0^s h dmu. Breakpoints force panel
// edges (callers pass known kink locations, e.g. root moduli). Panels are
// smooth between breakpoints, so modest per-panel orders are spectrally
// accurate. Requires finite s strictly below r_max for continuous kinds,
// except disk/bergman where s = 1 is allowed only when the integrand is
// known to be benign at the boundary (the caller's responsibility).
struct RadialRule {
    std::vector<double> r;
    std::vector<double> w;
};

RadialRule make_radial_rule(const RadialMeasure& mu, double s, const std::vector<double>& breakpoints,
                            int nodes_per_panel);

double apply_rule(const RadialRule& rule, const std::function<double(double)>& h);

// Gauss-Legendre nodes/weights on [-1,1], cached per order.
struct GLRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GLRule& gauss_legendre(int n);

}  // namespace gafzero
