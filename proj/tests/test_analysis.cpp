#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gafzero/analysis.hpp"
#include "gafzero/coeffs.hpp"
#include "gafzero/gaf.hpp"
#include "gafzero/rng.hpp"
#include "gafzero/zeros.hpp"
#include "json.hpp"

using namespace gafzero;

namespace {

Poly random_poly(RandomStream& rng, int deg, double lift = 1.0) {
    std::vector<cplx> c(deg + 1);
    for (auto& v : c) v = rng.next_complex_gaussian();
    c[0] += cplx(lift);  // keep f(0) away from 0
    c.back() += cplx(1.0);
    return Poly{c};
}

}  // namespace

TEST_CASE("ap_norm closed cases") {
    Poly one{{cplx(1.0)}};
    auto r1 = ap_norm(one, RadialMeasure::disk(), 2.0, 1.0);
    CHECK(r1.value == doctest::Approx(1.0).epsilon(1e-10));

    Poly z{{cplx(0.0), cplx(1.0)}};
    auto r2 = ap_norm(z, RadialMeasure::disk(), 2.0, 1.0);
    CHECK(r2.value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));

    auto r3 = ap_norm(z, RadialMeasure::fock(2.0, 1.7), 2.0,
                      std::numeric_limits<double>::infinity());
    CHECK(r3.value == doctest::Approx(1.0 / std::sqrt(1.7)).epsilon(1e-9));

    // odd p: the angular mean of |z| is r itself, so the norm is exact
    auto r4 = ap_norm(z, RadialMeasure::disk(), 1.0, 1.0);
    CHECK(r4.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("ap_norm odd-p angular means match the trapezoid ladder") {
    // An atom measure turns ap_norm at p = 1 into a plain weighted sum of
    // angular means, which circle_mean_power can reproduce independently.
    // 0.5005 sits a hair off a zero modulus, where the two quadratures take
    // completely different node layouts.
    Poly f = poly_from_roots({cplx(0.5), cplx(0.0, -0.3), cplx(0.1, 0.7)});
    const std::vector<Atom> atoms{{0.2, 0.4}, {0.5005, 0.3}, {0.62, 0.2}, {0.85, 0.1}};
    const auto mu = RadialMeasure::atoms(atoms);
    double direct = 0.0;
    for (const Atom& a : atoms) direct += a.weight * circle_mean_power(f, a.radius, 1.0);
    auto got = ap_norm(f, mu, 1.0, 0.9);
    CHECK(got.value == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("geometric_mean_functional closed cases") {
    Poly c{{cplx(3.0)}};
    auto r1 = geometric_mean_functional(c, RadialMeasure::disk(), 1.5, 1.0);
    CHECK(r1.value == doctest::Approx(std::pow(3.0, 1.5)).epsilon(1e-10));

    Poly z{{cplx(0.0), cplx(1.0)}};
    auto r2 = geometric_mean_functional(z, RadialMeasure::disk(), 2.0, 1.0);
    CHECK(r2.value == doctest::Approx(0.5).epsilon(1e-10));

    Poly zm2{{cplx(-2.0), cplx(1.0)}};
    auto r3 = geometric_mean_functional(zm2, RadialMeasure::disk(), 1.0, 1.0);
    CHECK(r3.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("weighted norm dominates the geometric-mean functional") {
    RandomStream rng(404, 0);
    for (int trial = 0; trial < 8; ++trial) {
        Poly f = random_poly(rng, 2 + int(rng.next_u64() % 5));
        for (const auto& mu : {RadialMeasure::disk(), RadialMeasure::bergman(1.0)})
            for (double p : {1.0, 2.0})
                for (double s : {0.7, 1.0}) {
                    const double np = std::pow(ap_norm(f, mu, p, s).value, p);
                    const double geo = geometric_mean_functional(f, mu, p, s).value;
                    CHECK(np >= geo * (1.0 - 1e-8));
                }
    }
}

TEST_CASE("both functionals grow with the outer radius") {
    RandomStream rng(405, 0);
    Poly f = random_poly(rng, 5);
    const auto mu = RadialMeasure::disk();
    CHECK(ap_norm(f, mu, 1.0, 0.5).value < ap_norm(f, mu, 1.0, 0.9).value);
    CHECK(geometric_mean_functional(f, mu, 1.0, 0.5).value <
          geometric_mean_functional(f, mu, 1.0, 0.9).value);
}

TEST_CASE("circle geometric means are log-additive under products") {
    RandomStream rng(406, 0);
    for (int trial = 0; trial < 6; ++trial) {
        Poly f = random_poly(rng, 3);
        Poly g = random_poly(rng, 4);
        for (double r : {0.4, 0.9}) {
            const double lhs = circle_mean_log(f * g, r, 1.0);
            const double rhs = circle_mean_log(f, r, 1.0) * circle_mean_log(g, r, 1.0);
            CHECK(std::abs(lhs / rhs - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("jensen_identity_residual routes agree") {
    const cplx w = 0.4 * std::polar(1.0, 0.8);
    CHECK(jensen_identity_residual(Poly{{-w, cplx(1.0)}}, 0.7) < 1e-8);
    CHECK(jensen_identity_residual(Poly{{cplx(5.0)}}, 0.5) < 1e-12);

    RandomStream rng(407, 0);
    Poly f = random_poly(rng, 30);
    CHECK(jensen_identity_residual(f, 0.9) < 1e-6);

    CHECK_THROWS_AS(jensen_identity_residual(Poly{{cplx(0.0), cplx(1.0)}}, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(jensen_identity_residual(Poly{{cplx(-0.9), cplx(1.0)}}, 0.9),
                    std::invalid_argument);
}

TEST_CASE("chain report for the constant sample") {
    GafSample F = sample_gaf(CoefficientSequence::basis(), 0.9, 12, 0);
    Poly one{{cplx(1.0)}};
    ChainReport rep = amgm_chain_report(F, one, RadialMeasure::disk(), 2.0, 0.9);
    CHECK(rep.violations.empty());
    // chain collapses to mass(0,0.9) on both radial lines
    CHECK(rep.lhs_norm_p == doctest::Approx(0.81).epsilon(1e-9));
    CHECK(rep.geo_functional_f == doctest::Approx(0.81).epsilon(1e-9));
    CHECK(rep.ratio_bound == doctest::Approx(1.0 / 0.9).epsilon(1e-9));
}

TEST_CASE("chain report holds sample-wise for zero witnesses") {
    const auto a = CoefficientSequence::unit();
    const auto mu = RadialMeasure::disk();
    for (int i = 0; i < 40; ++i) {
        GafSample F = sample_gaf(a, 0.9, 2026, i);
        ZeroMultiset w = zero_multiset_contour(F.poly(), 0.9);
        if (!w.certified) continue;
        Poly witness = monic_from_zeros(w);
        ChainReport r1 = amgm_chain_report(F, witness, mu, 1.0, 0.9);
        CHECK(r1.violations.empty());

        Poly shifted = witness * Poly{{cplx(2.0), cplx(1.0)}};  // extra non-vanishing factor
        ChainReport r2 = amgm_chain_report(F, shifted, mu, 2.0, 0.9);
        CHECK(r2.violations.empty());
    }
}

TEST_CASE("chain report rejects broken containment") {
    GafSample F = sample_gaf(CoefficientSequence::unit(), 0.9, 2026, 1);
    ZeroMultiset w = zero_multiset_contour(F.poly(), 0.9);
    REQUIRE(w.certified);
    REQUIRE(!w.zeros.empty());
    Poly one{{cplx(1.0)}};
    CHECK_THROWS_AS(amgm_chain_report(F, one, RadialMeasure::disk(), 1.0, 0.9),
                    std::invalid_argument);
}

TEST_CASE("chain report serializes each line") {
    GafSample F = sample_gaf(CoefficientSequence::basis(), 0.9, 12, 0);
    ChainReport rep = amgm_chain_report(F, Poly{{cplx(1.0)}}, RadialMeasure::disk(), 2.0, 0.9);
    auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j.contains("lhs_norm_p"));
    CHECK(j.contains("geo_functional_f"));
    CHECK(j.contains("jensen_product_f"));
    CHECK(j.contains("jensen_product_F"));
    CHECK(j.contains("ratio_bound"));
    CHECK(j["violations"].is_array());
}
