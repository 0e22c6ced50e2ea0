#include "doctest.h"
#include "gafzero/coeffs.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

using namespace gafzero;
using doctest::Approx;

TEST_CASE("coefficient descriptors round-trip") {
    for (const char* d : {"basis", "unit", "geom:rho=0.8", "fock:p=2,alpha=1",
                          "focklog:p=2,alpha=1,c=2", "dyadic:alpha=1,p=2",
                          "explicit:1,2,0.5", "unit;shift=3"}) {
        const CoefficientSequence a = CoefficientSequence::parse(d);
        CHECK(CoefficientSequence::parse(a.descriptor()).descriptor() == a.descriptor());
    }
    CHECK_THROWS_AS(CoefficientSequence::parse("geom:rho=0"), std::invalid_argument);
    CHECK_THROWS_AS(CoefficientSequence::parse("fock:p=2"), std::invalid_argument);
    CHECK_THROWS_AS(CoefficientSequence::parse("unknown:1"), std::invalid_argument);
}

TEST_CASE("individual coefficients") {
    CHECK(CoefficientSequence::basis().coeff(0) == 1.0);
    CHECK(CoefficientSequence::basis().coeff(5) == 0.0);
    CHECK(CoefficientSequence::basis().with_shift(2).coeff(0) == 0.0);
    CHECK(CoefficientSequence::geometric(0.5).coeff(3) == Approx(0.125).epsilon(1e-15));

    // fock p=2, alpha=1: a_n^2 = 1/n!
    const CoefficientSequence f = CoefficientSequence::fock(2.0, 1.0);
    CHECK(f.coeff(2) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(f.coeff(4) == Approx(1.0 / std::sqrt(24.0)).epsilon(1e-14));

    // the log-corrected variant divides a_n^2 by (log n)^c, log 2 below n=2
    const CoefficientSequence g = CoefficientSequence::fock_log(2.0, 1.0, 2.0);
    CHECK(g.coeff(0) == Approx(1.0 / std::log(2.0)).epsilon(1e-14));
    CHECK(g.coeff(5) == Approx(f.coeff(5) / std::log(5.0)).epsilon(1e-14));

    // dyadic support: powers of two only, a_{2^L}^2 = 2^{2L(alpha+1)/p} L^{-2/p}
    const CoefficientSequence d = CoefficientSequence::dyadic(1.0, 2.0);
    CHECK(d.coeff(3) == 0.0);
    CHECK(d.coeff(1) == 0.0);
    CHECK(d.coeff(2) == Approx(2.0).epsilon(1e-14));
    CHECK(d.coeff(4) == Approx(std::sqrt(8.0)).epsilon(1e-14));
}

TEST_CASE("radii of convergence") {
    CHECK(CoefficientSequence::unit().radius() == 1.0);
    CHECK(CoefficientSequence::geometric(0.5).radius() == 2.0);
    CHECK(CoefficientSequence::geometric(2.0).radius() == 0.5);
    CHECK(std::isinf(CoefficientSequence::basis().radius()));
    CHECK(std::isinf(CoefficientSequence::fock(2.0, 1.0).radius()));
    CHECK(CoefficientSequence::dyadic(1.0, 2.0).radius() == 1.0);
}

TEST_CASE("weighted l2 norms at a radius") {
    CHECK(CoefficientSequence::unit().weighted_l2_norm(0.6) == Approx(1.25).epsilon(1e-14));
    CHECK(CoefficientSequence::explicit_list({1.0, 2.0, 0.5}).weighted_l2_norm(0.5) ==
          Approx(1.4197270864500684).epsilon(1e-14));
    // fock p=2, alpha=1 sums to e^{r^2}: norm at r = 1.3 is e^{0.845}
    CHECK(CoefficientSequence::fock(2.0, 1.0).weighted_l2_norm(1.3) ==
          Approx(2.3279778145702347).epsilon(1e-12));
    CHECK_THROWS_AS(CoefficientSequence::unit().weighted_l2_norm(1.0), std::domain_error);

    // log route agrees with the direct route where both exist
    for (const char* d : {"unit", "geom:rho=0.9", "explicit:1,0,3", "dyadic:alpha=0.5,p=1"}) {
        const CoefficientSequence a = CoefficientSequence::parse(d);
        const double r = 0.77;
        CHECK(std::exp(0.5 * a.log_weighted_l2_norm_sq(r)) ==
              Approx(a.weighted_l2_norm(r)).epsilon(1e-12));
    }
}

TEST_CASE("shift reindexes the sequence") {
    const CoefficientSequence u = CoefficientSequence::unit().with_shift(4);
    CHECK(u.coeff(0) == 1.0);
    CHECK(u.weighted_l2_norm(0.6) == Approx(1.25).epsilon(1e-14));
    const CoefficientSequence g = CoefficientSequence::geometric(0.5).with_shift(2);
    CHECK(g.coeff(0) == Approx(0.25).epsilon(1e-15));
    CHECK(g.coeff(1) == Approx(0.125).epsilon(1e-15));
}

TEST_CASE("root growth bound") {
    CHECK(CoefficientSequence::unit().root_growth_bound(100) == Approx(1.0).epsilon(1e-12));
    CHECK(CoefficientSequence::geometric(0.7).root_growth_bound(100) == Approx(0.7).epsilon(1e-12));
}

TEST_CASE("lp norms against closed forms") {
    const RadialMeasure disk = RadialMeasure::disk();
    const CoefficientSequence unit = CoefficientSequence::unit();

    // p=2, s=0.9: integral of 2r/(1-r^2) up to s is -log(1-s^2)
    auto l2 = lp_radial_norm(unit, disk, 2.0, 0.9);
    CHECK_FALSE(l2.diverged);
    CHECK(l2.value == Approx(1.2886936047104645).epsilon(1e-10));

    // p=1 survives the boundary singularity: int 2r (1-r^2)^{-1/2} dr = 2
    auto l1 = lp_radial_norm(unit, disk, 1.0, 1.0);
    CHECK_FALSE(l1.diverged);
    CHECK(l1.value == Approx(2.0).epsilon(1e-6));

    // p=2 at s=1 diverges logarithmically
    CHECK(lp_radial_norm(unit, disk, 2.0, 1.0).diverged);

    // basis sequence integrates the measure itself
    auto b = lp_radial_norm(CoefficientSequence::basis(), disk, 2.0, 0.5);
    CHECK(b.value == Approx(0.5).epsilon(1e-10));

    // evaluation past the radius of convergence diverges without quadrature
    auto beyond = lp_radial_norm(unit, RadialMeasure::fock(2.0, 1.0), 2.0, 3.0);
    CHECK(beyond.diverged);
}

TEST_CASE("flexible construction on the disk") {
    const RadialMeasure disk = RadialMeasure::disk();
    const FlexibleSequence fs = flexible_sequence(disk, 1.0, 3);
    REQUIRE(fs.blocks().size() == 3);
    long double prev = 0.0L;
    for (const FlexibleBlock& blk : fs.blocks()) {
        CHECK(blk.n > prev);
        prev = blk.n;
        CHECK(blk.residual < 1e-10);
        CHECK(blk.s > 0.0);
        CHECK(blk.s < 1.0);
    }
    // by construction each block contributes 2^{-k} to the p-mass:
    // the partial bound is sum_k 2^{-k min(1,p/2)} exactly
    const double expect = std::pow(2.0, -0.5) + 0.5 + std::pow(2.0, -1.5);
    CHECK(fs.partial_norm_bound() == Approx(expect).epsilon(1e-9));

    // the two moment routes agree on block norms for nearby exponents
    for (int k = 1; k <= 3; ++k) {
        const double q = 1.0 + std::pow(2.0, -k);
        CHECK(fs.log_block_norm(k, q, false) == Approx(fs.log_block_norm(k, q, true)).epsilon(1e-8));
    }
}

TEST_CASE("flexible construction under the gaussian weight") {
    const RadialMeasure fock = RadialMeasure::fock(2.0, 1.0);
    const FlexibleSequence fs = flexible_sequence(fock, 2.0, 3);
    REQUIRE(fs.blocks().size() == 3);
    for (const FlexibleBlock& blk : fs.blocks()) {
        CHECK(blk.residual < 1e-8);
        CHECK(blk.s > 0.0);
    }
    CHECK(fs.partial_norm_bound() == Approx(0.5 + 0.25 + 0.125).epsilon(1e-9));
}

TEST_CASE("flexible construction range limits") {
    CHECK_THROWS_AS(flexible_sequence(RadialMeasure::disk(), 1.0, 11), std::range_error);
    // atomic measures have no mass arbitrarily close to the edge radius
    CHECK_THROWS_AS(flexible_sequence(RadialMeasure::atoms({{0.5, 1.0}}), 1.0, 2),
                    std::runtime_error);
}

TEST_CASE("flexible blocks expose coefficients through the sequence view") {
    auto fs = std::make_shared<FlexibleSequence>(flexible_sequence(RadialMeasure::disk(), 2.0, 2));
    const CoefficientSequence a = CoefficientSequence::from_flexible(fs);
    CHECK(a.radius() == 1.0);
    const FlexibleBlock& blk = fs->blocks()[0];
    if (blk.n < 1e6L) {
        CHECK(a.coeff(std::int64_t(blk.n)) == Approx(double(expl(blk.log_b))).epsilon(1e-12));
    }
    CHECK(a.coeff(0) == 0.0);
}

TEST_CASE("mm dyadic criterion: verdicts agree across families") {
    // divergent pair
    auto bad = mm_dyadic_check(MMSequence::unit(), 2.0, 0.5, 30);
    CHECK(bad.integral.diverged);
    CHECK(bad.dyadic_sum.diverged);
    CHECK(bad.agree);

    // convergent pair with an exact integral value:
    // sum k r^k = r/(1-r)^2, q=1, alpha=2 gives int r dr = 1/2
    auto pw = mm_dyadic_check(MMSequence::power(1.0), 1.0, 2.0, 30);
    CHECK_FALSE(pw.integral.diverged);
    CHECK_FALSE(pw.dyadic_sum.diverged);
    CHECK(pw.agree);
    CHECK(pw.integral.value == Approx(0.5).epsilon(1e-8));

    auto geo = mm_dyadic_check(MMSequence::geometric(0.9), 3.0, 0.0, 30);
    CHECK(geo.agree);
    CHECK_FALSE(geo.integral.diverged);

    auto lac = mm_dyadic_check(MMSequence::lacunary(), 2.0, 0.3, 30);
    CHECK(lac.agree);
    CHECK_FALSE(lac.integral.diverged);

    auto one = mm_dyadic_check(MMSequence::basis(), 2.0, 1.0, 20);
    CHECK(one.agree);
    CHECK(one.integral.value == Approx(0.5).epsilon(1e-10));  // int (1-r)^1 dr
    CHECK(one.dyadic_sum.value == 0.0);
}

TEST_CASE("mm series evaluation") {
    // sum k^2 r^k = r(1+r)/(1-r)^3, checked on both summation branches
    const MMSequence p2 = MMSequence::power(2.0);
    CHECK(p2.eval_series(0.9) == Approx(1710.0).epsilon(1e-12));
    CHECK(p2.eval_series(0.999) == Approx(1997001000.0).epsilon(1e-10));
    CHECK(MMSequence::lacunary().eval_series(0.99) == Approx(6.3138998472365585).epsilon(1e-12));
    CHECK(MMSequence::unit().eval_series(0.5) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mm block sums cross the euler-maclaurin switch smoothly") {
    const MMSequence p = MMSequence::power(1.0);
    // exact: sum of k over [2^n, 2^{n+1}) = 3*4^n/2 - 2^{n-1}
    for (int n : {3, 10, 21, 25, 30}) {
        const double a = std::ldexp(1.0, n);
        const double exact = 1.5 * a * a - 0.5 * a;
        CHECK(p.block_sum(n) == Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("stokes ratio closed forms") {
    // b=0: e^{-t} sum_{n>=1} t^n/Gamma(n) = t e^{-t} e^t = t
    CHECK(stokes_ratio(10.0, 0.0, 0.0, 2000) == Approx(10.0).epsilon(1e-12));
    // b=2: e^{-t} t^2 (e^t - 1)/t = t(1 - e^{-t})
    CHECK(stokes_ratio(5.0, 2.0, 0.0, 2000) == Approx(4.9663102650045727).epsilon(1e-12));
    CHECK(stokes_ratio(30.0, 1.0, 1.0, 5000) > 0.0);
    CHECK_THROWS_AS(stokes_ratio(10000.0, 0.0, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(stokes_ratio(0.5, 0.0, 1.0, 100), std::invalid_argument);
}

TEST_CASE("horowitz statistic picks the best prefix") {
    const double v = horowitz_statistic({0.5, 1.0, 2.0}, 1.0, 100);
    CHECK(v == Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(horowitz_statistic({1.0, 0.5}, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(horowitz_statistic({}, 1.0, 10), std::invalid_argument);
}
