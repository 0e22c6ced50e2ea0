#include "doctest.h"
#include "gafzero/measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace gafzero;
using doctest::Approx;

TEST_CASE("measure parsing round-trips") {
    for (const char* d : {"disk", "bergman:alpha=1.5", "fock:p=2,alpha=1",
                          "atoms:0.5:1,0.9:2.25"}) {
        const RadialMeasure mu = RadialMeasure::parse(d);
        CHECK(RadialMeasure::parse(mu.descriptor()).descriptor() == mu.descriptor());
    }
    CHECK_THROWS_AS(RadialMeasure::parse("bergman:alpha=-1"), std::invalid_argument);
    CHECK_THROWS_AS(RadialMeasure::parse("fock:p=0,alpha=1"), std::invalid_argument);
    CHECK_THROWS_AS(RadialMeasure::parse("nonsense"), std::invalid_argument);
}

TEST_CASE("total masses") {
    CHECK(RadialMeasure::disk().total_mass() == Approx(1.0).epsilon(1e-14));
    CHECK(RadialMeasure::bergman(1.0).total_mass() == Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(RadialMeasure::bergman(0.5).total_mass() == Approx(1.5707963267948966).epsilon(1e-14));
    CHECK(RadialMeasure::fock(2.0, 1.0).total_mass() == Approx(1.0).epsilon(1e-14));
    CHECK(RadialMeasure::atoms({{0.5, 0.25}, {0.9, 0.5}}).total_mass() == Approx(0.75).epsilon(1e-15));
}

TEST_CASE("disk integrals with smooth integrands") {
    const RadialMeasure mu = RadialMeasure::disk();
    auto sq = integrate_radial(mu, [](double r) { return r * r; }, 1.0);
    CHECK_FALSE(sq.diverged);
    CHECK(sq.value == Approx(0.5).epsilon(1e-12));
    CHECK(sq.abs_error < 1e-8);

    auto ex = integrate_radial(mu, [](double r) { return std::exp(r); }, 1.0);
    CHECK(ex.value == Approx(2.0).epsilon(1e-12));

    auto part = integrate_radial_range(mu, [](double) { return 1.0; }, 0.3, 0.7);
    CHECK(part.value == Approx(0.4).epsilon(1e-12));
}

TEST_CASE("bergman moments match the beta function") {
    // int r^4 dmu_{3/2} = B(5/2, 5/2) = 3 pi / 128
    const RadialMeasure mu = RadialMeasure::bergman(1.5);
    auto m4 = integrate_radial(mu, [](double r) { return std::pow(r, 4.0); }, 1.0);
    CHECK(m4.value == Approx(0.073631077818510779).epsilon(1e-12));

    // boundary-singular but integrable against the weight:
    // int (1-r^2)^{-1/4} dmu_{1/2} = B(1/2, 5/4)
    const RadialMeasure mu2 = RadialMeasure::bergman(0.5);
    auto sing = integrate_radial(mu2, [](double r) { return std::pow(1.0 - r * r, -0.25); }, 1.0);
    CHECK_FALSE(sing.diverged);
    CHECK(sing.value == Approx(1.7480383695280799).epsilon(1e-10));
}

TEST_CASE("fock moments match gamma values") {
    const RadialMeasure mu = RadialMeasure::fock(2.0, 1.0);
    auto m3 = integrate_radial(mu, [](double r) { return r * r * r; },
                               std::numeric_limits<double>::infinity());
    CHECK(m3.value == Approx(1.3293403881791370).epsilon(1e-12));

    auto head = integrate_radial(mu, [](double) { return 1.0; }, 2.0);
    CHECK(head.value == Approx(1.0 - std::exp(-4.0)).epsilon(1e-12));
}

TEST_CASE("integrable boundary singularity on the disk uses the tail estimate") {
    // int 2r (1-r)^{-1/2} dr = 8/3
    auto res = integrate_radial(RadialMeasure::disk(),
                                [](double r) { return 1.0 / std::sqrt(1.0 - r); }, 1.0);
    CHECK_FALSE(res.diverged);
    CHECK(res.value == Approx(8.0 / 3.0).epsilon(1e-6));
    CHECK(res.abs_error > 0.0);  // geometric tail carries an explicit error bar
}

TEST_CASE("power divergence is detected") {
    auto res = integrate_radial(RadialMeasure::disk(),
                                [](double r) { return 1.0 / ((1.0 - r) * (1.0 - r)); }, 1.0);
    CHECK(res.diverged);
    CHECK(std::isinf(res.value));
}

TEST_CASE("logarithmic divergence is detected") {
    // int 2r/(1-r) dr: increments per graded panel tend to a constant
    auto res = integrate_radial(RadialMeasure::disk(), [](double r) { return 1.0 / (1.0 - r); }, 1.0);
    CHECK(res.diverged);

    // same profile against the bergman weight is integrable
    auto ok = integrate_radial(RadialMeasure::bergman(1.0), [](double r) { return 1.0 / (1.0 - r); }, 1.0);
    CHECK_FALSE(ok.diverged);
}

TEST_CASE("fock divergence when the integrand outruns the gaussian weight") {
    const RadialMeasure mu = RadialMeasure::fock(1.0, 2.0);  // weight exp(-r^2)
    auto res = integrate_radial(mu, [](double r) { return std::exp(std::min(700.0, 1.01 * r * r)); },
                                std::numeric_limits<double>::infinity());
    CHECK(res.diverged);
    auto ok = integrate_radial(mu, [](double r) { return std::exp(0.5 * r * r); },
                               std::numeric_limits<double>::infinity());
    CHECK_FALSE(ok.diverged);
    CHECK(ok.value == Approx(2.0).epsilon(1e-10));  // int 2r e^{-r^2/2} dr
}

TEST_CASE("atomic measures integrate exactly") {
    const RadialMeasure mu = RadialMeasure::atoms({{0.5, 2.0}, {1.5, 0.25}});
    auto all = integrate_radial(mu, [](double r) { return r; }, std::numeric_limits<double>::infinity());
    CHECK(all.value == 2.0 * 0.5 + 0.25 * 1.5);
    auto half = integrate_radial(mu, [](double r) { return r; }, 1.0);
    CHECK(half.value == 1.0);
}

TEST_CASE("upper limits outside the support are rejected") {
    CHECK_THROWS_AS(integrate_radial(RadialMeasure::disk(), [](double) { return 1.0; }, 1.5),
                    std::invalid_argument);
}

TEST_CASE("precomputed rules agree with the adaptive integrator") {
    const RadialMeasure mu = RadialMeasure::bergman(1.0);
    const RadialRule rule = make_radial_rule(mu, 0.95, {}, 48);
    auto direct = integrate_radial(mu, [](double r) { return std::cos(r); }, 0.95);
    const double via_rule = apply_rule(rule, [](double r) { return std::cos(r); });
    CHECK(via_rule == Approx(direct.value).epsilon(1e-11));
}
