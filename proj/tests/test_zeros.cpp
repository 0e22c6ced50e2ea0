#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gafzero/poly.hpp"
#include "gafzero/rng.hpp"
#include "gafzero/zeros.hpp"

#ifdef GAFZERO_HAVE_EIGEN
#include <Eigen/Eigenvalues>
#endif

using namespace gafzero;

namespace {

// Distance from each entry of `want` to its nearest cluster in `got`.
double match_distance(const std::vector<cplx>& want, const std::vector<RootCluster>& got) {
    double worst = 0.0;
    for (const cplx& w : want) {
        double best = 1e300;
        for (const RootCluster& rc : got) best = std::min(best, std::abs(w - rc.location));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TEST_CASE("find_roots on a symmetric pair") {
    Poly f{{cplx(-0.25), cplx(0.0), cplx(1.0)}};  // z^2 - 1/4
    auto roots = find_roots(f);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].multiplicity == 1);
    CHECK(roots[1].multiplicity == 1);
    CHECK(match_distance({cplx(0.5), cplx(-0.5)}, roots) < 1e-12);
}

TEST_CASE("find_roots merges a constructed double root") {
    Poly f = poly_from_roots({cplx(0.3), cplx(0.3), cplx(-0.4)});
    auto roots = find_roots(f);
    REQUIRE(roots.size() == 2);
    // sorted by modulus: 0.3 (double) before -0.4
    CHECK(roots[0].multiplicity == 2);
    CHECK(std::abs(roots[0].location - cplx(0.3)) < 1e-7);
    CHECK(roots[1].multiplicity == 1);
    CHECK(std::abs(roots[1].location - cplx(-0.4)) < 1e-10);
}

TEST_CASE("find_roots handles origin multiplicity and rejects bad input") {
    Poly cube{{cplx(0.0), cplx(0.0), cplx(0.0), cplx(1.0)}};  // z^3
    auto roots = find_roots(cube);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].location == cplx(0.0));
    CHECK(roots[0].multiplicity == 3);

    CHECK_THROWS_AS(find_roots(Poly{}), std::invalid_argument);
    std::vector<cplx> big(2002, cplx(0.0));
    big.front() = 1.0;
    big.back() = 1.0;
    CHECK_THROWS_AS(find_roots(Poly{big}), std::invalid_argument);
}

#ifdef GAFZERO_HAVE_EIGEN
TEST_CASE("find_roots matches the companion-matrix eigenvalue oracle") {
    RandomStream rng(2024, 7);
    const int n = 20;
    std::vector<cplx> c(n + 1);
    for (int i = 0; i <= n; ++i) c[i] = rng.next_complex_gaussian();
    c[n] += cplx(2.0);  // keep the leading coefficient comfortably away from 0

    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    std::vector<cplx> oracle;
    for (int i = 0; i < n; ++i) oracle.push_back(solver.eigenvalues()(i));

    auto roots = find_roots(Poly{c});
    int total = 0;
    for (const auto& rc : roots) total += rc.multiplicity;
    CHECK(total == n);
    CHECK(match_distance(oracle, roots) < 1e-9);
}
#endif

TEST_CASE("count_zeros_disk counts with multiplicity") {
    Poly f{{cplx(-0.25), cplx(0.0), cplx(1.0)}};
    CHECK(count_zeros_disk(f, 1.0) == 2);
    CHECK(count_zeros_disk(f, 0.4) == 0);
    Poly cube{{cplx(0.0), cplx(0.0), cplx(0.0), cplx(1.0)}};
    CHECK(count_zeros_disk(cube, 0.5) == 3);
    CHECK_THROWS_AS(count_zeros_disk(f, -1.0), std::invalid_argument);
}

TEST_CASE("zero_multiset filters to the punctured disk") {
    Poly f{{cplx(-0.25), cplx(0.0), cplx(1.0)}};
    auto w = zero_multiset(f, 1.0);
    REQUIRE(w.zeros.size() == 2);
    CHECK(w.certified);
    CHECK(w.residual < 1e-12);

    // origin excluded by definition but still certified through the count
    Poly g = Poly{{cplx(0.0), cplx(-0.5), cplx(1.0)}};  // z(z - 1/2)
    auto wg = zero_multiset(g, 1.0);
    REQUIRE(wg.zeros.size() == 1);
    CHECK(std::abs(wg.zeros[0].location - cplx(0.5)) < 1e-12);
    CHECK(wg.certified);

    auto we = zero_multiset(Poly{{cplx(-2.0), cplx(1.0)}}, 1.0);
    CHECK(we.zeros.empty());
    CHECK(we.certified);
}

TEST_CASE("zero_multiset flags boundary-band roots instead of guessing") {
    auto w = zero_multiset(Poly{{cplx(-0.9), cplx(1.0)}}, 0.9);
    CHECK(!w.certified);
}

TEST_CASE("monic_from_zeros expands multiplicities") {
    ZeroMultiset w;
    w.radius = 1.0;
    w.zeros.push_back({cplx(0.5), 1});
    w.zeros.push_back({cplx(-0.5), 1});
    Poly f = monic_from_zeros(w);
    REQUIRE(f.degree() == 2);
    CHECK(std::abs(f.c[0] - cplx(-0.25)) < 1e-15);
    CHECK(std::abs(f.c[1]) < 1e-15);
    CHECK(f.c[2] == cplx(1.0));

    ZeroMultiset empty;
    Poly one = monic_from_zeros(empty);
    REQUIRE(one.degree() == 0);
    CHECK(one.c[0] == cplx(1.0));

    ZeroMultiset dbl;
    dbl.zeros.push_back({cplx(0.3), 2});
    Poly h = monic_from_zeros(dbl);
    REQUIRE(h.degree() == 2);
    CHECK(std::abs(h.c[0] - cplx(0.09)) < 1e-15);
    CHECK(std::abs(h.c[1] - cplx(-0.6)) < 1e-15);
}

TEST_CASE("round trip through monic_from_zeros recovers the multiset") {
    RandomStream rng(11, 3);
    ZeroMultiset w;
    w.radius = 0.9;
    for (int i = 0; i < 50; ++i) {
        // uniform-ish points with moduli in (0.05, 0.85)
        double r = 0.05 + 0.8 * rng.next_uniform();
        double th = 6.283185307179586 * rng.next_uniform();
        w.zeros.push_back({r * cplx(std::cos(th), std::sin(th)), 1});
    }
    auto back = zero_multiset(monic_from_zeros(w), 0.9);
    CHECK(back.certified);
    REQUIRE(back.total_multiplicity() == 50);
    std::vector<cplx> want;
    for (const auto& rc : w.zeros) want.push_back(rc.location);
    CHECK(match_distance(want, back.zeros) < 1e-8);
}

TEST_CASE("contour route agrees with the global solve") {
    // degree 40, five zeros inside |z| < 0.5, the rest well outside
    RandomStream rng(5, 1);
    std::vector<cplx> roots;
    for (int i = 0; i < 5; ++i) {
        double r = 0.1 + 0.3 * rng.next_uniform();
        double th = 6.283185307179586 * rng.next_uniform();
        roots.push_back(r * cplx(std::cos(th), std::sin(th)));
    }
    for (int i = 0; i < 35; ++i) {
        double r = 0.7 + 1.3 * rng.next_uniform();
        double th = 6.283185307179586 * rng.next_uniform();
        roots.push_back(r * cplx(std::cos(th), std::sin(th)));
    }
    Poly f = poly_from_roots(roots);

    auto fast = zero_multiset_contour(f, 0.5);
    auto full = zero_multiset(f, 0.5);
    CHECK(fast.certified);
    CHECK(full.certified);
    REQUIRE(fast.zeros.size() == full.zeros.size());
    for (std::size_t i = 0; i < fast.zeros.size(); ++i)
        CHECK(std::abs(fast.zeros[i].location - full.zeros[i].location) < 1e-9);
}

TEST_CASE("zero multiset serializes in a fixed field order") {
    Poly f{{cplx(-0.25), cplx(0.0), cplx(1.0)}};
    auto w = zero_multiset(f, 1.0);
    std::string j = w.to_json();
    CHECK(j.find("\"radius\":1.0") != std::string::npos);
    CHECK(j.find("\"certified\":true") != std::string::npos);
    CHECK(j.find("\"zeros\":") < j.find("\"residual\":"));
}
