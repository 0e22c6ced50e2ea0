#pragma once

#include <string>
#include <vector>

#include "gafzero/poly.hpp"

namespace gafzero {

struct RootCluster {
    cplx location;
    int multiplicity = 1;
};

// Zeros of f with 0 < |z| < s, counted with multiplicity. `certified` means
// an argument-principle count on |z| = s matched the multiset (plus the
// origin multiplicity, which the multiset itself excludes by definition) and
// no root sat within 1e-6 of the circle.
struct ZeroMultiset {
    std::vector<RootCluster> zeros;
    double radius = 0.0;
    bool certified = false;
    double residual = 0.0;

    int total_multiplicity() const;
    std::string to_json() const;
};

// All roots of f (origin included), clustered into multiple roots at radius
// 1e-8. Aberth-Ehrlich from a scaled-circle start, Newton polish. Throws
// std::runtime_error after 500 sweeps without convergence and
// std::invalid_argument for the zero polynomial or degree > 2000.
std::vector<RootCluster> find_roots(const Poly& f);

// Number of zeros with |z| < s, with multiplicity, by winding-number phase
// tracking on |z| = s. Adaptive node doubling; every phase increment must
// stay below pi/2. Throws std::invalid_argument when the phase cannot be
// certified (in practice: a root within ~1e-6 of the circle).
int count_zeros_disk(const Poly& f, double s);

ZeroMultiset zero_multiset(const Poly& f, double s);

// Same result as zero_multiset for well-separated zeros, but avoids the
// O(deg^2) global solve: winding count on |z| = s, contour power sums,
// Newton identities for the small monic factor carrying the inside zeros,
// then Newton polish against f itself. Falls back to zero_multiset whenever
// any step fails to certify. Intended for the Monte Carlo hot loops where
// deg(f) is large but only a handful of zeros lie inside the disk.
ZeroMultiset zero_multiset_contour(const Poly& f, double s);

Poly monic_from_zeros(const ZeroMultiset& w);

}  // namespace gafzero
