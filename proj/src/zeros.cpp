#include "gafzero/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace gafzero {

namespace {

constexpr double kClusterRadius = 1e-8;
constexpr double kBoundaryBand = 1e-6;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Horner pass over |c_i| at |z|; the natural magnitude scale for deciding
// whether a residual f(z) is "numerically zero" at z.
double abs_scale(const std::vector<cplx>& c, double az) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * az + std::abs(c[i]);
    return std::max(acc, 1e-300);
}

struct ReducedPoly {
    std::vector<cplx> c;  // coefficients with the z^origin_mult factor removed
    int origin_mult = 0;
};

// Strips leading coefficients below 1e-300 (degree reduction) and exact zero
// trailing coefficients (roots at the origin, recorded as a multiplicity).
ReducedPoly reduce(const Poly& f) {
    if (f.is_zero()) throw std::invalid_argument("zeros: zero polynomial");
    ReducedPoly out;
    out.c = f.c;
    while (out.c.size() > 1 && std::abs(out.c.back()) < 1e-300) out.c.pop_back();
    while (out.c.size() > 1 && std::abs(out.c.front()) == 0.0) {
        out.c.erase(out.c.begin());
        ++out.origin_mult;
    }
    if (out.c.size() == 1 && std::abs(out.c[0]) == 0.0)
        throw std::invalid_argument("zeros: zero polynomial");
    return out;
}

void sort_clusters(std::vector<RootCluster>& cs) {
    std::sort(cs.begin(), cs.end(), [](const RootCluster& a, const RootCluster& b) {
        double ma = std::abs(a.location), mb = std::abs(b.location);
        if (ma != mb) return ma < mb;
        return std::arg(a.location) < std::arg(b.location);
    });
}

// Greedy single-linkage clustering at kClusterRadius. Input points need not
// be sorted; output is sorted by (|z|, arg).
std::vector<RootCluster> cluster_points(const std::vector<cplx>& pts, const Poly& f) {
    const std::size_t n = pts.size();
    std::vector<int> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(pts[i] - pts[j]) <= kClusterRadius) {
                int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
                if (a != b) parent[a] = b;
            }

    std::vector<RootCluster> out;
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int root = find(static_cast<int>(i));
        if (seen[root]) continue;
        seen[root] = 1;
        cplx sum = 0.0;
        int count = 0;
        cplx best = pts[i];
        double best_res = std::abs(f.eval(pts[i]));
        for (std::size_t j = 0; j < n; ++j)
            if (find(static_cast<int>(j)) == root) {
                sum += pts[j];
                ++count;
                double res = std::abs(f.eval(pts[j]));
                if (res < best_res) {
                    best_res = res;
                    best = pts[j];
                }
            }
        RootCluster rc;
        // For a simple root the lowest-residual member is the best estimate;
        // for a genuine cluster the members straddle the true multiple root
        // and their mean cancels the splitting error.
        rc.location = (count == 1) ? best : sum / static_cast<double>(count);
        rc.multiplicity = count;
        out.push_back(rc);
    }
    sort_clusters(out);
    return out;
}

struct WindingResult {
    int winding = 0;
    int nodes = 0;
    std::vector<cplx> vals;  // f on the circle at the certified node count
};

// Phase-tracked winding number on |z| = s. Certifies only when every phase
// increment stays below pi/2 and the accumulated phase closes to a whole
// number of turns. Returns false when node doubling hits max_nodes.
bool try_winding(const Poly& f, double s, int start_nodes, int max_nodes, WindingResult& out) {
    int K = 1;
    while (K < std::max(start_nodes, f.degree() + 1)) K <<= 1;
    for (; K <= max_nodes; K <<= 1) {
        int used = 0;
        std::vector<cplx> vals = eval_on_circle(f, s, K, &used);
        double maxv = 0.0;
        for (const cplx& v : vals) maxv = std::max(maxv, std::abs(v));
        if (maxv == 0.0) return false;
        bool ok = true;
        double total = 0.0;
        for (int k = 0; k < used && ok; ++k) {
            const cplx a = vals[k];
            const cplx b = vals[(k + 1) % used];
            if (std::abs(a) < 1e-290 * maxv || std::abs(b) < 1e-290 * maxv) {
                ok = false;
                break;
            }
            double d = std::arg(b / a);
            if (std::abs(d) >= 1.5707963267948966) ok = false;
            total += d;
        }
        if (!ok) continue;
        double turns = total / kTwoPi;
        long long w = std::llround(turns);
        if (std::abs(turns - static_cast<double>(w)) > 1e-6) continue;
        out.winding = static_cast<int>(w);
        out.nodes = used;
        out.vals = std::move(vals);
        return true;
    }
    return false;
}

// Up to `iters` Newton steps on f, keeping the best iterate by scaled
// residual. Safe at multiple roots: a step that worsens the residual is
// simply not kept.
cplx newton_polish(const Poly& f, cplx z, int iters, double* res_out = nullptr) {
    cplx best = z;
    double best_res = std::abs(f.eval(z)) / abs_scale(f.c, std::abs(z));
    for (int it = 0; it < iters; ++it) {
        cplx v, d;
        f.eval_with_derivative(z, v, d);
        if (std::abs(d) == 0.0) break;
        z -= v / d;
        double res = std::abs(f.eval(z)) / abs_scale(f.c, std::abs(z));
        if (res < best_res) {
            best_res = res;
            best = z;
        }
    }
    if (res_out) *res_out = best_res;
    return best;
}

ZeroMultiset build_multiset(const Poly& f, double s, std::vector<RootCluster> all_roots) {
    ZeroMultiset out;
    out.radius = s;
    int origin_mult = 0;
    int inside = 0;
    bool boundary = false;
    for (const RootCluster& rc : all_roots) {
        double m = std::abs(rc.location);
        if (m == 0.0) {
            origin_mult += rc.multiplicity;
            continue;
        }
        if (std::abs(m - s) <= kBoundaryBand) boundary = true;
        if (m < s) {
            out.zeros.push_back(rc);
            inside += rc.multiplicity;
        }
    }
    double res = 0.0;
    for (const RootCluster& rc : out.zeros)
        if (rc.multiplicity == 1) res = std::max(res, std::abs(f.eval(rc.location)));
    out.residual = res;
    if (boundary) {
        out.certified = false;
    } else {
        try {
            out.certified = (count_zeros_disk(f, s) == inside + origin_mult);
        } catch (const std::exception&) {
            out.certified = false;
        }
    }
    return out;
}

}  // namespace

int ZeroMultiset::total_multiplicity() const {
    int t = 0;
    for (const RootCluster& rc : zeros) t += rc.multiplicity;
    return t;
}

std::string ZeroMultiset::to_json() const {
    nlohmann::ordered_json j;
    j["radius"] = radius;
    j["certified"] = certified;
    auto arr = nlohmann::ordered_json::array();
    for (const RootCluster& rc : zeros)
        arr.push_back({rc.location.real(), rc.location.imag(), rc.multiplicity});
    j["zeros"] = std::move(arr);
    j["residual"] = residual;
    return j.dump();
}

std::vector<RootCluster> find_roots(const Poly& f) {
    ReducedPoly rp = reduce(f);
    const int n = static_cast<int>(rp.c.size()) - 1;
    if (n > 2000) throw std::invalid_argument("find_roots: degree > 2000");

    std::vector<RootCluster> clusters;
    if (n > 0) {
        const Poly p{std::vector<cplx>(rp.c)};
        // Scaled-circle start: the geometric mean of the root moduli, angles
        // offset off the axes so symmetric inputs do not start on a symmetry
        // line of the iteration.
        double r0 = std::pow(std::abs(rp.c[0] / rp.c[n]), 1.0 / n);
        if (!std::isfinite(r0) || r0 == 0.0) r0 = 1.0;
        std::vector<cplx> z(n);
        for (int j = 0; j < n; ++j) {
            double th = kTwoPi * j / n + 1.5707963267948966 / n + 0.31;
            z[j] = r0 * cplx(std::cos(th), std::sin(th));
        }

        bool converged = false;
        std::vector<cplx> val(n), der(n);
        for (int sweep = 0; sweep < 500 && !converged; ++sweep) {
            converged = true;
            for (int j = 0; j < n; ++j) p.eval_with_derivative(z[j], val[j], der[j]);
            for (int j = 0; j < n; ++j) {
                double scale = abs_scale(rp.c, std::abs(z[j]));
                if (std::abs(val[j]) <= 4e-15 * scale) continue;  // parked on a root
                cplx newton;
                if (std::abs(der[j]) == 0.0) {
                    z[j] *= cplx(1.0 + 1e-6, 1e-6);  // off the critical point
                    converged = false;
                    continue;
                }
                newton = val[j] / der[j];
                cplx sum = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == j) continue;
                    cplx diff = z[j] - z[k];
                    if (std::abs(diff) < 1e-290) diff = cplx(1e-290, 0.0);
                    sum += 1.0 / diff;
                }
                cplx denom = 1.0 - newton * sum;
                cplx step = (std::abs(denom) > 1e-290) ? newton / denom : newton;
                z[j] -= step;
                if (std::abs(step) > 1e-14 * (1.0 + std::abs(z[j]))) converged = false;
            }
        }
        if (!converged) {
            // Multiple roots stall the sweep criterion at the cluster scale;
            // accept anyway when every iterate sits on a numerical zero.
            for (int j = 0; j < n; ++j)
                if (std::abs(p.eval(z[j])) > 1e-10 * abs_scale(rp.c, std::abs(z[j])))
                    throw std::runtime_error("find_roots: no convergence after 500 sweeps");
        }

        for (int j = 0; j < n; ++j) z[j] = newton_polish(p, z[j], 3);
        clusters = cluster_points(z, p);
    }

    if (rp.origin_mult > 0) {
        RootCluster origin;
        origin.location = 0.0;
        origin.multiplicity = rp.origin_mult;
        clusters.insert(clusters.begin(), origin);
    }
    return clusters;
}

int count_zeros_disk(const Poly& f, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("count_zeros_disk: s must be positive");
    ReducedPoly rp = reduce(f);
    Poly g{std::move(rp.c)};
    WindingResult wr;
    if (!try_winding(g, s, 128, 1 << 23, wr))
        throw std::invalid_argument(
            "count_zeros_disk: winding not certifiable; root within ~1e-6 of |z| = s?");
    return wr.winding + rp.origin_mult;
}

ZeroMultiset zero_multiset(const Poly& f, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("zero_multiset: s must be positive");
    return build_multiset(f, s, find_roots(f));
}

ZeroMultiset zero_multiset_contour(const Poly& f, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("zero_multiset: s must be positive");
    ReducedPoly rp = reduce(f);
    const int n = static_cast<int>(rp.c.size()) - 1;
    if (n <= 24) return zero_multiset(f, s);

    const Poly g{std::vector<cplx>(rp.c)};
    WindingResult wr;
    if (!try_winding(g, s, std::max(128, n + 1), 1 << 15, wr)) return zero_multiset(f, s);
    const int k = wr.winding;
    if (k < 0 || k > 30) return zero_multiset(f, s);

    ZeroMultiset out;
    out.radius = s;
    if (k == 0) {
        out.certified = true;
        return out;
    }

    // Contour power sums of the inside zeros: p_m = (1/K) sum_j z_j^{m+1}
    // g'(z_j)/g(z_j) on z_j = s e^{2*pi*i*j/K}. Exact origin zeros were
    // stripped into rp.origin_mult and contribute nothing for m >= 1.
    const Poly gd = g.derivative();
    int used = 0;
    std::vector<cplx> dvals = eval_on_circle(gd, s, wr.nodes, &used);
    if (used != wr.nodes) return zero_multiset(f, s);
    std::vector<cplx> psum(k + 1, 0.0);
    for (int j = 0; j < used; ++j) {
        double th = kTwoPi * j / used;
        cplx zj = s * cplx(std::cos(th), std::sin(th));
        cplx ratio = dvals[j] / wr.vals[j];
        cplx zp = zj * zj;  // z^(m+1) starting at m = 1
        for (int m = 1; m <= k; ++m) {
            psum[m] += zp * ratio;
            zp *= zj;
        }
    }
    for (int m = 1; m <= k; ++m) psum[m] /= static_cast<double>(used);

    // Newton identities give the elementary symmetric functions, hence the
    // monic factor of g carrying exactly the inside zeros.
    std::vector<cplx> e(k + 1, 0.0);
    e[0] = 1.0;
    for (int m = 1; m <= k; ++m) {
        cplx acc = 0.0;
        double sign = 1.0;
        for (int i = 1; i <= m; ++i) {
            acc += sign * e[m - i] * psum[i];
            sign = -sign;
        }
        e[m] = acc / static_cast<double>(m);
    }
    std::vector<cplx> mc(k + 1);
    double sign = 1.0;
    for (int i = 0; i <= k; ++i) {
        mc[k - i] = sign * e[i];
        sign = -sign;
    }

    std::vector<RootCluster> small;
    try {
        small = find_roots(Poly{std::move(mc)});
    } catch (const std::exception&) {
        return zero_multiset(f, s);
    }

    std::vector<cplx> polished;
    double max_res = 0.0;
    for (const RootCluster& rc : small) {
        if (rc.multiplicity != 1) return zero_multiset(f, s);
        double rel = 0.0;
        cplx z = newton_polish(g, rc.location, 6, &rel);
        if (rel > 1e-9) return zero_multiset(f, s);
        double m = std::abs(z);
        if (std::abs(m - s) <= kBoundaryBand) return zero_multiset(f, s);
        if (m >= s || m == 0.0) return zero_multiset(f, s);
        polished.push_back(z);
        max_res = std::max(max_res, std::abs(f.eval(z)));
    }
    for (std::size_t i = 0; i < polished.size(); ++i)
        for (std::size_t j = i + 1; j < polished.size(); ++j)
            if (std::abs(polished[i] - polished[j]) <= kClusterRadius)
                return zero_multiset(f, s);

    for (const cplx& z : polished) {
        RootCluster rc;
        rc.location = z;
        rc.multiplicity = 1;
        out.zeros.push_back(rc);
    }
    sort_clusters(out.zeros);
    out.residual = max_res;
    out.certified = true;
    return out;
}

Poly monic_from_zeros(const ZeroMultiset& w) {
    std::vector<cplx> roots;
    for (const RootCluster& rc : w.zeros)
        for (int i = 0; i < rc.multiplicity; ++i) roots.push_back(rc.location);
    return poly_from_roots(roots);
}

}  // namespace gafzero
