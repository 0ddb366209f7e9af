// Exact cut-and-project model sets in R over a quadratic irrational, Delone
// gap statistics, approximate-subgroup coverage checks, twisted subsets of
// Gamma x R, and finite patches of the skew-product realization map.
#pragma once

#include "qmdyn/qm.hpp"
#include "qmdyn/quadext.hpp"
#include "qmdyn/rational.hpp"
#include "qmdyn/words.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qmdyn {

/// P = {m + n sqrt(d) : m - n sqrt(d) in [window_lo, window_hi]}.
/// Membership is exact; the default window is [-1, 1].
struct ModelSet {
    int d = 2;
    Rational window_lo{-1};
    Rational window_hi{1};

    ModelSet() = default;
    ModelSet(int d_, Rational lo, Rational hi)
        : d(d_), window_lo(std::move(lo)), window_hi(std::move(hi)) {
        if (d < 2 || is_square(d)) throw std::invalid_argument("ModelSet: d must be a non-square >= 2");
        if (!(window_lo < window_hi)) throw std::invalid_argument("ModelSet: empty window");
    }

    bool contains(long long m, long long n) const {
        const QuadExt st(Rational(m), Rational(-n), d);
        return QuadExt::rational(window_lo, d) <= st && st <= QuadExt::rational(window_hi, d);
    }

    bool contains(const QuadExt& x) const {
        if (x.d() != d) throw std::invalid_argument("ModelSet: mixed field extensions");
        if (!x.is_lattice_point()) return false;
        const QuadExt st = x.star();
        return QuadExt::rational(window_lo, d) <= st && st <= QuadExt::rational(window_hi, d);
    }
};

namespace detail {

// Rational bracket [lo, hi] around sqrt(d), tight enough for range pruning.
inline std::pair<Rational, Rational> sqrt_bracket(int d) {
    const BigInt scale = BigInt(1) << 40;
    BigInt target = BigInt(d) * scale * scale;
    BigInt lo = 0, hi = BigInt(d) * scale + 1;
    while (lo + 1 < hi) {  // largest s with s^2 <= d * scale^2
        BigInt mid = (lo + hi) / 2;
        if (mid * mid <= target) lo = mid;
        else hi = mid;
    }
    return {Rational(lo, scale), Rational(lo + 1, scale)};
}

inline long long floor_rational(const Rational& x) {
    return rational_floor(x).convert_to<long long>();
}

}  // namespace detail

/// All points of P in [lo, hi], exact and sorted.
inline std::vector<QuadExt> enumerate_points(const ModelSet& P, const QuadExt& lo,
                                             const QuadExt& hi) {
    if (lo.d() != P.d || hi.d() != P.d)
        throw std::invalid_argument("enumerate_points: mixed field extensions");
    if (hi < lo) throw std::invalid_argument("enumerate_points: empty range");
    const auto [s_lo, s_hi] = detail::sqrt_bracket(P.d);

    // Rational outer bounds for lo/hi themselves.
    const auto outer = [&](const QuadExt& x, bool upper) {
        const Rational& s = (x.b() >= 0) == upper ? s_hi : s_lo;
        return x.a() + x.b() * s;
    };
    const Rational lo_r = outer(lo, false), hi_r = outer(hi, true);

    // 2m = x + star(x) lies in [lo + wlo, hi + whi]; 2n sqrt(d) = x - star(x).
    const long long m_min = detail::floor_rational((lo_r + P.window_lo) / 2);
    const long long m_max = detail::floor_rational((hi_r + P.window_hi) / 2) + 1;

    std::vector<QuadExt> out;
    for (long long m = m_min; m <= m_max; ++m) {
        // Window constraint: m - whi <= n sqrt(d) <= m - wlo.
        const Rational n_lo_r = (Rational(m) - P.window_hi) / s_hi;
        const Rational n_hi_r = (Rational(m) - P.window_lo) / s_lo;
        const long long n_min = detail::floor_rational(n_lo_r) - 1;
        const long long n_max = detail::floor_rational(n_hi_r) + 1;
        for (long long n = n_min; n <= n_max; ++n) {
            if (!P.contains(m, n)) continue;
            QuadExt x(Rational(m), Rational(n), P.d);
            if (lo <= x && x <= hi) out.push_back(std::move(x));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<QuadExt> enumerate_points(const ModelSet& P, const Rational& R) {
    return enumerate_points(P, QuadExt::rational(-R, P.d), QuadExt::rational(R, P.d));
}

struct GapStats {
    QuadExt min_gap, max_gap;
    std::size_t point_count = 0;
    std::size_t interior_gap_count = 0;

    friend bool operator==(const GapStats& x, const GapStats& y) {
        return x.min_gap == y.min_gap && x.max_gap == y.max_gap;
    }
};

/// Exact min/max consecutive gap over the interior of the enumeration range:
/// gaps whose endpoints come within one (preliminary) max-gap of the range
/// boundary are discarded as truncation artifacts.
inline GapStats delone_stats(const std::vector<QuadExt>& points, const QuadExt& lo,
                             const QuadExt& hi) {
    if (points.size() < 2) throw std::invalid_argument("delone_stats: need at least two points");
    QuadExt margin = points[1] - points[0];
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        QuadExt g = points[i + 1] - points[i];
        if (margin < g) margin = g;
    }
    const QuadExt in_lo = lo + margin, in_hi = hi - margin;
    GapStats stats;
    stats.point_count = points.size();
    bool first = true;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i] < in_lo || in_hi < points[i + 1]) continue;
        QuadExt g = points[i + 1] - points[i];
        if (first) {
            stats.min_gap = g;
            stats.max_gap = g;
            first = false;
        } else {
            if (g < stats.min_gap) stats.min_gap = g;
            if (stats.max_gap < g) stats.max_gap = g;
        }
        ++stats.interior_gap_count;
    }
    if (first) throw std::invalid_argument("delone_stats: no interior gaps in range");
    return stats;
}

inline GapStats delone_stats(const std::vector<QuadExt>& points, const Rational& R, int d) {
    return delone_stats(points, QuadExt::rational(-R, d), QuadExt::rational(R, d));
}

/// The finite covering set used in product-coverage checks: the model set
/// with the doubled-minus-one window (W+W)-W, cut at physical radius C.
inline std::vector<QuadExt> covering_set(const ModelSet& P, const Rational& C) {
    ModelSet wide(P.d, 2 * P.window_lo - P.window_hi, 2 * P.window_hi - P.window_lo);
    return enumerate_points(wide, C);
}

struct ApproxCheckWitness {
    QuadExt p, q;  // a pairwise sum p + q not covered by P + F
};

struct ApproxCheckReport {
    bool ok = false;
    std::vector<QuadExt> cover;  // F
    std::size_t pair_count = 0;
    std::vector<ApproxCheckWitness> witnesses;
};

namespace detail {

// Sorted star values of a covering set, with the interval query
// "is some f-star inside [lo, hi]?" answered by binary search.
struct StarCover {
    std::vector<QuadExt> stars;  // ascending

    explicit StarCover(const std::vector<QuadExt>& cover) {
        stars.reserve(cover.size());
        for (const auto& f : cover) stars.push_back(f.star());
        std::sort(stars.begin(), stars.end());
    }

    bool hits(const QuadExt& lo, const QuadExt& hi) const {
        auto it = std::lower_bound(stars.begin(), stars.end(), lo);
        return it != stars.end() && *it <= hi;
    }
};

}  // namespace detail

/// Verifies P + P subset of P + F on the window: every pairwise sum p + q with
/// p, q in P intersect [-R/2, R/2] must be p' + f with p' in P, f in F.
/// Exact search; failures are reported, not thrown.
inline ApproxCheckReport approx_subgroup_check(const ModelSet& P, const Rational& R,
                                               const Rational& C,
                                               std::size_t max_witnesses = 8) {
    ApproxCheckReport report;
    report.cover = covering_set(P, C);
    const auto points = enumerate_points(P, R / 2);
    const detail::StarCover cover(report.cover);
    const QuadExt wlo = QuadExt::rational(P.window_lo, P.d);
    const QuadExt whi = QuadExt::rational(P.window_hi, P.d);

    std::vector<QuadExt> stars;
    stars.reserve(points.size());
    for (const auto& p : points) stars.push_back(p.star());

    report.ok = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) {
            // p + q - f in P  <=>  star(f) in [star(p+q) - whi, star(p+q) - wlo]
            const QuadExt s = stars[i] + stars[j];
            if (!cover.hits(s - whi, s - wlo)) {
                report.ok = false;
                if (report.witnesses.size() < max_witnesses)
                    report.witnesses.push_back({points[i], points[j]});
            }
            ++report.pair_count;
        }
    }
    return report;
}

/// P(phi) = {(g, t) : phi(g) + t in P} in Gamma x R, represented fiberwise.
/// phi must be integer-valued for the lattice membership predicate to land
/// in Z[sqrt(d)].
struct TwistedSet {
    Quasimorphism phi;
    ModelSet P;
};

inline bool twisted_member(const TwistedSet& T, const ReducedWord& g, const QuadExt& t) {
    const Rational v = T.phi.eval(g);
    return T.P.contains(QuadExt(t.a() + v, t.b(), t.d()));
}

/// Points of the fiber over g: {t in [-R, R] : phi(g) + t in P}, exact.
inline std::vector<QuadExt> twisted_fiber(const TwistedSet& T, const ReducedWord& g,
                                          const Rational& R) {
    const QuadExt shift = QuadExt::rational(T.phi.eval(g), T.P.d);
    auto pts = enumerate_points(T.P, QuadExt::rational(-R, T.P.d) + shift,
                                QuadExt::rational(R, T.P.d) + shift);
    for (auto& p : pts) p = p - shift;
    return pts;
}

struct TwistApproxWitness {
    ReducedWord g1, g2;
    QuadExt t1, t2;
};

struct TwistApproxReport {
    bool ok = false;
    std::size_t product_count = 0;
    std::vector<Rational> defects;   // defect set on B_L
    std::vector<QuadExt> cover;      // F
    std::vector<TwistApproxWitness> witnesses;
};

/// For all g1, g2 in B_{L/2} and all fiber points t_i in [-R, R], verifies
/// that (g1 g2, t1 + t2) lies in P(phi) . ({e} x (F + D_L(phi))) by exact
/// search over the covering set F and the window defect set D_L(phi).
inline TwistApproxReport twist_approx_check(const TwistedSet& T, const GroupSpec& spec, int L,
                                            const Rational& R, const Rational& C = Rational(4),
                                            std::size_t max_witnesses = 8) {
    if (!T.phi.integer_valued())
        throw std::invalid_argument("twist_approx_check: phi must be integer-valued");
    TwistApproxReport report;
    report.defects = defect_set(T.phi, spec, L);
    report.cover = covering_set(T.P, C);
    const detail::StarCover cover(report.cover);
    const QuadExt wlo = QuadExt::rational(T.P.window_lo, T.P.d);
    const QuadExt whi = QuadExt::rational(T.P.window_hi, T.P.d);

    const auto half = ball(spec, L / 2);
    std::vector<Rational> phis;
    std::vector<std::vector<QuadExt>> fibers(half.size());
    std::vector<std::vector<QuadExt>> fiber_stars(half.size());  // stars of the P-points
    for (std::size_t i = 0; i < half.size(); ++i) {
        phis.push_back(T.phi.eval(half[i]));
        fibers[i] = twisted_fiber(T, half[i], R);
        const QuadExt shift = QuadExt::rational(phis[i], T.P.d);
        for (const auto& t : fibers[i]) fiber_stars[i].push_back((t + shift).star());
    }

    report.ok = true;
    for (std::size_t i = 0; i < half.size(); ++i) {
        for (std::size_t j = 0; j < half.size(); ++j) {
            const Rational phi_prod = T.phi.eval(mul(half[i], half[j]));
            const QuadExt defect0 =
                QuadExt::rational(phi_prod - phis[i] - phis[j], T.P.d);
            for (std::size_t a = 0; a < fibers[i].size(); ++a) {
                for (std::size_t b = 0; b < fibers[j].size(); ++b) {
                    // star(phi(g1 g2) + t1 + t2)
                    //   = (phi(g1g2) - phi(g1) - phi(g2)) + star(p1) + star(p2)
                    const QuadExt s = defect0 + fiber_stars[i][a] + fiber_stars[j][b];
                    bool covered = false;
                    for (const Rational& dd : report.defects) {
                        const QuadExt shifted = s - QuadExt::rational(dd, T.P.d);
                        if (cover.hits(shifted - whi, shifted - wlo)) {
                            covered = true;
                            break;
                        }
                    }
                    if (!covered) {
                        report.ok = false;
                        if (report.witnesses.size() < max_witnesses)
                            report.witnesses.push_back(
                                {half[i], half[j], fibers[i][a], fibers[j][b]});
                    }
                    ++report.product_count;
                }
            }
        }
    }
    return report;
}

struct FiberGaps {
    ReducedWord g;
    GapStats stats;
};

struct TwistDeloneReport {
    bool identical = false;
    std::vector<FiberGaps> fibers;
};

/// Gap statistics of every fiber over B_L; fibers are translates of P, so
/// the statistics must agree exactly.
inline TwistDeloneReport twist_delone_check(const TwistedSet& T, const GroupSpec& spec, int L,
                                            const Rational& R) {
    TwistDeloneReport report;
    for (const auto& g : ball(spec, L)) {
        auto pts = twisted_fiber(T, g, R);
        report.fibers.push_back(
            {g, delone_stats(pts, QuadExt::rational(-R, T.P.d), QuadExt::rational(R, T.P.d))});
    }
    report.identical = true;
    for (const auto& f : report.fibers)
        if (!(f.stats == report.fibers.front().stats)) report.identical = false;
    return report;
}

struct PatchEntry {
    ReducedWord g;
    QuadExt t;
};

/// Finite patch of the realization map at a hull point: for psi given by a
/// fingerprint and a translate P - shift of the model set,
///   {(g, t) : g in B_Lw, t in [-Rt, Rt], psi(g) + t in P - shift}.
inline std::vector<PatchEntry> skew_pi(const Fingerprint& psi, const ModelSet& P,
                                       const QuadExt& shift, int Lw, const Rational& Rt) {
    if (psi.radius() < Lw) throw std::invalid_argument("skew_pi: fingerprint radius too small");
    if (shift.d() != P.d) throw std::invalid_argument("skew_pi: mixed field extensions");
    std::vector<PatchEntry> patch;
    for (const auto& g : ball(psi.spec(), Lw)) {
        const QuadExt offset = QuadExt::rational(psi.value_at(g), P.d) + shift;
        auto pts = enumerate_points(P, QuadExt::rational(-Rt, P.d) + offset,
                                    QuadExt::rational(Rt, P.d) + offset);
        for (const auto& p : pts) patch.push_back({g, p - offset});
    }
    return patch;
}

/// First window word (canonical order) where the fingerprints differ.
inline std::optional<ReducedWord> separation_check(const Fingerprint& f1,
                                                   const Fingerprint& f2) {
    if (f1.radius() != f2.radius() || !(f1.spec() == f2.spec()))
        throw std::invalid_argument("separation_check: radius mismatch");
    for (std::size_t i = 0; i < f1.words().size(); ++i)
        if (f1.values()[i] != f2.values()[i]) return f1.words()[i];
    return std::nullopt;
}

}  // namespace qmdyn
