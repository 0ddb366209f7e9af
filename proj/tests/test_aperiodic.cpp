#include "qmdyn/aperiodic.hpp"
#include "qmdyn/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qmdyn;

namespace {
const GroupSpec F2{2};

ReducedWord pw(const std::string& s) { return parse_word(F2, s); }

QuadExt qe(long long a, long long b) { return QuadExt(Rational(a), Rational(b), 2); }

// Brute-force (m, n)-grid oracle, independent of the pruned enumeration.
std::vector<QuadExt> oracle_enumerate(const ModelSet& P, long long R) {
    std::vector<QuadExt> out;
    for (long long m = -2 * R; m <= 2 * R; ++m) {
        for (long long n = -2 * R; n <= 2 * R; ++n) {
            if (!P.contains(m, n)) continue;
            QuadExt x(Rational(m), Rational(n), P.d);
            const QuadExt bound = QuadExt::rational(Rational(R), P.d);
            if (-bound <= x && x <= bound) out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace

TEST_CASE("model set membership") {
    const ModelSet P;  // d = 2, window [-1, 1]
    CHECK(P.contains(1, 1));       // star 1 - sqrt2 in [-1,1]
    CHECK_FALSE(P.contains(5, 0)); // star 5
    CHECK(P.contains(0, 0));
    CHECK(P.contains(qe(1, 1)));
    CHECK_FALSE(P.contains(QuadExt(Rational(1, 2), Rational(1), 2)));  // not a lattice point
}

TEST_CASE("enumeration matches the grid oracle") {
    const ModelSet P;
    SECTION("R = 20: frozen count 31") {
        const auto pts = enumerate_points(P, Rational(20));
        const auto want = oracle_enumerate(P, 20);
        REQUIRE(pts.size() == 31);
        REQUIRE(pts == want);
    }
    SECTION("R = 60: frozen count 87") {
        const auto pts = enumerate_points(P, Rational(60));
        REQUIRE(pts.size() == 87);
        REQUIRE(pts == oracle_enumerate(P, 60));
    }
    SECTION("asymmetric range") {
        const auto pts = enumerate_points(P, qe(3, 0), qe(20, 0));
        for (const auto& p : pts) {
            REQUIRE(qe(3, 0) <= p);
            REQUIRE(p <= qe(20, 0));
        }
        // consistent with the symmetric enumeration
        const auto all = enumerate_points(P, Rational(20));
        std::vector<QuadExt> filtered;
        for (const auto& p : all)
            if (qe(3, 0) <= p && p <= qe(20, 0)) filtered.push_back(p);
        REQUIRE(pts == filtered);
    }
}

TEST_CASE("model set symmetry: p in P iff -p in P") {
    const ModelSet P;
    const auto pts = enumerate_points(P, Rational(40));
    for (const auto& p : pts) REQUIRE(P.contains(-p));
}

TEST_CASE("delone statistics") {
    const ModelSet P;
    SECTION("d = 2, window [-1,1], R = 60: min gap 1, max gap 1 + sqrt2 (frozen)") {
        const auto pts = enumerate_points(P, Rational(60));
        const auto stats = delone_stats(pts, Rational(60), 2);
        CHECK(stats.min_gap == qe(1, 0));
        CHECK(stats.max_gap == qe(1, 1));
    }
    SECTION("a periodic comparison set has equal gaps") {
        // window huge: P becomes {m : m in Z} along the rational line for n=0,
        // emulated via a model set with window [-30, 30] restricted to small R:
        // every integer is a point, every sqrt2 multiple too; instead check
        // translation invariance of stats on the honest default set.
        const auto pts = enumerate_points(P, Rational(50));
        const auto base = delone_stats(pts, Rational(50), 2);
        // translate by a member p0: stats on the common shifted window agree
        const QuadExt p0 = qe(1, 1);  // in P
        REQUIRE(P.contains(p0));
        auto shifted = enumerate_points(P, QuadExt::rational(Rational(-50), 2) + p0,
                                        QuadExt::rational(Rational(50), 2) + p0);
        for (auto& p : shifted) p = p - p0;
        const auto moved = delone_stats(shifted, QuadExt::rational(Rational(-50), 2),
                                        QuadExt::rational(Rational(50), 2));
        CHECK(base.min_gap == moved.min_gap);
        CHECK(base.max_gap == moved.max_gap);
    }
    SECTION("too few points raises") {
        std::vector<QuadExt> one{qe(0, 0)};
        CHECK_THROWS_AS(delone_stats(one, Rational(1), 2), std::invalid_argument);
    }
}

TEST_CASE("approximate subgroup coverage") {
    const ModelSet P;
    SECTION("R = 80, C = 4 passes with zero witnesses (frozen)") {
        const auto rep = approx_subgroup_check(P, Rational(80), Rational(4));
        REQUIRE(rep.ok);
        REQUIRE(rep.witnesses.empty());
        CHECK(rep.cover.size() == 19);
    }
    SECTION("the covering set is symmetric and contains 0") {
        const auto F = covering_set(P, Rational(4));
        bool has_zero = false;
        for (const auto& f : F) {
            if (f == qe(0, 0)) has_zero = true;
            REQUIRE(std::find(F.begin(), F.end(), -f) != F.end());
        }
        REQUIRE(has_zero);
    }
    SECTION("an inadequate cutoff is detected") {
        const auto rep = approx_subgroup_check(P, Rational(80), Rational(1, 2));
        CHECK_FALSE(rep.ok);
        CHECK_FALSE(rep.witnesses.empty());
    }
}

TEST_CASE("twisted membership") {
    const auto phi = antisymmetrize(counting_qm(F2, pw("ab")));
    const TwistedSet T{phi, ModelSet{}};
    SECTION("(e, p) for p in P") {
        for (const auto& p : enumerate_points(T.P, Rational(15)))
            REQUIRE(twisted_member(T, ReducedWord(), p));
    }
    SECTION("(g, -phi(g)) is a member since 0 is in P") {
        for (const auto& g : ball(F2, 3))
            REQUIRE(twisted_member(T, g, QuadExt::rational(-phi.eval(g), 2)));
    }
    SECTION("a known non-member") {
        const auto g = pw("ab");  // phi = 1
        CHECK_FALSE(twisted_member(T, g, qe(4, 0)));  // 1 + 4 = 5, star 5 outside
    }
}

TEST_CASE("twisted fiber is the translated point set") {
    const auto phi = antisymmetrize(counting_qm(F2, pw("ab")));
    const TwistedSet T{phi, ModelSet{}};
    const auto g = pw("abab");  // phi = 2
    const auto fiber = twisted_fiber(T, g, Rational(20));
    REQUIRE_FALSE(fiber.empty());
    for (const auto& t : fiber) REQUIRE(twisted_member(T, g, t));
}

TEST_CASE("twist approximate-subgroup check passes at L = 4, R = 30 (frozen)") {
    const auto phi = antisymmetrize(counting_qm(F2, pw("ab")));
    const TwistedSet T{phi, ModelSet{}};
    const auto rep = twist_approx_check(T, F2, 4, Rational(30));
    REQUIRE(rep.ok);
    REQUIRE(rep.witnesses.empty());
    // identity coverage and identity membership
    CHECK(twisted_member(T, ReducedWord(), qe(0, 0)));
}

TEST_CASE("twist fibers share identical gap statistics across B_3") {
    const auto phi = antisymmetrize(counting_qm(F2, pw("ab")));
    const TwistedSet T{phi, ModelSet{}};
    const auto rep = twist_delone_check(T, F2, 3, Rational(60));
    REQUIRE(rep.identical);
    CHECK(rep.fibers.front().stats.min_gap == qe(1, 0));
    CHECK(rep.fibers.front().stats.max_gap == qe(1, 1));
    CHECK(rep.fibers.size() == 53);
}

TEST_CASE("skew patches") {
    const auto phi = antisymmetrize(counting_qm(F2, pw("ab")));
    const ModelSet P;
    SECTION("patch at the base point is the twisted set window") {
        const auto fp = fingerprint(phi, F2, 2);
        const auto patch = skew_pi(fp, P, qe(0, 0), 2, Rational(10));
        const TwistedSet T{phi, P};
        for (const auto& e : patch) REQUIRE(twisted_member(T, e.g, e.t));
        // completeness: every member in the window appears
        std::size_t count = 0;
        for (const auto& g : ball(F2, 2)) count += twisted_fiber(T, g, Rational(10)).size();
        REQUIRE(patch.size() == count);
    }
    SECTION("zero function gives the same fiber everywhere") {
        const auto zero = homomorphism_qm(F2, {Rational(0), Rational(0)});
        const auto fp = fingerprint(zero, F2, 1);
        const auto patch = skew_pi(fp, P, qe(0, 0), 1, Rational(10));
        const auto base = enumerate_points(P, Rational(10));
        REQUIRE(patch.size() == base.size() * ball(F2, 1).size());
    }
    SECTION("radius precondition") {
        const auto fp = fingerprint(phi, F2, 1);
        CHECK_THROWS_AS(skew_pi(fp, P, qe(0, 0), 2, Rational(5)), std::invalid_argument);
    }
}

TEST_CASE("skew equivariance on seeded samples") {
    // (g0, t0).(psi, P) has patch equal to the (g0, t0)-translate of the
    // base patch on the common window; checked by direct two-sided
    // computation for seeded (g0, t0).
    const auto phi = antisymmetrize(counting_qm(F2, pw("ab")));
    const ModelSet P;
    const int Lw = 4;
    const Rational Rt = 20, R0 = 10;
    const auto fp = fingerprint(phi, F2, Lw);
    const auto moves = ball(F2, 2);
    const auto coords = enumerate_points(P, R0);
    SplitMix64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const ReducedWord& g0 = moves[rng.next() % moves.size()];
        const QuadExt& t0 = coords[rng.next() % coords.size()];
        const int Lw2 = Lw - g0.length();
        const Rational Rt2 = Rt - R0;

        const auto fpB = fingerprint(act(g0, phi), F2, Lw2);
        const QuadExt shift = QuadExt::rational(phi.eval(g0), 2) + t0;
        const auto patchB = skew_pi(fpB, P, shift, Lw2, Rt2);

        std::vector<PatchEntry> expected;
        for (const auto& g : ball(F2, Lw2)) {
            const QuadExt offset = QuadExt::rational(fp.value_at(mul(g, g0)), 2);
            auto pts = enumerate_points(P, QuadExt::rational(-Rt2, 2) + offset + t0,
                                        QuadExt::rational(Rt2, 2) + offset + t0);
            for (const auto& pp : pts) expected.push_back({g, pp - offset - t0});
        }
        REQUIRE(patchB.size() == expected.size());
        for (std::size_t k = 0; k < patchB.size(); ++k) {
            REQUIRE(patchB[k].g == expected[k].g);
            REQUIRE(patchB[k].t == expected[k].t);
        }
    }
}

TEST_CASE("separation of hull points") {
    const auto phi = antisymmetrize(counting_qm(F2, pw("ab")));
    SECTION("a fingerprint never differs from itself") {
        const auto fp = fingerprint(phi, F2, 3);
        CHECK_FALSE(separation_check(fp, fp).has_value());
    }
    SECTION("phi vs a.phi has a witness within B_3") {
        const auto f1 = fingerprint(phi, F2, 3);
        const auto f2 = fingerprint(act(pw("a"), phi), F2, 3);
        const auto witness = separation_check(f1, f2);
        REQUIRE(witness.has_value());
        CHECK(f1.value_at(*witness) != f2.value_at(*witness));
    }
    SECTION("homomorphisms are fixed points: no witness") {
        const auto h = homomorphism_qm(F2, {Rational(1), Rational(-1)});
        const auto f1 = fingerprint(h, F2, 3);
        const auto f2 = fingerprint(act(pw("ba"), h), F2, 3);
        CHECK_FALSE(separation_check(f1, f2).has_value());
    }
    SECTION("radius mismatch raises") {
        const auto f1 = fingerprint(phi, F2, 2);
        const auto f2 = fingerprint(phi, F2, 3);
        CHECK_THROWS_AS(separation_check(f1, f2), std::invalid_argument);
    }
}
