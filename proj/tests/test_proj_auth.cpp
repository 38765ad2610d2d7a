// Projective-plane authentication: PG(2, q) incidence geometry, the base-line
// tag scheme, exhaustive forgery statistics, and the characteristic-2 tag
// completeness matrix.

#include <catch2/catch_amalgamated.hpp>

#include "mobius/proj_auth.hpp"

#include <map>
#include <set>
#include <vector>

using namespace mobius;

namespace {

template <typename Fn>
void expect_errc(errc want, Fn&& fn) {
    CHECK_THROWS_MATCHES(fn(), error, Catch::Matchers::Predicate<error>([want](const error& e) {
                             return e.code() == want;
                         }));
}

uint64_t key3(const std::array<FieldElem, 3>& v, uint64_t q) {
    return (v[0].v * q + v[1].v) * q + v[2].v;
}

} // namespace

TEST_CASE("PG(2, q) has q^2+q+1 points and lines with (q+1)-point incidence") {
    for (uint64_t q : {uint64_t{2}, uint64_t{3}, uint64_t{4}, uint64_t{5}}) {
        FieldCtx F = (q == 4) ? FieldCtx::make(2, 2) : FieldCtx::make(q, 1);
        std::vector<ProjPoint> pts = all_proj_points(F);
        std::vector<ProjLine> lines = all_proj_lines(F);
        uint64_t expected = q * q + q + 1;
        REQUIRE(pts.size() == expected);
        REQUIRE(lines.size() == expected);

        // Normalized coordinates are unique.
        std::set<uint64_t> seen;
        for (const ProjPoint& p : pts) {
            CHECK(p.x == detail::normalize3(F, p.x));
            seen.insert(key3(p.x, q));
        }
        CHECK(seen.size() == pts.size());

        // Every line carries exactly q+1 points; every point lies on q+1 lines.
        for (const ProjLine& l : lines) {
            uint64_t on = 0;
            for (const ProjPoint& p : pts) on += incident(F, p, l) ? 1 : 0;
            CHECK(on == q + 1);
        }
        for (const ProjPoint& p : pts) {
            uint64_t through = 0;
            for (const ProjLine& l : lines) through += incident(F, p, l) ? 1 : 0;
            CHECK(through == q + 1);
        }

        // Join and meet invert each other and respect incidence.
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j) {
                ProjLine l = pline_through(F, pts[i], pts[j]);
                CHECK(incident(F, pts[i], l));
                CHECK(incident(F, pts[j], l));
            }
        for (size_t i = 0; i < lines.size(); ++i)
            for (size_t j = i + 1; j < lines.size(); ++j) {
                ProjPoint p = pline_meet(F, lines[i], lines[j]);
                CHECK(incident(F, p, lines[i]));
                CHECK(incident(F, p, lines[j]));
            }
    }
}

TEST_CASE("tags authenticate and verify against the correct key only") {
    for (uint64_t q : {uint64_t{3}, uint64_t{4}}) {
        FieldCtx F = (q == 4) ? FieldCtx::make(2, 2) : FieldCtx::make(q, 1);
        AuthContext ctx = make_auth_context(F);
        std::vector<ProjPoint> msgs = auth_messages(ctx);
        std::vector<ProjPoint> keys = auth_keys(ctx);
        REQUIRE(msgs.size() == q + 1);
        REQUIRE(keys.size() == q * q);

        for (const ProjPoint& m : msgs) CHECK(incident(ctx.F, m, ctx.L0));
        for (const ProjPoint& k : keys) CHECK_FALSE(incident(ctx.F, k, ctx.L0));

        for (const ProjPoint& m : msgs)
            for (const ProjPoint& k : keys) {
                ProjLine tag = authenticate(ctx, m, k);
                CHECK(tag != ctx.L0);
                CHECK(auth_verify(ctx, tag, k));
                // The tag pins the message down: its meet with L0 is m.
                CHECK(pline_meet(ctx.F, tag, ctx.L0) == m);
            }

        // A tag made under one key verifies under exactly q keys (all keys on
        // the tag line), which is why forgery probability cannot reach zero.
        ProjLine tag = authenticate(ctx, msgs[0], keys[0]);
        uint64_t accepting = 0;
        for (const ProjPoint& k : keys) accepting += auth_verify(ctx, tag, k) ? 1 : 0;
        CHECK(accepting == q);
    }
}

TEST_CASE("authentication rejects misplaced messages, keys, and tags") {
    FieldCtx F = FieldCtx::make(3, 1);
    AuthContext ctx = make_auth_context(F);
    ProjPoint on_line = proj_point(F, F.one(), F.elem(2), F.zero());
    ProjPoint off_line = proj_point(F, F.one(), F.elem(2), F.one());

    expect_errc(errc::message_not_on_base_line, [&] { return authenticate(ctx, off_line, off_line); });
    expect_errc(errc::key_on_base_line, [&] { return authenticate(ctx, on_line, on_line); });
    expect_errc(errc::key_on_base_line, [&] { return auth_verify(ctx, proj_line(F, F.one(), F.zero(), F.zero()), on_line); });
    expect_errc(errc::tag_is_base_line, [&] { return auth_verify(ctx, ctx.L0, off_line); });
}

TEST_CASE("forgery statistics are exactly 1/q with q consistent keys per tag") {
    for (uint64_t q : {uint64_t{2}, uint64_t{3}, uint64_t{4}}) {
        FieldCtx F = (q == 4) ? FieldCtx::make(2, 2) : FieldCtx::make(q, 1);
        AuthContext ctx = make_auth_context(F);
        ForgeryReport rep = forgery_stats(ctx);

        CHECK(rep.q == q);
        CHECK(rep.n0 == q * q);
        CHECK(rep.impersonation == Rational(1, int64_t(q)));
        CHECK(rep.substitution == Rational(1, int64_t(q)));
        CHECK(rep.consistent_keys_min == q);
        CHECK(rep.consistent_keys_max == q);
        CHECK(rep.sqrt_n0 == q);
        CHECK(rep.perfect);
    }
}

TEST_CASE("forgery statistics agree with a direct recount at q=3") {
    FieldCtx F = FieldCtx::make(3, 1);
    AuthContext ctx = make_auth_context(F);
    std::vector<ProjPoint> msgs = auth_messages(ctx);
    std::vector<ProjPoint> keys = auth_keys(ctx);

    // Impersonation by hand: for every candidate tag that is a legal
    // authentication of some message, count keys it verifies under.
    uint64_t best_hits = 0;
    for (const ProjPoint& m : msgs)
        for (const ProjPoint& k : keys) {
            ProjLine tag = authenticate(ctx, m, k);
            uint64_t hits = 0;
            for (const ProjPoint& kk : keys) hits += auth_verify(ctx, tag, kk) ? 1 : 0;
            best_hits = std::max(best_hits, hits);
        }
    ForgeryReport rep = forgery_stats(ctx);
    CHECK(rep.impersonation == Rational(int64_t(best_hits), int64_t(keys.size())));

    // Substitution by hand: observe tag(m, k); try every tag' for m' != m and
    // count the fraction of consistent keys that also accept tag'.
    Rational best_sub(0);
    for (const ProjPoint& m : msgs)
        for (const ProjPoint& k0 : keys) {
            ProjLine seen = authenticate(ctx, m, k0);
            std::vector<ProjPoint> consistent;
            for (const ProjPoint& kk : keys)
                if (auth_verify(ctx, seen, kk)) consistent.push_back(kk);
            for (const ProjPoint& m2 : msgs) {
                if (m2 == m) continue;
                for (const ProjPoint& k2 : keys) {
                    ProjLine forged = authenticate(ctx, m2, k2);
                    uint64_t hits = 0;
                    for (const ProjPoint& kk : consistent) hits += auth_verify(ctx, forged, kk) ? 1 : 0;
                    Rational frac(int64_t(hits), int64_t(consistent.size()));
                    if (best_sub < frac) best_sub = frac;
                }
            }
        }
    CHECK(rep.substitution == best_sub);
}

TEST_CASE("characteristic-2 tag completeness holds with verifiable witnesses") {
    for (uint64_t n : {uint64_t{2}, uint64_t{3}}) {
        FieldCtx F = FieldCtx::make(2, n);
        AuthCompleteness ac = auth_completeness_matrix(F);
        REQUIRE(ac.n == n);
        CHECK(ac.all_true);
        REQUIRE(ac.witnesses.size() == n * n);

        // Re-verify every witness directly: flipping message bit i flips tag
        // slope bit j, with the key kept off the base line.
        for (const AuthWitness& w : ac.witnesses) {
            FieldElem x{w.x1}, k1{w.k1}, k2{w.k2}, s{w.s}, t{w.t};
            FieldElem xs = F.add(x, FieldElem{uint64_t(1) << w.i});
            REQUIRE(x != k1);
            REQUIRE(xs != k1);
            REQUIRE(F.add(F.add(F.mul(s, k1), t), k2) != F.zero());
            auto slope = [&](FieldElem xx) {
                return F.div(F.add(F.add(F.mul(s, xx), t), k2), F.add(xx, k1));
            };
            CHECK(slope(x).v == w.u);
            CHECK(slope(xs).v == w.u_shift);
            CHECK((((w.u ^ w.u_shift) >> w.j) & 1) == 1);
        }
    }
}

TEST_CASE("tag completeness guards its domain") {
    expect_errc(errc::wrong_characteristic, [] { return auth_completeness_matrix(FieldCtx::make(3, 2)); });
    expect_errc(errc::too_large, [] { return auth_completeness_matrix(FieldCtx::make(2, 6)); });
    expect_errc(errc::too_large, [] { return auth_completeness_matrix(FieldCtx::make(2, 1)); });
}
