#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "field.hpp"
#include "rational.hpp"

namespace mobius {

// ---------------------------------------------------------------------------
// The projective plane PG(2, q) over F, in homogeneous coordinates normalized
// so the first nonzero entry is 1, and the line-based authentication scheme:
// messages are the points of a distinguished base line L0, keys are the q^2
// points off L0, and the tag for (m, k) is the line joining them.
// ---------------------------------------------------------------------------

struct ProjPoint {
    std::array<FieldElem, 3> x;

    friend bool operator==(const ProjPoint& a, const ProjPoint& b) { return a.x == b.x; }
    friend bool operator!=(const ProjPoint& a, const ProjPoint& b) { return !(a == b); }
};

struct ProjLine {
    std::array<FieldElem, 3> a; // incidence: a.x1 + b.x2 + c.x3 = 0

    friend bool operator==(const ProjLine& a, const ProjLine& b) { return a.a == b.a; }
    friend bool operator!=(const ProjLine& a, const ProjLine& b) { return !(a == b); }
};

namespace detail {

inline std::array<FieldElem, 3> normalize3(const FieldCtx& F, std::array<FieldElem, 3> v) {
    FieldElem lead = v[0];
    if (lead == F.zero()) lead = v[1];
    if (lead == F.zero()) lead = v[2];
    if (lead == F.zero()) fail(errc::internal, "zero homogeneous triple");
    FieldElem s = F.inv(lead);
    for (auto& c : v) c = F.mul(s, c);
    return v;
}

inline std::array<FieldElem, 3> cross3(const FieldCtx& F, const std::array<FieldElem, 3>& u,
                                       const std::array<FieldElem, 3>& v) {
    return {F.sub(F.mul(u[1], v[2]), F.mul(u[2], v[1])),
            F.sub(F.mul(u[2], v[0]), F.mul(u[0], v[2])),
            F.sub(F.mul(u[0], v[1]), F.mul(u[1], v[0]))};
}

} // namespace detail

inline ProjPoint proj_point(const FieldCtx& F, FieldElem x1, FieldElem x2, FieldElem x3) {
    return {detail::normalize3(F, {x1, x2, x3})};
}

inline ProjLine proj_line(const FieldCtx& F, FieldElem a1, FieldElem a2, FieldElem a3) {
    return {detail::normalize3(F, {a1, a2, a3})};
}

inline bool incident(const FieldCtx& F, const ProjPoint& p, const ProjLine& l) {
    FieldElem s = F.zero();
    for (int i = 0; i < 3; ++i) s = F.add(s, F.mul(p.x[size_t(i)], l.a[size_t(i)]));
    return s == F.zero();
}

inline ProjLine pline_through(const FieldCtx& F, const ProjPoint& p1, const ProjPoint& p2) {
    if (p1 == p2) fail(errc::identical_points, "two distinct points required");
    return {detail::normalize3(F, detail::cross3(F, p1.x, p2.x))};
}

inline ProjPoint pline_meet(const FieldCtx& F, const ProjLine& l1, const ProjLine& l2) {
    if (l1 == l2) fail(errc::identical_circles, "two distinct lines required");
    return {detail::normalize3(F, detail::cross3(F, l1.a, l2.a))};
}

/// All q^2 + q + 1 points, deterministic order: (1,y,z), then (0,1,z), then (0,0,1).
inline std::vector<ProjPoint> all_proj_points(const FieldCtx& F) {
    if (F.order() > 4096) fail(errc::too_large, "projective enumeration beyond desk scale");
    std::vector<ProjPoint> out;
    uint64_t q = F.order();
    out.reserve(size_t(q * q + q + 1));
    for (uint64_t y = 0; y < q; ++y)
        for (uint64_t z = 0; z < q; ++z) out.push_back({{F.one(), {y}, {z}}});
    for (uint64_t z = 0; z < q; ++z) out.push_back({{F.zero(), F.one(), {z}}});
    out.push_back({{F.zero(), F.zero(), F.one()}});
    return out;
}

/// All lines, via duality (same coordinate shapes).
inline std::vector<ProjLine> all_proj_lines(const FieldCtx& F) {
    std::vector<ProjLine> out;
    for (const ProjPoint& p : all_proj_points(F)) out.push_back({p.x});
    return out;
}

// ---------------------------------------------------------------------------
// Authentication scheme.
// ---------------------------------------------------------------------------

struct AuthContext {
    FieldCtx F;
    ProjLine L0; // base line x3 = 0: messages live on it, keys off it
};

inline AuthContext make_auth_context(FieldCtx F) {
    ProjLine L0{{F.zero(), F.zero(), F.one()}};
    return {std::move(F), L0};
}

inline std::vector<ProjPoint> auth_messages(const AuthContext& ctx) {
    const FieldCtx& F = ctx.F;
    std::vector<ProjPoint> out;
    for (uint64_t y = 0; y < F.order(); ++y) out.push_back({{F.one(), {y}, F.zero()}});
    out.push_back({{F.zero(), F.one(), F.zero()}});
    return out;
}

inline std::vector<ProjPoint> auth_keys(const AuthContext& ctx) {
    const FieldCtx& F = ctx.F;
    std::vector<ProjPoint> out;
    for (uint64_t a = 0; a < F.order(); ++a)
        for (uint64_t b = 0; b < F.order(); ++b)
            out.push_back(proj_point(F, {a}, {b}, F.one()));
    return out;
}

inline ProjLine authenticate(const AuthContext& ctx, const ProjPoint& m, const ProjPoint& k) {
    if (!incident(ctx.F, m, ctx.L0)) fail(errc::message_not_on_base_line, "message must lie on the base line");
    if (incident(ctx.F, k, ctx.L0)) fail(errc::key_on_base_line, "key must avoid the base line");
    return pline_through(ctx.F, m, k);
}

inline bool auth_verify(const AuthContext& ctx, const ProjLine& tag, const ProjPoint& k) {
    if (tag == ctx.L0) fail(errc::tag_is_base_line, "tag must differ from the base line");
    if (incident(ctx.F, k, ctx.L0)) fail(errc::key_on_base_line, "key must avoid the base line");
    return incident(ctx.F, k, tag);
}

// ---------------------------------------------------------------------------
// Exhaustive forgery statistics. Impersonation: best blind (message, tag)
// choice. Substitution: best (message', tag') after observing one valid tag.
// Both equal 1/q exactly, and every tag is consistent with exactly q keys
// (the square root of the key count, so the combinatorial bound is sharp).
// ---------------------------------------------------------------------------

struct ForgeryReport {
    uint64_t q = 0;
    uint64_t n0 = 0; // number of keys
    Rational impersonation{0};
    Rational substitution{0};
    uint64_t consistent_keys_min = 0;
    uint64_t consistent_keys_max = 0;
    uint64_t sqrt_n0 = 0;
    bool perfect = false;
};

inline ForgeryReport forgery_stats(const AuthContext& ctx) {
    const FieldCtx& F = ctx.F;
    uint64_t q = F.order();
    if (q > 8) fail(errc::too_large, "forgery enumeration beyond desk scale");
    std::vector<ProjPoint> keys = auth_keys(ctx);
    std::vector<ProjLine> tags;
    for (const ProjLine& l : all_proj_lines(F))
        if (l != ctx.L0) tags.push_back(l);

    ForgeryReport rep;
    rep.q = q;
    rep.n0 = keys.size();
    rep.sqrt_n0 = q;

    // Keys consistent with each tag.
    std::vector<uint64_t> consistent(tags.size(), 0);
    std::vector<std::vector<size_t>> keys_on(tags.size());
    for (size_t t = 0; t < tags.size(); ++t)
        for (size_t i = 0; i < keys.size(); ++i)
            if (incident(F, keys[i], tags[t])) {
                ++consistent[t];
                keys_on[t].push_back(i);
            }
    rep.consistent_keys_min = *std::min_element(consistent.begin(), consistent.end());
    rep.consistent_keys_max = *std::max_element(consistent.begin(), consistent.end());

    // Impersonation: the attacker submits any tag; success iff the secret key
    // lies on it.
    uint64_t best = 0;
    for (uint64_t c : consistent) best = std::max(best, c);
    rep.impersonation = Rational(int64_t(best), int64_t(keys.size()));

    // Substitution: having seen the valid tag for one message, substitute a
    // tag authenticating a different message (different meet with L0).
    Rational best_sub(0);
    auto meet_l0 = [&](const ProjLine& l) { return pline_meet(F, l, ctx.L0); };
    for (size_t t = 0; t < tags.size(); ++t) {
        ProjPoint mt = meet_l0(tags[t]);
        for (size_t u = 0; u < tags.size(); ++u) {
            if (u == t || meet_l0(tags[u]) == mt) continue;
            uint64_t hits = 0;
            for (size_t ki : keys_on[t])
                if (incident(F, keys[ki], tags[u])) ++hits;
            Rational p(int64_t(hits), int64_t(consistent[t]));
            if (p > best_sub) best_sub = p;
        }
    }
    rep.substitution = best_sub;
    rep.perfect = rep.impersonation == Rational(1, int64_t(q)) &&
                  rep.substitution == Rational(1, int64_t(q)) &&
                  rep.consistent_keys_min == q && rep.consistent_keys_max == q;
    return rep;
}

// ---------------------------------------------------------------------------
// Completeness of the tag parameter in characteristic 2. In the affine model
// the base line is y = s*x + t, a message is (x1, s*x1 + t), a key is
// (k1, k2) off the base line, and the tag's slope is
// u = (s*x1 + t + k2) / (x1 + k1). Entry (i, j) asks for a witness where
// flipping bit i of x1 flips bit j of u.
// ---------------------------------------------------------------------------

struct AuthWitness {
    unsigned i = 0, j = 0;
    uint64_t x1 = 0, k1 = 0, k2 = 0, s = 0, t = 0, u = 0, u_shift = 0;
};

struct AuthCompleteness {
    unsigned n = 0;
    std::vector<std::vector<bool>> entry; // n x n
    std::vector<AuthWitness> witnesses;   // one per true entry, row-major
    bool all_true = false;
};

inline AuthCompleteness auth_completeness_matrix(const FieldCtx& F) {
    if (F.p() != 2) fail(errc::wrong_characteristic, "tag completeness is a characteristic-2 statement");
    if (F.n() < 2 || F.n() > 5) fail(errc::too_large, "witness search beyond desk scale");
    unsigned n = unsigned(F.n());
    uint64_t q = F.order();
    AuthCompleteness out;
    out.n = n;
    out.entry.assign(n, std::vector<bool>(n, false));

    auto slope = [&](FieldElem x1, FieldElem k1, FieldElem k2, FieldElem s, FieldElem t) {
        FieldElem num = F.add(F.add(F.mul(s, x1), t), k2);
        return F.div(num, F.add(x1, k1));
    };

    for (unsigned i = 0; i < n; ++i) {
        for (unsigned j = 0; j < n; ++j) {
            FieldElem ei{uint64_t(1) << i};
            bool found = false;
            for (uint64_t x1 = 0; x1 < q && !found; ++x1)
                for (uint64_t k1 = 0; k1 < q && !found; ++k1) {
                    FieldElem x{x1}, k1e{k1};
                    FieldElem xs = F.add(x, ei);
                    if (x == k1e || xs == k1e) continue;
                    for (uint64_t s = 0; s < q && !found; ++s)
                        for (uint64_t t = 0; t < q && !found; ++t)
                            for (uint64_t k2 = 0; k2 < q && !found; ++k2) {
                                FieldElem se{s}, te{t}, k2e{k2};
                                // key off the base line
                                if (F.add(F.add(F.mul(se, k1e), te), k2e) == F.zero()) continue;
                                FieldElem u = slope(x, k1e, k2e, se, te);
                                FieldElem us = slope(xs, k1e, k2e, se, te);
                                if (((F.add(u, us).v >> j) & 1) == 0) continue;
                                // cross-check against the projective construction
                                ProjPoint m = proj_point(F, x, F.add(F.mul(se, x), te), F.one());
                                ProjPoint kp = proj_point(F, k1e, k2e, F.one());
                                ProjLine tag = pline_through(F, m, kp);
                                if (tag.a[1] == F.zero() || F.div(tag.a[0], tag.a[1]) != u)
                                    fail(errc::internal, "slope disagrees with the joining line");
                                out.witnesses.push_back({i, j, x1, k1, k2, s, t, u.v, us.v});
                                out.entry[i][j] = true;
                                found = true;
                            }
                }
        }
    }
    out.all_true = true;
    for (const auto& row : out.entry)
        for (bool b : row) out.all_true = out.all_true && b;
    return out;
}

} // namespace mobius
