#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cipher.hpp"
#include "rational.hpp"

namespace mobius {

// ---------------------------------------------------------------------------
// Closed-form a-priori and a-posteriori probabilities for the sequential
// three-point encryption, by position and by the pattern of observed
// equalities m_i = c_i. The a-posteriori value is (#keys producing the
// observed ciphertext point) / (#admissible keys at that position).
// ---------------------------------------------------------------------------

inline Rational apriori_mu(uint64_t q, int position) {
    switch (position) {
        case 1: return Rational(1, int64_t(q + 1));
        case 2: return Rational(1, int64_t(q));
        case 3: return Rational(1, int64_t(q - 1));
        default: fail(errc::bad_params, "position must be 1, 2 or 3");
    }
}

/// Admissible key-point count at `position`, given the tangency pattern of
/// the earlier positions (eq[t] == true means m_{t+1} = c_{t+1}).
inline int64_t admissible_key_count(uint64_t q, int position, const std::vector<bool>& eq_prefix) {
    int64_t Q = int64_t(q);
    switch (position) {
        case 1: return Q * Q - Q - 1;
        case 2: return eq_prefix.at(0) ? Q * Q - 2 * Q + 1 : Q * Q - 3 * Q + 3;
        case 3: {
            int ineq = int(!eq_prefix.at(0)) + int(!eq_prefix.at(1));
            if (ineq == 0) return Q * Q - 3 * Q + 3;
            if (ineq == 1) return Q * Q - 4 * Q + 5;
            return Q * Q - 5 * Q + 7;
        }
        default: fail(errc::bad_params, "position must be 1, 2 or 3");
    }
}

/// A-posteriori probability of the true message point given the observed
/// ciphertext point: numerator q-1 when they coincide (tangent keys), q-2
/// otherwise; denominator = admissible key count.
inline Rational aposteriori_nu(uint64_t q, int position, const std::vector<bool>& eq) {
    std::vector<bool> prefix(eq.begin(), eq.end() - 1);
    int64_t num = eq.back() ? int64_t(q) - 1 : int64_t(q) - 2;
    return Rational(num, admissible_key_count(q, position, prefix));
}

inline std::string case_label(const std::vector<bool>& eq) {
    std::string s;
    for (size_t t = 0; t < eq.size(); ++t) {
        if (t) s += ",";
        s += "m" + std::to_string(t + 1) + (eq[t] ? "=" : "!=") + "c" + std::to_string(t + 1);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Exhaustive verification of the tables.
// ---------------------------------------------------------------------------

struct CaseRow {
    int position = 0;
    std::vector<bool> eq;
    std::string label;
    Rational mu{0};
    Rational nu_formula{0};
    bool realizable = false;
    int64_t counted_numerator = 0;   // keys producing the observed point
    int64_t counted_denominator = 0; // admissible keys at the position
    bool match = false;              // counted ratio equals the closed form exactly
};

struct ProbabilityReport {
    uint64_t q = 0;
    std::array<uint64_t, 3> mu_support{}; // q+1, q, q-1 equally likely choices
    std::vector<CaseRow> rows;            // 2 + 4 + 8
    bool all_match = false;               // over realizable rows
};

namespace detail {

inline Point point_from_key(const ExtCtx& G, uint64_t k) {
    return k == G.order() ? Point::infinity() : Point::at(G.elem(k));
}

struct CaseCount {
    int64_t admissible = 0;
    std::map<uint64_t, int64_t> by_c; // point key of the resulting c -> #keys
};

/// Counts, over every admissible key point for this position, which
/// ciphertext point each key produces. `cuts` holds (key_j ∩ carrier) for the
/// already-fixed positions.
inline CaseCount count_position(const ExtCtx& G, const Circle& M, const Point& mi,
                                const std::vector<std::vector<Point>>& cuts) {
    CaseCount out;
    for (uint64_t zi = 0; zi < G.order(); ++zi) {
        ExtElem z = G.elem(zi);
        if (hermitian_value(G, M, z) == G.base().zero()) continue;
        Circle K = line_through(G, mi, Point::at(z));
        bool ok = true;
        for (const auto& cut : cuts) {
            for (const Point& pt : cut)
                if (circle_contains(G, K, pt)) {
                    ok = false;
                    break;
                }
            if (!ok) break;
        }
        if (!ok) continue;
        auto pts = intersect(G, K, M);
        Point c;
        if (pts.size() == 1) {
            if (pts[0] != mi) fail(errc::internal, "tangent cut misses the message point");
            c = mi;
        } else if (pts.size() == 2 && (pts[0] == mi || pts[1] == mi)) {
            c = pts[0] == mi ? pts[1] : pts[0];
        } else {
            fail(errc::internal, "key/carrier cut inconsistent");
        }
        ++out.admissible;
        ++out.by_c[point_key(G, c)];
    }
    return out;
}

/// First key (by candidate order) whose ciphertext point satisfies the
/// predicate; returns the key and its carrier cut.
template <class Pred>
inline std::optional<std::pair<Circle, std::vector<Point>>> pick_key(
    const ExtCtx& G, const Circle& M, const Point& mi,
    const std::vector<std::vector<Point>>& cuts, Pred&& want_c) {
    for (uint64_t zi = 0; zi < G.order(); ++zi) {
        ExtElem z = G.elem(zi);
        if (hermitian_value(G, M, z) == G.base().zero()) continue;
        Circle K = line_through(G, mi, Point::at(z));
        bool ok = true;
        for (const auto& cut : cuts) {
            for (const Point& pt : cut)
                if (circle_contains(G, K, pt)) {
                    ok = false;
                    break;
                }
            if (!ok) break;
        }
        if (!ok) continue;
        auto pts = intersect(G, K, M);
        Point c = pts.size() == 1 ? mi : (pts[0] == mi ? pts[1] : pts[0]);
        if (want_c(c)) return std::make_pair(K, pts);
    }
    return std::nullopt;
}

} // namespace detail

inline ProbabilityReport aposteriori_tables(const ExtCtx& G) {
    uint64_t q = G.q();
    if (q < 4 || q > 9) fail(errc::too_large, "table enumeration supports 4 <= q <= 9");
    ProbabilityReport rep;
    rep.q = q;
    rep.mu_support = {q + 1, q, q - 1};

    // Fixed non-collinear message: 0, 1, omega (omega never lies on the line
    // through 0 and 1, which is the base-field closure).
    Point m1 = Point::at(G.zero()), m2 = Point::at(G.one()), m3 = Point::at(G.omega());
    Circle M = circle_through(G, m1, m2, m3);
    if (M.is_line()) fail(errc::message_circle_through_infinity, "representative message is collinear");
    std::array<Point, 3> msg{m1, m2, m3};

    auto add_row = [&](int pos, std::vector<bool> eq, const detail::CaseCount& counts, const Point& mi) {
        CaseRow row;
        row.position = pos;
        row.eq = eq;
        row.label = case_label(eq);
        row.mu = apriori_mu(q, pos);
        row.nu_formula = aposteriori_nu(q, pos, eq);
        row.counted_denominator = counts.admissible;
        std::vector<bool> prefix(eq.begin(), eq.end() - 1);
        bool den_ok = counts.admissible == admissible_key_count(q, pos, prefix);
        uint64_t mi_key = point_key(G, mi);
        if (eq.back()) {
            auto it = counts.by_c.find(mi_key);
            row.counted_numerator = it == counts.by_c.end() ? 0 : it->second;
            row.realizable = row.counted_numerator > 0;
            row.match = row.realizable && den_ok && row.counted_numerator == int64_t(q) - 1;
        } else {
            // Every observable c != m_i must be produced by the same number
            // of keys.
            int64_t uniform = -1;
            bool ok = true;
            for (const auto& [ck, cnt] : counts.by_c) {
                if (ck == mi_key) continue;
                if (uniform < 0) uniform = cnt;
                ok = ok && cnt == uniform;
            }
            row.realizable = uniform > 0;
            row.counted_numerator = uniform < 0 ? 0 : uniform;
            row.match = row.realizable && ok && den_ok && uniform == int64_t(q) - 2;
        }
        if (row.realizable && row.match)
            row.match = Rational(row.counted_numerator, row.counted_denominator) == row.nu_formula;
        rep.rows.push_back(std::move(row));
    };

    // Position 1: no fixed keys yet.
    detail::CaseCount c1 = detail::count_position(G, M, msg[0], {});
    add_row(1, {true}, c1, msg[0]);
    add_row(1, {false}, c1, msg[0]);

    // Representative earlier keys. Tangent cases take the first tangent key;
    // secant cases take the first key whose ciphertext point is a fresh point
    // of the carrier (outside the message triple and earlier points), the
    // generic position the closed forms assume.
    auto tangent_at = [&](int idx, const std::vector<std::vector<Point>>& cuts) {
        auto r = detail::pick_key(G, M, msg[size_t(idx)], cuts,
                                  [&](const Point& c) { return c == msg[size_t(idx)]; });
        if (!r) fail(errc::internal, "no tangent key available");
        return *r;
    };
    auto secant_avoiding = [&](int idx, const std::vector<std::vector<Point>>& cuts,
                               const std::vector<Point>& avoid) {
        auto r = detail::pick_key(G, M, msg[size_t(idx)], cuts, [&](const Point& c) {
            for (const Point& a : avoid)
                if (c == a) return false;
            return true;
        });
        return r;
    };

    // Position 2: split by the position-1 case.
    for (bool eq1 : {true, false}) {
        std::pair<Circle, std::vector<Point>> k1;
        if (eq1) {
            k1 = tangent_at(0, {});
        } else {
            auto r = secant_avoiding(0, {}, {msg[0], msg[1], msg[2]});
            if (!r) fail(errc::internal, "no generic first key available");
            k1 = *r;
        }
        detail::CaseCount c2 = detail::count_position(G, M, msg[1], {k1.second});
        add_row(2, {eq1, true}, c2, msg[1]);
        add_row(2, {eq1, false}, c2, msg[1]);
    }

    // Position 3: split by the position-1 and position-2 cases.
    for (bool eq1 : {true, false}) {
        std::pair<Circle, std::vector<Point>> k1;
        if (eq1) {
            k1 = tangent_at(0, {});
        } else {
            auto r = secant_avoiding(0, {}, {msg[0], msg[1], msg[2]});
            if (!r) fail(errc::internal, "no generic first key available");
            k1 = *r;
        }
        Point c1pt = k1.second.size() == 1 ? msg[0] : (k1.second[0] == msg[0] ? k1.second[1] : k1.second[0]);
        for (bool eq2 : {true, false}) {
            std::pair<Circle, std::vector<Point>> k2;
            if (eq2) {
                k2 = tangent_at(1, {k1.second});
            } else {
                auto r = secant_avoiding(1, {k1.second}, {msg[0], c1pt, msg[1], msg[2]});
                if (!r) fail(errc::internal, "no generic second key available");
                k2 = *r;
            }
            detail::CaseCount c3 = detail::count_position(G, M, msg[2], {k1.second, k2.second});
            add_row(3, {eq1, eq2, true}, c3, msg[2]);
            add_row(3, {eq1, eq2, false}, c3, msg[2]);
        }
    }

    rep.all_match = true;
    for (const CaseRow& row : rep.rows)
        if (row.realizable) rep.all_match = rep.all_match && row.match;
    return rep;
}

// ---------------------------------------------------------------------------
// Perfectness in first approximation: the distance between a-priori and
// a-posteriori probabilities, exact, from the closed forms. The scaled bound
// q^2 * max|mu - nu| was measured once across the sweep (maximum 225/28 at
// q = 5) and is frozen as a regression constant.
// ---------------------------------------------------------------------------

inline const Rational kScaledDeviationBound{9};

struct DeviationRow {
    int position = 0;
    std::string label;
    Rational mu{0}, nu{0}, deviation{0};
};

struct DeviationReport {
    uint64_t q = 0;
    std::vector<DeviationRow> rows;
    Rational max_deviation{0};
};

inline DeviationReport perfectness_deviation(uint64_t q) {
    if (q < 4 || q > 65536) fail(errc::too_large, "deviation supports 4 <= q <= 65536");
    DeviationReport rep;
    rep.q = q;
    auto add = [&](int pos, std::vector<bool> eq) {
        // The fully-generic final case needs q+1 >= 6 carrier points to occur.
        if (pos == 3 && !eq[0] && !eq[1] && !eq[2] && q < 5) return;
        DeviationRow row;
        row.position = pos;
        row.label = case_label(eq);
        row.mu = apriori_mu(q, pos);
        row.nu = aposteriori_nu(q, pos, eq);
        row.deviation = boost::abs(row.mu - row.nu);
        if (row.deviation > rep.max_deviation) rep.max_deviation = row.deviation;
        rep.rows.push_back(std::move(row));
    };
    for (bool a : {true, false}) add(1, {a});
    for (bool a : {true, false})
        for (bool b : {true, false}) add(2, {a, b});
    for (bool a : {true, false})
        for (bool b : {true, false})
            for (bool c : {true, false}) add(3, {a, b, c});
    return rep;
}

// ---------------------------------------------------------------------------
// Completeness of the cipher in characteristic 2 (avalanche matrix). Bits
// index the two base-field coordinates of a point; entry (i, j) holds when
// flipping message bit i can flip ciphertext bit j. With the key point
// translated to the origin, a message/ciphertext pair at position 1 is any
// pair collinear with 0, i.e. det(m, c) = x*v - y*u = 0; the witness demands
// both (m, c) and (m + e_i, c + e_j) to be such pairs, and each side is then
// realized by an actual encryption.
// ---------------------------------------------------------------------------

struct AvalancheWitness {
    unsigned i = 0, j = 0;
    ExtElem m, c; // key point fixed at the origin
};

struct AvalancheMatrix {
    unsigned n = 0;                       // field degree; matrix is 2n x 2n
    std::vector<std::vector<bool>> entry; // [i][j]
    std::vector<AvalancheWitness> witnesses;
    bool all_true = false;
};

namespace detail {

/// Completes (K2, K3) for a message triple whose first key is fixed.
inline std::optional<KeyTriple> complete_keys(const ExtCtx& G, const Circle& M,
                                              const PointTriple& msg, const Circle& K1) {
    auto cut1 = intersect(G, K1, M);
    for (uint64_t z2 = 0; z2 < G.order(); ++z2) {
        ExtElem p2 = G.elem(z2);
        if (hermitian_value(G, M, p2) == G.base().zero()) continue;
        Circle K2 = line_through(G, msg[1], Point::at(p2));
        bool ok2 = true;
        for (const Point& pt : cut1)
            if (circle_contains(G, K2, pt)) ok2 = false;
        if (!ok2) continue;
        auto cut2 = intersect(G, K2, M);
        for (uint64_t z3 = 0; z3 < G.order(); ++z3) {
            ExtElem p3 = G.elem(z3);
            if (hermitian_value(G, M, p3) == G.base().zero()) continue;
            Circle K3 = line_through(G, msg[2], Point::at(p3));
            bool ok3 = true;
            for (const Point& pt : cut1)
                if (circle_contains(G, K3, pt)) ok3 = false;
            for (const Point& pt : cut2)
                if (circle_contains(G, K3, pt)) ok3 = false;
            if (!ok3) continue;
            return KeyTriple{K1, K2, K3};
        }
    }
    return std::nullopt;
}

/// Realizes the pair (m, c) by a full encryption: a carrier through m and c
/// avoiding the origin and infinity, with first key the line joining m to the
/// origin, must encrypt m to c at position 1.
inline bool realize_origin_pair(const ExtCtx& G, ExtElem m, ExtElem c) {
    const FieldCtx& F = G.base();
    auto det = [&](ExtElem a, ExtElem b) { return F.sub(F.mul(a.re, b.im), F.mul(a.im, b.re)); };
    for (uint64_t wi = 0; wi < G.order(); ++wi) {
        ExtElem w = G.elem(wi);
        if (w == m || w == c || det(m, w) == F.zero()) continue; // keep w off the line through 0, m
        Circle M = circle_through(G, Point::at(m), Point::at(c), Point::at(w));
        if (M.is_line()) fail(errc::internal, "carrier unexpectedly collinear");
        if (circle_contains(G, M, Point::at(G.zero()))) continue; // key point must avoid the carrier
        std::vector<Point> others;
        for (const Point& pt : points_of(G, M))
            if (pt != Point::at(m) && pt != Point::at(c)) others.push_back(pt);
        if (others.size() < 2) continue;
        PointTriple msg{Point::at(m), others[0], others[1]};
        Circle K1 = line_through(G, msg[0], Point::at(G.zero()));
        auto keys = complete_keys(G, M, msg, K1);
        if (!keys) continue;
        PointTriple ct = encrypt_triple(G, msg, *keys);
        if (ct[0] != Point::at(c)) fail(errc::internal, "origin-line encryption missed the target point");
        return true;
    }
    return false;
}

} // namespace detail

inline AvalancheMatrix cipher_completeness_matrix(const ExtCtx& G) {
    const FieldCtx& F = G.base();
    if (F.p() != 2) fail(errc::wrong_characteristic, "completeness is a characteristic-2 statement");
    if (F.n() < 2 || F.n() > 4) fail(errc::too_large, "witness search supports n in {2,3,4}");
    unsigned n = unsigned(F.n());
    AvalancheMatrix out;
    out.n = n;
    out.entry.assign(2 * n, std::vector<bool>(2 * n, false));
    auto unit = [&](unsigned b) -> ExtElem {
        return b < n ? ExtElem{FieldElem{uint64_t(1) << b}, F.zero()}
                     : ExtElem{F.zero(), FieldElem{uint64_t(1) << (b - n)}};
    };
    auto det = [&](ExtElem a, ExtElem b) { return F.sub(F.mul(a.re, b.im), F.mul(a.im, b.re)); };

    for (unsigned i = 0; i < 2 * n; ++i)
        for (unsigned j = 0; j < 2 * n; ++j) {
            ExtElem ei = unit(i), ej = unit(j);
            bool found = false;
            for (uint64_t mi = 1; mi < G.order() && !found; ++mi) {
                ExtElem m = G.elem(mi);
                ExtElem ms = G.add(m, ei);
                if (ms == G.zero()) continue;
                for (uint64_t ci = 1; ci < G.order() && !found; ++ci) {
                    ExtElem c = G.elem(ci);
                    if (c == m || det(m, c) != F.zero()) continue;
                    ExtElem cs = G.add(c, ej);
                    if (cs == G.zero() || cs == ms || det(ms, cs) != F.zero()) continue;
                    if (!detail::realize_origin_pair(G, m, c)) continue;
                    if (!detail::realize_origin_pair(G, ms, cs)) continue;
                    out.witnesses.push_back({i, j, m, c});
                    out.entry[i][j] = true;
                    found = true;
                }
            }
        }
    out.all_true = true;
    for (const auto& row : out.entry)
        for (bool b : row) out.all_true = out.all_true && b;
    return out;
}

} // namespace mobius
