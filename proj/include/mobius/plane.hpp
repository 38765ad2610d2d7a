#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "extension.hpp"

namespace mobius {

/// Point of the Moebius plane S = G + {infinity}.
struct Point {
    bool inf = false;
    ExtElem z{};

    static Point infinity() { return {true, {}}; }
    static Point at(ExtElem z) { return {false, z}; }

    friend bool operator==(const Point& a, const Point& b) {
        return a.inf == b.inf && (a.inf || a.z == b.z);
    }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
};

/// Sort key: finite points by element index, infinity last.
inline uint64_t point_key(const ExtCtx& G, const Point& p) {
    return p.inf ? G.order() : G.index_of(p.z);
}

/// Circle in Hermitian form alpha*z*conj(z) + beta*conj(z) + conj(beta)*z + gamma = 0
/// with alpha, gamma in the base field, beta in G, norm(beta) - alpha*gamma != 0.
/// Infinity lies on the circle exactly when alpha = 0 (the "lines").
/// Instances are kept canonical: the first nonzero of
/// (alpha, beta.re, beta.im, gamma) is scaled to 1, so equal point sets have
/// equal coefficient triples.
struct Circle {
    FieldElem alpha, gamma;
    ExtElem beta;

    bool is_line() const { return alpha.v == 0; }

    friend bool operator==(const Circle& a, const Circle& b) {
        return a.alpha == b.alpha && a.beta == b.beta && a.gamma == b.gamma;
    }
    friend bool operator!=(const Circle& a, const Circle& b) { return !(a == b); }
};

/// norm(x) expanded over the basis (1, omega): x1^2 + tr(omega)x1x2 + nm(omega)x2^2.
inline FieldElem norm_form(const ExtCtx& G, ExtElem x) {
    const FieldCtx& F = G.base();
    FieldElem r = F.mul(x.re, x.re);
    r = F.add(r, F.mul(G.trace_omega(), F.mul(x.re, x.im)));
    return F.add(r, F.mul(G.norm_omega(), F.mul(x.im, x.im)));
}

/// The symmetric base-field bilinear form B(a, b) = a*conj(b) + conj(a)*b.
inline FieldElem bilinear_form(const ExtCtx& G, ExtElem a, ExtElem b) {
    const FieldCtx& F = G.base();
    FieldElem two = F.from_int(2);
    FieldElem r = F.mul(two, F.mul(a.re, b.re));
    r = F.add(r, F.mul(G.trace_omega(), F.add(F.mul(a.re, b.im), F.mul(a.im, b.re))));
    return F.add(r, F.mul(F.mul(two, G.norm_omega()), F.mul(a.im, b.im)));
}

/// Hermitian value at a finite point; zero iff the point lies on the circle.
inline FieldElem hermitian_value(const ExtCtx& G, const Circle& c, ExtElem z) {
    const FieldCtx& F = G.base();
    FieldElem r = F.mul(c.alpha, norm_form(G, z));
    r = F.add(r, bilinear_form(G, c.beta, z));
    return F.add(r, c.gamma);
}

inline bool circle_contains(const ExtCtx& G, const Circle& c, const Point& p) {
    if (p.inf) return c.is_line();
    return hermitian_value(G, c, p.z) == G.base().zero();
}

inline bool circle_coeffs_degenerate(const ExtCtx& G, FieldElem alpha, ExtElem beta, FieldElem gamma) {
    const FieldCtx& F = G.base();
    return F.sub(norm_form(G, beta), F.mul(alpha, gamma)) == F.zero();
}

/// Scales so the first nonzero of (alpha, beta.re, beta.im, gamma) is 1.
inline Circle canonical_circle(const ExtCtx& G, FieldElem alpha, ExtElem beta, FieldElem gamma) {
    const FieldCtx& F = G.base();
    if (circle_coeffs_degenerate(G, alpha, beta, gamma))
        fail(errc::internal, "degenerate Hermitian coefficients");
    FieldElem lead = alpha;
    if (lead == F.zero()) lead = beta.re;
    if (lead == F.zero()) lead = beta.im;
    if (lead == F.zero()) lead = gamma;
    FieldElem s = F.inv(lead);
    return {F.mul(s, alpha), F.mul(s, gamma), G.scale(s, beta)};
}

/// Circle with the given center and squared-radius norm value (alpha = 1).
inline Circle circle_from_center(const ExtCtx& G, ExtElem center, FieldElem radius_norm) {
    const FieldCtx& F = G.base();
    if (radius_norm == F.zero()) fail(errc::degenerate_points, "radius norm must be nonzero");
    return canonical_circle(G, F.one(), G.neg(center),
                            F.sub(norm_form(G, center), radius_norm));
}

namespace detail {

/// Nonzero kernel vector of a homogeneous system with 4 unknowns over F.
/// The geometry guarantees full row rank; anything else is reported as an
/// internal inconsistency.
inline std::array<FieldElem, 4> kernel4(const FieldCtx& F, std::vector<std::array<FieldElem, 4>> rows) {
    std::vector<int> pivot_col(rows.size(), -1);
    size_t rank = 0;
    for (int col = 0; col < 4 && rank < rows.size(); ++col) {
        size_t pr = rank;
        while (pr < rows.size() && rows[pr][size_t(col)] == F.zero()) ++pr;
        if (pr == rows.size()) continue;
        std::swap(rows[rank], rows[pr]);
        FieldElem s = F.inv(rows[rank][size_t(col)]);
        for (auto& x : rows[rank]) x = F.mul(s, x);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][size_t(col)] == F.zero()) continue;
            FieldElem f = rows[r][size_t(col)];
            for (int j = 0; j < 4; ++j)
                rows[r][size_t(j)] = F.sub(rows[r][size_t(j)], F.mul(f, rows[rank][size_t(j)]));
        }
        pivot_col[rank] = col;
        ++rank;
    }
    if (rank != rows.size()) fail(errc::internal, "unexpected rank drop in circle system");
    bool is_pivot[4] = {false, false, false, false};
    for (size_t r = 0; r < rank; ++r) is_pivot[pivot_col[r]] = true;
    int free_col = 0;
    while (free_col < 4 && is_pivot[free_col]) ++free_col;
    std::array<FieldElem, 4> x{F.zero(), F.zero(), F.zero(), F.zero()};
    x[size_t(free_col)] = F.one();
    for (size_t r = 0; r < rank; ++r)
        x[size_t(pivot_col[r])] = F.neg(rows[r][size_t(free_col)]);
    return x;
}

} // namespace detail

/// The unique circle through three pairwise distinct points.
inline Circle circle_through(const ExtCtx& G, const Point& a, const Point& b, const Point& c) {
    if (a == b || a == c || b == c) fail(errc::degenerate_points, "three distinct points required");
    const FieldCtx& F = G.base();
    FieldElem two = F.from_int(2);
    std::vector<std::array<FieldElem, 4>> rows;
    for (const Point* p : {&a, &b, &c}) {
        if (p->inf) {
            rows.push_back({F.one(), F.zero(), F.zero(), F.zero()});
        } else {
            ExtElem z = p->z;
            // Unknowns (alpha, beta.re, beta.im, gamma):
            //   alpha*N(z) + beta.re*B(1,z) + beta.im*B(omega,z) + gamma = 0
            FieldElem t1 = F.add(F.mul(two, z.re), F.mul(G.trace_omega(), z.im));
            FieldElem t2 = F.add(F.mul(G.trace_omega(), z.re), F.mul(F.mul(two, G.norm_omega()), z.im));
            rows.push_back({norm_form(G, z), t1, t2, F.one()});
        }
    }
    auto k = detail::kernel4(F, std::move(rows));
    Circle r = canonical_circle(G, k[0], {k[1], k[2]}, k[3]);
    for (const Point* p : {&a, &b, &c})
        if (!circle_contains(G, r, *p)) fail(errc::internal, "constructed circle misses an input point");
    return r;
}

/// Line (circle through infinity) joining two distinct finite points.
/// Closed form: beta = (omega - conj(omega)) * (p - k), a trace-zero multiple
/// of the difference.
inline Circle line_through(const ExtCtx& G, const Point& p, const Point& k) {
    if (p == k) fail(errc::degenerate_points, "two distinct points required");
    if (p.inf || k.inf) fail(errc::bad_params, "line_through expects finite points");
    const FieldCtx& F = G.base();
    ExtElem beta = G.mul(G.omega_minus_conj(), G.sub(p.z, k.z));
    FieldElem gamma = F.neg(bilinear_form(G, beta, p.z));
    return canonical_circle(G, F.zero(), beta, gamma);
}

/// All points of a circle in deterministic order (finite ascending, then
/// infinity). Enumeration-guarded.
inline std::vector<Point> points_of(const ExtCtx& G, const Circle& c) {
    if (G.order() > FieldCtx::kEnumerationLimit) fail(errc::too_large, "point listing beyond the 2^24 guard");
    std::vector<Point> out;
    for (uint64_t i = 0; i < G.order(); ++i) {
        ExtElem z = G.elem(i);
        if (hermitian_value(G, c, z) == G.base().zero()) out.push_back(Point::at(z));
    }
    if (c.is_line()) out.push_back(Point::infinity());
    return out;
}

/// Double ratio Dr(a,b,c,z) = ((a-c)/(a-z)) / ((b-c)/(b-z)) evaluated
/// projectively, so every infinity is the corresponding limit: matching
/// infinite terms cancel, division by zero gives infinity. Returns a value in
/// G + {infinity}.
inline Point double_ratio(const ExtCtx& G, const Point& a, const Point& b, const Point& c, const Point& z) {
    if (a == b || a == c || b == c) fail(errc::degenerate_points, "reference points must be distinct");
    auto hom_x = [&](const Point& p) { return p.inf ? G.one() : p.z; };
    auto hom_y = [&](const Point& p) { return p.inf ? G.zero() : G.one(); };
    auto det = [&](const Point& p, const Point& q) {
        return G.sub(G.mul(hom_x(p), hom_y(q)), G.mul(hom_x(q), hom_y(p)));
    };
    ExtElem num = G.mul(det(a, c), det(b, z));
    ExtElem den = G.mul(det(b, c), det(a, z));
    if (den == G.zero()) {
        if (num == G.zero()) fail(errc::internal, "indeterminate double ratio");
        return Point::infinity();
    }
    return Point::at(G.div(num, den));
}

/// Membership in the closure of the base field F + {infinity}.
inline bool in_extended_base(const ExtCtx& G, const Point& v) {
    return v.inf || v.z.im == G.base().zero();
}

/// Fractional linear transformation z -> (a*z + b) / (c*z + d), ad - bc != 0.
struct MoebiusMap {
    ExtElem a, b, c, d;
};

inline MoebiusMap make_map(const ExtCtx& G, ExtElem a, ExtElem b, ExtElem c, ExtElem d) {
    if (G.sub(G.mul(a, d), G.mul(b, c)) == G.zero())
        fail(errc::singular_map, "determinant vanishes");
    return {a, b, c, d};
}

/// The inverse transformation (adjugate matrix; projective scale is free).
inline MoebiusMap inverse_map(const ExtCtx& G, const MoebiusMap& m) {
    return {m.d, G.neg(m.b), G.neg(m.c), m.a};
}

inline Point apply_map(const ExtCtx& G, const MoebiusMap& m, const Point& p) {
    ExtElem num, den;
    if (p.inf) {
        num = m.a;
        den = m.c;
    } else {
        num = G.add(G.mul(m.a, p.z), m.b);
        den = G.add(G.mul(m.c, p.z), m.d);
    }
    if (den == G.zero()) return Point::infinity();
    return Point::at(G.div(num, den));
}

/// Image of a circle under a fractional linear map: congruence of the
/// Hermitian matrix [[alpha, beta], [conj(beta), gamma]] with the adjugate.
inline Circle map_circle(const ExtCtx& G, const MoebiusMap& m, const Circle& c) {
    ExtElem h00 = G.embed(c.alpha), h01 = c.beta;
    ExtElem h10 = G.conjugate(c.beta), h11 = G.embed(c.gamma);
    ExtElem s0 = m.d, s1 = G.neg(m.b), s2 = G.neg(m.c), s3 = m.a; // adjugate
    // t = H * adj
    ExtElem t00 = G.add(G.mul(h00, s0), G.mul(h01, s2));
    ExtElem t01 = G.add(G.mul(h00, s1), G.mul(h01, s3));
    ExtElem t10 = G.add(G.mul(h10, s0), G.mul(h11, s2));
    ExtElem t11 = G.add(G.mul(h10, s1), G.mul(h11, s3));
    // h' = conj(adj)^T * t
    ExtElem c0 = G.conjugate(s0), c1 = G.conjugate(s1), c2 = G.conjugate(s2), c3 = G.conjugate(s3);
    ExtElem n00 = G.add(G.mul(c0, t00), G.mul(c2, t10));
    ExtElem n01 = G.add(G.mul(c0, t01), G.mul(c2, t11));
    ExtElem n10 = G.add(G.mul(c1, t00), G.mul(c3, t10));
    ExtElem n11 = G.add(G.mul(c1, t01), G.mul(c3, t11));
    if (n00.im != G.base().zero() || n11.im != G.base().zero() || n10 != G.conjugate(n01))
        fail(errc::internal, "congruence lost the Hermitian shape");
    return canonical_circle(G, n00.re, n01, n11.re);
}

/// The closure of the base field as a circle: {z : z = conj(z)} + {infinity},
/// written with the trace-zero coefficient omega - conj(omega).
inline Circle base_line(const ExtCtx& G) {
    return canonical_circle(G, G.base().zero(), G.omega_minus_conj(), G.base().zero());
}

/// Image of the extended base field under z -> (a*z + b)/(c*z + d); the
/// special values follow projectively (infinity -> a/c, -d/c -> infinity).
inline Circle mobius_image(const ExtCtx& G, ExtElem a, ExtElem b, ExtElem c, ExtElem d) {
    return map_circle(G, make_map(G, a, b, c, d), base_line(G));
}

namespace detail {

/// Roots of A*t^2 + B*t + C over F, ascending; A != 0 on every caller's path.
inline std::vector<FieldElem> quadratic_roots(const FieldCtx& F, FieldElem A, FieldElem B, FieldElem C) {
    std::vector<FieldElem> out;
    if (A == F.zero()) {
        if (B != F.zero()) out.push_back(F.neg(F.div(C, B)));
        return out;
    }
    if (F.p() == 2) {
        if (B == F.zero()) {
            // t^2 = C/A has the single root sqrt(C/A): a tangential contact.
            out.push_back(*F.sqrt(F.div(C, A)));
            return out;
        }
        // t = (B/A)s turns it into s^2 + s = CA/B^2.
        FieldElem b = F.div(B, A);
        FieldElem rhs = F.div(F.mul(C, A), F.mul(B, B));
        auto s = F.solve_artin_schreier(rhs);
        if (!s) return out;
        out.push_back(F.mul(b, *s));
        out.push_back(F.mul(b, F.add(*s, F.one())));
    } else {
        FieldElem disc = F.sub(F.mul(B, B), F.mul(F.from_int(4), F.mul(A, C)));
        FieldElem inv2A = F.inv(F.mul(F.from_int(2), A));
        if (disc == F.zero()) {
            out.push_back(F.mul(F.neg(B), inv2A));
            return out;
        }
        auto r = F.sqrt(disc);
        if (!r) return out;
        out.push_back(F.mul(F.sub(*r, B), inv2A));
        out.push_back(F.mul(F.sub(F.neg(*r), B), inv2A));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Line coefficients as an affine equation a*x + b*y + rhs = 0 over F in the
/// coordinates z = x + y*omega. The coefficient map is invertible whenever
/// beta != 0, so (a, b) never vanishes for a genuine line.
struct AffineLine {
    FieldElem a, b, rhs;
};

inline AffineLine affine_line(const ExtCtx& G, ExtElem beta, FieldElem gamma) {
    const FieldCtx& F = G.base();
    FieldElem two = F.from_int(2);
    return {F.add(F.mul(two, beta.re), F.mul(G.trace_omega(), beta.im)),
            F.add(F.mul(G.trace_omega(), beta.re), F.mul(F.mul(two, G.norm_omega()), beta.im)),
            gamma};
}

} // namespace detail

/// Exact intersection of two distinct circles (0, 1 or 2 points), sorted.
inline std::vector<Point> intersect(const ExtCtx& G, const Circle& c1, const Circle& c2) {
    if (c1 == c2) fail(errc::identical_circles, "circles must differ");
    const FieldCtx& F = G.base();
    std::vector<Point> out;

    if (c1.is_line() && c2.is_line()) {
        out.push_back(Point::infinity());
        auto l1 = detail::affine_line(G, c1.beta, c1.gamma);
        auto l2 = detail::affine_line(G, c2.beta, c2.gamma);
        FieldElem det = F.sub(F.mul(l1.a, l2.b), F.mul(l2.a, l1.b));
        if (det != F.zero()) {
            FieldElem inv = F.inv(det);
            FieldElem x = F.mul(F.sub(F.mul(F.neg(l1.rhs), l2.b), F.mul(F.neg(l2.rhs), l1.b)), inv);
            FieldElem y = F.mul(F.sub(F.mul(l1.a, F.neg(l2.rhs)), F.mul(l2.a, F.neg(l1.rhs))), inv);
            out.push_back(Point::at({x, y}));
        }
    } else {
        // One equation with alpha = 1 (canonical scaling), plus a linear one:
        // either the second circle is a line already or the scaled difference
        // eliminates the norm term.
        const Circle& quad = c1.is_line() ? c2 : c1;
        ExtElem beta_d;
        FieldElem gamma_d;
        if (c1.is_line() || c2.is_line()) {
            const Circle& line = c1.is_line() ? c1 : c2;
            beta_d = line.beta;
            gamma_d = line.gamma;
        } else {
            beta_d = G.sub(c1.beta, c2.beta);
            gamma_d = F.sub(c1.gamma, c2.gamma);
            if (beta_d == G.zero()) return out; // parallel level sets: no common point
        }
        auto L = detail::affine_line(G, beta_d, gamma_d);
        FieldElem x0, xd, y0, yd;
        if (L.b != F.zero()) {
            FieldElem ib = F.inv(L.b);
            x0 = F.zero();
            xd = F.one();
            y0 = F.neg(F.mul(L.rhs, ib));
            yd = F.neg(F.mul(L.a, ib));
        } else {
            x0 = F.neg(F.div(L.rhs, L.a));
            xd = F.zero();
            y0 = F.zero();
            yd = F.one();
        }
        // Substitute z(t) = (x0 + xd t, y0 + yd t) into the quadratic circle.
        FieldElem two = F.from_int(2);
        FieldElem A = F.add(F.add(F.mul(xd, xd), F.mul(G.trace_omega(), F.mul(xd, yd))),
                            F.mul(G.norm_omega(), F.mul(yd, yd)));
        FieldElem B = F.add(F.add(F.mul(two, F.mul(x0, xd)),
                                  F.mul(G.trace_omega(), F.add(F.mul(x0, yd), F.mul(xd, y0)))),
                            F.mul(F.mul(two, G.norm_omega()), F.mul(y0, yd)));
        FieldElem C = norm_form(G, {x0, y0});
        B = F.add(B, bilinear_form(G, quad.beta, {xd, yd}));
        C = F.add(C, F.add(bilinear_form(G, quad.beta, {x0, y0}), quad.gamma));
        for (FieldElem t : detail::quadratic_roots(F, A, B, C))
            out.push_back(Point::at({F.add(x0, F.mul(xd, t)), F.add(y0, F.mul(yd, t))}));
    }
    std::sort(out.begin(), out.end(), [&](const Point& a, const Point& b) {
        return point_key(G, a) < point_key(G, b);
    });
    return out;
}

/// The line touching a non-line circle at one of its points.
inline Circle tangent_line_at(const ExtCtx& G, const Circle& c, const Point& p) {
    if (c.is_line()) fail(errc::circle_through_infinity, "tangent lines exist only for non-line circles");
    if (!circle_contains(G, c, p) || p.inf) fail(errc::point_not_on_circle, "contact point must lie on the circle");
    const FieldCtx& F = G.base();
    // alpha = 1 canonically: center -beta, radius norm N(beta) - gamma.
    ExtElem center = G.neg(c.beta);
    FieldElem radius_norm = F.sub(norm_form(G, c.beta), c.gamma);
    ExtElem delta = G.sub(p.z, center);
    FieldElem gamma_t = F.neg(F.add(bilinear_form(G, delta, center),
                                    F.mul(F.from_int(2), radius_norm)));
    return canonical_circle(G, F.zero(), delta, gamma_t);
}

/// The unique circle through a and b touching A exactly at a. Transport a to
/// infinity, where tangency is parallelism of lines, and pull back.
inline Circle tangent_circle(const ExtCtx& G, const Circle& A, const Point& a, const Point& b) {
    if (!circle_contains(G, A, a)) fail(errc::point_not_on_circle, "contact point must lie on the circle");
    if (circle_contains(G, A, b)) fail(errc::point_on_circle, "second point must avoid the circle");
    const FieldCtx& F = G.base();
    if (a.inf) {
        // A is a line; the touching circle is the parallel line through b.
        return canonical_circle(G, F.zero(), A.beta, F.neg(bilinear_form(G, A.beta, b.z)));
    }
    MoebiusMap to_inf = make_map(G, G.zero(), G.one(), G.one(), G.neg(a.z)); // z -> 1/(z - a)
    Circle A_img = map_circle(G, to_inf, A);
    Point b_img = apply_map(G, to_inf, b);
    Circle B_img = canonical_circle(G, F.zero(), A_img.beta,
                                    F.neg(bilinear_form(G, A_img.beta, b_img.z)));
    return map_circle(G, inverse_map(G, to_inf), B_img);
}

/// All plane points: finite in element order, then infinity.
inline std::vector<Point> all_points(const ExtCtx& G) {
    if (G.order() > FieldCtx::kEnumerationLimit) fail(errc::too_large, "enumeration beyond the 2^24 guard");
    std::vector<Point> out;
    out.reserve(size_t(G.order()) + 1);
    for (uint64_t i = 0; i < G.order(); ++i) out.push_back(Point::at(G.elem(i)));
    out.push_back(Point::infinity());
    return out;
}

/// Every circle of the plane, lines first, in a fixed deterministic order.
inline std::vector<Circle> enumerate_circles(const ExtCtx& G) {
    const FieldCtx& F = G.base();
    uint64_t q = G.q();
    if (q > 64) fail(errc::too_large, "circle enumeration beyond desk scale");
    std::vector<Circle> out;
    out.reserve(size_t(q * q * q + q));
    // Lines: beta ranges over direction representatives (first nonzero 1).
    std::vector<ExtElem> dirs;
    for (uint64_t y = 0; y < q; ++y) dirs.push_back({F.one(), {y}});
    dirs.push_back({F.zero(), F.one()});
    std::sort(dirs.begin(), dirs.end(),
              [&](ExtElem a, ExtElem b) { return G.index_of(a) < G.index_of(b); });
    for (ExtElem beta : dirs)
        for (uint64_t g = 0; g < q; ++g)
            out.push_back(Circle{F.zero(), {g}, beta});
    // Non-lines: alpha = 1, any beta, gamma != N(beta).
    for (uint64_t bi = 0; bi < q * q; ++bi) {
        ExtElem beta = G.elem(bi);
        FieldElem nb = norm_form(G, beta);
        for (uint64_t g = 0; g < q; ++g)
            if (g != nb.v) out.push_back(Circle{F.one(), {g}, beta});
    }
    return out;
}

/// Closed-form incidence counts verified by exhaustive enumeration.
struct PlaneAudit {
    uint64_t q = 0;
    uint64_t point_count = 0;
    uint64_t circle_count = 0;
    uint64_t points_per_circle = 0;
    uint64_t circles_through_point = 0;
    uint64_t circles_through_pair = 0;
    uint64_t tangents_at_point = 0;
    bool uniform = false;            // every sampled quantity was constant
    bool matches_closed_forms = false;
};

inline PlaneAudit plane_audit(const ExtCtx& G) {
    uint64_t q = G.q();
    if (q > 16) fail(errc::too_large, "plane audit beyond desk scale");
    const FieldCtx& F = G.base();
    (void)F;
    PlaneAudit audit;
    audit.q = q;

    std::vector<Point> pts = all_points(G);
    audit.point_count = pts.size();
    std::vector<Circle> circles = enumerate_circles(G);
    audit.circle_count = circles.size();

    size_t np = pts.size();
    size_t blocks = (np + 63) / 64;
    std::vector<std::vector<uint64_t>> member(circles.size(), std::vector<uint64_t>(blocks, 0));
    bool uniform = true;
    uint64_t k = 0;
    for (size_t ci = 0; ci < circles.size(); ++ci) {
        uint64_t cnt = 0;
        for (size_t pi = 0; pi < np; ++pi)
            if (circle_contains(G, circles[ci], pts[pi])) {
                member[ci][pi / 64] |= uint64_t(1) << (pi % 64);
                ++cnt;
            }
        if (ci == 0) k = cnt;
        uniform &= (cnt == k);
    }
    audit.points_per_circle = k;

    uint64_t through_point = 0;
    for (size_t pi = 0; pi < np; ++pi) {
        uint64_t cnt = 0;
        for (size_t ci = 0; ci < circles.size(); ++ci)
            cnt += (member[ci][pi / 64] >> (pi % 64)) & 1;
        if (pi == 0) through_point = cnt;
        uniform &= (cnt == through_point);
    }
    audit.circles_through_point = through_point;

    uint64_t through_pair = 0;
    bool first_pair = true;
    for (size_t pi = 0; pi < np; ++pi)
        for (size_t pj = pi + 1; pj < np; ++pj) {
            uint64_t cnt = 0;
            for (size_t ci = 0; ci < circles.size(); ++ci)
                cnt += ((member[ci][pi / 64] >> (pi % 64)) & (member[ci][pj / 64] >> (pj % 64))) & 1;
            if (first_pair) {
                through_pair = cnt;
                first_pair = false;
            }
            uniform &= (cnt == through_pair);
        }
    audit.circles_through_pair = through_pair;

    auto common_count = [&](size_t ci, size_t cj) {
        uint64_t n = 0;
        for (size_t bl = 0; bl < blocks; ++bl) n += uint64_t(std::popcount(member[ci][bl] & member[cj][bl]));
        return n;
    };
    uint64_t tangents = 0;
    bool first_tangent = true;
    for (size_t ci = 0; ci < circles.size(); ++ci)
        for (size_t pi = 0; pi < np; ++pi) {
            if (!((member[ci][pi / 64] >> (pi % 64)) & 1)) continue;
            uint64_t cnt = 0;
            for (size_t cj = 0; cj < circles.size(); ++cj) {
                if (!((member[cj][pi / 64] >> (pi % 64)) & 1)) continue;
                // Touching is reflexive: a circle touches itself in each of
                // its points, so the pencil of circles touching at p has q
                // members including the circle itself.
                if (cj == ci || common_count(ci, cj) == 1) ++cnt;
            }
            if (first_tangent) {
                tangents = cnt;
                first_tangent = false;
            }
            uniform &= (cnt == tangents);
        }
    audit.tangents_at_point = tangents;

    audit.uniform = uniform;
    audit.matches_closed_forms = uniform && audit.point_count == q * q + 1 &&
                                 audit.circle_count == q * (q * q + 1) &&
                                 audit.points_per_circle == q + 1 &&
                                 audit.circles_through_point == q * q + q &&
                                 audit.circles_through_pair == q + 1 &&
                                 audit.tangents_at_point == q;
    return audit;
}

/// Exhaustive verification of the three touching-plane axioms.
struct AxiomReport {
    bool unique_circle_through_triples = false; // exactly one circle per distinct triple
    bool touch_axiom = false;                   // unique touching circle per (C, a, b)
    bool four_point_witness = false;            // some 4 points lie on no common circle
    uint64_t triple_cases = 0;
    uint64_t touch_cases = 0;
};

inline AxiomReport verify_axioms(const ExtCtx& G) {
    if (G.q() > 8) fail(errc::too_large, "axiom sweep beyond desk scale");
    AxiomReport rep;
    std::vector<Point> pts = all_points(G);
    std::vector<Circle> circles = enumerate_circles(G);

    bool m1 = true;
    uint64_t triples = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            for (size_t l = j + 1; l < pts.size(); ++l) {
                ++triples;
                Circle c = circle_through(G, pts[i], pts[j], pts[l]);
                m1 &= circle_contains(G, c, pts[i]) && circle_contains(G, c, pts[j]) &&
                      circle_contains(G, c, pts[l]);
                uint64_t count = 0;
                for (const Circle& d : circles)
                    if (circle_contains(G, d, pts[i]) && circle_contains(G, d, pts[j]) &&
                        circle_contains(G, d, pts[l]))
                        ++count;
                m1 &= (count == 1);
            }
    rep.unique_circle_through_triples = m1;
    rep.triple_cases = triples;

    bool m2 = true;
    uint64_t touches = 0;
    for (const Circle& c : circles)
        for (const Point& a : pts) {
            if (!circle_contains(G, c, a)) continue;
            for (const Point& b : pts) {
                if (circle_contains(G, c, b)) continue;
                ++touches;
                Circle t = tangent_circle(G, c, a, b);
                m2 &= circle_contains(G, t, a) && circle_contains(G, t, b);
                auto common = intersect(G, c, t);
                m2 &= (common.size() == 1 && common[0] == a);
                uint64_t count = 0;
                for (const Circle& d : circles) {
                    if (d == c || !circle_contains(G, d, a) || !circle_contains(G, d, b)) continue;
                    if (intersect(G, c, d).size() == 1) ++count;
                }
                m2 &= (count == 1);
            }
        }
    rep.touch_axiom = m2;
    rep.touch_cases = touches;

    // 0, 1, infinity lie on the extended base line; omega does not.
    Circle base = circle_through(G, Point::at(G.zero()), Point::at(G.one()), Point::infinity());
    rep.four_point_witness = !circle_contains(G, base, Point::at(G.omega()));
    return rep;
}

} // namespace mobius
