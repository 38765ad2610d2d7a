#include <catch2/catch_amalgamated.hpp>

#include "mobius/plane.hpp"
#include "mobius/rng.hpp"

#include <algorithm>
#include <set>
#include <vector>

using namespace mobius;

namespace {

ExtCtx make_plane(uint64_t p, uint64_t n) { return ExtCtx::make(FieldCtx::make(p, n)); }

std::vector<Point> brute_intersect(const ExtCtx& G, const Circle& a, const Circle& b) {
    std::vector<Point> out;
    for (const Point& p : all_points(G))
        if (circle_contains(G, a, p) && circle_contains(G, b, p)) out.push_back(p);
    std::sort(out.begin(), out.end(),
              [&](const Point& x, const Point& y) { return point_key(G, x) < point_key(G, y); });
    return out;
}

uint64_t brute_circles_through(const ExtCtx& G, const std::vector<Circle>& all, const Point& a, const Point& b,
                               const Point& c) {
    uint64_t n = 0;
    for (const Circle& k : all)
        n += circle_contains(G, k, a) && circle_contains(G, k, b) && circle_contains(G, k, c);
    return n;
}

Point random_point(const ExtCtx& G, DeterministicRng& rng) {
    uint64_t k = rng.uniform_below(G.order() + 1);
    return k == G.order() ? Point::infinity() : Point::at(G.elem(k));
}

} // namespace

TEST_CASE("circle enumeration is canonical, duplicate-free, and complete") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
        ExtCtx G = make_plane(p, n);
        uint64_t q = G.q();
        INFO("q=" << q);
        auto circles = enumerate_circles(G);
        CHECK(circles.size() == q * (q * q + 1));
        std::set<std::array<uint64_t, 4>> seen;
        for (const Circle& c : circles) {
            // canonical: the first nonzero coordinate of (alpha, beta, gamma) is one
            const FieldCtx& F = G.base();
            std::array<FieldElem, 4> coords{c.alpha, c.beta.re, c.beta.im, c.gamma};
            auto first = std::find_if(coords.begin(), coords.end(),
                                      [&](FieldElem x) { return x != F.zero(); });
            REQUIRE(first != coords.end());
            CHECK(*first == F.one());
            CHECK_FALSE(circle_coeffs_degenerate(G, c.alpha, c.beta, c.gamma));
            seen.insert({c.alpha.v, c.beta.re.v, c.beta.im.v, c.gamma.v});
            // every circle has q+1 points
            CHECK(points_of(G, c).size() == q + 1);
        }
        CHECK(seen.size() == circles.size());
    }
}

TEST_CASE("circle through three points: exhaustive uniqueness against enumeration") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 1}, {3, 1}}) {
        ExtCtx G = make_plane(p, n);
        auto pts = all_points(G);
        auto circles = enumerate_circles(G);
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                for (size_t k = j + 1; k < pts.size(); ++k) {
                    Circle c = circle_through(G, pts[i], pts[j], pts[k]);
                    CHECK(circle_contains(G, c, pts[i]));
                    CHECK(circle_contains(G, c, pts[j]));
                    CHECK(circle_contains(G, c, pts[k]));
                    CHECK(brute_circles_through(G, circles, pts[i], pts[j], pts[k]) == 1);
                }
    }
}

TEST_CASE("circle through three points: random samples at larger q") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 2}, {5, 1}, {3, 2}, {2, 3}}) {
        ExtCtx G = make_plane(p, n);
        DeterministicRng rng(17);
        for (int t = 0; t < 200; ++t) {
            Point a = random_point(G, rng), b = random_point(G, rng), c = random_point(G, rng);
            if (a == b || a == c || b == c) continue;
            Circle k = circle_through(G, a, b, c);
            CHECK(circle_contains(G, k, a));
            CHECK(circle_contains(G, k, b));
            CHECK(circle_contains(G, k, c));
            CHECK(points_of(G, k).size() == G.q() + 1);
        }
    }
}

TEST_CASE("degenerate circle construction fails loudly") {
    ExtCtx G = make_plane(2, 2);
    Point a = Point::at(G.zero()), b = Point::at(G.one());
    CHECK_THROWS_MATCHES(circle_through(G, a, a, b), error, Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.code() == errc::degenerate_points;
                         }));
    CHECK_THROWS_MATCHES(line_through(G, a, a), error, Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.code() == errc::degenerate_points;
                         }));
    CHECK_THROWS_MATCHES(line_through(G, a, Point::infinity()), error,
                         Catch::Matchers::Predicate<error>([](const error& e) { return e.code() == errc::bad_params; }));
}

TEST_CASE("lines are exactly the circles through infinity") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{3, 1}, {2, 2}}) {
        ExtCtx G = make_plane(p, n);
        for (const Circle& c : enumerate_circles(G)) CHECK(c.is_line() == circle_contains(G, c, Point::infinity()));
        // line_through matches the unique circle through p, k, infinity
        DeterministicRng rng(3);
        for (int t = 0; t < 100; ++t) {
            Point a = Point::at(G.elem(rng.uniform_below(G.order())));
            Point b = Point::at(G.elem(rng.uniform_below(G.order())));
            if (a == b) continue;
            Circle l = line_through(G, a, b);
            CHECK(l.is_line());
            CHECK(l == circle_through(G, a, b, Point::infinity()));
        }
    }
}

TEST_CASE("intersection against the brute-force oracle, exhaustively for tiny q") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 1}, {3, 1}}) {
        ExtCtx G = make_plane(p, n);
        auto circles = enumerate_circles(G);
        for (size_t i = 0; i < circles.size(); ++i)
            for (size_t j = i + 1; j < circles.size(); ++j) {
                auto got = intersect(G, circles[i], circles[j]);
                auto want = brute_intersect(G, circles[i], circles[j]);
                REQUIRE(got.size() == want.size());
                for (size_t t = 0; t < got.size(); ++t) CHECK(got[t] == want[t]);
                CHECK(got.size() <= 2);
            }
    }
}

TEST_CASE("intersection against the brute-force oracle, sampled at larger q") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 2}, {2, 3}, {3, 2}, {5, 1}, {7, 1}}) {
        ExtCtx G = make_plane(p, n);
        DeterministicRng rng(23);
        int done = 0;
        while (done < 120) {
            Point a = random_point(G, rng), b = random_point(G, rng), c = random_point(G, rng);
            Point d = random_point(G, rng), e = random_point(G, rng);
            if (a == b || a == c || b == c || d == e || d == a || e == a) continue;
            Circle c1 = circle_through(G, a, b, c);
            Circle c2 = circle_through(G, a, d, e); // guaranteed to share at least one point
            if (c1 == c2) continue;
            auto got = intersect(G, c1, c2);
            auto want = brute_intersect(G, c1, c2);
            REQUIRE(got.size() == want.size());
            for (size_t t = 0; t < got.size(); ++t) CHECK(got[t] == want[t]);
            ++done;
        }
        CHECK_THROWS_MATCHES(intersect(G, base_line(G), base_line(G)), error,
                             Catch::Matchers::Predicate<error>([](const error& e) {
                                 return e.code() == errc::identical_circles;
                             }));
    }
}

TEST_CASE("points_of returns finite points ascending, then infinity for lines") {
    ExtCtx G = make_plane(2, 2);
    Circle l = line_through(G, Point::at(G.zero()), Point::at(G.one()));
    auto pts = points_of(G, l);
    REQUIRE(pts.size() == G.q() + 1);
    CHECK(pts.back() == Point::infinity());
    for (size_t i = 0; i + 2 < pts.size(); ++i) CHECK(point_key(G, pts[i]) < point_key(G, pts[i + 1]));
    for (const Point& p : pts) CHECK(circle_contains(G, l, p));
}

TEST_CASE("double ratio detects concyclicity and is a map invariant") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{3, 1}, {2, 2}}) {
        ExtCtx G = make_plane(p, n);
        DeterministicRng rng(5);
        int done = 0;
        while (done < 60) {
            Point a = random_point(G, rng), b = random_point(G, rng), c = random_point(G, rng);
            if (a == b || a == c || b == c) continue;
            Circle k = circle_through(G, a, b, c);
            for (const Point& z : all_points(G)) {
                if (z == a || z == b || z == c) continue;
                Point dr = double_ratio(G, a, b, c, z);
                CHECK(in_extended_base(G, dr) == circle_contains(G, k, z));
            }
            // invariance under a random fractional linear map
            ExtElem ma = G.elem(rng.uniform_below(G.order())), mb = G.elem(rng.uniform_below(G.order()));
            ExtElem mc = G.elem(rng.uniform_below(G.order())), md = G.elem(rng.uniform_below(G.order()));
            if (G.sub(G.mul(ma, md), G.mul(mb, mc)) == G.zero()) continue;
            MoebiusMap m = make_map(G, ma, mb, mc, md);
            for (const Point& z : all_points(G)) {
                if (z == a || z == b || z == c) continue;
                Point lhs = double_ratio(G, apply_map(G, m, a), apply_map(G, m, b), apply_map(G, m, c),
                                         apply_map(G, m, z));
                CHECK(lhs == double_ratio(G, a, b, c, z));
            }
            ++done;
        }
    }
}

TEST_CASE("fractional linear maps are incidence-preserving bijections") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{3, 1}, {2, 2}}) {
        ExtCtx G = make_plane(p, n);
        DeterministicRng rng(29);
        auto pts = all_points(G);
        int done = 0;
        while (done < 40) {
            ExtElem a = G.elem(rng.uniform_below(G.order())), b = G.elem(rng.uniform_below(G.order()));
            ExtElem c = G.elem(rng.uniform_below(G.order())), d = G.elem(rng.uniform_below(G.order()));
            if (G.sub(G.mul(a, d), G.mul(b, c)) == G.zero()) continue;
            MoebiusMap m = make_map(G, a, b, c, d);
            MoebiusMap mi = inverse_map(G, m);
            std::set<uint64_t> image;
            for (const Point& z : pts) {
                Point w = apply_map(G, m, z);
                image.insert(point_key(G, w));
                CHECK(apply_map(G, mi, w) == z);
            }
            CHECK(image.size() == pts.size());
            // circles map to circles as point sets
            Point p1 = random_point(G, rng), p2 = random_point(G, rng), p3 = random_point(G, rng);
            if (p1 == p2 || p1 == p3 || p2 == p3) continue;
            Circle k = circle_through(G, p1, p2, p3);
            Circle img = map_circle(G, m, k);
            for (const Point& z : pts) CHECK(circle_contains(G, k, z) == circle_contains(G, img, apply_map(G, m, z)));
            ++done;
        }
        CHECK_THROWS_MATCHES(make_map(G, G.one(), G.zero(), G.one(), G.zero()), error,
                             Catch::Matchers::Predicate<error>([](const error& e) {
                                 return e.code() == errc::singular_map;
                             }));
    }
}

TEST_CASE("the base-line image under z -> (az+b)/(cz+d) is the circle through the image points") {
    ExtCtx G = make_plane(3, 1);
    Circle bl = base_line(G);
    // the closure of the base field: q base points plus infinity
    auto pts = points_of(G, bl);
    REQUIRE(pts.size() == G.q() + 1);
    for (const Point& p : pts) CHECK(in_extended_base(G, p));
    DeterministicRng rng(31);
    int done = 0;
    while (done < 50) {
        ExtElem a = G.elem(rng.uniform_below(G.order())), b = G.elem(rng.uniform_below(G.order()));
        ExtElem c = G.elem(rng.uniform_below(G.order())), d = G.elem(rng.uniform_below(G.order()));
        if (G.sub(G.mul(a, d), G.mul(b, c)) == G.zero()) continue;
        Circle img = mobius_image(G, a, b, c, d);
        MoebiusMap m = make_map(G, a, b, c, d);
        for (const Point& z : pts) CHECK(circle_contains(G, img, apply_map(G, m, z)));
        ++done;
    }
}

TEST_CASE("tangent line touches at exactly the given point") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{3, 1}, {2, 2}, {5, 1}}) {
        ExtCtx G = make_plane(p, n);
        for (const Circle& c : enumerate_circles(G)) {
            if (c.is_line()) continue;
            for (const Point& pt : points_of(G, c)) {
                Circle t = tangent_line_at(G, c, pt);
                CHECK(t.is_line());
                CHECK(circle_contains(G, t, pt));
                auto cut = intersect(G, t, c);
                REQUIRE(cut.size() == 1);
                CHECK(cut[0] == pt);
            }
        }
    }
}

TEST_CASE("touching circle through an outside point is unique (touch axiom, constructive)") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 1}, {3, 1}, {2, 2}}) {
        ExtCtx G = make_plane(p, n);
        auto circles = enumerate_circles(G);
        DeterministicRng rng(41);
        auto pts = all_points(G);
        int done = 0;
        while (done < 150) {
            const Circle& c = circles[rng.uniform_below(circles.size())];
            Point a = pts[rng.uniform_below(pts.size())];
            Point b = pts[rng.uniform_below(pts.size())];
            if (!circle_contains(G, c, a) || circle_contains(G, c, b)) continue;
            Circle t = tangent_circle(G, c, a, b);
            CHECK(circle_contains(G, t, a));
            CHECK(circle_contains(G, t, b));
            auto cut = intersect(G, t, c);
            REQUIRE(cut.size() == 1);
            CHECK(cut[0] == a);
            // uniqueness via enumeration
            uint64_t count = 0;
            for (const Circle& d : circles) {
                if (d == c || !circle_contains(G, d, a) || !circle_contains(G, d, b)) continue;
                count += brute_intersect(G, c, d).size() == 1;
            }
            CHECK(count == 1);
            ++done;
        }
        // error paths
        Circle c0 = circles.back();
        auto on = points_of(G, c0);
        Point off = Point::at(G.zero());
        for (const Point& z : all_points(G))
            if (!circle_contains(G, c0, z)) {
                off = z;
                break;
            }
        CHECK_THROWS_MATCHES(tangent_circle(G, c0, off, off), error,
                             Catch::Matchers::Predicate<error>([](const error& e) {
                                 return e.code() == errc::point_not_on_circle;
                             }));
        CHECK_THROWS_MATCHES(tangent_circle(G, c0, on[0], on[1]), error,
                             Catch::Matchers::Predicate<error>([](const error& e) {
                                 return e.code() == errc::point_on_circle;
                             }));
    }
}

TEST_CASE("affine line form agrees with circle membership") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 2}, {3, 1}, {5, 1}}) {
        ExtCtx G = make_plane(p, n);
        const FieldCtx& F = G.base();
        for (const Circle& c : enumerate_circles(G)) {
            if (!c.is_line()) continue;
            auto L = detail::affine_line(G, c.beta, c.gamma);
            CHECK_FALSE((L.a == F.zero() && L.b == F.zero()));
            for (uint64_t i = 0; i < G.order(); ++i) {
                ExtElem z = G.elem(i);
                bool on = circle_contains(G, c, Point::at(z));
                FieldElem v = F.add(F.add(F.mul(L.a, z.re), F.mul(L.b, z.im)), L.rhs);
                CHECK(on == (v == F.zero()));
            }
        }
    }
}

TEST_CASE("center and norm-radius round-trip for non-line circles") {
    ExtCtx G = make_plane(3, 1);
    const FieldCtx& F = G.base();
    for (const Circle& c : enumerate_circles(G)) {
        if (c.is_line()) continue;
        REQUIRE(c.alpha == F.one());
        ExtElem center = G.neg(c.beta);
        FieldElem radius = F.sub(norm_form(G, center), c.gamma);
        Circle back = circle_from_center(G, center, radius);
        CHECK(back == c);
    }
    // zero radius-norm with norm-form kernel only at 0: degenerate over odd q
    CHECK_THROWS_MATCHES(circle_from_center(G, G.zero(), F.zero()), error,
                         Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.code() == errc::degenerate_points;
                         }));
}

TEST_CASE("plane audit matches the closed-form counts") {
    for (uint64_t q : {2ull, 3ull, 4ull, 5ull}) {
        ExtCtx G = q == 4 ? make_plane(2, 2) : make_plane(q, 1);
        PlaneAudit a = plane_audit(G);
        INFO("q=" << q);
        CHECK(a.q == q);
        CHECK(a.point_count == q * q + 1);
        CHECK(a.circle_count == q * (q * q + 1));
        CHECK(a.points_per_circle == q + 1);
        CHECK(a.circles_through_point == q * q + q);
        CHECK(a.circles_through_pair == q + 1);
        CHECK(a.tangents_at_point == q);
        CHECK(a.uniform);
        CHECK(a.matches_closed_forms);
    }
}

TEST_CASE("the three plane axioms verify exhaustively for q in {2,3}") {
    for (uint64_t q : {2ull, 3ull}) {
        ExtCtx G = make_plane(q, 1);
        AxiomReport r = verify_axioms(G);
        INFO("q=" << q);
        CHECK(r.unique_circle_through_triples);
        CHECK(r.touch_axiom);
        CHECK(r.four_point_witness);
        CHECK(r.triple_cases > 0);
        CHECK(r.touch_cases > 0);
    }
}
