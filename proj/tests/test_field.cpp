#include <catch2/catch_amalgamated.hpp>

#include "mobius/field.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

using namespace mobius;

namespace {

// Independent irreducibility oracle: dense polynomial arithmetic over GF(p),
// trial division by every monic polynomial of degree 1..deg/2.
using Poly = std::vector<uint32_t>; // coefficient i of t^i, constant first

Poly poly_mod(Poly a, const Poly& m, uint32_t p) {
    while (a.size() >= m.size()) {
        uint32_t lead = a.back();
        if (lead != 0) {
            size_t shift = a.size() - m.size();
            // m is monic, so subtract lead * m * t^shift.
            for (size_t i = 0; i < m.size(); ++i)
                a[i + shift] = (a[i + shift] + p * p - lead * m[i] % p * 1u % p) % p;
        }
        a.pop_back();
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

bool divides(const Poly& d, const Poly& m, uint32_t p) { return poly_mod(m, d, p).empty(); }

bool brute_irreducible(const Poly& m, uint32_t p) {
    size_t deg = m.size() - 1;
    for (size_t dd = 1; dd <= deg / 2; ++dd) {
        // every monic polynomial of degree dd
        uint64_t count = 1;
        for (size_t i = 0; i < dd; ++i) count *= p;
        for (uint64_t idx = 0; idx < count; ++idx) {
            Poly d(dd + 1, 0);
            uint64_t v = idx;
            for (size_t i = 0; i < dd; ++i) {
                d[i] = uint32_t(v % p);
                v /= p;
            }
            d[dd] = 1;
            if (divides(d, m, p)) return false;
        }
    }
    return true;
}

Poly modulus_of(const FieldCtx& F) {
    Poly m;
    for (auto c : F.modulus()) m.push_back(c);
    return m;
}

} // namespace

TEST_CASE("default moduli are the first irreducible in scan order and stay frozen") {
    struct Frozen {
        uint64_t p, n;
        Poly mod;
    };
    const std::vector<Frozen> cases = {
        {2, 2, {1, 1, 1}},
        {2, 3, {1, 0, 1, 1}},
        {2, 4, {1, 0, 0, 1, 1}},
        {2, 8, {1, 0, 0, 0, 1, 1, 0, 1, 1}},
        {3, 1, {0, 1}},
        {3, 2, {1, 0, 1}},
        {5, 1, {0, 1}},
    };
    for (const auto& c : cases) {
        FieldCtx F = FieldCtx::make(c.p, c.n);
        INFO("GF(" << c.p << "^" << c.n << ")");
        CHECK(modulus_of(F) == c.mod);
        if (c.n > 1) CHECK(brute_irreducible(c.mod, uint32_t(c.p)));
    }
}

TEST_CASE("field axioms hold on full enumeration for small orders") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {5, 1}, {7, 1}, {13, 1}, {2, 4}}) {
        FieldCtx F = FieldCtx::make(p, n);
        INFO(F.label());
        uint64_t q = F.order();
        for (uint64_t a = 0; a < q; ++a) {
            FieldElem A = F.elem(a);
            CHECK(F.add(A, F.zero()) == A);
            CHECK(F.mul(A, F.one()) == A);
            CHECK(F.add(A, F.neg(A)) == F.zero());
            if (a != 0) {
                CHECK(F.mul(A, F.inv(A)) == F.one());
                CHECK(F.div(F.one(), A) == F.inv(A));
            }
            for (uint64_t b = 0; b < q; ++b) {
                FieldElem B = F.elem(b);
                CHECK(F.add(A, B) == F.add(B, A));
                CHECK(F.mul(A, B) == F.mul(B, A));
                CHECK(F.sub(F.add(A, B), B) == A);
            }
        }
        // spot-check associativity/distributivity on a coarse grid
        for (uint64_t a = 0; a < q; a += 1 + q / 5)
            for (uint64_t b = 0; b < q; b += 1 + q / 5)
                for (uint64_t c = 0; c < q; c += 1 + q / 5) {
                    FieldElem A = F.elem(a), B = F.elem(b), C = F.elem(c);
                    CHECK(F.mul(F.mul(A, B), C) == F.mul(A, F.mul(B, C)));
                    CHECK(F.add(F.add(A, B), C) == F.add(A, F.add(B, C)));
                    CHECK(F.mul(A, F.add(B, C)) == F.add(F.mul(A, B), F.mul(A, C)));
                }
    }
}

TEST_CASE("multiplicative group order and Frobenius") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 3}, {3, 2}, {5, 1}, {2, 8}}) {
        FieldCtx F = FieldCtx::make(p, n);
        INFO(F.label());
        uint64_t q = F.order();
        for (uint64_t a = 1; a < q; ++a) {
            FieldElem A = F.elem(a);
            CHECK(F.pow(A, q - 1) == F.one()); // Lagrange
            for (uint64_t b = 0; b < q; b += 3) {
                FieldElem B = F.elem(b);
                CHECK(F.pow(F.add(A, B), p) == F.add(F.pow(A, p), F.pow(B, p)));
            }
        }
    }
}

TEST_CASE("digit codec round-trips and enumeration is the packed order") {
    FieldCtx F = FieldCtx::make(3, 2);
    REQUIRE(F.order() == 9);
    for (uint64_t i = 0; i < 9; ++i) {
        FieldElem x = F.elem(i);
        CHECK(x.v == i);
        CHECK(F.from_digits(F.to_digits(x)) == x);
    }
    CHECK(F.to_digits(F.elem(5)) == std::vector<uint32_t>{2, 1}); // 5 = 2 + 1*3
    auto all = F.enumerate();
    REQUIRE(all.size() == 9);
    for (uint64_t i = 0; i < 9; ++i) CHECK(all[size_t(i)].v == i);
}

TEST_CASE("from_int reduces modulo p") {
    FieldCtx F = FieldCtx::make(7, 1);
    CHECK(F.from_int(0) == F.zero());
    CHECK(F.from_int(7) == F.zero());
    CHECK(F.from_int(9) == F.elem(2));
    CHECK(F.from_int(-1) == F.elem(6));
}

TEST_CASE("square roots: characteristic 2 is a bijection, odd has (q+1)/2 squares") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 2}, {2, 3}, {2, 4}, {2, 8}}) {
        FieldCtx F = FieldCtx::make(p, n);
        INFO(F.label());
        for (uint64_t a = 0; a < F.order(); ++a) {
            FieldElem A = F.elem(a);
            CHECK(F.is_square(A));
            auto r = F.sqrt(A);
            REQUIRE(r.has_value());
            CHECK(F.mul(*r, *r) == A);
        }
    }
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{3, 1}, {5, 1}, {7, 1}, {3, 2}, {13, 1}}) {
        FieldCtx F = FieldCtx::make(p, n);
        INFO(F.label());
        uint64_t squares = 0;
        for (uint64_t a = 0; a < F.order(); ++a) {
            FieldElem A = F.elem(a);
            bool is_sq = false;
            for (uint64_t r = 0; r < F.order() && !is_sq; ++r)
                is_sq = F.mul(F.elem(r), F.elem(r)) == A;
            CHECK(F.is_square(A) == is_sq);
            auto root = F.sqrt(A);
            CHECK(root.has_value() == is_sq);
            if (root) CHECK(F.mul(*root, *root) == A);
            squares += is_sq;
        }
        CHECK(squares == (F.order() + 1) / 2);
    }
}

TEST_CASE("absolute trace is additive, Frobenius-stable, and balanced") {
    for (auto [p, n] : std::vector<std::pair<uint64_t, uint64_t>>{{2, 3}, {2, 4}, {3, 2}, {2, 8}}) {
        FieldCtx F = FieldCtx::make(p, n);
        INFO(F.label());
        std::vector<uint64_t> hist(p, 0);
        for (uint64_t a = 0; a < F.order(); ++a) {
            FieldElem A = F.elem(a);
            uint32_t t = F.absolute_trace(A);
            REQUIRE(t < p);
            ++hist[t];
            CHECK(F.absolute_trace(F.pow(A, p)) == t);
            for (uint64_t b = 0; b < F.order(); b += 5) {
                FieldElem B = F.elem(b);
                CHECK(F.absolute_trace(F.add(A, B)) == (t + F.absolute_trace(B)) % p);
            }
        }
        for (uint64_t v = 0; v < p; ++v) CHECK(hist[v] == F.order() / p);
    }
}

TEST_CASE("Artin-Schreier solver against exhaustive oracle") {
    for (uint64_t n : {1ull, 2ull, 3ull, 4ull, 8ull}) {
        FieldCtx F = FieldCtx::make(2, n);
        INFO(F.label());
        uint64_t solvable = 0;
        for (uint64_t y = 0; y < F.order(); ++y) {
            FieldElem Y = F.elem(y);
            auto s = F.solve_artin_schreier(Y);
            CHECK(s.has_value() == (F.absolute_trace(Y) == 0));
            if (s) {
                CHECK(F.add(F.mul(*s, *s), *s) == Y);
                ++solvable;
            }
        }
        CHECK(solvable == F.order() / 2);
    }
}

TEST_CASE("constructor rejects bad parameters") {
    CHECK_THROWS_MATCHES(FieldCtx::make(4, 1), error,
                         Catch::Matchers::Predicate<error>([](const error& e) { return e.code() == errc::not_prime; }));
    CHECK_THROWS_MATCHES(FieldCtx::make(1, 1), error,
                         Catch::Matchers::Predicate<error>([](const error& e) { return e.code() == errc::not_prime; }));
    // t^2 + 1 = (t+1)^2 over GF(2)
    CHECK_THROWS_MATCHES(FieldCtx::make(2, 2, {1, 0, 1}), error, Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.code() == errc::reducible_polynomial;
                         }));
    CHECK_THROWS_MATCHES(FieldCtx::make(2, 3, {1, 1, 1}), error, Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.code() == errc::degree_mismatch;
                         }));
    FieldCtx F = FieldCtx::make(5, 1);
    CHECK_THROWS_MATCHES(F.inv(F.zero()), error, Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.code() == errc::division_by_zero;
                         }));
}

TEST_CASE("explicit modulus is honored") {
    // The other irreducible cubic over GF(2).
    FieldCtx F = FieldCtx::make(2, 3, {1, 1, 0, 1});
    CHECK(modulus_of(F) == Poly{1, 1, 0, 1});
    for (uint64_t a = 1; a < 8; ++a) CHECK(F.mul(F.elem(a), F.inv(F.elem(a))) == F.one());
    // t^3 = t + 1 under this modulus: elem(2) is t, squaring twice gives t^4 = t^2 + t.
    FieldElem t = F.elem(2);
    CHECK(F.pow(t, 3) == F.elem(3));
    CHECK(F.pow(t, 4) == F.elem(6));
}
