#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mobius {

/// Element of a finite field GF(p^n), stored as the packed index
/// v = sum c_i * p^i of its coefficient vector (c_0, ..., c_{n-1}) in the
/// power basis of the context's irreducible polynomial. Index order is the
/// canonical enumeration order (colexicographic on the coefficient vector).
struct FieldElem {
    uint64_t v = 0;

    friend bool operator==(FieldElem a, FieldElem b) { return a.v == b.v; }
    friend bool operator!=(FieldElem a, FieldElem b) { return a.v != b.v; }
    friend bool operator<(FieldElem a, FieldElem b) { return a.v < b.v; }
};

namespace detail {

inline bool is_prime_u64(uint64_t p) {
    if (p < 2) return false;
    for (uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

/// Dense polynomial over GF(p) as a digit vector, constant term first.
/// Used only at context-construction time; element arithmetic never touches it.
struct PolyGFp {
    std::vector<uint32_t> c; // may have trailing zeros

    int degree() const {
        for (int i = int(c.size()) - 1; i >= 0; --i)
            if (c[size_t(i)] != 0) return i;
        return -1;
    }
};

inline PolyGFp poly_mul(const PolyGFp& a, const PolyGFp& b, uint64_t p) {
    PolyGFp r;
    if (a.degree() < 0 || b.degree() < 0) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i]) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = uint32_t((r.c[i + j] + uint64_t(a.c[i]) * b.c[j]) % p);
    }
    return r;
}

/// Remainder of a modulo the monic polynomial m.
inline PolyGFp poly_mod(PolyGFp a, const PolyGFp& m, uint64_t p) {
    int dm = m.degree();
    for (int d = a.degree(); d >= dm; d = a.degree()) {
        uint64_t lead = a.c[size_t(d)];
        for (int i = 0; i <= dm; ++i) {
            uint64_t sub = lead * m.c[size_t(i)] % p;
            uint64_t cur = a.c[size_t(d - dm + i)];
            a.c[size_t(d - dm + i)] = uint32_t((cur + p - sub) % p);
        }
    }
    return a;
}

/// Trial division by every monic polynomial of degree 1..deg(f)/2.
/// Adequate at desk scale; the caller guards the p^(deg/2) cost.
inline bool poly_is_irreducible(const PolyGFp& f, uint64_t p) {
    int n = f.degree();
    if (n <= 0) return false;
    if (n == 1) return true;
    for (int d = 1; 2 * d <= n; ++d) {
        uint64_t count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (uint64_t j = 0; j < count; ++j) {
            PolyGFp g;
            g.c.assign(size_t(d) + 1, 0);
            uint64_t t = j;
            for (int i = 0; i < d; ++i) {
                g.c[size_t(i)] = uint32_t(t % p);
                t /= p;
            }
            g.c[size_t(d)] = 1;
            if (poly_mod(f, g, p).degree() < 0) return false;
        }
    }
    return true;
}

} // namespace detail

/// Immutable context for GF(p^n). Arithmetic on odd-characteristic fields of
/// desk scale (and every field up to 2^20 elements) runs on discrete-log
/// tables built once here; characteristic-2 fields additionally get a
/// shift-and-xor path that works at any supported size.
class FieldCtx {
public:
    static constexpr uint64_t kTableLimit = uint64_t(1) << 20;
    static constexpr uint64_t kEnumerationLimit = uint64_t(1) << 24;

    /// Builds GF(p^n). When `irreducible` is empty the default modulus is the
    /// first irreducible in the constant-term-first lexicographic scan of
    /// monic degree-n polynomials.
    static FieldCtx make(uint64_t p, uint64_t n, std::vector<uint32_t> irreducible = {}) {
        if (!detail::is_prime_u64(p)) fail(errc::not_prime, "p = " + std::to_string(p) + " is not prime");
        if (n < 1) fail(errc::degree_mismatch, "extension degree must be at least 1");
        if (p > (uint64_t(1) << 31)) fail(errc::too_large, "characteristic beyond supported range");
        uint64_t q = 1;
        for (uint64_t i = 0; i < n; ++i) {
            if (q > (uint64_t(1) << 62) / p) fail(errc::too_large, "field order exceeds 2^62");
            q *= p;
        }

        // Irreducibility by trial division costs ~p^(n/2) divisions.
        uint64_t half_cost = 1;
        for (uint64_t i = 0; i < (n + 1) / 2; ++i) {
            half_cost *= p;
            if (half_cost > (uint64_t(1) << 22))
                fail(errc::too_large, "irreducibility check beyond desk scale for these parameters");
        }

        FieldCtx ctx;
        ctx.p_ = p;
        ctx.n_ = n;
        ctx.q_ = q;
        if (irreducible.empty()) {
            ctx.irr_ = default_irreducible(p, n);
        } else {
            if (irreducible.size() != n + 1)
                fail(errc::degree_mismatch, "modulus needs exactly n+1 coefficients, constant term first");
            for (uint32_t c : irreducible)
                if (c >= p) fail(errc::degree_mismatch, "modulus coefficient out of range");
            if (irreducible.back() != 1) fail(errc::degree_mismatch, "modulus must be monic");
            detail::PolyGFp f{std::vector<uint32_t>(irreducible.begin(), irreducible.end())};
            if (n > 1 && !detail::poly_is_irreducible(f, p))
                fail(errc::reducible_polynomial, "modulus is reducible over GF(" + std::to_string(p) + ")");
            ctx.irr_ = std::move(irreducible);
        }
        ctx.finish_init();
        return ctx;
    }

    uint64_t p() const { return p_; }
    uint64_t n() const { return n_; }
    uint64_t order() const { return q_; }
    const std::vector<uint32_t>& modulus() const { return irr_; }
    std::string label() const {
        return n_ == 1 ? "GF(" + std::to_string(p_) + ")"
                       : "GF(" + std::to_string(p_) + "^" + std::to_string(n_) + ")";
    }

    friend bool operator==(const FieldCtx& a, const FieldCtx& b) {
        return a.p_ == b.p_ && a.n_ == b.n_ && a.irr_ == b.irr_;
    }
    friend bool operator!=(const FieldCtx& a, const FieldCtx& b) { return !(a == b); }

    FieldElem zero() const { return {}; }
    FieldElem one() const { return {1}; }

    FieldElem elem(uint64_t index) const {
        if (index >= q_) fail(errc::bad_params, "element index out of range");
        return {index};
    }

    /// All elements in canonical (packed-index) order.
    std::vector<FieldElem> enumerate() const {
        if (q_ > kEnumerationLimit) fail(errc::too_large, "enumeration beyond the 2^24 guard");
        std::vector<FieldElem> out;
        out.reserve(size_t(q_));
        for (uint64_t i = 0; i < q_; ++i) out.push_back({i});
        return out;
    }

    std::vector<uint32_t> to_digits(FieldElem a) const {
        std::vector<uint32_t> d(static_cast<size_t>(n_));
        uint64_t v = a.v;
        for (uint64_t i = 0; i < n_; ++i) {
            d[size_t(i)] = uint32_t(v % p_);
            v /= p_;
        }
        return d;
    }

    FieldElem from_digits(const std::vector<uint32_t>& d) const {
        if (d.size() != n_) fail(errc::degree_mismatch, "coefficient vector has wrong length");
        uint64_t v = 0;
        for (size_t i = d.size(); i-- > 0;) {
            if (d[i] >= p_) fail(errc::bad_params, "residue out of range");
            v = v * p_ + d[i];
        }
        return {v};
    }

    FieldElem add(FieldElem a, FieldElem b) const {
        if (p_ == 2) return {a.v ^ b.v};
        uint64_t r = 0, mul = 1, av = a.v, bv = b.v;
        for (uint64_t i = 0; i < n_; ++i) {
            r += (av % p_ + bv % p_) % p_ * mul;
            av /= p_;
            bv /= p_;
            mul *= p_;
        }
        return {r};
    }

    FieldElem neg(FieldElem a) const {
        if (p_ == 2) return a;
        uint64_t r = 0, mul = 1, av = a.v;
        for (uint64_t i = 0; i < n_; ++i) {
            uint64_t d = av % p_;
            r += (d ? p_ - d : 0) * mul;
            av /= p_;
            mul *= p_;
        }
        return {r};
    }

    FieldElem sub(FieldElem a, FieldElem b) const { return add(a, neg(b)); }

    FieldElem mul(FieldElem a, FieldElem b) const {
        if (has_tables_) {
            if (a.v == 0 || b.v == 0) return {};
            return {exp_[size_t((uint64_t(log_[size_t(a.v)]) + log_[size_t(b.v)]) % (q_ - 1))]};
        }
        return mul_generic(a, b);
    }

    FieldElem inv(FieldElem a) const {
        if (a.v == 0) fail(errc::division_by_zero, "inverse of zero in " + label());
        if (has_tables_) return {exp_[size_t((q_ - 1 - log_[size_t(a.v)]) % (q_ - 1))]};
        return pow(a, q_ - 2);
    }

    FieldElem div(FieldElem a, FieldElem b) const { return mul(a, inv(b)); }

    FieldElem pow(FieldElem a, uint64_t e) const {
        if (has_tables_) {
            if (a.v == 0) return e == 0 ? one() : zero();
            return {exp_[size_t(uint64_t(log_[size_t(a.v)]) * (e % (q_ - 1)) % (q_ - 1))]};
        }
        FieldElem r = one(), base = a;
        while (e) {
            if (e & 1) r = mul_generic(r, base);
            base = mul_generic(base, base);
            e >>= 1;
        }
        return r;
    }

    FieldElem from_int(int64_t k) const {
        int64_t r = k % int64_t(p_);
        if (r < 0) r += int64_t(p_);
        return {uint64_t(r)};
    }

    /// Absolute trace down to the prime field, as a residue mod p.
    uint32_t absolute_trace(FieldElem a) const {
        FieldElem acc = zero(), t = a;
        for (uint64_t i = 0; i < n_; ++i) {
            acc = add(acc, t);
            t = pow(t, p_);
        }
        return uint32_t(acc.v % p_); // the trace lies in the prime subfield
    }

    bool is_square(FieldElem a) const {
        if (a.v == 0) return true;
        if (p_ == 2) return true;
        return pow(a, (q_ - 1) / 2) == one();
    }

    /// Square root when one exists. Characteristic 2 squares bijectively;
    /// odd characteristic uses the log tables or Tonelli-Shanks.
    std::optional<FieldElem> sqrt(FieldElem a) const {
        if (a.v == 0) return zero();
        if (p_ == 2) {
            FieldElem r = a; // a^(2^(n-1)) via n-1 squarings
            for (uint64_t i = 0; i + 1 < n_; ++i) r = mul(r, r);
            return r;
        }
        if (has_tables_) {
            uint64_t l = log_[size_t(a.v)];
            if (l & 1) return std::nullopt;
            return FieldElem{exp_[size_t(l / 2)]};
        }
        return tonelli_shanks(a);
    }

    /// Solves s^2 + s = c in characteristic 2 (one of the two roots s, s+1),
    /// or nullopt when the absolute trace of c is 1.
    std::optional<FieldElem> solve_artin_schreier(FieldElem c) const {
        if (p_ != 2) fail(errc::bad_params, "Artin-Schreier solver requires characteristic 2");
        uint64_t s = 0;
        for (const auto& row : as_pivots_)
            if (std::popcount(row.second & c.v) & 1) s |= uint64_t(1) << row.first;
        for (uint64_t mask : as_null_rows_)
            if (std::popcount(mask & c.v) & 1) return std::nullopt;
        return FieldElem{s};
    }

    unsigned residue_bits() const { return residue_bits_; }
    size_t elem_bytes() const { return size_t((n_ * residue_bits_ + 7) / 8); }

private:
    static std::vector<uint32_t> default_irreducible(uint64_t p, uint64_t n) {
        // Constant-term-first lexicographic scan over monic degree-n candidates.
        uint64_t count = 1;
        for (uint64_t i = 0; i < n; ++i) count *= p;
        for (uint64_t j = 0; j < count; ++j) {
            std::vector<uint32_t> c(size_t(n) + 1, 0);
            uint64_t t = j;
            for (uint64_t i = n; i-- > 0;) { // t's least significant digit -> c[n-1]
                c[size_t(i)] = uint32_t(t % p);
                t /= p;
            }
            c[size_t(n)] = 1;
            detail::PolyGFp f{std::vector<uint32_t>(c.begin(), c.end())};
            if (n == 1 || detail::poly_is_irreducible(f, p)) return c;
        }
        fail(errc::internal, "no irreducible polynomial found"); // unreachable
    }

    void finish_init() {
        residue_bits_ = unsigned(std::bit_width(p_ - 1));
        if (residue_bits_ == 0) residue_bits_ = 1;
        if (p_ == 2) {
            irr_mask_ = 0;
            for (uint64_t i = 0; i <= n_; ++i)
                if (irr_[size_t(i)]) irr_mask_ |= uint64_t(1) << i;
        }
        if (q_ <= kTableLimit && q_ > 2) build_tables();
        if (p_ == 2) build_artin_schreier();
    }

    FieldElem mul_generic(FieldElem a, FieldElem b) const {
        if (p_ == 2) {
            uint64_t r = 0, av = a.v, bv = b.v;
            while (bv) {
                if (bv & 1) r ^= av;
                bv >>= 1;
                av <<= 1;
                if ((av >> n_) & 1) av ^= irr_mask_;
            }
            return {r};
        }
        // Digit convolution followed by reduction modulo the monic modulus.
        uint64_t acc[127] = {0};
        uint64_t av = a.v;
        for (uint64_t i = 0; i < n_; ++i, av /= p_) {
            uint64_t da = av % p_;
            if (!da) continue;
            uint64_t bv = b.v;
            for (uint64_t j = 0; j < n_; ++j, bv /= p_) acc[i + j] += da * (bv % p_);
        }
        for (uint64_t d = 2 * n_ - 2; d >= n_ && d < 127; --d) {
            uint64_t c = acc[d] % p_;
            if (c)
                for (uint64_t i = 0; i < n_; ++i)
                    acc[d - n_ + i] += c * (p_ - irr_[size_t(i)]) % p_;
            acc[d] = 0;
            if (d == n_) break;
        }
        uint64_t r = 0, mul = 1;
        for (uint64_t i = 0; i < n_; ++i) {
            r += acc[i] % p_ * mul;
            mul *= p_;
        }
        return {r};
    }

    void build_tables() {
        // Factor the group order, then scan for a generator in index order.
        std::vector<uint64_t> prime_factors;
        uint64_t m = q_ - 1;
        for (uint64_t d = 2; d * d <= m; ++d)
            if (m % d == 0) {
                prime_factors.push_back(d);
                while (m % d == 0) m /= d;
            }
        if (m > 1) prime_factors.push_back(m);

        FieldElem g{};
        for (uint64_t cand = 1; cand < q_; ++cand) {
            FieldElem c{cand};
            bool ok = true;
            for (uint64_t r : prime_factors) {
                FieldElem t = one();
                uint64_t e = (q_ - 1) / r;
                FieldElem base = c;
                while (e) {
                    if (e & 1) t = mul_generic(t, base);
                    base = mul_generic(base, base);
                    e >>= 1;
                }
                if (t == one()) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                g = c;
                break;
            }
        }
        exp_.resize(size_t(q_ - 1));
        log_.assign(size_t(q_), 0);
        FieldElem cur = one();
        for (uint64_t i = 0; i < q_ - 1; ++i) {
            exp_[size_t(i)] = uint32_t(cur.v);
            log_[size_t(cur.v)] = uint32_t(i);
            cur = mul_generic(cur, g);
        }
        has_tables_ = true;
    }

    void build_artin_schreier() {
        // Row-reduce the GF(2)-linear map s -> s^2 + s once; solving later is
        // n parity evaluations.
        std::vector<uint64_t> col(static_cast<size_t>(n_));
        for (uint64_t i = 0; i < n_; ++i) {
            FieldElem e{uint64_t(1) << i};
            col[size_t(i)] = mul(e, e).v ^ e.v;
        }
        struct Row {
            uint64_t a; // coefficients over solution bits
            uint64_t t; // accumulated transform over input bits
        };
        std::vector<Row> rows(static_cast<size_t>(n_));
        for (uint64_t r = 0; r < n_; ++r) {
            uint64_t bits = 0;
            for (uint64_t i = 0; i < n_; ++i)
                if ((col[size_t(i)] >> r) & 1) bits |= uint64_t(1) << i;
            rows[size_t(r)] = {bits, uint64_t(1) << r};
        }
        // Full reduction first; pivot transforms are only final once every
        // column has been eliminated from every other row.
        std::vector<std::pair<unsigned, size_t>> pivot_rows;
        size_t rank = 0;
        for (uint64_t c = 0; c < n_ && rank < rows.size(); ++c) {
            size_t pivot = rank;
            while (pivot < rows.size() && !((rows[pivot].a >> c) & 1)) ++pivot;
            if (pivot == rows.size()) continue;
            std::swap(rows[rank], rows[pivot]);
            for (size_t r = 0; r < rows.size(); ++r)
                if (r != rank && ((rows[r].a >> c) & 1)) {
                    rows[r].a ^= rows[rank].a;
                    rows[r].t ^= rows[rank].t;
                }
            pivot_rows.emplace_back(unsigned(c), rank);
            ++rank;
        }
        as_pivots_.clear();
        as_null_rows_.clear();
        for (const auto& [c, idx] : pivot_rows) as_pivots_.emplace_back(c, rows[idx].t);
        for (size_t r = rank; r < rows.size(); ++r) as_null_rows_.push_back(rows[r].t);
    }

    std::optional<FieldElem> tonelli_shanks(FieldElem a) const {
        if (pow(a, (q_ - 1) / 2) != one()) return std::nullopt;
        uint64_t m = q_ - 1, s = 0;
        while (!(m & 1)) {
            m >>= 1;
            ++s;
        }
        if (s == 1) return pow(a, (q_ + 1) / 4);
        FieldElem z = one();
        for (uint64_t cand = 1; cand < q_; ++cand) {
            z = FieldElem{cand};
            if (pow(z, (q_ - 1) / 2) != one()) break;
        }
        FieldElem c = pow(z, m);
        FieldElem t = pow(a, m);
        FieldElem r = pow(a, (m + 1) / 2);
        uint64_t e = s;
        while (t != one()) {
            uint64_t i = 0;
            FieldElem t2 = t;
            while (t2 != one() && i < e) {
                t2 = mul(t2, t2);
                ++i;
            }
            FieldElem b = c;
            for (uint64_t j = 0; j + i + 1 < e; ++j) b = mul(b, b);
            r = mul(r, b);
            c = mul(b, b);
            t = mul(t, c);
            e = i;
        }
        return r;
    }

    uint64_t p_ = 2, n_ = 1, q_ = 2;
    std::vector<uint32_t> irr_;
    uint64_t irr_mask_ = 0;
    unsigned residue_bits_ = 1;
    bool has_tables_ = false;
    std::vector<uint32_t> exp_, log_;
    std::vector<std::pair<unsigned, uint64_t>> as_pivots_;
    std::vector<uint64_t> as_null_rows_;
};

} // namespace mobius
