#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "field.hpp"

namespace mobius {

/// Element of the quadratic extension G = F(omega), stored against the basis
/// (1, omega): x = re + im*omega with re, im in the base field.
struct ExtElem {
    FieldElem re, im;

    friend bool operator==(ExtElem a, ExtElem b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(ExtElem a, ExtElem b) { return !(a == b); }
};

/// Quadratic extension context: G = F[omega]/(omega^2 + b1*omega + b0) with a
/// modulus that has no root in F. Conjugation is the q-power Frobenius, the
/// unique involutorial automorphism of G fixing F, and is evaluated as x^q by
/// square-and-multiply.
class ExtCtx {
public:
    /// Builds G over `base`. Without an explicit modulus the scan picks the
    /// first irreducible (b0, b1) pair, coefficient vectors compared
    /// constant-term-first.
    static ExtCtx make(FieldCtx base, std::optional<std::array<FieldElem, 2>> quadratic = {}) {
        ExtCtx ctx;
        ctx.base_ = std::move(base);
        const FieldCtx& F = ctx.base_;
        if (F.order() > (uint64_t(1) << 31)) fail(errc::too_large, "extension order would exceed 2^62");
        if (quadratic) {
            if ((*quadratic)[0].v >= F.order() || (*quadratic)[1].v >= F.order())
                fail(errc::degree_mismatch, "quadratic coefficient out of range");
            ctx.b0_ = (*quadratic)[0];
            ctx.b1_ = (*quadratic)[1];
            if (!quadratic_irreducible(F, ctx.b0_, ctx.b1_))
                fail(errc::reducible_polynomial, "quadratic has a root in " + F.label());
        } else {
            bool found = false;
            for (uint64_t i0 = 0; i0 < F.order() && !found; ++i0)
                for (uint64_t i1 = 0; i1 < F.order() && !found; ++i1)
                    if (quadratic_irreducible(F, {i0}, {i1})) {
                        ctx.b0_ = {i0};
                        ctx.b1_ = {i1};
                        found = true;
                    }
            if (!found) fail(errc::internal, "no irreducible quadratic over " + F.label());
        }
        // Defensive exhaustive root check at desk scale, on top of the closed form.
        if (F.order() <= 4096) {
            for (uint64_t x = 0; x < F.order(); ++x) {
                FieldElem e{x};
                FieldElem val = F.add(F.add(F.mul(e, e), F.mul(ctx.b1_, e)), ctx.b0_);
                if (val == F.zero()) fail(errc::internal, "irreducibility test disagreement");
            }
        }
        ctx.finish_init();
        return ctx;
    }

    const FieldCtx& base() const { return base_; }
    uint64_t q() const { return base_.order(); }
    uint64_t order() const { return order_; }
    FieldElem b0() const { return b0_; }
    FieldElem b1() const { return b1_; }

    friend bool operator==(const ExtCtx& a, const ExtCtx& b) {
        return a.base_ == b.base_ && a.b0_ == b.b0_ && a.b1_ == b.b1_;
    }
    friend bool operator!=(const ExtCtx& a, const ExtCtx& b) { return !(a == b); }

    ExtElem zero() const { return {}; }
    ExtElem one() const { return {base_.one(), base_.zero()}; }
    ExtElem omega() const { return {base_.zero(), base_.one()}; }
    ExtElem embed(FieldElem a) const { return {a, base_.zero()}; }
    bool in_base(ExtElem x) const { return x.im == base_.zero(); }

    uint64_t index_of(ExtElem x) const { return x.re.v + q() * x.im.v; }
    ExtElem elem(uint64_t index) const {
        if (index >= order_) fail(errc::bad_params, "element index out of range");
        return {{index % q()}, {index / q()}};
    }

    std::vector<ExtElem> enumerate() const {
        if (order_ > FieldCtx::kEnumerationLimit) fail(errc::too_large, "enumeration beyond the 2^24 guard");
        std::vector<ExtElem> out;
        out.reserve(size_t(order_));
        for (uint64_t i = 0; i < order_; ++i) out.push_back(elem(i));
        return out;
    }

    ExtElem add(ExtElem x, ExtElem y) const { return {base_.add(x.re, y.re), base_.add(x.im, y.im)}; }
    ExtElem sub(ExtElem x, ExtElem y) const { return {base_.sub(x.re, y.re), base_.sub(x.im, y.im)}; }
    ExtElem neg(ExtElem x) const { return {base_.neg(x.re), base_.neg(x.im)}; }

    ExtElem mul(ExtElem x, ExtElem y) const {
        const FieldCtx& F = base_;
        FieldElem ac = F.mul(x.re, y.re);
        FieldElem bd = F.mul(x.im, y.im);
        FieldElem ad_bc = F.add(F.mul(x.re, y.im), F.mul(x.im, y.re));
        return {F.sub(ac, F.mul(b0_, bd)), F.sub(ad_bc, F.mul(b1_, bd))};
    }

    ExtElem scale(FieldElem a, ExtElem x) const { return {base_.mul(a, x.re), base_.mul(a, x.im)}; }

    ExtElem pow(ExtElem x, uint64_t e) const {
        ExtElem r = one(), b = x;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    /// x^q by square-and-multiply.
    ExtElem conjugate(ExtElem x) const { return pow(x, q()); }

    /// norm(x) = x * conjugate(x), always a base-field value.
    FieldElem norm(ExtElem x) const {
        ExtElem r = mul(x, conjugate(x));
        if (r.im != base_.zero()) fail(errc::internal, "norm escaped the base field");
        return r.re;
    }

    /// trace(x) = x + conjugate(x), always a base-field value.
    FieldElem trace(ExtElem x) const {
        ExtElem r = add(x, conjugate(x));
        if (r.im != base_.zero()) fail(errc::internal, "trace escaped the base field");
        return r.re;
    }

    ExtElem inv(ExtElem x) const {
        if (x == zero()) fail(errc::division_by_zero, "inverse of zero in the extension");
        ExtElem c = conjugate(x);
        ExtElem nr = mul(x, c);
        FieldElem inv_n = base_.inv(nr.re);
        return {base_.mul(c.re, inv_n), base_.mul(c.im, inv_n)};
    }

    ExtElem div(ExtElem x, ExtElem y) const { return mul(x, inv(y)); }

    /// Cached trace(omega) = -b1 and norm(omega) = b0; the geometry layer
    /// expands Hermitian values into base-field forms through these.
    FieldElem trace_omega() const { return t_omega_; }
    FieldElem norm_omega() const { return n_omega_; }
    /// omega - conjugate(omega): a nonzero element with trace 0.
    ExtElem omega_minus_conj() const { return omega_minus_conj_; }

private:
    static bool quadratic_irreducible(const FieldCtx& F, FieldElem b0, FieldElem b1) {
        if (F.p() == 2) {
            // Artin-Schreier criterion: substitute x = b1*y to get
            // y^2 + y = b0/b1^2, solvable in F iff the absolute trace is 0.
            if (b1 == F.zero()) return false; // squaring is onto in char 2
            FieldElem c = F.mul(b0, F.inv(F.mul(b1, b1)));
            return F.absolute_trace(c) == 1;
        }
        FieldElem disc = F.sub(F.mul(b1, b1), F.mul(F.from_int(4), b0));
        return disc != F.zero() && !F.is_square(disc);
    }

    void finish_init() {
        order_ = base_.order() * base_.order();
        ExtElem conj_omega = conjugate(omega());
        ExtElem t = add(omega(), conj_omega);
        ExtElem nm = mul(omega(), conj_omega);
        if (t.im != base_.zero() || nm.im != base_.zero())
            fail(errc::internal, "Frobenius is not an involution over this modulus");
        t_omega_ = t.re;
        n_omega_ = nm.re;
        omega_minus_conj_ = sub(omega(), conj_omega);
    }

    FieldCtx base_;
    FieldElem b0_, b1_;
    uint64_t order_ = 4;
    FieldElem t_omega_, n_omega_;
    ExtElem omega_minus_conj_;
};

} // namespace mobius
