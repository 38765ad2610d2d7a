#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "plane.hpp"

namespace mobius {

// ---------------------------------------------------------------------------
// Byte-level primitives. Varints are unsigned LEB128. Field elements are
// packed runs of residues, each at the minimal bit width of p-1, LSB-first,
// padded with zero bits to a byte boundary per run.
// ---------------------------------------------------------------------------

struct ByteWriter {
    std::vector<uint8_t> bytes;

    void u8(uint8_t v) { bytes.push_back(v); }

    void raw(const void* p, size_t len) {
        const uint8_t* b = static_cast<const uint8_t*>(p);
        bytes.insert(bytes.end(), b, b + len);
    }

    void magic(const char* m) { raw(m, std::strlen(m)); }

    void varint(uint64_t v) {
        while (v >= 0x80) {
            u8(uint8_t(v) | 0x80);
            v >>= 7;
        }
        u8(uint8_t(v));
    }
};

struct ByteReader {
    const uint8_t* data = nullptr;
    size_t size = 0;
    size_t pos = 0;

    ByteReader(const uint8_t* d, size_t s) : data(d), size(s) {}
    explicit ByteReader(const std::vector<uint8_t>& v) : data(v.data()), size(v.size()) {}

    bool eof() const { return pos == size; }
    size_t remaining() const { return size - pos; }

    void need(size_t k) const {
        if (size - pos < k) fail(errc::invalid_container, "truncated data");
    }

    uint8_t u8() {
        need(1);
        return data[pos++];
    }

    void magic(const char* m) {
        size_t len = std::strlen(m);
        need(len);
        if (std::memcmp(data + pos, m, len) != 0) fail(errc::invalid_container, "bad magic");
        pos += len;
    }

    uint64_t varint() {
        uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            uint8_t b = u8();
            // The tenth byte contributes a single bit; anything larger would
            // overflow uint64_t.
            if (shift == 63 && b > 1) fail(errc::invalid_container, "varint overflow");
            v |= uint64_t(b & 0x7f) << shift;
            if (!(b & 0x80)) {
                if (shift > 0 && b == 0) fail(errc::invalid_container, "non-minimal varint");
                return v;
            }
        }
        fail(errc::invalid_container, "varint overflow");
    }
};

namespace detail {

class BitPacker {
public:
    explicit BitPacker(ByteWriter& w) : w_(w) {}

    void push(uint64_t v, unsigned bits) {
        acc_ |= v << nbits_;
        nbits_ += bits;
        while (nbits_ >= 8) {
            w_.u8(uint8_t(acc_));
            acc_ >>= 8;
            nbits_ -= 8;
        }
    }

    void pad_to_byte() {
        if (nbits_ > 0) {
            w_.u8(uint8_t(acc_));
            acc_ = 0;
            nbits_ = 0;
        }
    }

private:
    ByteWriter& w_;
    uint64_t acc_ = 0;
    unsigned nbits_ = 0;
};

class BitUnpacker {
public:
    explicit BitUnpacker(ByteReader& r) : r_(r) {}

    uint64_t pull(unsigned bits) {
        while (nbits_ < bits) {
            acc_ |= uint64_t(r_.u8()) << nbits_;
            nbits_ += 8;
        }
        uint64_t v = acc_ & ((uint64_t(1) << bits) - 1);
        acc_ >>= bits;
        nbits_ -= bits;
        return v;
    }

    /// Consumes the zero padding up to the byte boundary.
    void finish_run() {
        if (acc_ != 0) fail(errc::invalid_container, "nonzero padding bits");
        acc_ = 0;
        nbits_ = 0;
    }

private:
    ByteReader& r_;
    uint64_t acc_ = 0;
    unsigned nbits_ = 0;
};

} // namespace detail

/// One base-field element as a padded run of n residues.
inline void write_element(ByteWriter& w, const FieldCtx& F, FieldElem x) {
    detail::BitPacker bp(w);
    for (uint64_t d : F.to_digits(x)) bp.push(d, F.residue_bits());
    bp.pad_to_byte();
}

inline FieldElem read_element(ByteReader& r, const FieldCtx& F) {
    detail::BitUnpacker bu(r);
    std::vector<uint32_t> digits(static_cast<size_t>(F.n()));
    for (auto& d : digits) {
        uint64_t v = bu.pull(F.residue_bits());
        if (v >= F.p()) fail(errc::invalid_container, "residue out of range");
        d = uint32_t(v);
    }
    bu.finish_run();
    return F.from_digits(digits);
}

// ---------------------------------------------------------------------------
// Field-parameter block: magic byte, p, n, modulus coefficients (n+1 residues
// in one padded run, constant term first), presence byte, and when present the
// quadratic-extension coefficients (b0, b1, 1) as three field elements.
// ---------------------------------------------------------------------------

inline constexpr uint8_t kFieldBlockMagic = 0xF1;

inline void write_field_block(ByteWriter& w, const FieldCtx& F, const ExtCtx* ext) {
    w.u8(kFieldBlockMagic);
    w.varint(F.p());
    w.varint(F.n());
    detail::BitPacker bp(w);
    for (uint64_t c : F.modulus()) bp.push(c, F.residue_bits());
    bp.pad_to_byte();
    if (ext == nullptr) {
        w.u8(0x00);
    } else {
        w.u8(0x01);
        write_element(w, F, ext->b0());
        write_element(w, F, ext->b1());
        write_element(w, F, F.one());
    }
}

struct FieldBlock {
    FieldCtx base;
    std::optional<ExtCtx> ext;
};

inline FieldBlock read_field_block(ByteReader& r) {
    if (r.u8() != kFieldBlockMagic) fail(errc::invalid_container, "bad field block magic");
    uint64_t p = r.varint();
    uint64_t n = r.varint();
    if (n == 0 || n > 63) fail(errc::invalid_container, "unsupported extension degree");
    unsigned rb = (p < 2) ? 1 : unsigned(std::bit_width(p - 1));
    detail::BitUnpacker bu(r);
    std::vector<uint32_t> mod(static_cast<size_t>(n + 1));
    for (auto& c : mod) {
        uint64_t v = bu.pull(rb);
        if (p >= 2 && v >= p) fail(errc::invalid_container, "modulus residue out of range");
        c = uint32_t(v);
    }
    bu.finish_run();
    FieldCtx base = [&] {
        try {
            return FieldCtx::make(p, n, mod);
        } catch (const error& e) {
            fail(errc::invalid_container, std::string("invalid field parameters: ") + e.what());
        }
    }();
    uint8_t has_ext = r.u8();
    if (has_ext > 1) fail(errc::invalid_container, "bad quadratic presence flag");
    std::optional<ExtCtx> ext;
    if (has_ext) {
        FieldElem b0 = read_element(r, base);
        FieldElem b1 = read_element(r, base);
        FieldElem lead = read_element(r, base);
        if (lead != base.one()) fail(errc::invalid_container, "quadratic must be monic");
        try {
            ext = ExtCtx::make(base, std::array<FieldElem, 2>{b0, b1});
        } catch (const error& e) {
            fail(errc::invalid_container, std::string("invalid quadratic extension: ") + e.what());
        }
    }
    return {std::move(base), std::move(ext)};
}

// ---------------------------------------------------------------------------
// Points and circles.
// ---------------------------------------------------------------------------

/// Tagged point: 0x00 finite / 0x01 infinity, then both coordinates (zero for
/// infinity, keeping records fixed-size).
inline void write_point(ByteWriter& w, const ExtCtx& G, const Point& p) {
    w.u8(p.inf ? 0x01 : 0x00);
    ExtElem z = p.inf ? G.zero() : p.z;
    write_element(w, G.base(), z.re);
    write_element(w, G.base(), z.im);
}

inline Point read_point(ByteReader& r, const ExtCtx& G) {
    uint8_t tag = r.u8();
    if (tag > 1) fail(errc::invalid_container, "bad point tag");
    FieldElem re = read_element(r, G.base());
    FieldElem im = read_element(r, G.base());
    if (tag == 1) {
        if (re != G.base().zero() || im != G.base().zero())
            fail(errc::invalid_container, "nonzero coordinates on infinity");
        return Point::infinity();
    }
    return Point::at({re, im});
}

/// Untagged finite point (keystream records).
inline void write_finite_point(ByteWriter& w, const ExtCtx& G, ExtElem z) {
    write_element(w, G.base(), z.re);
    write_element(w, G.base(), z.im);
}

inline ExtElem read_finite_point(ByteReader& r, const ExtCtx& G) {
    FieldElem re = read_element(r, G.base());
    FieldElem im = read_element(r, G.base());
    return {re, im};
}

/// Circle as its four canonical coefficients (alpha, beta.re, beta.im, gamma).
inline void write_circle(ByteWriter& w, const ExtCtx& G, const Circle& c) {
    write_element(w, G.base(), c.alpha);
    write_element(w, G.base(), c.beta.re);
    write_element(w, G.base(), c.beta.im);
    write_element(w, G.base(), c.gamma);
}

inline Circle read_circle(ByteReader& r, const ExtCtx& G) {
    FieldElem alpha = read_element(r, G.base());
    FieldElem bre = read_element(r, G.base());
    FieldElem bim = read_element(r, G.base());
    FieldElem gamma = read_element(r, G.base());
    ExtElem beta{bre, bim};
    if (circle_coeffs_degenerate(G, alpha, beta, gamma))
        fail(errc::invalid_container, "degenerate circle coefficients");
    Circle c = canonical_circle(G, alpha, beta, gamma);
    if (c.alpha != alpha || c.beta != beta || c.gamma != gamma)
        fail(errc::invalid_container, "circle coefficients not canonical");
    return c;
}

} // namespace mobius
