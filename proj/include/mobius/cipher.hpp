#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "plane.hpp"
#include "rng.hpp"

namespace mobius {

using PointTriple = std::array<Point, 3>;
using KeyTriple = std::array<Circle, 3>;

/// The circle carrying a triple (message and ciphertext share it).
inline Circle triple_circle(const ExtCtx& G, const PointTriple& t) {
    return circle_through(G, t[0], t[1], t[2]);
}

/// Key admissibility: each key circle passes through its point and differs
/// from the carrier circle, and no two key circles meet on the carrier.
inline bool validate_key(const ExtCtx& G, const PointTriple& msg, const KeyTriple& key) {
    Circle M = triple_circle(G, msg);
    for (int i = 0; i < 3; ++i) {
        if (key[size_t(i)] == M) return false;
        if (!circle_contains(G, key[size_t(i)], msg[size_t(i)])) return false;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (const Point& pt : intersect(G, key[size_t(i)], M))
                if (circle_contains(G, key[size_t(j)], pt)) return false;
    return true;
}

/// Swap each point with the second intersection of its key circle and the
/// carrier (fixed point when the key touches the carrier). Self-inverse.
inline PointTriple encrypt_triple(const ExtCtx& G, const PointTriple& msg, const KeyTriple& key) {
    if (!validate_key(G, msg, key)) fail(errc::invalid_key, "key rejected for this triple");
    Circle M = triple_circle(G, msg);
    PointTriple out;
    for (int i = 0; i < 3; ++i) {
        auto pts = intersect(G, key[size_t(i)], M);
        if (pts.size() == 1) {
            if (pts[0] != msg[size_t(i)]) fail(errc::internal, "tangency point mismatch");
            out[size_t(i)] = msg[size_t(i)];
        } else if (pts.size() == 2) {
            if (pts[0] == msg[size_t(i)]) {
                out[size_t(i)] = pts[1];
            } else {
                if (pts[1] != msg[size_t(i)]) fail(errc::internal, "point missing from key/carrier cut");
                out[size_t(i)] = pts[0];
            }
        } else {
            fail(errc::internal, "key/carrier cut has unexpected size");
        }
    }
    return out;
}

inline PointTriple decrypt_triple(const ExtCtx& G, const PointTriple& ct, const KeyTriple& key) {
    return encrypt_triple(G, ct, key); // the cipher is an involution
}

// ---------------------------------------------------------------------------
// Byte <-> point encoding. Needs GF(2^n), n >= 2: each point carries 2n-2
// payload bits (all of re, the low n-2 bits of im) plus a 2-bit position tag
// (1, 2, 3) in the top bits of im, which makes the three points of a triple
// pairwise distinct. Bits are consumed LSB-first within each byte.
// ---------------------------------------------------------------------------

inline unsigned payload_bits_per_point(const ExtCtx& G) {
    if (G.base().p() != 2 || G.base().n() < 2)
        fail(errc::field_too_small, "byte encoding needs GF(2^n) with n >= 2");
    return unsigned(2 * G.base().n() - 2);
}

struct EncodedMessage {
    std::vector<PointTriple> triples;
    uint64_t bit_length = 0;
};

inline EncodedMessage encode_bytes(const ExtCtx& G, const uint8_t* data, size_t len) {
    unsigned ppp = payload_bits_per_point(G);
    uint64_t n = G.base().n();
    EncodedMessage out;
    out.bit_length = uint64_t(len) * 8;
    auto bit = [&](uint64_t i) -> uint64_t {
        return i < out.bit_length ? (data[i >> 3] >> (i & 7)) & 1 : 0; // zero padding
    };
    uint64_t per_triple = 3 * uint64_t(ppp);
    uint64_t ntriples = (out.bit_length + per_triple - 1) / per_triple;
    out.triples.reserve(ntriples);
    uint64_t idx = 0;
    for (uint64_t t = 0; t < ntriples; ++t) {
        PointTriple tr;
        for (unsigned pos = 0; pos < 3; ++pos) {
            uint64_t re = 0, im = 0;
            for (uint64_t b = 0; b < n; ++b) re |= bit(idx++) << b;
            for (uint64_t b = 0; b + 2 < n; ++b) im |= bit(idx++) << b;
            im |= uint64_t(pos + 1) << (n - 2);
            tr[pos] = Point::at({FieldElem{re}, FieldElem{im}});
        }
        out.triples.push_back(tr);
    }
    return out;
}

inline std::vector<uint8_t> decode_points(const ExtCtx& G, const std::vector<PointTriple>& triples,
                                          uint64_t bit_length) {
    unsigned ppp = payload_bits_per_point(G);
    uint64_t n = G.base().n();
    uint64_t per_triple = 3 * uint64_t(ppp);
    uint64_t required = bit_length == 0 ? 0 : (bit_length + per_triple - 1) / per_triple;
    if (required != triples.size()) fail(errc::length_mismatch, "bit length disagrees with triple count");
    std::vector<uint8_t> out((bit_length + 7) / 8, 0);
    uint64_t idx = 0;
    auto put = [&](uint64_t v) {
        if (idx < bit_length && v) out[idx >> 3] |= uint8_t(1u << (idx & 7));
        ++idx;
    };
    for (const PointTriple& tr : triples)
        for (unsigned pos = 0; pos < 3; ++pos) {
            const Point& p = tr[pos];
            if (p.inf) fail(errc::malformed_tag, "infinite point in decoded stream");
            if ((p.z.im.v >> (n - 2)) != pos + 1) fail(errc::malformed_tag, "position tag mismatch");
            for (uint64_t b = 0; b < n; ++b) put((p.z.re.v >> b) & 1);
            for (uint64_t b = 0; b + 2 < n; ++b) put((p.z.im.v >> b) & 1);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Candidate point sources.
// ---------------------------------------------------------------------------

class PointSource {
public:
    virtual ~PointSource() = default;
    /// Next candidate finite point; throws KeysourceExhausted when drained.
    virtual ExtElem next() = 0;
};

/// Unlimited stream of uniform finite points from the seeded generator.
class RandomPointSource final : public PointSource {
public:
    RandomPointSource(const ExtCtx& G, uint64_t seed) : q_(G.base().order()), rng_(seed) {}

    ExtElem next() override {
        FieldElem re{rng_.uniform_below(q_)};
        FieldElem im{rng_.uniform_below(q_)};
        return {re, im};
    }

private:
    uint64_t q_;
    DeterministicRng rng_;
};

/// Finite stream backed by a shared keystream file.
class VectorPointSource final : public PointSource {
public:
    explicit VectorPointSource(std::vector<ExtElem> pts) : pts_(std::move(pts)) {}

    ExtElem next() override {
        if (i_ >= pts_.size()) fail(errc::keysource_exhausted, "keystream consumed");
        return pts_[i_++];
    }

    size_t consumed() const { return i_; }

private:
    std::vector<ExtElem> pts_;
    size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Key derivation from a candidate stream. Candidates are consumed strictly in
// order; the published skip counts are plain stream offsets, so the receiving
// side replays the selection without re-running any admissibility test. A
// candidate is also rejected when its ciphertext point coincides with a later
// message point, since that point could then never lie on its own key; with
// that rule every position stays satisfiable (the tangent key at the current
// message point always qualifies), so derivation never needs to backtrack.
// ---------------------------------------------------------------------------

inline uint64_t derive_reject_cap(const ExtCtx& G) {
    return 64 + 8 * std::min<uint64_t>(G.q(), 256);
}

struct DerivedLineKeys {
    KeyTriple keys;
    std::array<ExtElem, 3> key_points;
    std::array<uint64_t, 3> skips;
    uint64_t consumed = 0;
};

inline DerivedLineKeys derive_line_keys(const ExtCtx& G, const PointTriple& msg, PointSource& src) {
    Circle M = triple_circle(G, msg);
    if (M.is_line())
        fail(errc::message_circle_through_infinity, "collinear message needs the fallback derivation");
    const uint64_t cap = derive_reject_cap(G);
    uint64_t consumed = 0;
    DerivedLineKeys out;
    std::array<uint64_t, 3> accept_at{};
    std::array<std::vector<Point>, 3> cuts; // key_i ∩ carrier, cached for pair tests
    for (int i = 0; i < 3; ++i) {
        uint64_t rejects = 0;
        for (;;) {
            if (rejects > cap)
                fail(errc::candidate_stream_exhausted, "line-key derivation exceeded the rejection budget");
            ExtElem k = src.next();
            uint64_t at = consumed++;
            if (hermitian_value(G, M, k) == G.base().zero()) { // on the carrier
                ++rejects;
                continue;
            }
            Circle K = line_through(G, msg[size_t(i)], Point::at(k));
            bool ok = true;
            for (int j = 0; j < i && ok; ++j)
                for (const Point& pt : cuts[size_t(j)])
                    if (circle_contains(G, K, pt)) ok = false;
            if (ok) {
                auto cut = intersect(G, K, M);
                Point c = cut.size() == 1 ? msg[size_t(i)]
                                          : (cut[0] == msg[size_t(i)] ? cut[1] : cut[0]);
                for (int j = i + 1; j < 3 && ok; ++j)
                    if (c == msg[size_t(j)]) ok = false; // future position would go dead
                if (ok) {
                    out.keys[size_t(i)] = K;
                    out.key_points[size_t(i)] = k;
                    accept_at[size_t(i)] = at;
                    cuts[size_t(i)] = std::move(cut);
                    break;
                }
            }
            ++rejects;
        }
    }
    out.skips[0] = accept_at[0];
    out.skips[1] = accept_at[1] - accept_at[0] - 1;
    out.skips[2] = accept_at[2] - accept_at[1] - 1;
    out.consumed = consumed;
    if (!validate_key(G, msg, out.keys)) fail(errc::internal, "derived key fails validation");
    return out;
}

struct DerivedFallbackKeys {
    KeyTriple keys;
    std::array<ExtElem, 6> key_points; // k1, k1', k2, k2', k3, k3'
    std::array<uint64_t, 6> skips;
    uint64_t consumed = 0;
};

/// Collinear carriers (infinity on the circle) admit no line keys, so each
/// position uses a general circle through two candidate points instead.
/// Candidates are consumed in pairs and rejected in pairs.
inline DerivedFallbackKeys derive_fallback_keys(const ExtCtx& G, const PointTriple& msg, PointSource& src) {
    Circle M = triple_circle(G, msg);
    if (!M.is_line()) fail(errc::bad_params, "fallback derivation expects a collinear message");
    const uint64_t cap = derive_reject_cap(G);
    uint64_t consumed = 0;
    DerivedFallbackKeys out;
    std::array<uint64_t, 6> accept_at{};
    std::array<std::vector<Point>, 3> cuts;
    for (int i = 0; i < 3; ++i) {
        uint64_t rejects = 0;
        for (;;) {
            if (rejects > cap)
                fail(errc::candidate_stream_exhausted, "fallback derivation exceeded the rejection budget");
            ExtElem k = src.next();
            uint64_t at_k = consumed++;
            ExtElem k2 = src.next();
            uint64_t at_k2 = consumed++;
            FieldElem z = G.base().zero();
            if (k == k2 || hermitian_value(G, M, k) == z || hermitian_value(G, M, k2) == z) {
                ++rejects;
                continue;
            }
            Circle K = circle_through(G, msg[size_t(i)], Point::at(k), Point::at(k2));
            bool ok = true;
            for (int j = 0; j < i && ok; ++j)
                for (const Point& pt : cuts[size_t(j)])
                    if (circle_contains(G, K, pt)) ok = false;
            if (ok) {
                auto cut = intersect(G, K, M);
                Point c = cut.size() == 1 ? msg[size_t(i)]
                                          : (cut[0] == msg[size_t(i)] ? cut[1] : cut[0]);
                for (int j = i + 1; j < 3 && ok; ++j)
                    if (c == msg[size_t(j)]) ok = false; // future position would go dead
                if (ok) {
                    out.keys[size_t(i)] = K;
                    out.key_points[size_t(2 * i)] = k;
                    out.key_points[size_t(2 * i + 1)] = k2;
                    accept_at[size_t(2 * i)] = at_k;
                    accept_at[size_t(2 * i + 1)] = at_k2;
                    cuts[size_t(i)] = std::move(cut);
                    break;
                }
            }
            ++rejects;
        }
    }
    uint64_t prev = 0;
    for (int t = 0; t < 6; ++t) {
        out.skips[size_t(t)] = accept_at[size_t(t)] - prev;
        prev = accept_at[size_t(t)] + 1;
    }
    out.consumed = consumed;
    if (!validate_key(G, msg, out.keys)) fail(errc::internal, "derived fallback key fails validation");
    return out;
}

// ---------------------------------------------------------------------------
// Receiver-side key reconstruction. Each ciphertext point lies on its key
// circle, so the published points and skip offsets determine the keys.
// ---------------------------------------------------------------------------

inline ExtElem take_after_skips(PointSource& src, uint64_t skips) {
    while (skips--) (void)src.next();
    return src.next();
}

inline KeyTriple replay_line_keys(const ExtCtx& G, const PointTriple& ct,
                                  const std::array<uint64_t, 3>& skips, PointSource& src) {
    KeyTriple keys;
    for (int i = 0; i < 3; ++i) {
        ExtElem k = take_after_skips(src, skips[size_t(i)]);
        keys[size_t(i)] = line_through(G, ct[size_t(i)], Point::at(k));
    }
    return keys;
}

inline KeyTriple replay_fallback_keys(const ExtCtx& G, const PointTriple& ct,
                                      const std::array<uint64_t, 6>& skips, PointSource& src) {
    KeyTriple keys;
    for (int i = 0; i < 3; ++i) {
        ExtElem k = take_after_skips(src, skips[size_t(2 * i)]);
        ExtElem k2 = take_after_skips(src, skips[size_t(2 * i + 1)]);
        keys[size_t(i)] = circle_through(G, ct[size_t(i)], Point::at(k), Point::at(k2));
    }
    return keys;
}

} // namespace mobius
