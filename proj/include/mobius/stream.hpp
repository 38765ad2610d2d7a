#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cipher.hpp"
#include "serialize.hpp"

namespace mobius {

// ---------------------------------------------------------------------------
// File containers.
//
//   ciphertext  "MOBC" version=0x01 field-block mode bit-length records...
//     stream-mode record:   flag(0|1) skips(3 line / 6 fallback varints) 3 points
//     explicit-mode record: 3 points
//   key file    "MOBK" field-block count circles...       (4 elements each)
//   keystream   "MOBS" field-block count finite-points... (2 elements each)
//
// The record count of a ciphertext container is derived from the payload bit
// length, so truncation or trailing garbage is always detectable.
// ---------------------------------------------------------------------------

inline constexpr uint8_t kContainerVersion = 0x01;

enum class StreamMode : uint8_t { explicit_key = 0, shared_stream = 1 };

struct TripleRecord {
    bool fallback = false;
    std::vector<uint64_t> skips; // 3 (line) or 6 (fallback); empty in explicit mode
    PointTriple ct;
};

struct CipherContainer {
    ExtCtx G;
    StreamMode mode;
    uint64_t bit_length = 0;
    std::vector<TripleRecord> records;
};

inline std::vector<uint8_t> write_container(const CipherContainer& c) {
    ByteWriter w;
    w.magic("MOBC");
    w.u8(kContainerVersion);
    write_field_block(w, c.G.base(), &c.G);
    w.u8(uint8_t(c.mode));
    w.varint(c.bit_length);
    for (const TripleRecord& rec : c.records) {
        if (c.mode == StreamMode::shared_stream) {
            w.u8(rec.fallback ? 0x01 : 0x00);
            for (uint64_t s : rec.skips) w.varint(s);
        }
        for (const Point& p : rec.ct) write_point(w, c.G, p);
    }
    return std::move(w.bytes);
}

inline CipherContainer parse_container(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes);
    r.magic("MOBC");
    if (r.u8() != kContainerVersion) fail(errc::invalid_container, "unsupported container version");
    FieldBlock fb = read_field_block(r);
    if (!fb.ext) fail(errc::invalid_container, "container lacks the quadratic extension");
    uint8_t mode_byte = r.u8();
    if (mode_byte > 1) fail(errc::invalid_container, "bad mode byte");
    StreamMode mode = StreamMode(mode_byte);
    uint64_t bit_length = r.varint();
    const ExtCtx& G = *fb.ext;
    if (G.base().p() != 2 || G.base().n() < 2)
        fail(errc::invalid_container, "container field cannot carry a byte payload");
    uint64_t per_triple = 3 * uint64_t(2 * G.base().n() - 2);
    uint64_t ntriples = bit_length == 0 ? 0 : (bit_length + per_triple - 1) / per_triple;
    std::vector<TripleRecord> records;
    records.reserve(size_t(ntriples));
    for (uint64_t t = 0; t < ntriples; ++t) {
        TripleRecord rec;
        if (mode == StreamMode::shared_stream) {
            uint8_t flag = r.u8();
            if (flag > 1) fail(errc::invalid_container, "bad fallback flag");
            rec.fallback = flag == 1;
            rec.skips.resize(rec.fallback ? 6 : 3);
            for (auto& s : rec.skips) s = r.varint();
        }
        for (Point& p : rec.ct) p = read_point(r, G);
        records.push_back(std::move(rec));
    }
    if (!r.eof()) fail(errc::invalid_container, "trailing bytes after records");
    return {std::move(*fb.ext), mode, bit_length, std::move(records)};
}

struct KeyFile {
    ExtCtx G;
    std::vector<Circle> circles;
};

inline std::vector<uint8_t> write_key_file(const ExtCtx& G, const std::vector<Circle>& circles) {
    ByteWriter w;
    w.magic("MOBK");
    write_field_block(w, G.base(), &G);
    w.varint(circles.size());
    for (const Circle& c : circles) write_circle(w, G, c);
    return std::move(w.bytes);
}

inline KeyFile parse_key_file(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes);
    r.magic("MOBK");
    FieldBlock fb = read_field_block(r);
    if (!fb.ext) fail(errc::invalid_container, "key file lacks the quadratic extension");
    uint64_t count = r.varint();
    if (count > (uint64_t(1) << 32)) fail(errc::invalid_container, "implausible circle count");
    std::vector<Circle> circles;
    circles.reserve(size_t(count));
    for (uint64_t i = 0; i < count; ++i) circles.push_back(read_circle(r, *fb.ext));
    if (!r.eof()) fail(errc::invalid_container, "trailing bytes after circles");
    return {std::move(*fb.ext), std::move(circles)};
}

struct KeystreamFile {
    ExtCtx G;
    std::vector<ExtElem> points;
};

inline std::vector<uint8_t> write_keystream_file(const ExtCtx& G, const std::vector<ExtElem>& pts) {
    ByteWriter w;
    w.magic("MOBS");
    write_field_block(w, G.base(), &G);
    w.varint(pts.size());
    for (ExtElem p : pts) write_finite_point(w, G, p);
    return std::move(w.bytes);
}

inline KeystreamFile parse_keystream_file(const std::vector<uint8_t>& bytes) {
    ByteReader r(bytes);
    r.magic("MOBS");
    FieldBlock fb = read_field_block(r);
    if (!fb.ext) fail(errc::invalid_container, "keystream lacks the quadratic extension");
    uint64_t count = r.varint();
    if (count > (uint64_t(1) << 32)) fail(errc::invalid_container, "implausible point count");
    std::vector<ExtElem> pts;
    pts.reserve(size_t(count));
    for (uint64_t i = 0; i < count; ++i) pts.push_back(read_finite_point(r, *fb.ext));
    if (!r.eof()) fail(errc::invalid_container, "trailing bytes after points");
    return {std::move(*fb.ext), std::move(pts)};
}

// ---------------------------------------------------------------------------
// Stream encryption / decryption.
// ---------------------------------------------------------------------------

struct StreamStats {
    uint64_t triples = 0;
    uint64_t fallback_triples = 0;
    uint64_t message_points = 0;  // 3 per triple
    uint64_t accepted_points = 0; // accepted key candidates (3 line / 6 fallback)
    uint64_t skipped_points = 0;  // rejected candidates (shared-keystream mode)
};

struct EncryptOutput {
    std::vector<uint8_t> container;
    std::vector<Circle> keys; // 3 per triple (explicit mode; for the key file)
    StreamStats stats;
};

/// Encrypts with keys derived from the candidate source. In shared-keystream
/// mode the container carries replay offsets; in explicit mode it carries only
/// ciphertext points and the derived keys are returned for a key file.
inline EncryptOutput encrypt_stream(const ExtCtx& G, const std::vector<uint8_t>& data,
                                    PointSource& src, StreamMode mode) {
    EncodedMessage enc = encode_bytes(G, data.data(), data.size());
    EncryptOutput out;
    out.stats.triples = enc.triples.size();
    out.stats.message_points = 3 * enc.triples.size();
    CipherContainer cont{G, mode, enc.bit_length, {}};
    cont.records.reserve(enc.triples.size());
    for (const PointTriple& msg : enc.triples) {
        TripleRecord rec;
        KeyTriple keys;
        Circle M = triple_circle(G, msg);
        if (M.is_line()) {
            DerivedFallbackKeys d = derive_fallback_keys(G, msg, src);
            keys = d.keys;
            rec.fallback = true;
            rec.skips.assign(d.skips.begin(), d.skips.end());
            out.stats.fallback_triples += 1;
            out.stats.accepted_points += 6;
            out.stats.skipped_points += d.consumed - 6;
        } else {
            DerivedLineKeys d = derive_line_keys(G, msg, src);
            keys = d.keys;
            rec.fallback = false;
            rec.skips.assign(d.skips.begin(), d.skips.end());
            out.stats.accepted_points += 3;
            out.stats.skipped_points += d.consumed - 3;
        }
        rec.ct = encrypt_triple(G, msg, keys);
        if (mode == StreamMode::explicit_key) {
            rec.skips.clear();
            for (const Circle& k : keys) out.keys.push_back(k);
        }
        cont.records.push_back(std::move(rec));
    }
    out.container = write_container(cont);
    return out;
}

/// Encrypts with externally supplied key circles, three per triple, in order.
inline EncryptOutput encrypt_stream_with_keys(const ExtCtx& G, const std::vector<uint8_t>& data,
                                              const std::vector<Circle>& keys) {
    EncodedMessage enc = encode_bytes(G, data.data(), data.size());
    if (keys.size() < 3 * enc.triples.size())
        fail(errc::keysource_exhausted, "key file holds fewer than three circles per triple");
    EncryptOutput out;
    out.stats.triples = enc.triples.size();
    out.stats.message_points = 3 * enc.triples.size();
    CipherContainer cont{G, StreamMode::explicit_key, enc.bit_length, {}};
    cont.records.reserve(enc.triples.size());
    for (size_t t = 0; t < enc.triples.size(); ++t) {
        KeyTriple key{keys[3 * t], keys[3 * t + 1], keys[3 * t + 2]};
        TripleRecord rec;
        rec.ct = encrypt_triple(G, enc.triples[t], key); // throws InvalidKey on rejection
        cont.records.push_back(std::move(rec));
        out.stats.accepted_points += 3;
    }
    out.keys = keys;
    out.container = write_container(cont);
    return out;
}

struct DecryptOutput {
    std::vector<uint8_t> data;
    StreamStats stats;
};

/// Decrypts a parsed container. Shared-keystream mode replays the recorded
/// offsets against `src`; explicit mode consumes three circles per triple from
/// `keys`. Reconstruction or validation failures surface as KeyMismatch;
/// running out of key material surfaces as KeysourceExhausted.
inline DecryptOutput decrypt_stream(const CipherContainer& cont, PointSource* src,
                                    const std::vector<Circle>* keys) {
    const ExtCtx& G = cont.G;
    DecryptOutput out;
    out.stats.triples = cont.records.size();
    out.stats.message_points = 3 * cont.records.size();
    if (cont.mode == StreamMode::shared_stream && src == nullptr)
        fail(errc::bad_params, "shared-keystream container needs a candidate source");
    if (cont.mode == StreamMode::explicit_key && keys == nullptr)
        fail(errc::bad_params, "explicit-key container needs a key file");
    if (cont.mode == StreamMode::explicit_key && keys->size() < 3 * cont.records.size())
        fail(errc::keysource_exhausted, "key file holds fewer than three circles per triple");
    std::vector<PointTriple> msgs;
    msgs.reserve(cont.records.size());
    for (size_t t = 0; t < cont.records.size(); ++t) {
        const TripleRecord& rec = cont.records[t];
        try {
            KeyTriple key;
            if (cont.mode == StreamMode::shared_stream) {
                if (rec.fallback) {
                    std::array<uint64_t, 6> s;
                    std::copy(rec.skips.begin(), rec.skips.end(), s.begin());
                    key = replay_fallback_keys(G, rec.ct, s, *src);
                    out.stats.fallback_triples += 1;
                    out.stats.accepted_points += 6;
                } else {
                    std::array<uint64_t, 3> s;
                    std::copy(rec.skips.begin(), rec.skips.end(), s.begin());
                    key = replay_line_keys(G, rec.ct, s, *src);
                    out.stats.accepted_points += 3;
                }
                for (uint64_t v : rec.skips) out.stats.skipped_points += v;
            } else {
                key = {(*keys)[3 * t], (*keys)[3 * t + 1], (*keys)[3 * t + 2]};
                out.stats.accepted_points += 3;
            }
            msgs.push_back(decrypt_triple(G, rec.ct, key));
        } catch (const error& e) {
            if (e.code() == errc::keysource_exhausted) throw;
            fail(errc::key_mismatch,
                 std::string("triple ") + std::to_string(t) + " failed to decrypt: " + e.what());
        }
    }
    try {
        out.data = decode_points(G, msgs, cont.bit_length);
    } catch (const error& e) {
        fail(errc::key_mismatch, std::string("decoded plaintext is malformed: ") + e.what());
    }
    return out;
}

} // namespace mobius
