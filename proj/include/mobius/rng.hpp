#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>

#include "errors.hpp"

namespace mobius {

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic byte stream: the ChaCha20 block function in counter mode.
/// The 256-bit key holds the caller's 64-bit seed in its first two words and
/// a splitmix64 expansion of it in the rest; the nonce is zero. Equal seeds
/// give byte-identical streams on every platform.
class DeterministicRng {
public:
    explicit DeterministicRng(uint64_t seed) {
        key_[0] = uint32_t(seed);
        key_[1] = uint32_t(seed >> 32);
        uint64_t s = seed;
        for (int i = 1; i < 4; ++i) {
            uint64_t w = detail::splitmix64(s);
            key_[2 * i] = uint32_t(w);
            key_[2 * i + 1] = uint32_t(w >> 32);
        }
        refill();
    }

    uint8_t next_byte() {
        if (pos_ == block_.size()) refill();
        return block_[pos_++];
    }

    void fill(uint8_t* out, size_t len) {
        for (size_t i = 0; i < len; ++i) out[i] = next_byte();
    }

    uint64_t next_u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(next_byte()) << (8 * i);
        return v;
    }

    /// Unbiased draw from {0, ..., n-1} by masked rejection sampling.
    uint64_t uniform_below(uint64_t n) {
        if (n == 0) fail(errc::internal, "empty sampling range");
        if (n == 1) return 0;
        int bits = std::bit_width(n - 1);
        uint64_t mask = (bits >= 64) ? ~uint64_t(0) : ((uint64_t(1) << bits) - 1);
        size_t bytes = size_t((bits + 7) / 8);
        for (;;) {
            uint64_t v = 0;
            for (size_t i = 0; i < bytes; ++i) v |= uint64_t(next_byte()) << (8 * i);
            v &= mask;
            if (v < n) return v;
        }
    }

private:
    static uint32_t rotl(uint32_t x, int r) { return (x << r) | (x >> (32 - r)); }

    static void quarter(uint32_t& a, uint32_t& b, uint32_t& c, uint32_t& d) {
        a += b; d ^= a; d = rotl(d, 16);
        c += d; b ^= c; b = rotl(b, 12);
        a += b; d ^= a; d = rotl(d, 8);
        c += d; b ^= c; b = rotl(b, 7);
    }

    void refill() {
        uint32_t st[16] = {0x61707865u, 0x3320646eu, 0x79622d32u, 0x6b206574u,
                           key_[0], key_[1], key_[2], key_[3],
                           key_[4], key_[5], key_[6], key_[7],
                           uint32_t(counter_), uint32_t(counter_ >> 32), 0u, 0u};
        uint32_t w[16];
        std::memcpy(w, st, sizeof(w));
        for (int round = 0; round < 10; ++round) {
            quarter(w[0], w[4], w[8], w[12]);
            quarter(w[1], w[5], w[9], w[13]);
            quarter(w[2], w[6], w[10], w[14]);
            quarter(w[3], w[7], w[11], w[15]);
            quarter(w[0], w[5], w[10], w[15]);
            quarter(w[1], w[6], w[11], w[12]);
            quarter(w[2], w[7], w[8], w[13]);
            quarter(w[3], w[4], w[9], w[14]);
        }
        for (int i = 0; i < 16; ++i) {
            uint32_t v = w[i] + st[i];
            block_[size_t(4 * i)] = uint8_t(v);
            block_[size_t(4 * i + 1)] = uint8_t(v >> 8);
            block_[size_t(4 * i + 2)] = uint8_t(v >> 16);
            block_[size_t(4 * i + 3)] = uint8_t(v >> 24);
        }
        ++counter_;
        pos_ = 0;
    }

    std::array<uint32_t, 8> key_{};
    std::array<uint8_t, 64> block_{};
    uint64_t counter_ = 0;
    size_t pos_ = 0;
};

} // namespace mobius
