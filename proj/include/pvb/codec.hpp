#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "common.hpp"

namespace pvb {

// Point-wise byte-aligned codec. Each value is emitted as 7-bit groups,
// least significant group first; the MSB of every byte except the last
// one of a codeword is set to signal continuation.
//
// Cost in bits of a single value. A zero still takes one byte.
inline uint64_t vbyte_cost(uint32_t value) {
    if (value == 0) {
        return 8;
    }
    return 8 * ((std::bit_width(value) + 6) / 7);
}

inline void vbyte_append(std::vector<uint8_t>& out, uint32_t value) {
    while (value >= 128) {
        out.push_back(static_cast<uint8_t>(value & 0x7F) | 0x80);
        value >>= 7;
    }
    out.push_back(static_cast<uint8_t>(value));
}

inline std::vector<uint8_t> vbyte_encode(std::span<const uint32_t> values) {
    std::vector<uint8_t> out;
    out.reserve(values.size());
    for (uint32_t v : values) {
        vbyte_append(out, v);
    }
    return out;
}

// Decodes exactly `count` codewords, appending to `out`. Returns the
// number of bytes consumed. Throws if the stream ends before the last
// codeword terminates or a codeword overflows 32 bits.
inline size_t vbyte_decode(std::span<const uint8_t> in, size_t count,
                           std::vector<uint32_t>& out) {
    size_t pos = 0;
    for (size_t i = 0; i != count; ++i) {
        uint64_t value = 0;
        unsigned shift = 0;
        while (true) {
            if (pos == in.size()) {
                throw malformed_input_error("vbyte: truncated stream at byte " +
                                            std::to_string(pos));
            }
            uint8_t byte = in[pos++];
            value |= static_cast<uint64_t>(byte & 0x7F) << shift;
            if ((byte & 0x80) == 0) {
                break;
            }
            shift += 7;
            if (shift > 31) {
                throw malformed_input_error("vbyte: codeword exceeds 32 bits");
            }
        }
        if (value > std::numeric_limits<uint32_t>::max()) {
            throw malformed_input_error("vbyte: codeword exceeds 32 bits");
        }
        out.push_back(static_cast<uint32_t>(value));
    }
    return pos;
}

// Characteristic bit-vector over [base, slice.back()]: bit (v - base) is
// set for every v in the slice. Exact model cost is the bit span, i.e.
// the telescoped sum of gaps; storage pads to whole bytes.
inline uint64_t bitmap_span_bits(std::span<const uint32_t> slice, uint32_t base) {
    if (slice.empty()) {
        return 0;
    }
    return static_cast<uint64_t>(slice.back()) - base + 1;
}

inline std::vector<uint8_t> bitmap_encode(std::span<const uint32_t> slice,
                                          uint32_t base) {
    uint64_t bits = bitmap_span_bits(slice, base);
    std::vector<uint8_t> out(detail::ceil_div(bits, 8), 0);
    int64_t prev = static_cast<int64_t>(base) - 1;
    for (uint32_t v : slice) {
        if (static_cast<int64_t>(v) <= prev) {
            throw invalid_sequence_error("bitmap: slice not strictly increasing");
        }
        prev = v;
        uint64_t bit = v - base;
        out[bit >> 3] |= static_cast<uint8_t>(1u << (bit & 7));
    }
    return out;
}

inline std::vector<uint32_t> bitmap_decode(std::span<const uint8_t> in,
                                           uint32_t base, uint64_t bit_len) {
    if (bit_len > 8 * in.size()) {
        throw malformed_input_error("bitmap: bit length exceeds payload");
    }
    std::vector<uint32_t> out;
    for (uint64_t byte = 0; byte * 8 < bit_len; ++byte) {
        uint8_t w = in[byte];
        while (w != 0) {
            unsigned bit = std::countr_zero(w);
            uint64_t pos = byte * 8 + bit;
            if (pos >= bit_len) {
                break;
            }
            out.push_back(base + static_cast<uint32_t>(pos));
            w &= static_cast<uint8_t>(w - 1);
        }
    }
    return out;
}

// Gap transform of S[i, j) under the sentinel convention S[-1] = -1:
// every element, including the first of the slice, is replaced by its
// distance from the predecessor, so all gaps are >= 1 and both cost
// models become exactly point-wise.
inline std::vector<uint32_t> gap_view(std::span<const uint32_t> values, size_t i,
                                      size_t j) {
    if (i >= j || j > values.size()) {
        throw invalid_argument_error("gap_view: bad slice bounds");
    }
    std::vector<uint32_t> gaps;
    gaps.reserve(j - i);
    int64_t prev = i == 0 ? -1 : static_cast<int64_t>(values[i - 1]);
    for (size_t k = i; k != j; ++k) {
        int64_t v = values[k];
        if (v <= prev) {
            throw invalid_sequence_error("gap_view: sequence not strictly increasing at position " +
                                         std::to_string(k));
        }
        gaps.push_back(static_cast<uint32_t>(v - prev));
        prev = v;
    }
    return gaps;
}

// Model costs of a slice under both encoders. B telescopes to the bit
// span of the slice's rebased universe.
inline uint64_t vbyte_slice_cost(std::span<const uint32_t> values, size_t i, size_t j) {
    uint64_t bits = 0;
    int64_t prev = i == 0 ? -1 : static_cast<int64_t>(values[i - 1]);
    for (size_t k = i; k != j; ++k) {
        bits += vbyte_cost(static_cast<uint32_t>(static_cast<int64_t>(values[k]) - prev));
        prev = values[k];
    }
    return bits;
}

inline uint64_t bitmap_slice_cost(std::span<const uint32_t> values, size_t i, size_t j) {
    int64_t prev = i == 0 ? -1 : static_cast<int64_t>(values[i - 1]);
    return static_cast<uint64_t>(static_cast<int64_t>(values[j - 1]) - prev);
}

}  // namespace pvb
