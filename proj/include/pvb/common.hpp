#pragma once

#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvb {

// Largest representable docID; the all-ones value is reserved as the
// cursor exhaustion sentinel.
constexpr uint32_t max_docid = std::numeric_limits<uint32_t>::max() - 1;
constexpr uint32_t sequence_exhausted = std::numeric_limits<uint32_t>::max();

// Per-partition header cost, in bits, charged by the cost model.
constexpr uint64_t default_header_bits = 64;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input sequence is not strictly increasing / violates domain bounds.
struct invalid_sequence_error : error {
    using error::error;
};

// API misuse: empty input, bad plan, out-of-range term, oracle cap.
struct invalid_argument_error : error {
    using error::error;
};

// Byte stream cannot be parsed (truncation, overrun, bad token).
struct malformed_input_error : error {
    using error::error;
};

// Stored payload fails consistency checks on decode.
struct corruption_error : error {
    using error::error;
};

// Index file has wrong magic/version or an inconsistent directory.
struct incompatible_index_error : error {
    using error::error;
};

// Filesystem-level failure; maps to exit code 2 in the CLI.
struct io_error : error {
    using error::error;
};

namespace detail {

inline void store_u32(uint8_t* out, uint32_t v) {
    out[0] = static_cast<uint8_t>(v);
    out[1] = static_cast<uint8_t>(v >> 8);
    out[2] = static_cast<uint8_t>(v >> 16);
    out[3] = static_cast<uint8_t>(v >> 24);
}

inline void store_u64(uint8_t* out, uint64_t v) {
    for (int i = 0; i != 8; ++i) {
        out[i] = static_cast<uint8_t>(v >> (8 * i));
    }
}

inline uint32_t load_u32(uint8_t const* in) {
    return static_cast<uint32_t>(in[0]) | static_cast<uint32_t>(in[1]) << 8 |
           static_cast<uint32_t>(in[2]) << 16 | static_cast<uint32_t>(in[3]) << 24;
}

inline uint64_t load_u64(uint8_t const* in) {
    uint64_t v = 0;
    for (int i = 0; i != 8; ++i) {
        v |= static_cast<uint64_t>(in[i]) << (8 * i);
    }
    return v;
}

inline void append_u32(std::vector<uint8_t>& out, uint32_t v) {
    uint8_t buf[4];
    store_u32(buf, v);
    out.insert(out.end(), buf, buf + 4);
}

inline void append_u64(std::vector<uint8_t>& out, uint64_t v) {
    uint8_t buf[8];
    store_u64(buf, v);
    out.insert(out.end(), buf, buf + 8);
}

inline uint64_t ceil_div(uint64_t a, uint64_t b) {
    return (a + b - 1) / b;
}

}  // namespace detail

}  // namespace pvb
