#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "codec.hpp"
#include "common.hpp"
#include "partitioning.hpp"

namespace pvb {

// Two-level materialized form of one partitioned list.
//
// Serialized layout, little-endian, 8-byte aligned:
//   u64 n
//   u64 num_partitions
//   per partition, two u64 words:
//     word0 = upper_bound | size << 32
//     word1 = payload byte offset | tag << 63
//   u64 payload length in bytes
//   payload bytes, zero-padded to the next 8-byte boundary
//
// Each partition is rebased to base = previous upper_bound + 1 (0 for the
// first). vbyte partitions store the gaps of the rebased slice, bitmap
// partitions the characteristic bits of [base, upper_bound].

struct l1_entry {
    uint32_t upper_bound;
    uint32_t size;
    encoder tag;
    uint64_t offset;
};

constexpr uint64_t l1_entry_bits = 128;

inline std::vector<uint8_t> build_sequence(std::span<const uint32_t> values,
                                           const partition_plan& plan) {
    if (values.empty()) {
        throw invalid_argument_error("build_sequence: empty sequence");
    }
    if (plan.splits.empty() || plan.tags.size() != plan.splits.size() ||
        plan.splits.back() != values.size()) {
        throw invalid_argument_error("build_sequence: plan does not match the sequence");
    }

    std::vector<uint8_t> payload;
    std::vector<l1_entry> directory;
    directory.reserve(plan.num_partitions());

    size_t begin = 0;
    int64_t prev_upper = -1;
    for (size_t part = 0; part != plan.num_partitions(); ++part) {
        size_t end = plan.splits[part];
        if (end <= begin || end > values.size()) {
            throw invalid_argument_error("build_sequence: splits not strictly increasing");
        }
        auto slice = values.subspan(begin, end - begin);
        uint32_t base = static_cast<uint32_t>(prev_upper + 1);
        l1_entry entry{slice.back(), static_cast<uint32_t>(slice.size()), plan.tags[part],
                       payload.size()};
        if (entry.tag == encoder::vbyte) {
            int64_t prev = prev_upper;
            for (size_t k = 0; k != slice.size(); ++k) {
                vbyte_append(payload, detail::checked_gap(prev, slice[k], begin + k));
            }
        } else {
            auto bytes = bitmap_encode(slice, base);
            payload.insert(payload.end(), bytes.begin(), bytes.end());
        }
        directory.push_back(entry);
        prev_upper = slice.back();
        begin = end;
    }

    std::vector<uint8_t> out;
    out.reserve(24 + 16 * directory.size() + payload.size() + 8);
    detail::append_u64(out, values.size());
    detail::append_u64(out, directory.size());
    for (const auto& entry : directory) {
        detail::append_u64(out, static_cast<uint64_t>(entry.upper_bound) |
                                    static_cast<uint64_t>(entry.size) << 32);
        detail::append_u64(out, entry.offset |
                                    static_cast<uint64_t>(entry.tag == encoder::bitmap) << 63);
    }
    detail::append_u64(out, payload.size());
    out.insert(out.end(), payload.begin(), payload.end());
    while (out.size() % 8 != 0) {
        out.push_back(0);
    }
    return out;
}

// Read-only view over a serialized sequence. The underlying bytes must
// outlive the view; parsing touches only the directory.
class sequence_view {
public:
    explicit sequence_view(std::span<const uint8_t> bytes) {
        if (bytes.size() < 24) {
            throw corruption_error("sequence: truncated header");
        }
        m_n = detail::load_u64(bytes.data());
        m_partitions = detail::load_u64(bytes.data() + 8);
        uint64_t directory_end = 16 + 16 * m_partitions;
        if (m_n == 0 || m_partitions == 0 || bytes.size() < directory_end + 8) {
            throw corruption_error("sequence: truncated directory");
        }
        m_l1 = bytes.data() + 16;
        m_payload_len = detail::load_u64(bytes.data() + directory_end);
        if (bytes.size() < directory_end + 8 + m_payload_len) {
            throw corruption_error("sequence: truncated payload");
        }
        m_payload = bytes.data() + directory_end + 8;

        uint64_t total_size = 0;
        int64_t prev_upper = -1;
        uint64_t prev_offset = 0;
        for (uint64_t p = 0; p != m_partitions; ++p) {
            l1_entry e = entry(p);
            if (static_cast<int64_t>(e.upper_bound) <= prev_upper || e.size == 0 ||
                (p != 0 && e.offset <= prev_offset) || e.offset > m_payload_len) {
                throw corruption_error("sequence: inconsistent directory entry");
            }
            total_size += e.size;
            prev_upper = e.upper_bound;
            prev_offset = e.offset;
        }
        if (total_size != m_n || entry(0).offset != 0) {
            throw corruption_error("sequence: directory does not cover the sequence");
        }
        // any valid payload carries at least one bit per element, so a
        // size field larger than that is corrupt, not just expensive
        if (m_n > 8 * m_payload_len) {
            throw corruption_error("sequence: size exceeds payload capacity");
        }
    }

    uint64_t size() const { return m_n; }
    uint64_t num_partitions() const { return m_partitions; }
    uint64_t universe() const { return static_cast<uint64_t>(entry(m_partitions - 1).upper_bound) + 1; }

    l1_entry entry(uint64_t p) const {
        uint64_t word0 = detail::load_u64(m_l1 + 16 * p);
        uint64_t word1 = detail::load_u64(m_l1 + 16 * p + 8);
        return l1_entry{static_cast<uint32_t>(word0), static_cast<uint32_t>(word0 >> 32),
                        (word1 >> 63) != 0 ? encoder::bitmap : encoder::vbyte,
                        word1 & ~(uint64_t{1} << 63)};
    }

    uint32_t partition_base(uint64_t p) const {
        return p == 0 ? 0 : entry(p - 1).upper_bound + 1;
    }

    std::span<const uint8_t> partition_payload(uint64_t p) const {
        l1_entry e = entry(p);
        uint64_t end = p + 1 == m_partitions ? m_payload_len : entry(p + 1).offset;
        return {m_payload + e.offset, end - e.offset};
    }

    // Total bytes the serialized blob occupies, including alignment padding.
    uint64_t blob_bytes() const {
        uint64_t raw = 16 + 16 * m_partitions + 8 + m_payload_len;
        return (raw + 7) / 8 * 8;
    }

    uint64_t stored_l1_bits() const { return l1_entry_bits * m_partitions; }
    uint64_t stored_l2_bits() const { return 8 * m_payload_len; }
    uint64_t stored_bits() const { return stored_l1_bits() + stored_l2_bits(); }

    // Full decode with consistency checks; this is the verification path.
    std::vector<uint32_t> decode_all() const {
        std::vector<uint32_t> out;
        out.reserve(m_n);
        for (uint64_t p = 0; p != m_partitions; ++p) {
            l1_entry e = entry(p);
            uint32_t base = partition_base(p);
            auto payload = partition_payload(p);
            if (e.tag == encoder::vbyte) {
                std::vector<uint32_t> gaps;
                size_t consumed;
                try {
                    consumed = vbyte_decode(payload, e.size, gaps);
                } catch (const malformed_input_error&) {
                    throw corruption_error("sequence: vbyte payload overrun in partition " +
                                           std::to_string(p));
                }
                if (consumed != payload.size()) {
                    throw corruption_error("sequence: trailing bytes in vbyte partition " +
                                           std::to_string(p));
                }
                int64_t value = static_cast<int64_t>(base) - 1;
                for (uint32_t gap : gaps) {
                    if (gap == 0) {
                        throw corruption_error("sequence: zero gap in partition " +
                                               std::to_string(p));
                    }
                    value += gap;
                    out.push_back(static_cast<uint32_t>(value));
                }
                if (value != static_cast<int64_t>(e.upper_bound)) {
                    throw corruption_error("sequence: partition " + std::to_string(p) +
                                           " does not end at its upper bound");
                }
            } else {
                uint64_t span_bits = static_cast<uint64_t>(e.upper_bound) - base + 1;
                std::vector<uint32_t> decoded;
                try {
                    decoded = bitmap_decode(payload, base, span_bits);
                } catch (const malformed_input_error&) {
                    throw corruption_error("sequence: bitmap payload too short in partition " +
                                           std::to_string(p));
                }
                if (decoded.size() != e.size) {
                    throw corruption_error("sequence: bitmap popcount mismatch in partition " +
                                           std::to_string(p));
                }
                if (decoded.back() != e.upper_bound) {
                    throw corruption_error("sequence: partition " + std::to_string(p) +
                                           " does not end at its upper bound");
                }
                out.insert(out.end(), decoded.begin(), decoded.end());
            }
        }
        return out;
    }

    const uint8_t* payload_data() const { return m_payload; }

private:
    uint64_t m_n;
    uint64_t m_partitions;
    const uint8_t* m_l1;
    const uint8_t* m_payload;
    uint64_t m_payload_len;
};

// Forward-only iterator with NextGEQ. Bitmap partitions are scanned word
// by word without materializing; vbyte partitions are decoded whole into
// a scratch buffer on entry.
class sequence_cursor {
public:
    explicit sequence_cursor(const sequence_view& view) : m_view(&view) {
        enter_partition(0);
    }

    bool exhausted() const { return m_exhausted; }
    uint32_t value() const { return m_exhausted ? sequence_exhausted : m_value; }

    // Index of the current element within the full sequence.
    uint64_t position() const { return m_rank_base + m_rank; }

    uint32_t next() {
        if (m_exhausted) {
            return sequence_exhausted;
        }
        if (m_tag == encoder::vbyte) {
            if (m_rank + 1 < m_scratch.size()) {
                ++m_rank;
                m_value = m_scratch[m_rank];
                return m_value;
            }
        } else {
            uint64_t bit = find_set_from(m_bit + 1);
            if (bit != m_span_bits) {
                m_bit = bit;
                ++m_rank;
                m_value = m_base + static_cast<uint32_t>(bit);
                return m_value;
            }
        }
        return advance_partition();
    }

    // Smallest stored value >= x at or after the cursor. Probes must be
    // non-decreasing across calls.
    uint32_t next_geq(uint32_t x) {
        if (m_exhausted) {
            return sequence_exhausted;
        }
        if (m_value >= x) {
            return m_value;
        }
        if (x > m_upper_bound) {
            uint64_t p = m_partition;
            uint64_t rank_base = m_rank_base;
            do {
                rank_base += m_view->entry(p).size;
                ++p;
                if (p == m_view->num_partitions()) {
                    m_exhausted = true;
                    return sequence_exhausted;
                }
            } while (m_view->entry(p).upper_bound < x);
            m_rank_base = rank_base;
            enter_partition(p);
            if (m_value >= x) {
                return m_value;
            }
        }
        // in-partition forward search; the partition's upper bound is >= x
        // and the last element sits at it, so both scans stay in bounds
        if (m_tag == encoder::vbyte) {
            while (m_scratch[m_rank] < x) {
                ++m_rank;
            }
            m_value = m_scratch[m_rank];
        } else {
            uint64_t target = x - m_base;
            m_rank += popcount_between(m_bit + 1, target);
            m_bit = find_set_from(target);
            ++m_rank;
            m_value = m_base + static_cast<uint32_t>(m_bit);
        }
        return m_value;
    }

private:
    void enter_partition(uint64_t p) {
        m_partition = p;
        l1_entry e = m_view->entry(p);
        m_tag = e.tag;
        m_base = m_view->partition_base(p);
        m_upper_bound = e.upper_bound;
        m_payload = m_view->partition_payload(p);
        m_rank = 0;
        if (m_tag == encoder::vbyte) {
            m_scratch.clear();
            m_scratch.reserve(e.size);
            size_t pos = 0;
            int64_t value = static_cast<int64_t>(m_base) - 1;
            for (uint32_t i = 0; i != e.size; ++i) {
                uint32_t gap = 0;
                unsigned shift = 0;
                while (true) {
                    if (pos == m_payload.size() || shift > 31) {
                        throw corruption_error("sequence: vbyte payload overrun in partition " +
                                               std::to_string(p));
                    }
                    uint8_t byte = m_payload[pos++];
                    gap |= static_cast<uint32_t>(byte & 0x7F) << shift;
                    if ((byte & 0x80) == 0) {
                        break;
                    }
                    shift += 7;
                }
                value += gap;
                m_scratch.push_back(static_cast<uint32_t>(value));
            }
            if (m_scratch.back() != m_upper_bound) {
                throw corruption_error("sequence: partition " + std::to_string(p) +
                                       " does not end at its upper bound");
            }
            m_value = m_scratch.front();
        } else {
            m_span_bits = static_cast<uint64_t>(m_upper_bound) - m_base + 1;
            uint64_t bit = find_set_from(0);
            if (bit == m_span_bits) {
                throw corruption_error("sequence: empty bitmap partition " + std::to_string(p));
            }
            m_bit = bit;
            m_value = m_base + static_cast<uint32_t>(bit);
        }
    }

    uint32_t advance_partition() {
        if (m_partition + 1 == m_view->num_partitions()) {
            m_exhausted = true;
            return sequence_exhausted;
        }
        m_rank_base += m_view->entry(m_partition).size;
        enter_partition(m_partition + 1);
        return m_value;
    }

    uint64_t load_word(uint64_t word_idx) const {
        uint64_t byte = word_idx * 8;
        uint64_t take = std::min<uint64_t>(8, m_payload.size() - byte);
        uint64_t w = 0;
        std::memcpy(&w, m_payload.data() + byte, take);
        return w;
    }

    // First set bit at position >= from, or span_bits when none remain.
    uint64_t find_set_from(uint64_t from) const {
        if (from >= m_span_bits) {
            return m_span_bits;
        }
        uint64_t word_idx = from / 64;
        uint64_t num_words = (m_payload.size() + 7) / 8;
        uint64_t w = load_word(word_idx) & (~uint64_t{0} << (from % 64));
        while (w == 0) {
            if (++word_idx == num_words) {
                return m_span_bits;
            }
            w = load_word(word_idx);
        }
        uint64_t bit = word_idx * 64 + std::countr_zero(w);
        return bit < m_span_bits ? bit : m_span_bits;
    }

    // Set bits in [from, to); used to keep ranks exact across skips.
    uint64_t popcount_between(uint64_t from, uint64_t to) const {
        if (from >= to) {
            return 0;
        }
        uint64_t count = 0;
        uint64_t word_idx = from / 64;
        uint64_t last_word = (to - 1) / 64;
        uint64_t w = load_word(word_idx) & (~uint64_t{0} << (from % 64));
        while (word_idx != last_word) {
            count += std::popcount(w);
            w = load_word(++word_idx);
        }
        unsigned tail = to - word_idx * 64;
        if (tail < 64) {
            w &= (uint64_t{1} << tail) - 1;
        }
        return count + std::popcount(w);
    }

    const sequence_view* m_view;
    uint64_t m_partition = 0;
    encoder m_tag = encoder::vbyte;
    uint32_t m_base = 0;
    uint32_t m_upper_bound = 0;
    std::span<const uint8_t> m_payload;
    std::vector<uint32_t> m_scratch;
    uint64_t m_span_bits = 0;
    uint64_t m_bit = 0;
    uint64_t m_rank = 0;
    uint64_t m_rank_base = 0;
    uint32_t m_value = 0;
    bool m_exhausted = false;
};

}  // namespace pvb
