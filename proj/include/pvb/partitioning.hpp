#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "codec.hpp"
#include "common.hpp"

namespace pvb {

enum class encoder : uint8_t { vbyte = 0, bitmap = 1 };

// Ordered split points p_1 < ... < p_m = n with one encoder tag per
// partition. modeled_bits is the exact model cost: the cheaper encoder's
// bits per partition plus header_bits per partition.
struct partition_plan {
    std::vector<uint32_t> splits;
    std::vector<encoder> tags;
    uint64_t modeled_bits = 0;
    uint64_t header_bits = default_header_bits;

    size_t num_partitions() const { return splits.size(); }
};

// Running difference between the two encoders' cumulative bit costs,
// with the extreme values seen in the current interval. The gain falls
// while vbyte is winning and rises while the bitmap is winning; its
// extrema are the candidate split points.
struct gain_state {
    int64_t gain = 0;
    int64_t min_gain = 0;
    int64_t max_gain = 0;
    uint32_t min_pos = 0;
    uint32_t max_pos = 0;
    uint64_t threshold;  // header_bits before the first split, 2x after
    bool rising = true;
    uint64_t steps = 0;

    // cumulative per-encoder bits, with snapshots at the extrema so a
    // partition's tagged cost is available when a split is emitted
    uint64_t vbyte_bits = 0;
    uint64_t bitmap_bits = 0;
    uint64_t vbyte_at_min = 0;
    uint64_t bitmap_at_min = 0;
    uint64_t vbyte_at_max = 0;
    uint64_t bitmap_at_max = 0;

    explicit gain_state(uint64_t header_bits = default_header_bits)
        : threshold(header_bits) {}

    void step(uint32_t gap) {
        uint64_t e = vbyte_cost(gap);
        uint64_t b = gap;
        vbyte_bits += e;
        bitmap_bits += b;
        int64_t delta = static_cast<int64_t>(e) - static_cast<int64_t>(b);
        gain += delta;
        rising = delta >= 0;
        ++steps;
        if (rising) {
            if (gain > max_gain) {
                max_gain = gain;
                max_pos = static_cast<uint32_t>(steps);
                vbyte_at_max = vbyte_bits;
                bitmap_at_max = bitmap_bits;
            }
        } else {
            if (gain < min_gain) {
                min_gain = gain;
                min_pos = static_cast<uint32_t>(steps);
                vbyte_at_min = vbyte_bits;
                bitmap_at_min = bitmap_bits;
            }
        }
    }

    // The emitted split becomes the new interval origin: the gain is
    // rebased so the origin sits at zero and the current position holds
    // the opposite extremum.
    void rebase_to_min(uint64_t header_bits) {
        threshold = 2 * header_bits;
        gain -= min_gain;
        min_gain = 0;
        max_gain = gain;
        max_pos = static_cast<uint32_t>(steps);
        vbyte_at_max = vbyte_bits;
        bitmap_at_max = bitmap_bits;
    }

    void rebase_to_max(uint64_t header_bits) {
        threshold = 2 * header_bits;
        gain -= max_gain;
        max_gain = 0;
        min_gain = gain;
        min_pos = static_cast<uint32_t>(steps);
        vbyte_at_min = vbyte_bits;
        bitmap_at_min = bitmap_bits;
    }
};

namespace detail {

// Shared by the optimizers: gap of values[k] under the sentinel, with
// strictly-increasing validation.
inline uint32_t checked_gap(int64_t& prev, uint32_t value, size_t k) {
    if (static_cast<int64_t>(value) <= prev) {
        throw invalid_sequence_error("sequence not strictly increasing at position " +
                                     std::to_string(k));
    }
    if (value > max_docid) {
        throw invalid_sequence_error("value exceeds maximum representable docID");
    }
    uint32_t gap = static_cast<uint32_t>(static_cast<int64_t>(value) - prev);
    prev = value;
    return gap;
}

}  // namespace detail

// Exact minimum-cost partitioning in one pass. Splits are emitted at the
// gain extrema whose margin amortizes the switching cost: header_bits at
// the sequence ends, twice that in the interior. gain_steps, when given,
// counts the per-element state updates.
inline partition_plan optimal_partition(std::span<const uint32_t> values,
                                        uint64_t header_bits = default_header_bits,
                                        uint64_t* gain_steps = nullptr) {
    if (values.empty()) {
        throw invalid_argument_error("optimal_partition: empty sequence");
    }
    const int64_t F = static_cast<int64_t>(header_bits);
    const uint32_t n = static_cast<uint32_t>(values.size());

    partition_plan plan;
    plan.header_bits = header_bits;

    gain_state st(header_bits);
    uint64_t vbyte_at_split = 0;
    uint64_t bitmap_at_split = 0;
    uint64_t tagged_bits = 0;

    auto emit_vbyte_at_min = [&] {
        plan.splits.push_back(st.min_pos);
        plan.tags.push_back(encoder::vbyte);
        tagged_bits += st.vbyte_at_min - vbyte_at_split;
        vbyte_at_split = st.vbyte_at_min;
        bitmap_at_split = st.bitmap_at_min;
        st.rebase_to_min(header_bits);
    };
    auto emit_bitmap_at_max = [&] {
        plan.splits.push_back(st.max_pos);
        plan.tags.push_back(encoder::bitmap);
        tagged_bits += st.bitmap_at_max - bitmap_at_split;
        vbyte_at_split = st.vbyte_at_max;
        bitmap_at_split = st.bitmap_at_max;
        st.rebase_to_max(header_bits);
    };

    int64_t prev = -1;
    for (size_t k = 0; k != values.size(); ++k) {
        st.step(detail::checked_gap(prev, values[k], k));
        if (st.rising) {
            if (st.min_gain < -static_cast<int64_t>(st.threshold) &&
                st.min_gain - st.gain < -2 * F) {
                emit_vbyte_at_min();
            }
        } else {
            if (st.max_gain > static_cast<int64_t>(st.threshold) &&
                st.max_gain - st.gain > 2 * F) {
                emit_bitmap_at_max();
            }
        }
    }

    // End of sequence: one further split is worth taking on a margin of
    // a single header, since the closing partition amortizes one switch.
    if (st.max_gain > F && st.max_gain - st.gain > F) {
        emit_bitmap_at_max();
    }
    if (st.min_gain < -F && st.min_gain - st.gain < -F) {
        emit_vbyte_at_min();
    }
    plan.splits.push_back(n);
    if (st.gain > 0) {
        plan.tags.push_back(encoder::bitmap);
        tagged_bits += st.bitmap_bits - bitmap_at_split;
    } else {
        plan.tags.push_back(encoder::vbyte);
        tagged_bits += st.vbyte_bits - vbyte_at_split;
    }

    plan.modeled_bits = tagged_bits + plan.num_partitions() * header_bits;
    if (gain_steps) {
        *gain_steps = st.steps;
    }
    return plan;
}

// Fixed-length blocks of size b, each tagged with its cheaper encoder.
inline partition_plan uniform_partition(std::span<const uint32_t> values, uint32_t block,
                                        uint64_t header_bits = default_header_bits) {
    if (values.empty()) {
        throw invalid_argument_error("uniform_partition: empty sequence");
    }
    if (block == 0) {
        throw invalid_argument_error("uniform_partition: block size must be positive");
    }
    partition_plan plan;
    plan.header_bits = header_bits;
    uint64_t tagged_bits = 0;
    for (size_t i = 0; i < values.size(); i += block) {
        size_t j = std::min(values.size(), i + static_cast<size_t>(block));
        uint64_t e = vbyte_slice_cost(values, i, j);
        uint64_t b = bitmap_slice_cost(values, i, j);
        plan.splits.push_back(static_cast<uint32_t>(j));
        plan.tags.push_back(e <= b ? encoder::vbyte : encoder::bitmap);
        tagged_bits += std::min(e, b);
    }
    plan.modeled_bits = tagged_bits + plan.num_partitions() * header_bits;
    return plan;
}

// Whole list as one vbyte partition; the baseline the partitioned
// indexes are measured against.
inline partition_plan unpartitioned_plan(std::span<const uint32_t> values,
                                         uint64_t header_bits = default_header_bits) {
    if (values.empty()) {
        throw invalid_argument_error("unpartitioned_plan: empty sequence");
    }
    partition_plan plan;
    plan.header_bits = header_bits;
    plan.splits.push_back(static_cast<uint32_t>(values.size()));
    plan.tags.push_back(encoder::vbyte);
    plan.modeled_bits = vbyte_slice_cost(values, 0, values.size()) + header_bits;
    return plan;
}

// True minimum over all partitionings by shortest path on the complete
// DAG, O(n^2) time. Capped: this is the test oracle, not a production
// path.
inline partition_plan dp_exact_partition(std::span<const uint32_t> values,
                                         uint64_t header_bits = default_header_bits,
                                         size_t oracle_cap = 2048) {
    if (values.empty()) {
        throw invalid_argument_error("dp_exact_partition: empty sequence");
    }
    if (values.size() > oracle_cap) {
        throw invalid_argument_error("dp_exact_partition: sequence exceeds oracle cap");
    }
    const size_t n = values.size();

    // prefix vbyte bits; bitmap bits come from the raw values
    std::vector<uint64_t> pe(n + 1, 0);
    {
        int64_t prev = -1;
        for (size_t k = 0; k != n; ++k) {
            pe[k + 1] = pe[k] + vbyte_cost(detail::checked_gap(prev, values[k], k));
        }
    }
    auto base_of = [&](size_t i) -> int64_t {
        return i == 0 ? -1 : static_cast<int64_t>(values[i - 1]);
    };
    auto edge_cost = [&](size_t i, size_t j) -> uint64_t {
        uint64_t e = pe[j] - pe[i];
        uint64_t b = static_cast<uint64_t>(static_cast<int64_t>(values[j - 1]) - base_of(i));
        return std::min(e, b) + header_bits;
    };

    constexpr uint64_t inf = std::numeric_limits<uint64_t>::max();
    std::vector<uint64_t> dist(n + 1, inf);
    std::vector<uint32_t> parent(n + 1, 0);
    dist[0] = 0;
    for (size_t j = 1; j <= n; ++j) {
        for (size_t i = 0; i < j; ++i) {
            uint64_t c = dist[i] + edge_cost(i, j);
            if (c < dist[j]) {
                dist[j] = c;
                parent[j] = static_cast<uint32_t>(i);
            }
        }
    }

    partition_plan plan;
    plan.header_bits = header_bits;
    std::vector<uint32_t> rev;
    for (uint32_t cur = static_cast<uint32_t>(n); cur != 0; cur = parent[cur]) {
        rev.push_back(cur);
    }
    plan.splits.assign(rev.rbegin(), rev.rend());
    uint32_t begin = 0;
    for (uint32_t end : plan.splits) {
        uint64_t e = pe[end] - pe[begin];
        uint64_t b = static_cast<uint64_t>(static_cast<int64_t>(values[end - 1]) - base_of(begin));
        plan.tags.push_back(e <= b ? encoder::vbyte : encoder::bitmap);
        begin = end;
    }
    plan.modeled_bits = dist[n];
    return plan;
}

// Sparsified shortest path: only edges whose cost amortizes the header
// are kept, bucketed into geometric cost classes, giving a
// (1+eps1)(1+eps2)-approximation in linear time for fixed parameters.
inline partition_plan dp_epsilon_partition(std::span<const uint32_t> values,
                                           uint64_t header_bits = default_header_bits,
                                           double eps1 = 0.03, double eps2 = 0.3) {
    if (values.empty()) {
        throw invalid_argument_error("dp_epsilon_partition: empty sequence");
    }
    if (!(eps1 > 0.0 && eps1 < 1.0) || !(eps2 > 0.0 && eps2 < 1.0)) {
        throw invalid_argument_error("dp_epsilon_partition: eps parameters must be in (0, 1)");
    }
    const size_t n = values.size();

    std::vector<uint64_t> pe(n + 1, 0);
    {
        int64_t prev = -1;
        for (size_t k = 0; k != n; ++k) {
            pe[k + 1] = pe[k] + vbyte_cost(detail::checked_gap(prev, values[k], k));
        }
    }
    auto base_of = [&](size_t i) -> int64_t {
        return i == 0 ? -1 : static_cast<int64_t>(values[i - 1]);
    };
    auto edge_cost = [&](size_t i, size_t j) -> uint64_t {
        uint64_t e = pe[j] - pe[i];
        uint64_t b = static_cast<uint64_t>(static_cast<int64_t>(values[j - 1]) - base_of(i));
        return std::min(e, b) + header_bits;
    };

    const uint64_t single_cost = edge_cost(0, n);
    const double cost_lower_bound = static_cast<double>(header_bits + 1);
    const double retain_bound = cost_lower_bound / eps1;

    std::vector<double> class_bounds;
    for (double bound = cost_lower_bound; bound < retain_bound; bound *= 1.0 + eps2) {
        class_bounds.push_back(bound);
        if (bound >= static_cast<double>(single_cost)) {
            break;
        }
    }

    std::vector<uint64_t> dist(n + 1, single_cost);
    std::vector<uint32_t> parent(n + 1, 0);
    dist[0] = 0;
    std::vector<size_t> ends(class_bounds.size(), 0);

    for (size_t i = 0; i < n; ++i) {
        size_t frontier = i + 1;
        for (size_t w = 0; w != class_bounds.size(); ++w) {
            if (ends[w] < frontier) {
                ends[w] = frontier;
            }
            while (true) {
                uint64_t wc = edge_cost(i, ends[w]);
                if (dist[i] + wc < dist[ends[w]]) {
                    dist[ends[w]] = dist[i] + wc;
                    parent[ends[w]] = static_cast<uint32_t>(i);
                }
                frontier = ends[w];
                if (ends[w] == n || static_cast<double>(wc) >= class_bounds[w]) {
                    break;
                }
                ++ends[w];
            }
        }
    }

    partition_plan plan;
    plan.header_bits = header_bits;
    std::vector<uint32_t> rev;
    for (uint32_t cur = static_cast<uint32_t>(n); cur != 0; cur = parent[cur]) {
        rev.push_back(cur);
    }
    plan.splits.assign(rev.rbegin(), rev.rend());
    uint64_t tagged_bits = 0;
    uint32_t begin = 0;
    for (uint32_t end : plan.splits) {
        uint64_t e = pe[end] - pe[begin];
        uint64_t b = static_cast<uint64_t>(static_cast<int64_t>(values[end - 1]) - base_of(begin));
        plan.tags.push_back(e <= b ? encoder::vbyte : encoder::bitmap);
        tagged_bits += std::min(e, b);
        begin = end;
    }
    plan.modeled_bits = tagged_bits + plan.num_partitions() * header_bits;
    return plan;
}

// Recomputes a plan's model cost from scratch, independent of any
// optimizer bookkeeping.
inline uint64_t plan_cost(std::span<const uint32_t> values, const partition_plan& plan) {
    if (plan.splits.empty() || plan.tags.size() != plan.splits.size()) {
        throw invalid_argument_error("plan_cost: empty or inconsistent plan");
    }
    if (plan.splits.back() != values.size()) {
        throw invalid_argument_error("plan_cost: plan does not cover the sequence");
    }
    uint64_t bits = 0;
    size_t begin = 0;
    for (uint32_t end : plan.splits) {
        if (end <= begin || end > values.size()) {
            throw invalid_argument_error("plan_cost: splits not strictly increasing");
        }
        bits += std::min(vbyte_slice_cost(values, begin, end),
                         bitmap_slice_cost(values, begin, end));
        begin = end;
    }
    return bits + plan.num_partitions() * plan.header_bits;
}

}  // namespace pvb
