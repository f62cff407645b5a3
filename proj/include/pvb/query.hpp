#pragma once

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "index.hpp"
#include "partitioned_sequence.hpp"

namespace pvb {

// One query per line, whitespace-separated non-negative term ids.
// Duplicates are dropped, empty lines skipped.
inline std::vector<std::vector<uint32_t>> parse_queries(std::istream& in) {
    std::vector<std::vector<uint32_t>> queries;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::vector<uint32_t> terms;
        std::string token;
        while (tokens >> token) {
            uint64_t value = 0;
            size_t used = 0;
            try {
                value = std::stoull(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size() || value > std::numeric_limits<uint32_t>::max()) {
                throw malformed_input_error("queries: bad token '" + token + "' on line " +
                                            std::to_string(line_no));
            }
            terms.push_back(static_cast<uint32_t>(value));
        }
        if (terms.empty()) {
            continue;
        }
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        queries.push_back(std::move(terms));
    }
    return queries;
}

inline std::vector<std::vector<uint32_t>> parse_queries(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open " + path);
    }
    return parse_queries(in);
}

// Exponential jump-size buckets: bucket d holds sizes in (2^(d-1), 2^d],
// with every jump of size <= 1 in bucket 1, so the buckets partition the
// positive sizes. Bucket 0 stays unused.
struct jump_histogram {
    std::vector<uint64_t> buckets = std::vector<uint64_t>(34, 0);
    uint64_t total = 0;

    static unsigned bucket_of(uint64_t size) {
        if (size <= 1) {
            return 1;
        }
        return static_cast<unsigned>(std::bit_width(size - 1));
    }

    void record(uint64_t size) {
        ++buckets[bucket_of(size)];
        ++total;
    }

    std::vector<double> percentages() const {
        std::vector<double> out(buckets.size(), 0.0);
        if (total != 0) {
            for (size_t i = 0; i != buckets.size(); ++i) {
                out[i] = 100.0 * static_cast<double>(buckets[i]) / static_cast<double>(total);
            }
        }
        return out;
    }
};

namespace detail {

struct probing_cursor {
    sequence_cursor cursor;
    jump_histogram* jumps;
#ifndef NDEBUG
    uint32_t last_probe = 0;
#endif

    uint32_t next_geq(uint32_t x) {
#ifndef NDEBUG
        assert(x >= last_probe);  // probes are non-decreasing per list
        last_probe = x;
#endif
        if (jumps == nullptr) {
            return cursor.next_geq(x);
        }
        uint64_t before = cursor.position();
        uint32_t z = cursor.next_geq(x);
        if (!cursor.exhausted()) {
            jumps->record(cursor.position() - before);
        }
        return z;
    }
};

}  // namespace detail

// Boolean conjunction over the stored sequences. Lists are intersected
// shortest first; every other list advances through NextGEQ on the
// current candidate. Unknown term ids yield an empty result.
inline std::vector<uint32_t> intersect_and(const index_reader& index,
                                           std::span<const uint32_t> terms,
                                           jump_histogram* jumps = nullptr) {
    if (terms.empty()) {
        return {};
    }
    for (uint32_t t : terms) {
        if (t >= index.num_terms()) {
            return {};
        }
    }

    std::vector<sequence_view> views;
    views.reserve(terms.size());
    for (uint32_t t : terms) {
        views.emplace_back(index.docs_view(t));
    }
    std::sort(views.begin(), views.end(),
              [](const sequence_view& a, const sequence_view& b) { return a.size() < b.size(); });

    if (views.size() == 1) {
        return views[0].decode_all();
    }

    std::vector<detail::probing_cursor> cursors;
    cursors.reserve(views.size());
    for (const auto& view : views) {
        cursors.push_back(detail::probing_cursor{sequence_cursor(view), jumps});
    }

    std::vector<uint32_t> result;
    uint32_t candidate = cursors[0].cursor.value();
    size_t i = 1;
    while (candidate != sequence_exhausted) {
        uint32_t z = cursors[i].next_geq(candidate);
        if (z != candidate) {
            candidate = z;
            i = 0;
        } else {
            ++i;
            if (i == cursors.size()) {
                result.push_back(candidate);
                if (candidate == max_docid) {
                    break;
                }
                candidate = cursors[0].next_geq(candidate + 1);
                i = 1;
            }
        }
    }
    return result;
}

struct query_timing {
    uint64_t query_id;
    double millis;
    uint64_t matches;
};

struct benchmark_report {
    std::vector<query_timing> per_query;
    double mean_millis = 0.0;
    uint64_t total_matches = 0;
    unsigned repetitions = 0;
};

// Times each query over `repetitions` runs after one warming pass and
// reports the per-query mean. Single-threaded by contract.
inline benchmark_report run_benchmark(const index_reader& index,
                                      const std::vector<std::vector<uint32_t>>& queries,
                                      unsigned repetitions = 3) {
    if (repetitions == 0) {
        throw invalid_argument_error("run_benchmark: need at least one repetition");
    }
    benchmark_report report;
    report.repetitions = repetitions;
    report.per_query.reserve(queries.size());

    for (const auto& terms : queries) {
        (void)intersect_and(index, terms);  // touch the byte ranges
    }

    using clock = std::chrono::steady_clock;
    for (uint64_t id = 0; id != queries.size(); ++id) {
        double total_ms = 0.0;
        uint64_t matches = 0;
        for (unsigned rep = 0; rep != repetitions; ++rep) {
            auto start = clock::now();
            auto result = intersect_and(index, queries[id]);
            auto stop = clock::now();
            total_ms += std::chrono::duration<double, std::milli>(stop - start).count();
            matches = result.size();
        }
        report.per_query.push_back({id, total_ms / repetitions, matches});
        report.total_matches += matches;
    }
    for (const auto& q : report.per_query) {
        report.mean_millis += q.millis;
    }
    if (!report.per_query.empty()) {
        report.mean_millis /= static_cast<double>(report.per_query.size());
    }
    return report;
}

}  // namespace pvb
