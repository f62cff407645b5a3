#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "codec.hpp"
#include "collection.hpp"
#include "common.hpp"

namespace pvb {

// Splits every list into fixed blocks and classifies each block as
// sparse when vbyte beats the characteristic bit-vector on the exact
// cost models, dense otherwise. Lists are clustered by length into
// short/medium/long classes.

struct density_params {
    uint32_t block = 128;
    uint64_t short_below = 10000;    // short: n < short_below
    uint64_t medium_below = 7000000; // medium: short_below <= n < medium_below
};

struct density_class {
    uint64_t dense_ints = 0;
    uint64_t sparse_ints = 0;

    uint64_t total() const { return dense_ints + sparse_ints; }
    double dense_pct() const {
        return total() == 0 ? 0.0 : 100.0 * static_cast<double>(dense_ints) / static_cast<double>(total());
    }
    double sparse_pct() const { return total() == 0 ? 0.0 : 100.0 - dense_pct(); }
};

struct density_report {
    std::array<density_class, 3> classes;  // short, medium, long
    uint64_t total_ints = 0;

    double share_pct(size_t cls) const {
        return total_ints == 0
                   ? 0.0
                   : 100.0 * static_cast<double>(classes[cls].total()) / static_cast<double>(total_ints);
    }
};

inline void accumulate_density(const std::vector<uint32_t>& postings,
                               const density_params& params, density_report& report) {
    size_t cls = postings.size() < params.short_below ? 0
                 : postings.size() < params.medium_below ? 1
                                                         : 2;
    for (size_t begin = 0; begin < postings.size(); begin += params.block) {
        size_t end = std::min(postings.size(), begin + static_cast<size_t>(params.block));
        uint64_t e = vbyte_slice_cost(postings, begin, end);
        uint64_t b = bitmap_slice_cost(postings, begin, end);
        if (e < b) {
            report.classes[cls].sparse_ints += end - begin;
        } else {
            report.classes[cls].dense_ints += end - begin;
        }
    }
    report.total_ints += postings.size();
}

inline density_report density_scan(collection_reader& reader, const density_params& params) {
    if (params.block == 0) {
        throw invalid_argument_error("density_scan: block size must be positive");
    }
    density_report report;
    term_lists term;
    while (reader.next(term)) {
        accumulate_density(term.postings, params, report);
    }
    return report;
}

}  // namespace pvb
