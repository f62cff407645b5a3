#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "collection.hpp"
#include "common.hpp"

namespace pvb {

// Seeded clustered-docID generator. Lists alternate dense runs of
// consecutive identifiers with sparse stretches of geometric gaps;
// dense_fraction controls the share of postings emitted inside runs.

struct synthetic_params {
    uint64_t num_docs = 1000000;
    uint32_t num_terms = 5000;
    uint32_t mean_list_len = 2500;   // lists are log-uniform around this
    double dense_fraction = 0.7;
    uint32_t mean_run_len = 512;     // dense run length (geometric)
    uint32_t mean_sparse_gap = 600;  // sparse gap size (geometric)
    double mean_extra_freq = 1.0;    // freqs are 1 + geometric excess
    uint64_t seed = 1;
};

namespace detail {

inline uint64_t bounded_draw(std::mt19937_64& rng, uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(rng()) * n) >> 64);
}

inline double unit_draw(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Geometric on {1, 2, ...} with the given mean.
inline uint64_t geometric_draw(std::mt19937_64& rng, double mean) {
    if (mean <= 1.0) {
        return 1;
    }
    double g = std::floor(std::log(unit_draw(rng)) / std::log1p(-1.0 / mean));
    if (g < 0.0) {
        g = 0.0;
    }
    if (g > 4e9) {
        g = 4e9;
    }
    return 1 + static_cast<uint64_t>(g);
}

}  // namespace detail

// A standalone clustered sequence; used by the partitioner benchmarks.
inline std::vector<uint32_t> generate_sequence(std::mt19937_64& rng, size_t n,
                                               double dense_fraction,
                                               uint32_t mean_run_len,
                                               uint32_t mean_sparse_gap) {
    std::vector<uint32_t> values;
    values.reserve(n);
    double sparse_len = dense_fraction >= 1.0
                            ? 0.0
                            : mean_run_len * (1.0 - dense_fraction) / std::max(dense_fraction, 1e-9);
    uint64_t cur = detail::bounded_draw(rng, 2);
    bool dense = detail::unit_draw(rng) < dense_fraction;
    while (values.size() < n) {
        uint64_t len = dense ? detail::geometric_draw(rng, mean_run_len)
                             : detail::geometric_draw(rng, std::max(1.0, sparse_len));
        for (uint64_t i = 0; i != len && values.size() < n; ++i) {
            cur += dense ? 1 : detail::geometric_draw(rng, mean_sparse_gap);
            if (cur > max_docid) {
                throw invalid_argument_error("generate_sequence: universe overflow");
            }
            values.push_back(static_cast<uint32_t>(cur));
        }
        dense = !dense;
    }
    return values;
}

inline collection generate_collection(const synthetic_params& params) {
    if (params.num_docs == 0 || params.num_docs > max_docid || params.num_terms == 0) {
        throw invalid_argument_error("generate_collection: bad universe parameters");
    }
    if (!(params.dense_fraction >= 0.0 && params.dense_fraction <= 1.0)) {
        throw invalid_argument_error("generate_collection: dense fraction outside [0, 1]");
    }
    std::mt19937_64 rng(params.seed);
    collection coll;
    coll.num_docs = params.num_docs;
    coll.lists.resize(params.num_terms);

    double sparse_len = params.dense_fraction >= 1.0
                            ? 0.0
                            : params.mean_run_len * (1.0 - params.dense_fraction) /
                                  std::max(params.dense_fraction, 1e-9);

    for (auto& term : coll.lists) {
        // list length log-uniform in [mean/4, 4*mean]
        double spread = std::exp((detail::unit_draw(rng) * 2.0 - 1.0) * std::log(4.0));
        uint64_t target = std::max<uint64_t>(1, static_cast<uint64_t>(params.mean_list_len * spread));

        double mean_step = params.dense_fraction + (1.0 - params.dense_fraction) * params.mean_sparse_gap;
        uint64_t est_span = static_cast<uint64_t>(static_cast<double>(target) * mean_step * 1.25);
        uint64_t start = est_span >= params.num_docs
                             ? 0
                             : detail::bounded_draw(rng, params.num_docs - est_span);

        uint64_t cur = start;
        bool dense = detail::unit_draw(rng) < params.dense_fraction;
        bool first = true;
        while (term.postings.size() < target) {
            uint64_t len = dense ? detail::geometric_draw(rng, params.mean_run_len)
                                 : detail::geometric_draw(rng, std::max(1.0, sparse_len));
            for (uint64_t i = 0; i != len && term.postings.size() < target; ++i) {
                if (first) {
                    first = false;  // the start position itself is the first posting
                } else {
                    cur += dense ? 1
                                 : detail::geometric_draw(rng, params.mean_sparse_gap);
                }
                if (cur >= params.num_docs) {
                    break;
                }
                term.postings.push_back(static_cast<uint32_t>(cur));
            }
            if (cur >= params.num_docs) {
                break;
            }
            dense = !dense;
        }
        if (term.postings.empty()) {
            term.postings.push_back(static_cast<uint32_t>(detail::bounded_draw(rng, params.num_docs)));
        }
        term.freqs.resize(term.postings.size());
        for (auto& f : term.freqs) {
            uint64_t extra = params.mean_extra_freq <= 0.0
                                 ? 0
                                 : detail::geometric_draw(rng, 1.0 + params.mean_extra_freq) - 1;
            f = static_cast<uint32_t>(1 + std::min<uint64_t>(extra, 255));
        }
    }
    return coll;
}

}  // namespace pvb
