#pragma once

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "collection.hpp"
#include "common.hpp"
#include "partitioned_sequence.hpp"
#include "partitioning.hpp"

namespace pvb {

// Index file layout, little-endian, 8-byte aligned sections:
//   "PVB1"                     4 bytes
//   u32 version = 1
//   u8  strategy tag, 3 zero pad bytes
//   u32 header cost F in bits
//   u64 num_docs
//   u64 num_terms
//   u64 docs blob offset per term   (absolute file offsets)
//   u64 freqs blob offset per term
//   docs sequence blobs, then freqs sequence blobs
//
// Frequencies are prefix-summed per list before partitioning so the same
// strictly-increasing machinery serves both streams; adjacent
// differences recover them.

enum class strategy : uint8_t { unpartitioned = 0, uniform = 1, epsdp = 2, optimal = 3 };

inline const char* strategy_name(strategy s) {
    switch (s) {
        case strategy::unpartitioned: return "unpartitioned";
        case strategy::uniform: return "uniform";
        case strategy::epsdp: return "epsdp";
        case strategy::optimal: return "optimal";
    }
    return "unknown";
}

inline strategy strategy_from_name(const std::string& name) {
    if (name == "unpartitioned") return strategy::unpartitioned;
    if (name == "uniform") return strategy::uniform;
    if (name == "epsdp") return strategy::epsdp;
    if (name == "optimal") return strategy::optimal;
    throw invalid_argument_error("unknown strategy: " + name);
}

struct build_params {
    strategy strat = strategy::optimal;
    uint64_t header_bits = default_header_bits;
    uint32_t block = 128;
    double eps1 = 0.03;
    double eps2 = 0.3;
    unsigned threads = 0;  // 0 picks the hardware concurrency
};

constexpr char index_magic[4] = {'P', 'V', 'B', '1'};
constexpr uint32_t index_version = 1;
constexpr uint64_t index_header_bytes = 32;

namespace detail {

inline partition_plan plan_for(std::span<const uint32_t> values, const build_params& params) {
    switch (params.strat) {
        case strategy::unpartitioned: return unpartitioned_plan(values, params.header_bits);
        case strategy::uniform: return uniform_partition(values, params.block, params.header_bits);
        case strategy::epsdp:
            return dp_epsilon_partition(values, params.header_bits, params.eps1, params.eps2);
        case strategy::optimal: return optimal_partition(values, params.header_bits);
    }
    throw invalid_argument_error("bad strategy tag");
}

struct encoded_term {
    std::vector<uint8_t> docs;
    std::vector<uint8_t> freqs;
};

inline encoded_term encode_term(const term_lists& term, const build_params& params) {
    encoded_term out;
    out.docs = build_sequence(term.postings, plan_for(term.postings, params));

    std::vector<uint32_t> summed(term.freqs.size());
    uint64_t run = 0;
    for (size_t k = 0; k != term.freqs.size(); ++k) {
        run += term.freqs[k];
        if (run > max_docid) {
            throw invalid_sequence_error("frequency prefix sums exceed the representable range");
        }
        summed[k] = static_cast<uint32_t>(run);
    }
    out.freqs = build_sequence(summed, plan_for(summed, params));
    return out;
}

}  // namespace detail

// Encodes a whole collection into index-file bytes. Lists are encoded in
// parallel batches but always emitted in term order, so the output is
// deterministic for identical inputs.
inline std::vector<uint8_t> encode_index(collection_reader& reader, const build_params& params) {
    unsigned threads = params.threads != 0 ? params.threads
                                           : std::max(1u, std::thread::hardware_concurrency());
    std::vector<detail::encoded_term> blobs;

    std::vector<term_lists> batch;
    batch.reserve(4 * threads);
    term_lists term;
    bool more = true;
    while (more) {
        batch.clear();
        while (batch.size() < 4 * static_cast<size_t>(threads) && (more = reader.next(term))) {
            batch.push_back(std::move(term));
        }
        if (batch.empty()) {
            break;
        }
        std::vector<detail::encoded_term> encoded(batch.size());
        if (threads == 1 || batch.size() == 1) {
            for (size_t i = 0; i != batch.size(); ++i) {
                encoded[i] = detail::encode_term(batch[i], params);
            }
        } else {
            std::vector<std::future<void>> workers;
            size_t chunk = (batch.size() + threads - 1) / threads;
            for (unsigned w = 0; w != threads; ++w) {
                size_t begin = w * chunk;
                size_t end = std::min(batch.size(), begin + chunk);
                if (begin >= end) {
                    break;
                }
                workers.push_back(std::async(std::launch::async, [&, begin, end] {
                    for (size_t i = begin; i != end; ++i) {
                        encoded[i] = detail::encode_term(batch[i], params);
                    }
                }));
            }
            for (auto& worker : workers) {
                worker.get();
            }
        }
        for (auto& e : encoded) {
            blobs.push_back(std::move(e));
        }
    }

    uint64_t num_terms = blobs.size();
    uint64_t tables_bytes = 16 * num_terms;
    uint64_t docs_base = index_header_bytes + tables_bytes;

    std::vector<uint8_t> out;
    out.reserve(docs_base);
    out.insert(out.end(), index_magic, index_magic + 4);
    detail::append_u32(out, index_version);
    out.push_back(static_cast<uint8_t>(params.strat));
    out.insert(out.end(), 3, 0);
    detail::append_u32(out, static_cast<uint32_t>(params.header_bits));
    detail::append_u64(out, reader.num_docs());
    detail::append_u64(out, num_terms);

    uint64_t offset = docs_base;
    for (const auto& blob : blobs) {
        detail::append_u64(out, offset);
        offset += blob.docs.size();
    }
    for (const auto& blob : blobs) {
        detail::append_u64(out, offset);
        offset += blob.freqs.size();
    }
    out.reserve(offset);
    for (const auto& blob : blobs) {
        out.insert(out.end(), blob.docs.begin(), blob.docs.end());
    }
    for (const auto& blob : blobs) {
        out.insert(out.end(), blob.freqs.begin(), blob.freqs.end());
    }
    return out;
}

inline void write_file(const std::vector<uint8_t>& bytes, const std::string& path) {
    auto f = detail::open_file(path, "wb");
    if (!bytes.empty() && std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
        throw io_error("write failed: " + path);
    }
    if (std::fflush(f.get()) != 0) {
        throw io_error("write failed: " + path);
    }
}

inline void build_index(const std::string& docs_path, const std::string& freqs_path,
                        const build_params& params, const std::string& output_path) {
    collection_reader reader(docs_path, freqs_path);
    write_file(encode_index(reader, params), output_path);
}

namespace detail {

// Read-only memory map with a plain-read fallback.
class mapped_file {
public:
    explicit mapped_file(const std::string& path) {
        int fd = ::open(path.c_str(), O_RDONLY);
        if (fd < 0) {
            throw io_error("cannot open " + path);
        }
        struct stat st{};
        if (::fstat(fd, &st) != 0) {
            ::close(fd);
            throw io_error("cannot stat " + path);
        }
        m_size = static_cast<size_t>(st.st_size);
        if (m_size != 0) {
            void* mapped = ::mmap(nullptr, m_size, PROT_READ, MAP_SHARED, fd, 0);
            if (mapped != MAP_FAILED) {
                m_data = static_cast<uint8_t*>(mapped);
                m_mapped = true;
            } else {
                m_fallback.resize(m_size);
                size_t done = 0;
                while (done < m_size) {
                    ssize_t got = ::read(fd, m_fallback.data() + done, m_size - done);
                    if (got <= 0) {
                        ::close(fd);
                        throw io_error("cannot read " + path);
                    }
                    done += static_cast<size_t>(got);
                }
                m_data = m_fallback.data();
            }
        }
        ::close(fd);
    }

    mapped_file(const mapped_file&) = delete;
    mapped_file& operator=(const mapped_file&) = delete;

    ~mapped_file() {
        if (m_mapped) {
            ::munmap(const_cast<uint8_t*>(m_data), m_size);
        }
    }

    const uint8_t* data() const { return m_data; }
    size_t size() const { return m_size; }

private:
    const uint8_t* m_data = nullptr;
    size_t m_size = 0;
    bool m_mapped = false;
    std::vector<uint8_t> m_fallback;
};

}  // namespace detail

// Memory-mapped index. Term lookups touch only the directory and that
// term's byte range; the object is immutable and shareable.
class index_reader {
public:
    explicit index_reader(const std::string& path) : m_file(path) {
        if (m_file.size() < index_header_bytes) {
            throw incompatible_index_error(path + ": too small to be an index");
        }
        const uint8_t* p = m_file.data();
        if (std::memcmp(p, index_magic, 4) != 0) {
            throw incompatible_index_error(path + ": bad magic");
        }
        if (detail::load_u32(p + 4) != index_version) {
            throw incompatible_index_error(path + ": unsupported version");
        }
        uint8_t tag = p[8];
        if (tag > static_cast<uint8_t>(strategy::optimal)) {
            throw incompatible_index_error(path + ": unknown strategy tag");
        }
        m_strategy = static_cast<strategy>(tag);
        m_header_bits = detail::load_u32(p + 12);
        m_num_docs = detail::load_u64(p + 16);
        m_num_terms = detail::load_u64(p + 24);

        uint64_t tables_bytes = 16 * m_num_terms;
        if (m_file.size() < index_header_bytes + tables_bytes) {
            throw incompatible_index_error(path + ": truncated offset tables");
        }
        m_docs_offsets = p + index_header_bytes;
        m_freqs_offsets = m_docs_offsets + 8 * m_num_terms;

        uint64_t prev = 0;
        for (uint64_t t = 0; t != 2 * m_num_terms; ++t) {
            uint64_t off = detail::load_u64(m_docs_offsets + 8 * t);
            if (off < prev || off > m_file.size() || off % 8 != 0) {
                throw incompatible_index_error(path + ": offset table not monotone");
            }
            prev = off;
        }
    }

    strategy built_with() const { return m_strategy; }
    uint64_t header_bits() const { return m_header_bits; }
    uint64_t num_docs() const { return m_num_docs; }
    uint64_t num_terms() const { return m_num_terms; }

    sequence_view docs_view(uint64_t term) const {
        return sequence_view(blob_range(term, m_docs_offsets));
    }

    sequence_view freqs_view(uint64_t term) const {
        return sequence_view(blob_range(term, m_freqs_offsets));
    }

    // Frequencies of one term, recovered by differencing the stored
    // prefix sums.
    std::vector<uint32_t> freqs_values(uint64_t term) const {
        auto summed = freqs_view(term).decode_all();
        uint32_t prev = 0;
        for (auto& v : summed) {
            uint32_t cur = v;
            v = cur - prev;
            prev = cur;
        }
        return summed;
    }

    uint64_t stored_docs_bits() const { return stream_bits(m_docs_offsets); }
    uint64_t stored_freqs_bits() const { return stream_bits(m_freqs_offsets); }

private:
    std::span<const uint8_t> blob_range(uint64_t term, const uint8_t* offsets) const {
        if (term >= m_num_terms) {
            throw invalid_argument_error("term id out of range: " + std::to_string(term));
        }
        uint64_t begin = detail::load_u64(offsets + 8 * term);
        // a blob knows its own extent; hand it the rest of the file
        return {m_file.data() + begin, m_file.size() - begin};
    }

    uint64_t stream_bits(const uint8_t* offsets) const {
        uint64_t bits = 0;
        for (uint64_t t = 0; t != m_num_terms; ++t) {
            sequence_view view(blob_range(t, offsets));
            bits += view.stored_bits();
        }
        return bits;
    }

    detail::mapped_file m_file;
    strategy m_strategy = strategy::optimal;
    uint64_t m_header_bits = default_header_bits;
    uint64_t m_num_docs = 0;
    uint64_t m_num_terms = 0;
    const uint8_t* m_docs_offsets = nullptr;
    const uint8_t* m_freqs_offsets = nullptr;
};

}  // namespace pvb
