#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"

namespace pvb {

// Binary collection format: a file is a concatenation of lists, each a
// u32 little-endian count followed by that many u32 little-endian
// values. The .docs file opens with a singleton list holding the number
// of documents; the .freqs file has no such header list.

struct term_lists {
    std::vector<uint32_t> postings;
    std::vector<uint32_t> freqs;
};

struct collection {
    uint64_t num_docs = 0;
    std::vector<term_lists> lists;
};

namespace detail {

struct file_closer {
    void operator()(std::FILE* f) const {
        if (f) {
            std::fclose(f);
        }
    }
};
using unique_file = std::unique_ptr<std::FILE, file_closer>;

inline unique_file open_file(const std::string& path, const char* mode) {
    unique_file f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw io_error("cannot open " + path);
    }
    return f;
}

}  // namespace detail

// Streams (postings, freqs) list pairs without loading either file.
class collection_reader {
public:
    collection_reader(const std::string& docs_path, const std::string& freqs_path)
        : m_docs(detail::open_file(docs_path, "rb")),
          m_freqs(detail::open_file(freqs_path, "rb")),
          m_docs_path(docs_path),
          m_freqs_path(freqs_path) {
        std::vector<uint32_t> header;
        if (!read_list(m_docs.get(), m_docs_offset, m_docs_path, header)) {
            throw malformed_input_error(docs_path + ": missing document-count header list");
        }
        if (header.size() != 1) {
            throw malformed_input_error(docs_path + ": header list must be a singleton");
        }
        m_num_docs = header[0];
    }

    uint64_t num_docs() const { return m_num_docs; }
    uint64_t lists_read() const { return m_term; }

    // False at a clean end of both files.
    bool next(term_lists& out) {
        bool have_docs = read_list(m_docs.get(), m_docs_offset, m_docs_path, out.postings);
        bool have_freqs = read_list(m_freqs.get(), m_freqs_offset, m_freqs_path, out.freqs);
        if (have_docs != have_freqs) {
            throw malformed_input_error("collection: docs and freqs hold a different number of lists");
        }
        if (!have_docs) {
            return false;
        }
        if (out.postings.size() != out.freqs.size()) {
            throw malformed_input_error("collection: length mismatch in term " +
                                        std::to_string(m_term));
        }
        if (out.postings.empty()) {
            throw malformed_input_error("collection: empty list for term " +
                                        std::to_string(m_term));
        }
        int64_t prev = -1;
        for (size_t k = 0; k != out.postings.size(); ++k) {
            if (static_cast<int64_t>(out.postings[k]) <= prev) {
                throw invalid_sequence_error("collection: postings not strictly increasing in term " +
                                             std::to_string(m_term));
            }
            prev = out.postings[k];
            if (out.postings[k] >= m_num_docs) {
                throw invalid_sequence_error("collection: posting beyond document count in term " +
                                             std::to_string(m_term));
            }
            if (out.freqs[k] == 0) {
                throw invalid_sequence_error("collection: zero frequency in term " +
                                             std::to_string(m_term));
            }
        }
        ++m_term;
        return true;
    }

private:
    static bool read_list(std::FILE* f, uint64_t& offset, const std::string& path,
                          std::vector<uint32_t>& out) {
        uint8_t header[4];
        size_t got = std::fread(header, 1, 4, f);
        if (got == 0 && std::feof(f)) {
            return false;
        }
        if (got != 4) {
            throw malformed_input_error(path + ": truncated list header at byte " +
                                        std::to_string(offset));
        }
        uint32_t count = detail::load_u32(header);
        out.resize(count);
        if (count != 0 &&
            std::fread(out.data(), sizeof(uint32_t), count, f) != count) {
            throw malformed_input_error(path + ": truncated list body at byte " +
                                        std::to_string(offset + 4));
        }
        // values are stored little-endian; this loader targets LE hosts,
        // so the raw read is already in native order
        offset += 4 + 4 * static_cast<uint64_t>(count);
        return true;
    }

    detail::unique_file m_docs;
    detail::unique_file m_freqs;
    std::string m_docs_path;
    std::string m_freqs_path;
    uint64_t m_docs_offset = 0;
    uint64_t m_freqs_offset = 0;
    uint64_t m_num_docs = 0;
    uint64_t m_term = 0;
};

inline void write_collection(const collection& coll, const std::string& docs_path,
                             const std::string& freqs_path) {
    auto docs = detail::open_file(docs_path, "wb");
    auto freqs = detail::open_file(freqs_path, "wb");
    auto write_list = [](std::FILE* f, const std::vector<uint32_t>& values,
                         const std::string& path) {
        uint8_t header[4];
        detail::store_u32(header, static_cast<uint32_t>(values.size()));
        if (std::fwrite(header, 1, 4, f) != 4 ||
            std::fwrite(values.data(), sizeof(uint32_t), values.size(), f) != values.size()) {
            throw io_error("write failed: " + path);
        }
    };
    write_list(docs.get(), {static_cast<uint32_t>(coll.num_docs)}, docs_path);
    for (const auto& term : coll.lists) {
        write_list(docs.get(), term.postings, docs_path);
        write_list(freqs.get(), term.freqs, freqs_path);
    }
}

inline collection read_collection(const std::string& docs_path,
                                  const std::string& freqs_path) {
    collection_reader reader(docs_path, freqs_path);
    collection coll;
    coll.num_docs = reader.num_docs();
    term_lists term;
    while (reader.next(term)) {
        coll.lists.push_back(std::move(term));
    }
    return coll;
}

}  // namespace pvb
