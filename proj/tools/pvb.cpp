#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pvb/analysis.hpp"
#include "pvb/collection.hpp"
#include "pvb/index.hpp"
#include "pvb/query.hpp"
#include "pvb/synthetic.hpp"

namespace {

int cmd_gen(const pvb::synthetic_params& params, const std::string& output) {
    auto coll = pvb::generate_collection(params);
    pvb::write_collection(coll, output + ".docs", output + ".freqs");
    uint64_t postings = 0;
    for (const auto& term : coll.lists) {
        postings += term.postings.size();
    }
    std::printf("generated %s.docs / %s.freqs: %" PRIu64 " docs, %zu terms, %" PRIu64
                " postings (seed %" PRIu64 ")\n",
                output.c_str(), output.c_str(), coll.num_docs, coll.lists.size(), postings,
                params.seed);
    return 0;
}

int cmd_build(const std::string& base, const pvb::build_params& params,
              const std::string& output) {
    pvb::build_index(base + ".docs", base + ".freqs", params, output);
    pvb::index_reader index(output);
    uint64_t postings = 0;
    for (uint64_t t = 0; t != index.num_terms(); ++t) {
        postings += index.docs_view(t).size();
    }
    double docs_bpi = postings == 0 ? 0.0
                                    : static_cast<double>(index.stored_docs_bits()) /
                                          static_cast<double>(postings);
    double freqs_bpi = postings == 0 ? 0.0
                                     : static_cast<double>(index.stored_freqs_bits()) /
                                           static_cast<double>(postings);
    std::printf("built %s: strategy %s, F=%" PRIu64 ", %" PRIu64 " terms, %" PRIu64
                " postings\n",
                output.c_str(), pvb::strategy_name(index.built_with()), index.header_bits(),
                index.num_terms(), postings);
    std::printf("stored docs %.3f bpi, freqs %.3f bpi\n", docs_bpi, freqs_bpi);
    return 0;
}

int cmd_query(const std::string& index_path, const std::string& queries_path,
              unsigned repetitions, const std::string& output) {
    pvb::index_reader index(index_path);
    auto queries = pvb::parse_queries(queries_path);
    for (const auto& terms : queries) {
        for (uint32_t t : terms) {
            if (t >= index.num_terms()) {
                std::fprintf(stderr, "warning: term %u out of range, query will be empty\n", t);
            }
        }
    }
    auto report = pvb::run_benchmark(index, queries, repetitions);

    std::printf("%-10s %12s %10s\n", "query", "ms", "matches");
    for (const auto& q : report.per_query) {
        std::printf("%-10" PRIu64 " %12.4f %10" PRIu64 "\n", q.query_id, q.millis, q.matches);
    }
    std::printf("queries: %zu  mean ms/query: %.4f  total matches: %" PRIu64
                "  repetitions: %u\n",
                report.per_query.size(), report.mean_millis, report.total_matches,
                report.repetitions);

    if (!output.empty()) {
        auto f = pvb::detail::open_file(output, "w");
        for (const auto& q : report.per_query) {
            std::fprintf(f.get(), "%" PRIu64 "\t%.6f\t%" PRIu64 "\n", q.query_id, q.millis,
                         q.matches);
        }
    }
    return 0;
}

int cmd_verify(const std::string& index_path, const std::string& base) {
    pvb::index_reader index(index_path);
    pvb::collection_reader reader(base + ".docs", base + ".freqs");
    if (reader.num_docs() != index.num_docs()) {
        std::fprintf(stderr, "document count mismatch\n");
        return 1;
    }
    pvb::term_lists term;
    uint64_t t = 0;
    while (reader.next(term)) {
        if (t >= index.num_terms()) {
            std::fprintf(stderr, "index holds fewer terms than the collection\n");
            return 1;
        }
        if (index.docs_view(t).decode_all() != term.postings ||
            index.freqs_values(t) != term.freqs) {
            std::fprintf(stderr, "mismatch in term %" PRIu64 "\n", t);
            return 1;
        }
        ++t;
    }
    if (t != index.num_terms()) {
        std::fprintf(stderr, "index holds more terms than the collection\n");
        return 1;
    }
    std::printf("OK, %" PRIu64 " lists\n", t);
    return 0;
}

int cmd_density(const std::string& base, const pvb::density_params& params) {
    pvb::collection_reader reader(base + ".docs", base + ".freqs");
    auto report = pvb::density_scan(reader, params);
    const char* names[3] = {"short", "medium", "long"};
    std::printf("%-8s %10s %10s %10s\n", "class", "dense%", "sparse%", "share%");
    for (size_t cls = 0; cls != 3; ++cls) {
        std::printf("%-8s %10.2f %10.2f %10.2f\n", names[cls], report.classes[cls].dense_pct(),
                    report.classes[cls].sparse_pct(), report.share_pct(cls));
    }
    return 0;
}

int cmd_jumps(const std::string& index_path, const std::string& queries_path) {
    pvb::index_reader index(index_path);
    auto queries = pvb::parse_queries(queries_path);
    pvb::jump_histogram hist;
    for (const auto& terms : queries) {
        (void)pvb::intersect_and(index, terms, &hist);
    }
    auto pct = hist.percentages();
    std::printf("%-8s %12s %10s\n", "bucket", "jumps", "pct");
    for (size_t d = 1; d != pct.size(); ++d) {
        if (hist.buckets[d] != 0) {
            std::printf("%-8zu %12" PRIu64 " %10.2f\n", d, hist.buckets[d], pct[d]);
        }
    }
    std::printf("total jumps: %" PRIu64 "\n", hist.total);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partitioned vbyte inverted index tool"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic clustered collection");
    pvb::synthetic_params gen_params;
    std::string gen_output = "synthetic";
    gen->add_option("--output", gen_output, "output basename (.docs/.freqs appended)");
    gen->add_option("--docs", gen_params.num_docs, "number of documents");
    gen->add_option("--terms", gen_params.num_terms, "number of terms");
    gen->add_option("--seed", gen_params.seed, "generator seed");
    gen->add_option("--avg-len", gen_params.mean_list_len, "mean list length");
    gen->add_option("--density", gen_params.dense_fraction,
                    "fraction of postings inside dense runs");
    gen->add_option("--run-len", gen_params.mean_run_len, "mean dense run length");
    gen->add_option("--gap", gen_params.mean_sparse_gap, "mean sparse gap");

    // build
    auto* build = app.add_subcommand("build", "build an index from a binary collection");
    std::string build_base;
    std::string build_output = "index.pvb";
    pvb::build_params build_params;
    std::string strategy_name = "optimal";
    build->add_option("collection", build_base, "collection basename (.docs/.freqs)")
        ->required();
    build->add_option("--strategy", strategy_name, "unpartitioned|uniform|epsdp|optimal");
    build->add_option("--F", build_params.header_bits, "per-partition header cost in bits");
    build->add_option("--block", build_params.block, "uniform block size");
    build->add_option("--eps1", build_params.eps1, "epsdp window retain parameter");
    build->add_option("--eps2", build_params.eps2, "epsdp cost class parameter");
    build->add_option("--threads", build_params.threads, "encoder threads (0 = hardware)");
    build->add_option("--output", build_output, "index output path");

    // query
    auto* query = app.add_subcommand("query", "run AND queries and report timings");
    std::string query_index;
    std::string query_file;
    std::string query_output;
    unsigned repetitions = 3;
    query->add_option("index", query_index, "index path")->required();
    query->add_option("--queries", query_file, "query file, one query per line")->required();
    query->add_option("--reps", repetitions, "timing repetitions");
    query->add_option("--output", query_output, "machine-readable per-query records");

    // verify
    auto* verify = app.add_subcommand("verify", "decode every list and compare to the collection");
    std::string verify_index;
    std::string verify_base;
    verify->add_option("index", verify_index, "index path")->required();
    verify->add_option("collection", verify_base, "collection basename")->required();

    // density
    auto* density = app.add_subcommand("density", "dense/sparse block distribution by list size");
    std::string density_base;
    pvb::density_params density_params;
    density->add_option("collection", density_base, "collection basename")->required();
    density->add_option("--block", density_params.block, "block size in postings");
    density->add_option("--t1", density_params.short_below, "short/medium list size threshold");
    density->add_option("--t2", density_params.medium_below, "medium/long list size threshold");

    // jumps
    auto* jumps = app.add_subcommand("jumps", "NextGEQ jump-size distribution under a querylog");
    std::string jumps_index;
    std::string jumps_queries;
    jumps->add_option("index", jumps_index, "index path")->required();
    jumps->add_option("--queries", jumps_queries, "query file")->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) {
            return cmd_gen(gen_params, gen_output);
        }
        if (build->parsed()) {
            build_params.strat = pvb::strategy_from_name(strategy_name);
            return cmd_build(build_base, build_params, build_output);
        }
        if (query->parsed()) {
            return cmd_query(query_index, query_file, repetitions, query_output);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_index, verify_base);
        }
        if (density->parsed()) {
            return cmd_density(density_base, density_params);
        }
        if (jumps->parsed()) {
            return cmd_jumps(jumps_index, jumps_queries);
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const pvb::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const pvb::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
