#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

// end-to-end runs of the installed tool
namespace {

namespace fs = std::filesystem;

struct temp_dir {
    fs::path path;
    temp_dir() {
        path = fs::temp_directory_path() / ("pvb_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~temp_dir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
    std::string cmd = std::string(PVB_CLI_PATH) + " " + args + " > " + stdout_path + " 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp_text(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("cli gen build verify query") {
    temp_dir dir;
    REQUIRE(run("gen --output " + dir.file("c") +
                " --docs 50000 --terms 100 --avg-len 500 --seed 7") == 0);

    REQUIRE(run("build " + dir.file("c") + " --strategy optimal --F 64 --output " +
                dir.file("c.idx"), dir.file("build.out")) == 0);
    auto build_out = slurp_text(dir.file("build.out"));
    CHECK(build_out.find("strategy optimal") != std::string::npos);
    CHECK(build_out.find("F=64") != std::string::npos);

    REQUIRE(run("verify " + dir.file("c.idx") + " " + dir.file("c"),
                dir.file("verify.out")) == 0);
    CHECK(slurp_text(dir.file("verify.out")).find("OK, 100 lists") != std::string::npos);

    std::ofstream queries(dir.file("q.txt"));
    queries << "1 2\n5 9 11\n3\n";
    queries.close();
    REQUIRE(run("query " + dir.file("c.idx") + " --queries " + dir.file("q.txt") +
                " --reps 2 --output " + dir.file("rec.tsv"), dir.file("query.out")) == 0);
    auto query_out = slurp_text(dir.file("query.out"));
    CHECK(query_out.find("mean ms/query") != std::string::npos);
    CHECK(query_out.find("total matches") != std::string::npos);
    auto records = slurp_text(dir.file("rec.tsv"));
    CHECK(std::count(records.begin(), records.end(), '\n') == 3);

    REQUIRE(run("density " + dir.file("c"), dir.file("density.out")) == 0);
    CHECK(slurp_text(dir.file("density.out")).find("dense%") != std::string::npos);

    REQUIRE(run("jumps " + dir.file("c.idx") + " --queries " + dir.file("q.txt"),
                dir.file("jumps.out")) == 0);
    CHECK(slurp_text(dir.file("jumps.out")).find("total jumps:") != std::string::npos);
}

TEST_CASE("cli verify every strategy") {
    temp_dir dir;
    REQUIRE(run("gen --output " + dir.file("c") +
                " --docs 20000 --terms 50 --avg-len 300 --seed 5") == 0);
    for (std::string strategy : {"unpartitioned", "uniform", "epsdp", "optimal"}) {
        auto idx = dir.file("c." + strategy + ".idx");
        REQUIRE(run("build " + dir.file("c") + " --strategy " + strategy + " --output " + idx) == 0);
        REQUIRE(run("verify " + idx + " " + dir.file("c")) == 0);
    }
}

TEST_CASE("cli gen is deterministic") {
    temp_dir dir;
    REQUIRE(run("gen --output " + dir.file("a") + " --docs 30000 --terms 60 --seed 42") == 0);
    REQUIRE(run("gen --output " + dir.file("b") + " --docs 30000 --terms 60 --seed 42") == 0);
    CHECK(slurp(dir.file("a.docs")) == slurp(dir.file("b.docs")));
    CHECK(slurp(dir.file("a.freqs")) == slurp(dir.file("b.freqs")));

    REQUIRE(run("gen --output " + dir.file("d") + " --docs 30000 --terms 60 --seed 43") == 0);
    CHECK(slurp(dir.file("a.docs")) != slurp(dir.file("d.docs")));
}

TEST_CASE("cli exit codes") {
    temp_dir dir;
    CHECK(run("build " + dir.file("missing") + " --output " + dir.file("x.idx")) == 2);
    CHECK(run("query " + dir.file("missing.idx") + " --queries " + dir.file("q.txt")) == 2);
    CHECK(run("build") == 1);                 // missing required argument
    CHECK(run("frobnicate") == 1);            // unknown subcommand
    CHECK(run("") == 1);                      // subcommand required

    REQUIRE(run("gen --output " + dir.file("c") + " --docs 5000 --terms 20 --seed 3") == 0);
    CHECK(run("build " + dir.file("c") + " --strategy bogus --output " + dir.file("c.idx")) == 1);

    // malformed query file is a validation failure
    REQUIRE(run("build " + dir.file("c") + " --output " + dir.file("c.idx")) == 0);
    std::ofstream bad(dir.file("bad.txt"));
    bad << "1 frog\n";
    bad.close();
    CHECK(run("query " + dir.file("c.idx") + " --queries " + dir.file("bad.txt")) == 1);
}
