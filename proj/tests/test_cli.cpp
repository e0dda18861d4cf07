#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "shrg/cli.hpp"
#include "shrg/graph.hpp"

namespace fs = std::filesystem;
using namespace shrg;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run shrg_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fx(const std::string &name) { return fixtures::path(name); }

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string> &more) {
    a.insert(a.end(), more.begin(), more.end());
    return a;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string &name) : path(fs::temp_directory_path() / name) { fs::remove_all(path); }
    ~TempDir() { fs::remove_all(path); }
};

std::map<std::string, std::string> slurp(const fs::path &dir) {
    std::map<std::string, std::string> m;
    for (const auto &e : fs::directory_iterator(dir))
        m[e.path().filename().string()] = read_text(e.path());
    return m;
}

// Batch invocations that read the mini corpus.
const std::vector<std::vector<std::string>> &batch_commands() {
    static const std::vector<std::vector<std::string>> cmds = {
        {"extract", "--corpus", fx("mini.jsonl")},
        {"iaa", "--corpus", fx("mini.jsonl")},
        {"report", "--corpus", fx("mini.jsonl")},
        {"freq", "--corpus", fx("mini.jsonl")},
        {"freq", "--corpus", fx("mini.jsonl"), "--rules", fx("mini_rules.json")},
        {"chi2", "--corpus", fx("mini.jsonl"), "--rules", fx("mini_rules.json")},
        {"transparency", "--corpus", fx("mini.jsonl"), "--rules", fx("mini_rules.json")},
        {"transparency", "--corpus", fx("mini.jsonl"), "--mode", "lex"},
        {"smatch", "--cand", fx("mini.jsonl"), "--ref", fx("mini.jsonl")},
        {"revise", "--rules", fx("revision_catalog.json")},
        {"compose", "--rules", fx("table1_rules.json"), "--derivation", fx("fig3_derivation.json")},
    };
    return cmds;
}

} // namespace

TEST_CASE("compose reproduces the worked example graph") {
    auto r = shrg_run({"compose", "--rules", fx("table1_rules.json"), "--derivation", fx("fig3_derivation.json")});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    CHECK(isomorphic(graph_from_json(parse_json(r.out)), fixtures::fig2b()));
}

TEST_CASE("smatch of a graph against itself") {
    auto r = shrg_run({"smatch", "--cand", fx("fig2b_graph.json"), "--ref", fx("fig2b_graph.json")});
    REQUIRE(r.code == 0);
    CHECK(r.out == "id\tmatched\tcand\tref\tprecision\trecall\tf1\n"
                   "fig2b_graph\t8\t8\t8\t1.000000\t1.000000\t1.000000\n");
    auto notop = shrg_run({"smatch", "--cand", fx("fig2b_graph.json"), "--ref", fx("fig2b_graph.json"), "--no-top"});
    CHECK(notop.out.find("\t7\t7\t7\t1.000000") != std::string::npos);
}

TEST_CASE("chi2 on the symmetric fixture is zero") {
    auto r = shrg_run({"chi2", "--corpus", fx("mini.jsonl"), "--rules", fx("mini_rules.json")});
    REQUIRE(r.code == 0);
    auto j = parse_json(r.out);
    CHECK(j["test"]["statistic"].get<double>() == 0.0);
    CHECK(j["test"]["df"].get<double>() == 1.0);
}

TEST_CASE("revise reproduces every catalog entry") {
    auto r = shrg_run({"revise", "--rules", fx("revision_catalog.json")});
    REQUIRE(r.code == 0);
    auto j = parse_json(r.out);
    CHECK(j.size() == 10);
    for (const auto &e : j)
        CHECK(e["ok"] == true);
}

TEST_CASE("two runs give byte-identical output") {
    for (const auto &cmd : batch_commands()) {
        CAPTURE(cmd[0]);
        auto a = shrg_run(cmd);
        auto b = shrg_run(cmd);
        REQUIRE(a.code == 0);
        CHECK(!a.out.empty());
        CHECK(a.out == b.out);
    }
}

TEST_CASE("--out files are identical across runs and job counts") {
    for (const auto &cmd : batch_commands()) {
        CAPTURE(cmd[0]);
        TempDir d1("shrg_cli_out1"), d2("shrg_cli_out2");
        auto a = shrg_run(with(cmd, {"--out", d1.path.string(), "--jobs", "1"}));
        auto b = shrg_run(with(cmd, {"--out", d2.path.string(), "--jobs", "8"}));
        REQUIRE(a.code == 0);
        REQUIRE(b.code == 0);
        CHECK(a.out.empty());
        auto fa = slurp(d1.path), fb = slurp(d2.path);
        CHECK(!fa.empty());
        CHECK(fa == fb);
    }
}

TEST_CASE("transparency writes the per-group files") {
    TempDir d("shrg_cli_tr");
    auto r = shrg_run({"transparency", "--corpus", fx("mini.jsonl"), "--rules", fx("mini_rules.json"), "--out",
                       d.path.string()});
    REQUIRE(r.code == 0);
    auto files = slurp(d.path);
    for (const char *f : {"scores_esfl.tsv", "scores_english.tsv", "describe.json", "tests.json", "histogram.tsv"})
        CHECK(files.count(f));
    CHECK(files["scores_esfl.tsv"].rfind("id\tsource\tf1\terror\n", 0) == 0);
}

TEST_CASE("help lists every flag for every subcommand") {
    const std::vector<std::string> flags = {"--corpus",   "--rules", "--derivation",   "--cand", "--ref",
                                            "--out",      "--mode",  "--restarts",     "--seed", "--min-expected",
                                            "--jobs",     "--lenient", "--no-top"};
    for (const char *sub : {"compose", "extract", "revise", "smatch", "iaa", "report", "freq", "chi2", "transparency",
                            "serve"}) {
        CAPTURE(sub);
        auto r = shrg_run({sub, "--help"});
        CHECK(r.code == 0);
        for (const auto &f : flags)
            CHECK(r.out.find(f) != std::string::npos);
    }
    auto top = shrg_run({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("transparency") != std::string::npos);
}

TEST_CASE("exit codes") {
    auto unknown_flag = shrg_run({"compose", "--bogus"});
    CHECK(unknown_flag.code == 1);
    CHECK(unknown_flag.out.empty());
    CHECK(unknown_flag.err.find("Usage") != std::string::npos);
    CHECK(shrg_run({"frobnicate"}).code == 1);
    CHECK(shrg_run({}).code == 1);
    CHECK(shrg_run({"compose", "--rules", fx("table1_rules.json")}).code == 1);
    CHECK(shrg_run({"chi2", "--corpus", "/nonexistent/corpus.jsonl"}).code == 2);
    CHECK(shrg_run({"compose", "--rules", fx("table1_rules.json"), "--derivation", fx("mini.jsonl")}).code == 1);
    CHECK(shrg_run({"freq", "--corpus", fx("mini.jsonl"), "--mode", "sideways"}).code == 1);
    CHECK(shrg_run({"smatch", "--cand", fx("fig2b_graph.json"), "--ref", fx("mini.jsonl")}).code == 1);
}

TEST_CASE("lenient loading and id filtering") {
    TempDir d("shrg_cli_lenient");
    fs::create_directories(d.path);
    auto corpus = d.path / "c.jsonl";
    write_text(corpus, read_text(fx("mini.jsonl")) + "{not json\n");
    CHECK(shrg_run({"iaa", "--corpus", corpus.string()}).code == 1);
    auto ok = shrg_run({"iaa", "--corpus", corpus.string(), "--lenient"});
    CHECK(ok.code == 0);
    CHECK(ok.err.find("line 13") != std::string::npos);

    auto ids = d.path / "ids.txt";
    write_text(ids, "# two records\nesfl-1\neng-2\n");
    auto r = shrg_run({"smatch", "--cand", fx("mini.jsonl"), "--ref", fx("mini.jsonl"), "--ids", ids.string()});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
    auto rep = shrg_run({"report", "--corpus", fx("mini.jsonl"), "--ids", ids.string(), "--out", d.path.string()});
    CHECK(rep.code == 0);
    CHECK(parse_json(read_text(d.path / "report.json"))["corpus"]["records"] == 2);
}

TEST_CASE("installed binary exit status") {
    auto status = [](const std::string &args) {
        int rc = std::system((std::string(SHRG_BIN) + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    CHECK(status("compose --rules " + fx("table1_rules.json") + " --derivation " + fx("fig3_derivation.json")) == 0);
    CHECK(status("compose --nope") == 1);
    CHECK(status("compose --rules /nonexistent.json --derivation /nonexistent.json") == 2);
}
