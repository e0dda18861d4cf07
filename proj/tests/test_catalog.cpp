#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "shrg/catalog.hpp"
#include "shrg/error.hpp"

using namespace shrg;

namespace {

const std::vector<CatalogEntry> &catalog() {
    static const auto c = load_catalog(fixtures::path("revision_catalog.json"));
    return c;
}

bool has_edge(const SemGraph &g, const std::string &src, const std::string &role, const std::string &tgt) {
    for (const auto &e : g.edges)
        if (e.role == role && g.node(e.src).label == src && g.node(e.tgt).label == tgt)
            return true;
    return false;
}

bool has_label(const SemGraph &g, const std::string &label) {
    for (const auto &n : g.nodes)
        if (n.label == label)
            return true;
    return false;
}

} // namespace

TEST_CASE("catalog covers the nine phenomena") {
    std::set<std::string> phen;
    std::set<int> tables;
    for (const auto &e : catalog()) {
        phen.insert(e.phenomenon);
        tables.insert(e.table);
    }
    CHECK(phen.size() == 9);
    CHECK(tables == std::set<int>{4, 5, 6, 7, 8, 9, 10, 11, 12});
    CHECK(catalog().size() == 10);
}

TEST_CASE("every entry reproduces its modified analysis") {
    for (const auto &e : catalog()) {
        CAPTURE(e.phenomenon);
        CAPTURE(e.sentence);
        REQUIRE(e.modified_sem);
        auto r = run_revision(e);
        for (const auto &f : r.failures)
            FAIL_CHECK(f);
        CHECK(r.failures.empty());
        // the revised yield is the same sentence
        auto toks = tree_tokens(r.modified.tree);
        std::string s;
        for (const auto &t : toks)
            s += (s.empty() ? "" : " ") + t;
        CHECK(s == e.sentence);
        CHECK(tree_tokens(r.original.tree) == toks);
    }
}

TEST_CASE("number: demonstrative reading replaced") {
    const auto &e = catalog().front();
    REQUIRE(e.phenomenon == "Number");
    auto r = run_revision(e);
    CHECK(has_edge(r.original.graph, "_puzzle_v_1", "ARG1", "generic_entity"));
    CHECK(has_edge(r.modified.graph, "udef_q", "BV", "_puzzle_n_1"));
    CHECK_FALSE(has_label(r.modified.graph, "generic_entity"));
    CHECK(r.modified.graph.nodes.size() == 2);
}

TEST_CASE("case: compound becomes poss") {
    const auto &e = catalog()[1];
    REQUIRE(e.phenomenon == "Case");
    auto r = run_revision(e);
    CHECK(has_label(r.original.graph, "compound"));
    CHECK_FALSE(has_label(r.modified.graph, "compound"));
    CHECK(has_edge(r.modified.graph, "poss", "ARG2", "_writer_n_of"));
    CHECK(has_edge(r.modified.graph, "_a_q", "BV", "_writer_n_of"));
}

TEST_CASE("the expectation checks are not vacuous") {
    // swapping in another entry's expected graph must be reported
    auto e = catalog()[0];
    e.modified_sem = catalog()[1].modified_sem;
    e.present.push_back({"poss", "ARG1", "_life_n_of"});
    e.absent.push_back("udef_q");
    e.counts["_puzzle_n_1"] = 2;
    auto r = run_revision(e);
    CHECK(r.failures.size() == 4);
}

TEST_CASE("structural revision without a rewrite is rejected") {
    auto e = catalog()[1];
    e.rewrite.reset();
    CHECK_THROWS_WITH_AS(run_revision(e), doctest::Contains("structural mismatch"), CompositionError);
}

TEST_CASE("malformed catalog entries") {
    auto j = read_json(fixtures::path("revision_catalog.json"));
    auto bad = j;
    bad[2]["modified"].erase(0);
    CHECK_THROWS_WITH_AS(catalog_from_json(bad), doctest::Contains("catalog entry 2"), ValidationError);
    bad = j;
    bad[0]["original"][0] = "nope";
    CHECK_THROWS_AS(catalog_from_json(bad), Error);
    CHECK_THROWS_AS(catalog_from_json(Json::object()), ValidationError);
    CHECK_THROWS_AS(load_catalog("/nonexistent/catalog.json"), IoError);
}
