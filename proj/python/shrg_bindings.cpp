// Python bindings. Structured values cross the boundary as JSON text; the
// package's __init__ converts to and from Python objects.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "shrg/catalog.hpp"
#include "shrg/cli.hpp"
#include "shrg/engine.hpp"
#include "shrg/error.hpp"
#include "shrg/lnh.hpp"
#include "shrg/sembank.hpp"
#include "shrg/smatch.hpp"
#include "shrg/stats.hpp"

namespace py = pybind11;
using namespace shrg;

namespace {

// full precision; the report writers round
std::string result_json(const stats::TestResult &r) {
    Json j = Json::object();
    j["test"] = stats::to_string(r.kind);
    j["statistic"] = r.statistic;
    j["df"] = r.df ? Json(*r.df) : Json();
    j["p_value"] = r.p_value;
    return dump(j);
}

std::string compose_json(const std::string &rules, const std::string &derivation) {
    auto comp = compose(derivation_from_json(parse_json(derivation)), inventory_from_json(parse_json(rules)));
    return dump(Json{{"tree", serialize_tree(comp.tree)}, {"graph", to_json(comp.graph)}});
}

std::string extract_json(const std::string &tree, const std::string &graph, const std::string &mode) {
    auto ex = extract(parse_tree(tree), graph_from_json(parse_json(graph)));
    RuleInventory inv(ex.rules, parse_signature_mode(mode));
    return dump(Json{{"rules", to_json(inv)}, {"derivation", to_json(ex.derivation)}});
}

std::string smatch_json(const std::string &cand, const std::string &ref, int restarts, std::uint64_t seed,
                        bool include_top) {
    auto r = score(graph_from_json(parse_json(cand)), graph_from_json(parse_json(ref)),
                   SmatchOptions{restarts, seed, include_top});
    Json j = Json::object();
    j["matched"] = r.matched;
    j["cand"] = r.cand_triples;
    j["ref"] = r.ref_triples;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    return dump(j);
}

bool isomorphic_json(const std::string &a, const std::string &b) {
    return isomorphic(graph_from_json(parse_json(a)), graph_from_json(parse_json(b)));
}

std::string revise_json(const std::string &catalog) {
    Json out = Json::array();
    for (const auto &e : catalog_from_json(parse_json(catalog))) {
        auto r = run_revision(e);
        Json j = Json::object();
        j["phenomenon"] = e.phenomenon;
        j["sentence"] = e.sentence;
        j["original"] = to_json(r.original.graph);
        j["modified"] = to_json(r.modified.graph);
        j["failures"] = r.failures;
        out.push_back(std::move(j));
    }
    return dump(out);
}

std::string chi_square_json(const std::vector<std::vector<std::int64_t>> &counts) {
    stats::ContingencyTable t;
    t.rows = {"esfl", "english"};
    if (!counts.empty())
        for (std::size_t k = 0; k < counts[0].size(); ++k)
            t.cols.push_back("c" + std::to_string(k));
    t.counts = counts;
    return result_json(stats::chi_square_independence(t));
}

std::string t_test_json(const std::vector<double> &a, const std::vector<double> &b, const std::string &variant) {
    if (variant == "z")
        return result_json(stats::z_test(a, b));
    stats::TVariant v;
    if (variant == "welch")
        v = stats::TVariant::kWelch;
    else if (variant == "student")
        v = stats::TVariant::kStudent;
    else if (variant == "paired")
        v = stats::TVariant::kPaired;
    else
        throw ValidationError("unknown test variant '" + variant + "'");
    return result_json(stats::t_test(a, b, v));
}

std::string report_json(const std::string &corpus_text) {
    auto recs = parse_corpus(corpus_text).records;
    Json j = Json::object();
    j["corpus"] = to_json(corpus_report(recs));
    j["iaa"] = to_json(iaa_report(recs, std::nullopt, true))["iaa"];
    return dump(j);
}

std::string transparency_json(const std::string &corpus_text, const std::string &rules, int restarts,
                              std::uint64_t seed, unsigned jobs) {
    auto recs = parse_corpus(corpus_text).records;
    lnh::TransparencyOptions o;
    o.restarts = restarts;
    o.seed = seed;
    o.jobs = jobs;
    RuleInventory inv;
    if (!rules.empty()) {
        inv = inventory_from_json(parse_json(rules));
    } else {
        auto g = lnh::induce_grammar(recs, o.mode, {}, jobs);
        recs = lnh::with_derivations(std::move(recs), g);
        inv = std::move(g.inventory);
    }
    py::gil_scoped_release release;
    auto res = lnh::transparency_experiment(recs, inv, o);
    return dump(Json{{"describe", lnh::describe_json(res)}, {"tests", lnh::tests_json(res)}});
}

py::tuple run_cli(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release release;
        code = cli::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

} // namespace

PYBIND11_MODULE(_shrg, m) {
    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<CompositionError>(m, "CompositionError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def("compose", &compose_json, py::arg("rules"), py::arg("derivation"));
    m.def("extract", &extract_json, py::arg("tree"), py::arg("graph"), py::arg("mode") = "delex");
    m.def("smatch", &smatch_json, py::arg("cand"), py::arg("ref"), py::arg("restarts") = 16, py::arg("seed") = 0,
          py::arg("include_top") = true);
    m.def("isomorphic", &isomorphic_json, py::arg("a"), py::arg("b"));
    m.def("revise", &revise_json, py::arg("catalog"));
    m.def("chi_square", &chi_square_json, py::arg("counts"));
    m.def("test", &t_test_json, py::arg("a"), py::arg("b"), py::arg("variant"));
    m.def("report", &report_json, py::arg("corpus"));
    m.def("transparency", &transparency_json, py::arg("corpus"), py::arg("rules") = "", py::arg("restarts") = 16,
          py::arg("seed") = 0, py::arg("jobs") = 1);
    m.def("run_cli", &run_cli, py::arg("args"));
}
