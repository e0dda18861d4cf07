#include "shrg/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "shrg/catalog.hpp"
#include "shrg/error.hpp"
#include "shrg/lnh.hpp"
#include "shrg/parallel.hpp"
#include "shrg/review.hpp"
#include "shrg/smatch.hpp"

namespace shrg::cli {

namespace fs = std::filesystem;

namespace {

struct Config {
    std::string corpus, rules, derivation, cand, ref, out, ids;
    std::string mode = "delex";
    int restarts = 16;
    std::uint64_t seed = 0;
    double min_expected = 4;
    unsigned jobs = default_jobs();
    bool lenient = false;
    bool no_top = false;
    bool verbose = false;
};

class UsageError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

struct Ctx {
    Config cfg;
    std::ostream &out;
    std::ostream &err;

    void log(const std::string &msg) const {
        if (cfg.verbose)
            err << msg << '\n';
    }
    void warn(const std::string &msg) const { err << "warning: " << msg << '\n'; }

    const std::string &need(const std::string &value, const char *flag) const {
        if (value.empty())
            throw UsageError(std::string("missing required flag ") + flag);
        return value;
    }

    // Without --out the single named output goes to stdout; with --out every
    // output is written under the directory.
    void emit(const std::map<std::string, std::string> &files, const std::string &primary) const {
        if (cfg.out.empty()) {
            out << files.at(primary);
            return;
        }
        std::error_code ec;
        fs::create_directories(cfg.out, ec);
        if (ec)
            throw IoError("cannot create " + cfg.out + ": " + ec.message());
        for (const auto &[name, text] : files)
            write_text(fs::path(cfg.out) / name, text);
    }

    SignatureMode mode() const { return parse_signature_mode(cfg.mode); }

    std::vector<SentenceRecord> records() const {
        auto c = load_corpus(need(cfg.corpus, "--corpus"), cfg.lenient);
        for (const auto &s : c.skipped)
            warn(cfg.corpus + ": skipped " + s);
        if (!cfg.ids.empty())
            c.records = lnh::filter_ids(c.records, lnh::read_id_list(cfg.ids));
        log(fmt::format("{} records", c.records.size()));
        return std::move(c.records);
    }

    // --rules when given, otherwise a grammar induced from the corpus itself.
    std::pair<std::vector<SentenceRecord>, RuleInventory> grammar() const {
        auto recs = records();
        if (!cfg.rules.empty())
            return {std::move(recs), inventory_from_json(read_json(cfg.rules))};
        auto g = lnh::induce_grammar(recs, mode(), {}, cfg.jobs);
        for (const auto &f : g.failures)
            warn("extraction failed for " + f);
        log(fmt::format("induced {} rules", g.inventory.size()));
        recs = lnh::with_derivations(std::move(recs), g);
        return {std::move(recs), std::move(g.inventory)};
    }
};

std::string json_text(const Json &j) { return dump(j) + "\n"; }

std::string f6(double x) { return fmt::format("{:.6f}", x); }

void cmd_compose(const Ctx &c) {
    auto inv = inventory_from_json(read_json(c.need(c.cfg.rules, "--rules")));
    auto d = derivation_from_json(read_json(c.need(c.cfg.derivation, "--derivation")));
    auto comp = compose(d, inv);
    for (const auto &w : validate(comp.graph))
        c.warn(w);
    c.emit({{"graph.json", json_text(to_json(comp.graph))}, {"tree.txt", serialize_tree(comp.tree) + "\n"}}, "graph.json");
}

void cmd_extract(const Ctx &c) {
    auto recs = c.records();
    auto g = lnh::induce_grammar(recs, c.mode(), {}, c.cfg.jobs);
    for (const auto &f : g.failures)
        c.warn("extraction failed for " + f);
    auto with = lnh::with_derivations(std::move(recs), g);
    c.emit({{"rules.json", json_text(to_json(g.inventory))}, {"corpus.jsonl", serialize_corpus(with)}}, "rules.json");
}

void cmd_revise(const Ctx &c) {
    auto catalog = load_catalog(c.need(c.cfg.rules, "--rules"));
    Json results = Json::array();
    std::size_t failed = 0;
    for (const auto &e : catalog) {
        auto r = run_revision(e);
        Json j = Json::object();
        j["phenomenon"] = e.phenomenon;
        j["table"] = e.table;
        j["sentence"] = e.sentence;
        j["original"] = to_json(r.original.graph);
        j["modified"] = to_json(r.modified.graph);
        j["modified_tree"] = serialize_tree(r.modified.tree);
        j["ok"] = r.failures.empty();
        j["failures"] = r.failures;
        failed += !r.failures.empty();
        for (const auto &f : r.failures)
            c.err << "revise: " << f << '\n';
        results.push_back(std::move(j));
    }
    c.emit({{"revisions.json", json_text(results)}}, "revisions.json");
    if (failed)
        throw ValidationError(fmt::format("{} of {} revisions did not reproduce their modified analysis", failed,
                                          catalog.size()));
}

bool is_corpus_path(const std::string &p) { return fs::path(p).extension() == ".jsonl"; }

void cmd_smatch(const Ctx &c) {
    const auto &cand = c.need(c.cfg.cand, "--cand");
    const auto &ref = c.need(c.cfg.ref, "--ref");
    SmatchOptions opts{c.cfg.restarts, c.cfg.seed, !c.cfg.no_top};
    std::string tsv = "id\tmatched\tcand\tref\tprecision\trecall\tf1\n";
    auto row = [](const std::string &id, const SmatchResult &r) {
        return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", id, r.matched, r.cand_triples, r.ref_triples,
                           f6(r.precision), f6(r.recall), f6(r.f1));
    };
    if (is_corpus_path(cand) != is_corpus_path(ref))
        throw UsageError("--cand and --ref must both be graphs (.json) or both corpora (.jsonl)");
    if (!is_corpus_path(cand)) {
        auto r = score(graph_from_json(read_json(cand)), graph_from_json(read_json(ref)), opts);
        tsv += row(fs::path(cand).stem().string(), r);
        c.emit({{"smatch.tsv", tsv}}, "smatch.tsv");
        return;
    }
    auto cr = load_corpus(cand, c.cfg.lenient).records;
    auto rr = load_corpus(ref, c.cfg.lenient).records;
    if (!c.cfg.ids.empty())
        cr = lnh::filter_ids(cr, lnh::read_id_list(c.cfg.ids));
    std::map<std::string, const SentenceRecord *> by_id;
    for (const auto &r : rr)
        by_id[r.id] = &r;
    std::vector<std::pair<const SentenceRecord *, const SentenceRecord *>> pairs;
    for (const auto &r : cr) {
        auto it = by_id.find(r.id);
        if (it == by_id.end()) {
            c.warn("no reference record for " + r.id);
            continue;
        }
        if (!r.graph || !it->second->graph) {
            c.warn("record " + r.id + " lacks a graph");
            continue;
        }
        pairs.emplace_back(&r, it->second);
    }
    auto scores = parallel_map(pairs.size(), c.cfg.jobs, [&](std::size_t i) {
        auto o = opts;
        o.seed = record_seed(c.cfg.seed, pairs[i].first->id);
        return score(*pairs[i].first->graph, *pairs[i].second->graph, o);
    });
    for (std::size_t i = 0; i < pairs.size(); ++i)
        tsv += row(pairs[i].first->id, scores[i]);
    c.emit({{"smatch.tsv", tsv}}, "smatch.tsv");
}

void cmd_iaa(const Ctx &c) {
    auto rep = iaa_report(c.records());
    c.emit({{"iaa.txt", render_text(rep)}, {"iaa.json", json_text(to_json(rep))}}, "iaa.txt");
}

void cmd_report(const Ctx &c) {
    auto recs = c.records();
    auto iaa = iaa_report(recs, std::nullopt, true);
    auto corp = corpus_report(recs);
    Json j = Json::object();
    j["iaa"] = to_json(iaa)["iaa"];
    j["corpus"] = to_json(corp);
    c.emit({{"report.txt", render_text(iaa) + "\n" + render_text(corp)}, {"report.json", json_text(j)}}, "report.txt");
}

void cmd_freq(const Ctx &c) {
    auto [recs, inv] = c.grammar();
    auto p = lnh::build_frequency_profile(recs, inv, c.mode());
    for (const auto &m : p.missing)
        c.warn("no derivation for " + m);
    c.emit({{"frequency_profile.tsv", lnh::profile_tsv(p)}}, "frequency_profile.tsv");
}

void cmd_chi2(const Ctx &c) {
    auto [recs, inv] = c.grammar();
    auto p = lnh::build_frequency_profile(recs, inv, c.mode());
    for (const auto &m : p.missing)
        c.warn("no derivation for " + m);
    auto r = lnh::syntactic_complexity(p, c.cfg.min_expected);
    c.emit({{"chi2.json", json_text(lnh::to_json(r))}}, "chi2.json");
}

void cmd_transparency(const Ctx &c) {
    auto [recs, inv] = c.grammar();
    lnh::TransparencyOptions o;
    o.restarts = c.cfg.restarts;
    o.seed = c.cfg.seed;
    o.include_top = !c.cfg.no_top;
    o.mode = c.mode();
    o.jobs = c.cfg.jobs;
    auto res = lnh::transparency_experiment(recs, inv, o);
    for (const auto &r : res.rows)
        if (!r.f1)
            c.warn("no score for " + r.id + ": " + r.error);
    Json summary = Json::object();
    summary["describe"] = lnh::describe_json(res);
    summary["tests"] = lnh::tests_json(res);
    c.emit({{"transparency.json", json_text(summary)},
            {"scores_esfl.tsv", lnh::scores_tsv(res, Source::kEsfl)},
            {"scores_english.tsv", lnh::scores_tsv(res, Source::kEnglish)},
            {"describe.json", json_text(lnh::describe_json(res))},
            {"tests.json", json_text(lnh::tests_json(res))},
            {"histogram.tsv", lnh::histogram_tsv(res)}},
           "transparency.json");
}

void cmd_serve(const Ctx &c) {
    auto recs = c.records();
    RuleInventory inv;
    if (!c.cfg.rules.empty())
        inv = inventory_from_json(read_json(c.cfg.rules));
    else
        inv = lnh::induce_grammar(recs, c.mode(), {}, c.cfg.jobs).inventory;
    std::optional<fs::path> log;
    if (!c.cfg.out.empty()) {
        fs::create_directories(c.cfg.out);
        log = fs::path(c.cfg.out) / "events.jsonl";
    } else {
        c.warn("no --out directory; review events will not be persisted");
    }
    const char *env = std::getenv("SHRG_BIND");
    auto [host, port] = review::parse_bind(env && *env ? env : "127.0.0.1:8080");
    review::ReviewStore store(std::move(recs), std::move(inv), log);
    c.err << "serving on " << host << ":" << port << '\n';
    if (!review::serve(store, host, port))
        throw IoError(fmt::format("cannot bind {}:{}", host, port));
}

void add_flags(CLI::App *sub, Config &cfg) {
    sub->add_option("--corpus", cfg.corpus, "SemBank corpus (JSONL)");
    sub->add_option("--rules", cfg.rules, "Rule inventory JSON (revise: revision catalog JSON)");
    sub->add_option("--derivation", cfg.derivation, "Derivation JSON");
    sub->add_option("--cand", cfg.cand, "Candidate graph (.json) or corpus (.jsonl)");
    sub->add_option("--ref", cfg.ref, "Reference graph (.json) or corpus (.jsonl)");
    sub->add_option("--out", cfg.out, "Write outputs into this directory instead of stdout");
    sub->add_option("--mode", cfg.mode, "CFG signature mode")->check(CLI::IsMember({"delex", "lex"}));
    sub->add_option("--restarts", cfg.restarts, "S-match random restarts")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--min-expected", cfg.min_expected, "Minimum expected frequency for the chi-square filter");
    sub->add_option("--jobs", cfg.jobs, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);
    sub->add_option("--ids", cfg.ids, "Only records whose id is listed in this file");
    sub->add_flag("--lenient", cfg.lenient, "Skip malformed corpus lines with a warning");
    sub->add_flag("--no-top", cfg.no_top, "Leave the top triple out of S-match");
    sub->add_flag("-v,--verbose", cfg.verbose, "Progress messages on stderr");
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"SHRG semantic bank toolkit", "shrg"};
    app.require_subcommand(1);
    Config cfg;
    using Handler = std::function<void(const Ctx &)>;
    const std::vector<std::tuple<const char *, const char *, Handler>> commands = {
        {"compose", "Compose a derivation into a graph", cmd_compose},
        {"extract", "Extract a rule inventory and derivations from a corpus", cmd_extract},
        {"revise", "Apply a revision catalog and check each modified analysis", cmd_revise},
        {"smatch", "Score graphs or corpora with S-match", cmd_smatch},
        {"iaa", "Inter-annotator agreement", cmd_iaa},
        {"report", "Agreement, acceptance strata and provenance counts", cmd_report},
        {"freq", "CFG signature frequencies by source", cmd_freq},
        {"chi2", "Chi-square test on non-lexical signature counts", cmd_chi2},
        {"transparency", "Rule-substitution S-match experiment", cmd_transparency},
        {"serve", "Run the review service (bind address from SHRG_BIND)", cmd_serve},
    };
    std::map<CLI::App *, Handler> handlers;
    for (const auto &[name, desc, fn] : commands) {
        auto *sub = app.add_subcommand(name, desc);
        add_flags(sub, cfg);
        handlers[sub] = fn;
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    Ctx ctx{cfg, out, err};
    try {
        for (auto &[sub, fn] : handlers)
            if (sub->parsed()) {
                fn(ctx);
                break;
            }
        return 0;
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace shrg::cli
