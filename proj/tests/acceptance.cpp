// One line per acceptance criterion. Exit status is non-zero when any
// criterion fails; skipped criteria do not count as failures.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "quadrature.hpp"
#include "shrg/catalog.hpp"
#include "shrg/cli.hpp"
#include "shrg/engine.hpp"
#include "shrg/error.hpp"
#include "shrg/lnh.hpp"
#include "shrg/parallel.hpp"
#include "shrg/smatch.hpp"
#include "shrg/stats.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace shrg;
using Clock = std::chrono::steady_clock;

namespace {

enum class Verdict { kPass, kFail, kSkipped };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome worked_example() {
    auto t0 = Clock::now();
    auto comp = compose(fixtures::fig3(), fixtures::table1());
    double secs = seconds_since(t0);
    bool iso = isomorphic(comp.graph, fixtures::fig2b());
    auto s = score(comp.graph, fixtures::fig2b());
    bool ok = iso && s.f1 == 1.0 && secs < 1.0;
    return {ok ? Verdict::kPass : Verdict::kFail,
            fmt::format("isomorphic={} f1={:.6f} time={:.3f}s", iso, s.f1, secs)};
}

Outcome extraction_round_trip() {
    auto t0 = Clock::now();
    int ok = 0, total = 0;
    auto check = [&](const SynTree &tree, const SemGraph &g) {
        ++total;
        auto ex = extract(tree, g);
        auto back = compose(ex.derivation, RuleInventory(ex.rules, SignatureMode::kDelexicalized));
        ok += isomorphic(back.graph, g) && serialize_tree(back.tree) == serialize_tree(tree);
    };
    check(fixtures::fig2a(), fixtures::fig2b());
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        oracle::SeedGrammar gram(seed);
        auto rd = gram.generate();
        auto c = compose(rd.derivation, rd.inventory);
        check(c.tree, c.graph);
    }
    double secs = seconds_since(t0);
    return {ok == total && secs < 60 ? Verdict::kPass : Verdict::kFail,
            fmt::format("{}/{} isomorphic time={:.2f}s", ok, total, secs)};
}

Outcome smatch_oracle() {
    std::mt19937_64 rng(7);
    const int pairs = 200;
    int equal = 0, above = 0, asym = 0;
    for (int i = 0; i < pairs; ++i) {
        auto a = oracle::random_graph(rng, 7);
        auto b = i % 2 ? oracle::perturb(a, rng) : oracle::random_graph(rng, 7);
        SmatchOptions opts{16, static_cast<std::uint64_t>(i), true};
        auto h = score(a, b, opts);
        auto best = oracle::brute_smatch_matched(a, b);
        std::size_t denom = h.cand_triples + h.ref_triples;
        double of1 = denom ? 2.0 * best / denom : 1.0;
        equal += h.matched == best;
        above += h.matched > best || h.f1 > of1 + 1e-15;
        auto r = score(b, a, opts);
        asym += r.f1 != h.f1;
    }
    bool ok = equal * 100 >= pairs * 99 && above == 0 && asym == 0;
    return {ok ? Verdict::kPass : Verdict::kFail,
            fmt::format("equal {}/{} above-oracle {} asymmetric {}", equal, pairs, above, asym)};
}

Outcome statistics_oracles() {
    stats::ContingencyTable t{{"esfl", "english"}, {"a", "b"}, {{10, 20}, {20, 10}}};
    auto chi = stats::chi_square_independence(t);
    bool chi_ok = std::fabs(chi.statistic - 20.0 / 3.0) < 1e-9 && chi.df && *chi.df == 1;
    double worst = 0;
    for (double df : {1.0, 5.0, 42.0})
        for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 60.0, 80.0}) {
            worst = std::max(worst, std::fabs(stats::chi2_sf(x, df) - oracle::chi2_upper(x, df)));
            worst = std::max(worst, std::fabs(stats::t_two_sided(x, df) - oracle::t_two_sided(x, df)));
        }
    std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
    auto w = stats::t_test(a, b, stats::TVariant::kWelch);
    bool welch_ok = std::fabs(w.statistic + 1.0) < 1e-12;
    bool same_ok = true;
    for (auto v : {stats::TVariant::kWelch, stats::TVariant::kStudent, stats::TVariant::kPaired}) {
        auto r = stats::t_test(a, a, v);
        same_ok &= r.statistic == 0 && r.p_value == 1;
    }
    auto z = stats::z_test(a, a);
    same_ok &= z.statistic == 0 && z.p_value == 1;
    bool ok = chi_ok && worst < 1e-8 && welch_ok && same_ok;
    return {ok ? Verdict::kPass : Verdict::kFail,
            fmt::format("chi2={:.9f} df={} worst-p-deviation={:.2e} welch={:.12f} identical-samples={}",
                        chi.statistic, chi.df.value_or(-1), worst, w.statistic, same_ok ? "0/1" : "wrong")};
}

Outcome revision_catalog() {
    auto catalog = load_catalog(fixtures::path("revision_catalog.json"));
    std::set<std::string> phen, failed;
    std::size_t ok = 0;
    for (const auto &e : catalog) {
        phen.insert(e.phenomenon);
        auto r = run_revision(e);
        if (r.failures.empty() && e.modified_sem)
            ++ok;
        else
            failed.insert(e.phenomenon);
    }
    std::string detail = fmt::format("{}/{} entries, {} phenomena", ok, catalog.size(), phen.size());
    for (const auto &f : failed)
        detail += "; failed: " + f;
    return {ok == catalog.size() && phen.size() == 9 ? Verdict::kPass : Verdict::kFail, detail};
}

Outcome substitution_identity() {
    auto c = synthetic::make(120, 11);
    auto res = lnh::transparency_experiment(c.records, c.inventory, {});
    std::size_t ones = 0;
    for (const auto &r : res.rows)
        ones += r.f1 && *r.f1 == 1.0;
    bool means = res.esfl.describe && res.english.describe && res.esfl.describe->mean == 1.0 &&
                 res.english.describe->mean == 1.0;
    return {ones == res.rows.size() && means ? Verdict::kPass : Verdict::kFail,
            fmt::format("{}/{} records at f1 1.0, means {} / {}", ones, res.rows.size(),
                        res.esfl.describe ? res.esfl.describe->mean : NAN,
                        res.english.describe ? res.english.describe->mean : NAN)};
}

Outcome released_dataset(const fs::path &dir) {
    auto corpus_path = dir / "sembank.jsonl";
    if (!fs::exists(corpus_path))
        return {Verdict::kSkipped, "released dataset not found at " + corpus_path.string()};
    auto recs = load_corpus(corpus_path).records;
    std::vector<std::string> problems;
    std::string detail;

    auto rep = corpus_report(recs);
    std::size_t acc = 0, rej = 0;
    for (const auto &g : rep.groups)
        if (g.source == Source::kEsfl)
            for (const auto &s : g.strata)
                if (s.name == "Overall") {
                    acc = s.acc;
                    rej = s.rej;
                }
    detail += fmt::format("total {} overall {}/{}", rep.provenance.total(), acc, rej);
    if (rep.provenance.total() != 1643)
        problems.push_back("Table 8 total");
    if (acc != 724 || rej != 819)
        problems.push_back("Table 3 overall");

    RuleInventory inv;
    if (fs::exists(dir / "rules.json")) {
        inv = inventory_from_json(read_json(dir / "rules.json"));
    } else {
        auto g = lnh::induce_grammar(recs, SignatureMode::kDelexicalized, {}, default_jobs());
        recs = lnh::with_derivations(std::move(recs), g);
        inv = std::move(g.inventory);
    }
    auto profile = lnh::build_frequency_profile(recs, inv, SignatureMode::kDelexicalized);
    try {
        auto chi = lnh::syntactic_complexity(profile);
        detail += fmt::format("; signatures {} retained {} non-lexical {} df {} p {:.4f}", profile.rows.size(),
                              chi.retained.size(), chi.nonlexical.size(), chi.test.df.value_or(-1), chi.test.p_value);
        if (chi.retained.size() != 77 || chi.nonlexical.size() != 43 || chi.test.df.value_or(-1) != 42 ||
            !(chi.test.p_value > 0.99))
            problems.push_back("Table 13");
    } catch (const Error &e) {
        problems.push_back(std::string("Table 13: ") + e.what());
    }

    lnh::TransparencyOptions opts;
    opts.jobs = default_jobs();
    auto tr = lnh::transparency_experiment(recs, inv, opts);
    if (tr.esfl.describe && tr.english.describe) {
        const auto &de = *tr.esfl.describe, &dn = *tr.english.describe;
        detail += fmt::format("; means {:.4f}/{:.4f} sd {:.4f}/{:.4f}", de.mean, dn.mean, de.sd,
                              dn.sd);
        if (std::fabs(de.mean - 0.906) > 0.005 || std::fabs(dn.mean - 0.875) > 0.005 ||
            !(de.sd < dn.sd))
            problems.push_back("Table 14");
    } else {
        problems.push_back("Table 14: no scores");
    }
    if (tr.z) {
        detail += fmt::format("; z {:.3f}", tr.z->statistic);
        if (std::fabs(tr.z->statistic - 8.428) > 0.5)
            problems.push_back("Table 15 z");
    } else {
        problems.push_back("Table 15 z: not computed");
    }
    std::string matches;
    for (const auto &[name, t] : {std::pair{"welch", tr.welch}, {"student", tr.student}, {"paired", tr.paired}})
        if (t) {
            detail += fmt::format("; {} t {:.3f}", name, t->statistic);
            if (std::fabs(t->statistic - 14.343) <= 0.5)
                matches += (matches.empty() ? "" : ",") + std::string(name);
        }
    detail += "; t variant matching 14.343: " + (matches.empty() ? std::string("none") : matches);
    for (const auto &p : problems)
        detail += "; mismatch: " + p;
    return {problems.empty() ? Verdict::kPass : Verdict::kFail, detail};
}

Outcome cli_determinism() {
    auto fx = [](const std::string &n) { return fixtures::path(n); };
    const std::vector<std::vector<std::string>> cmds = {
        {"compose", "--rules", fx("table1_rules.json"), "--derivation", fx("fig3_derivation.json")},
        {"extract", "--corpus", fx("mini.jsonl")},
        {"revise", "--rules", fx("revision_catalog.json")},
        {"smatch", "--cand", fx("mini.jsonl"), "--ref", fx("mini.jsonl")},
        {"iaa", "--corpus", fx("mini.jsonl")},
        {"report", "--corpus", fx("mini.jsonl")},
        {"freq", "--corpus", fx("mini.jsonl")},
        {"chi2", "--corpus", fx("mini.jsonl"), "--rules", fx("mini_rules.json")},
        {"transparency", "--corpus", fx("mini.jsonl")},
    };
    auto run = [](std::vector<std::string> args) {
        std::ostringstream out, err;
        int code = cli::run(args, out, err);
        return std::pair{code, out.str()};
    };
    auto files = [](const fs::path &dir) {
        std::map<std::string, std::string> m;
        for (const auto &e : fs::directory_iterator(dir))
            m[e.path().filename().string()] = read_text(e.path());
        return m;
    };
    auto base = fs::temp_directory_path() / "shrg_acceptance";
    std::vector<std::string> bad;
    for (const auto &cmd : cmds) {
        auto a = run(cmd), b = run(cmd);
        fs::remove_all(base);
        auto j1 = cmd, j8 = cmd;
        j1.insert(j1.end(), {"--jobs", "1", "--out", (base / "j1").string()});
        j8.insert(j8.end(), {"--jobs", "8", "--out", (base / "j8").string()});
        auto r1 = run(j1), r8 = run(j8);
        bool same = a.first == 0 && a == b && r1.first == 0 && r8.first == 0 &&
                    files(base / "j1") == files(base / "j8");
        if (!same)
            bad.push_back(cmd[0]);
    }
    fs::remove_all(base);
    std::string detail = fmt::format("{}/{} subcommands identical (two runs, jobs 1 vs 8)", cmds.size() - bad.size(),
                                     cmds.size());
    for (const auto &b : bad)
        detail += "; differs: " + b;
    return {bad.empty() ? Verdict::kPass : Verdict::kFail, detail};
}

} // namespace

int main(int argc, char **argv) {
    fs::path dataset = argc > 1 ? fs::path(argv[1]) : fs::path(SHRG_DATA_DIR) / "release";
    auto t0 = Clock::now();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"worked example composes to the reference graph", worked_example},
        {"extraction round trip", extraction_round_trip},
        {"S-match hill climbing versus exhaustive oracle", smatch_oracle},
        {"statistics oracles", statistics_oracles},
        {"revision catalog reproduces the modified analyses", revision_catalog},
        {"substitution identity", substitution_identity},
        {"released dataset figures", [&] { return released_dataset(dataset); }},
        {"CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {Verdict::kFail, std::string("error: ") + e.what()};
        }
        if (i + 1 == criteria.size() && o.verdict == Verdict::kPass && seconds_since(t0) >= 300)
            o = {Verdict::kFail, o.detail + "; suite exceeded 5 minutes"};
        const char *tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kFail ? "FAIL" : "SKIPPED";
        failed += o.verdict == Verdict::kFail;
        std::cout << fmt::format("criterion {} {:<7} {}: {}", i + 1, tag, criteria[i].first, o.detail) << std::endl;
    }
    std::cout << fmt::format("total time {:.1f}s", seconds_since(t0)) << std::endl;
    return failed ? 1 : 0;
}
