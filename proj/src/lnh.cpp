#include "shrg/lnh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "shrg/error.hpp"
#include "shrg/parallel.hpp"
#include "shrg/smatch.hpp"

namespace shrg::lnh {

double sig9(double x) {
    if (!std::isfinite(x))
        return x;
    return std::stod(fmt::format("{:.9g}", x));
}

namespace {

Json num(double x) { return std::isfinite(x) ? Json(sig9(x)) : Json(nullptr); }

std::string fixed6(double x) { return fmt::format("{:.6f}", x); }

void rename(Derivation &d, const std::map<std::string, std::string> &ids) {
    d.rule_id = ids.at(d.rule_id);
    for (auto &c : d.children)
        rename(c, ids);
}

// Substituted rules keep the original syntactic side; only the semantics move.
void hybridize(const Derivation &orig, const Derivation &sub, const RuleInventory &inv, Derivation &out,
               std::map<std::string, SyncRule> &extra) {
    out.rule_id = orig.rule_id;
    if (sub.rule_id != orig.rule_id) {
        const auto &o = inv.at(orig.rule_id);
        SyncRule h = o;
        h.id = orig.rule_id + ">" + sub.rule_id;
        h.sem = inv.at(sub.rule_id).sem;
        out.rule_id = h.id;
        extra.emplace(h.id, std::move(h));
    }
    out.children.resize(orig.children.size());
    for (std::size_t i = 0; i < orig.children.size(); ++i)
        hybridize(orig.children[i], sub.children[i], inv, out.children[i], extra);
}

void count_signatures(const Derivation &d, const RuleInventory &inv, SignatureMode mode,
                      std::map<std::string, std::int64_t> &out, std::size_t &nodes) {
    out[cfg_signature(inv.at(d.rule_id), mode)]++;
    ++nodes;
    for (const auto &c : d.children)
        count_signatures(c, inv, mode, out, nodes);
}

} // namespace

Composition compose_substituted(const Derivation &d, const RuleInventory &inv, SignatureMode mode) {
    auto sub = substitute_rules(d, inv, mode);
    if (sub == d)
        return compose(d, inv);
    Derivation hd;
    std::map<std::string, SyncRule> extra;
    hybridize(d, sub, inv, hd, extra);
    std::vector<SyncRule> rules;
    for (auto &[id, r] : extra)
        rules.push_back(std::move(r));
    return compose(hd, inv.with_rules(std::move(rules)));
}

// --- grammar induction ------------------------------------------------------------

InducedGrammar induce_grammar(const std::vector<SentenceRecord> &records, SignatureMode mode,
                              const ExtractOptions &opts, unsigned jobs) {
    struct Attempt {
        std::optional<Extraction> ex;
        std::string error;
    };
    auto attempts = parallel_map(records.size(), jobs, [&](std::size_t i) {
        const auto &r = records[i];
        Attempt a;
        if (!r.tree || !r.graph) {
            a.error = "needs both a tree and a graph";
            return a;
        }
        try {
            a.ex = extract(*r.tree, *r.graph, opts);
        } catch (const Error &e) {
            a.error = e.what();
        }
        return a;
    });

    InducedGrammar g;
    std::map<std::string, std::size_t> by_key; // rule body -> index in merged
    std::vector<SyncRule> merged;
    g.derivations.resize(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto &a = attempts[i];
        if (!a.ex) {
            g.failures.push_back(records[i].id + ": " + a.error);
            continue;
        }
        std::map<std::string, std::string> ids;
        for (auto rule : a.ex->rules) {
            auto local = rule.id;
            rule.id.clear();
            rule.count = 0;
            auto key = dump(to_json(rule));
            auto [it, fresh] = by_key.emplace(key, merged.size());
            if (fresh) {
                rule.id = opts.rule_prefix + std::to_string(merged.size() + 1);
                merged.push_back(rule);
            }
            merged[it->second].count++;
            ids[local] = merged[it->second].id;
        }
        rename(a.ex->derivation, ids);
        g.derivations[i] = std::move(a.ex->derivation);
    }
    g.inventory = RuleInventory(std::move(merged), mode);
    return g;
}

std::vector<SentenceRecord> with_derivations(std::vector<SentenceRecord> records, const InducedGrammar &g) {
    for (std::size_t i = 0; i < records.size(); ++i)
        records[i].derivation = g.derivations.at(i);
    return records;
}

std::vector<SentenceRecord> filter_ids(const std::vector<SentenceRecord> &records, const std::set<std::string> &ids) {
    std::vector<SentenceRecord> out;
    for (const auto &r : records)
        if (ids.count(r.id))
            out.push_back(r);
    return out;
}

std::set<std::string> read_id_list(const std::filesystem::path &path) {
    std::set<std::string> ids;
    std::istringstream in(read_text(path));
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#')
            continue;
        auto e = line.find_last_not_of(" \t\r");
        ids.insert(line.substr(b, e - b + 1));
    }
    return ids;
}

// --- frequency profile ------------------------------------------------------------

FrequencyProfile build_frequency_profile(const std::vector<SentenceRecord> &records, const RuleInventory &inv,
                                         SignatureMode mode) {
    FrequencyProfile p;
    p.mode = mode;
    std::map<std::string, std::int64_t> counts[2];
    for (const auto &r : records) {
        if (!r.derivation) {
            p.missing.push_back(r.id);
            continue;
        }
        count_signatures(*r.derivation, inv, mode, counts[r.source == Source::kEsfl ? 0 : 1], p.derivation_nodes);
    }
    p.unique_esfl = counts[0].size();
    p.unique_english = counts[1].size();
    std::map<std::string, SignatureRow> rows;
    for (int k = 0; k < 2; ++k)
        for (const auto &[sig, n] : counts[k]) {
            auto &row = rows[sig];
            row.signature = sig;
            (k == 0 ? row.esfl : row.english) = n;
        }
    for (auto &[sig, row] : rows) {
        row.lexical = is_lexical_signature(sig);
        if (row.esfl > 0 && row.english > 0)
            row.ratio = stats::ratio_ci(static_cast<double>(row.esfl), static_cast<double>(row.english));
        p.rows.push_back(row);
    }
    std::stable_sort(p.rows.begin(), p.rows.end(),
                     [](const SignatureRow &a, const SignatureRow &b) { return a.total() > b.total(); });
    return p;
}

std::string profile_tsv(const FrequencyProfile &p) {
    std::string out = "signature\tesfl\tenglish\tratio\tci_lo\tci_hi\tlexical\n";
    for (const auto &r : p.rows) {
        out += fmt::format("{}\t{}\t{}\t", r.signature, r.esfl, r.english);
        if (r.ratio)
            out += fmt::format("{:.9g}\t{:.9g}\t{:.9g}", r.ratio->ratio, r.ratio->lo, r.ratio->hi);
        else
            out += "\t\t";
        out += r.lexical ? "\ttrue\n" : "\tfalse\n";
    }
    return out;
}

// --- syntactic complexity ---------------------------------------------------------

ComplexityResult syntactic_complexity(const FrequencyProfile &p, double min_expected, stats::FilterRule rule) {
    if (p.rows.empty())
        throw StatsError("frequency profile is empty");
    stats::ContingencyTable t{{"esfl", "english"}, {}, {{}, {}}};
    for (const auto &r : p.rows) {
        t.cols.push_back(r.signature);
        t.counts[0].push_back(r.esfl);
        t.counts[1].push_back(r.english);
    }
    ComplexityResult out;
    out.min_expected = min_expected;
    out.filter = rule;
    out.unique_pre_dedup = p.unique_pre_dedup();
    out.unique_post_dedup = p.unique_post_dedup();
    auto kept = stats::expected_frequency_filter(t, min_expected, rule);
    stats::ContingencyTable nl{t.rows, {}, {{}, {}}};
    for (std::size_t j = 0; j < kept.cols.size(); ++j) {
        out.retained.push_back(kept.cols[j]);
        if (is_lexical_signature(kept.cols[j]))
            continue;
        nl.cols.push_back(kept.cols[j]);
        nl.counts[0].push_back(kept.counts[0][j]);
        nl.counts[1].push_back(kept.counts[1][j]);
    }
    out.nonlexical = nl.cols;
    if (nl.cols.size() < 2)
        throw StatsError(fmt::format("only {} non-lexical signature(s) survive the filter; need at least 2",
                                     nl.cols.size()));
    out.test = stats::chi_square_independence(nl);
    return out;
}

Json to_json(const ComplexityResult &r) {
    Json j = Json::object();
    j["test"] = to_json(r.test);
    j["min_expected"] = r.min_expected;
    j["filter"] = r.filter == stats::FilterRule::kPerCell ? "per_cell" : "column_total";
    j["unique_signatures"] = {{"pre_dedup", r.unique_pre_dedup}, {"post_dedup", r.unique_post_dedup}};
    j["retained_count"] = r.retained.size();
    j["nonlexical_count"] = r.nonlexical.size();
    j["retained"] = r.retained;
    j["nonlexical"] = r.nonlexical;
    return j;
}

// --- semantic transparency ----------------------------------------------------------

Histogram histogram(const std::vector<double> &sample) {
    if (sample.empty())
        throw StatsError("histogram of an empty sample");
    Histogram h;
    h.lo = std::min(*std::min_element(sample.begin(), sample.end()), 1.0);
    h.hi = 1.0;
    double width = (h.hi - h.lo) / Histogram::kBins;
    for (double x : sample) {
        int b = width > 0 ? static_cast<int>(std::floor((x - h.lo) / width)) : 0;
        h.counts[std::clamp(b, 0, Histogram::kBins - 1)]++;
    }
    return h;
}

TransparencyOutcome transparency_experiment(const std::vector<SentenceRecord> &records, const RuleInventory &inv,
                                            const TransparencyOptions &opts) {
    TransparencyOutcome out;
    out.rows = parallel_map(records.size(), opts.jobs, [&](std::size_t i) {
        const auto &r = records[i];
        ScoreRow row{r.id, r.source, std::nullopt, {}};
        if (!r.derivation || !r.graph) {
            row.error = "needs both a derivation and a gold graph";
            return row;
        }
        try {
            auto comp = compose_substituted(*r.derivation, inv, opts.mode);
            if (tree_tokens(comp.tree) != r.tokens)
                throw CompositionError("substituted derivation yields different tokens");
            SmatchOptions so{opts.restarts, record_seed(opts.seed, r.id), opts.include_top};
            row.f1 = score(comp.graph, *r.graph, so).f1;
        } catch (const Error &e) {
            row.error = e.what();
        }
        return row;
    });
    for (const auto &row : out.rows) {
        auto &g = row.source == Source::kEsfl ? out.esfl : out.english;
        if (row.f1)
            g.scores.push_back(*row.f1);
        else
            ++g.failures;
    }
    for (auto *g : {&out.esfl, &out.english})
        if (!g->scores.empty()) {
            g->describe = stats::describe(g->scores);
            g->hist = histogram(g->scores);
        }
    const auto &a = out.esfl.scores, &b = out.english.scores;
    if (a.size() >= 2 && b.size() >= 2) {
        out.welch = stats::t_test(a, b, stats::TVariant::kWelch);
        out.student = stats::t_test(a, b, stats::TVariant::kStudent);
        out.z = stats::z_test(a, b);
        if (a.size() == b.size())
            out.paired = stats::t_test(a, b, stats::TVariant::kPaired);
    }
    return out;
}

std::string scores_tsv(const TransparencyOutcome &o, std::optional<Source> only) {
    std::string out = "id\tsource\tf1\terror\n";
    for (const auto &r : o.rows) {
        if (only && r.source != *only)
            continue;
        out += fmt::format("{}\t{}\t{}\t{}\n", r.id, to_string(r.source), r.f1 ? fixed6(*r.f1) : "NA", r.error);
    }
    return out;
}

Json describe_json(const TransparencyOutcome &o) {
    Json j = Json::object();
    for (const auto *g : {&o.esfl, &o.english}) {
        Json jg = g->describe ? to_json(*g->describe) : Json::object({{"n", 0}});
        jg["failures"] = g->failures;
        j[to_string(g->source)] = std::move(jg);
    }
    return j;
}

Json tests_json(const TransparencyOutcome &o) {
    auto opt = [](const std::optional<stats::TestResult> &t) { return t ? to_json(*t) : Json(nullptr); };
    Json j = Json::object();
    j["welch_t"] = opt(o.welch);
    j["student_t"] = opt(o.student);
    j["paired_t"] = opt(o.paired);
    j["z"] = opt(o.z);
    j["n"] = {{"esfl", o.esfl.scores.size()}, {"english", o.english.scores.size()}};
    return j;
}

std::string histogram_tsv(const TransparencyOutcome &o) {
    std::string out = "source\tbin\tlo\thi\tcount\n";
    for (const auto *g : {&o.esfl, &o.english}) {
        if (!g->hist)
            continue;
        for (int i = 0; i < Histogram::kBins; ++i)
            out += fmt::format("{}\t{}\t{:.9g}\t{:.9g}\t{}\n", to_string(g->source), i, g->hist->edge(i),
                               g->hist->edge(i + 1), g->hist->counts[i]);
    }
    return out;
}

// --- formatting ---------------------------------------------------------------------

Json to_json(const stats::TestResult &r) {
    Json j = Json::object();
    j["kind"] = stats::to_string(r.kind);
    j["statistic"] = num(r.statistic);
    j["df"] = r.df ? num(*r.df) : Json(nullptr);
    j["p_value"] = num(r.p_value);
    return j;
}

Json to_json(const stats::Describe &d) {
    Json j = Json::object();
    j["n"] = d.n;
    j["mean"] = num(d.mean);
    j["median"] = num(d.median);
    j["sd"] = d.sd_defined ? num(d.sd) : Json(nullptr);
    j["max"] = num(d.max);
    j["min"] = num(d.min);
    return j;
}

} // namespace shrg::lnh
