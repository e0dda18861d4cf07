#include "shrg/sembank.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "shrg/error.hpp"
#include "shrg/stats.hpp"

namespace shrg {

namespace {

// Characters split off as their own tokens by the fallback tokenizer.
constexpr std::string_view kSplitPunct = ".,;:!?\"()[]{}";

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string strip_space(std::string_view s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out += c;
    return out;
}

} // namespace

std::string to_string(Source s) { return s == Source::kEsfl ? "esfl" : "english"; }

std::string to_string(Label l) {
    switch (l) {
    case Label::kAccept:
        return "accept";
    case Label::kReject:
        return "reject";
    case Label::kAbandon:
        return "abandon";
    }
    return "?";
}

std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::kAccepted:
        return "accepted";
    case Provenance::kModified:
        return "modified";
    case Provenance::kComposed:
        return "composed";
    case Provenance::kUnlabeled:
        return "unlabeled";
    }
    return "?";
}

Source parse_source(std::string_view s) {
    if (s == "esfl")
        return Source::kEsfl;
    if (s == "english")
        return Source::kEnglish;
    throw ValidationError("unknown source '" + std::string(s) + "' (esfl|english)");
}

Label parse_label(std::string_view s) {
    if (s == "accept")
        return Label::kAccept;
    if (s == "reject")
        return Label::kReject;
    if (s == "abandon")
        return Label::kAbandon;
    throw ValidationError("unknown label '" + std::string(s) + "' (accept|reject|abandon)");
}

Provenance parse_provenance(std::string_view s) {
    if (s == "accepted")
        return Provenance::kAccepted;
    if (s == "modified")
        return Provenance::kModified;
    if (s == "composed")
        return Provenance::kComposed;
    if (s == "unlabeled")
        return Provenance::kUnlabeled;
    throw ValidationError("unknown provenance '" + std::string(s) + "'");
}

std::vector<std::string> tokenize(std::string_view sentence) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty())
            out.push_back(std::move(cur));
        cur.clear();
    };
    for (char c : sentence) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (kSplitPunct.find(c) != std::string_view::npos) {
            flush();
            out.emplace_back(1, c);
        } else {
            cur += c;
        }
    }
    flush();
    return out;
}

void validate(const SentenceRecord &r) {
    auto fail = [&](const std::string &msg) { throw ValidationError("record " + r.id + ": " + msg); };
    if (r.id.empty())
        throw ValidationError("record with empty id");
    for (const auto &t : r.tokens)
        if (t.empty() || t.find_first_of(" \t\r\n") != std::string::npos)
            fail("token '" + t + "' is empty or contains whitespace");
    std::string joined;
    for (const auto &t : r.tokens)
        joined += t;
    if (joined != strip_space(r.sentence))
        fail("tokens do not spell the sentence");
    if (r.tree) {
        try {
            validate(*r.tree);
        } catch (const ValidationError &e) {
            fail(e.what());
        }
        if (tree_tokens(*r.tree) != r.tokens)
            fail("tree yield differs from tokens");
    }
    if (r.graph) {
        try {
            validate(*r.graph);
        } catch (const ValidationError &e) {
            fail(e.what());
        }
    }
    if (r.provenance == Provenance::kComposed && !r.derivation)
        fail("provenance 'composed' requires a derivation");
    for (const auto &[who, l] : r.labels)
        if (who.empty())
            fail("label with empty annotator id");
}

Json to_json(const SentenceRecord &r) {
    Json j = Json::object();
    j["id"] = r.id;
    j["sentence"] = r.sentence;
    j["tokens"] = r.tokens;
    j["source"] = to_string(r.source);
    j["tree"] = r.tree ? Json(serialize_tree(*r.tree)) : Json(nullptr);
    j["graph"] = r.graph ? to_json(*r.graph) : Json(nullptr);
    j["derivation"] = r.derivation ? to_json(*r.derivation) : Json(nullptr);
    Json labels = Json::object();
    for (const auto &[who, l] : r.labels)
        labels[who] = to_string(l);
    j["labels"] = std::move(labels);
    j["provenance"] = to_string(r.provenance);
    return j;
}

SentenceRecord record_from_json(const Json &j) {
    if (!j.is_object())
        throw ValidationError("record must be a JSON object");
    auto get_str = [&](const char *key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string())
            throw ValidationError(std::string("record field \"") + key + "\" must be a string");
        return it->get<std::string>();
    };
    SentenceRecord r;
    r.id = get_str("id");
    try {
        r.sentence = get_str("sentence");
        r.source = parse_source(get_str("source"));
        if (auto it = j.find("tokens"); it != j.end() && !it->is_null()) {
            if (!it->is_array())
                throw ValidationError("\"tokens\" must be an array");
            for (const auto &t : *it) {
                if (!t.is_string())
                    throw ValidationError("\"tokens\" must hold strings");
                r.tokens.push_back(t.get<std::string>());
            }
        } else {
            r.tokens = tokenize(r.sentence);
        }
        if (auto it = j.find("tree"); it != j.end() && !it->is_null()) {
            if (!it->is_string())
                throw ValidationError("\"tree\" must be a bracketed string");
            r.tree = parse_tree(it->get<std::string>());
        }
        if (auto it = j.find("graph"); it != j.end() && !it->is_null())
            r.graph = graph_from_json(*it);
        if (auto it = j.find("derivation"); it != j.end() && !it->is_null())
            r.derivation = derivation_from_json(*it);
        if (auto it = j.find("labels"); it != j.end() && !it->is_null()) {
            if (!it->is_object())
                throw ValidationError("\"labels\" must be an object");
            for (const auto &[who, l] : it->items()) {
                if (!l.is_string())
                    throw ValidationError("label of " + who + " must be a string");
                r.labels[who] = parse_label(l.get<std::string>());
            }
        }
        r.provenance = j.contains("provenance") ? parse_provenance(get_str("provenance")) : Provenance::kUnlabeled;
    } catch (const ValidationError &e) {
        throw ValidationError("record " + r.id + ": " + e.what());
    }
    validate(r);
    return r;
}

Corpus parse_corpus(const std::string &text, bool lenient) {
    Corpus c;
    std::set<std::string> ids;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        try {
            auto r = record_from_json(parse_json(line));
            if (!ids.insert(r.id).second)
                throw ValidationError("duplicate record id " + r.id);
            c.records.push_back(std::move(r));
        } catch (const ValidationError &e) {
            std::string msg = "line " + std::to_string(lineno) + ": " + e.what();
            if (!lenient)
                throw ValidationError(msg);
            c.skipped.push_back(msg);
        }
    }
    return c;
}

Corpus load_corpus(const std::filesystem::path &path, bool lenient) {
    try {
        return parse_corpus(read_text(path), lenient);
    } catch (const IoError &) {
        throw;
    } catch (const ValidationError &e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string serialize_corpus(const std::vector<SentenceRecord> &records) {
    std::string out;
    for (const auto &r : records) {
        out += dump(to_json(r));
        out += '\n';
    }
    return out;
}

void save_corpus(const std::vector<SentenceRecord> &records, const std::filesystem::path &path) {
    write_text(path, serialize_corpus(records));
}

// --- reports ------------------------------------------------------------------

CorpusReport corpus_report(const std::vector<SentenceRecord> &records) {
    CorpusReport rep;
    rep.records = records.size();
    for (Source src : {Source::kEsfl, Source::kEnglish}) {
        GroupStats g{src, {{"Triple"}, {"Double"}, {"Single"}, {"Overall"}}};
        for (const auto &r : records) {
            if (r.source != src || r.labels.empty())
                continue;
            ++g.labelled;
            std::size_t acc = 0, rej = 0;
            for (const auto &[who, l] : r.labels) {
                acc += l == Label::kAccept;
                rej += l == Label::kReject;
            }
            std::size_t n = acc + rej;
            if (n == 0) {
                ++g.abandoned;
                continue;
            }
            if (acc == rej) {
                ++g.inconsistent;
                continue;
            }
            std::size_t slot = n >= 3 ? 0 : n == 2 ? 1 : 2;
            (acc > rej ? g.strata[slot].acc : g.strata[slot].rej)++;
            (acc > rej ? g.strata[3].acc : g.strata[3].rej)++;
        }
        rep.groups.push_back(std::move(g));
    }
    for (const auto &r : records) {
        if (r.source != Source::kEsfl)
            continue;
        switch (r.provenance) {
        case Provenance::kAccepted:
            ++rep.provenance.accepted;
            break;
        case Provenance::kModified:
            ++rep.provenance.modified;
            break;
        case Provenance::kComposed:
            ++rep.provenance.composed;
            break;
        case Provenance::kUnlabeled:
            ++rep.provenance.unlabeled;
            break;
        }
    }
    return rep;
}

namespace {

double pct(std::size_t part, std::size_t whole) {
    return whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

} // namespace

Json to_json(const CorpusReport &r) {
    Json groups = Json::array();
    for (const auto &g : r.groups) {
        Json strata = Json::array();
        for (const auto &s : g.strata) {
            Json js = Json::object();
            js["stratum"] = s.name;
            js["acc"] = s.acc;
            js["rej"] = s.rej;
            js["all"] = s.all();
            js["acc_pct"] = round2(pct(s.acc, s.all()));
            js["rej_pct"] = round2(pct(s.rej, s.all()));
            strata.push_back(std::move(js));
        }
        Json jg = Json::object();
        jg["source"] = to_string(g.source);
        jg["labelled"] = g.labelled;
        jg["inconsistent"] = g.inconsistent;
        jg["abandoned"] = g.abandoned;
        jg["strata"] = std::move(strata);
        groups.push_back(std::move(jg));
    }
    Json prov = Json::object();
    prov["accepted"] = r.provenance.accepted;
    prov["modified"] = r.provenance.modified;
    prov["composed"] = r.provenance.composed;
    prov["unlabeled"] = r.provenance.unlabeled;
    prov["total"] = r.provenance.total();
    Json j = Json::object();
    j["records"] = r.records;
    j["labels"] = std::move(groups);
    j["build"] = std::move(prov);
    return j;
}

std::string render_text(const CorpusReport &r) {
    std::string out = fmt::format("{:<14}", "");
    for (const auto &g : r.groups)
        out += fmt::format("{:>8} {:>8}", to_string(g.source), "%");
    out += '\n';
    for (std::size_t k = 0; k < 4; ++k) {
        for (const char *kind : {"acc", "rej", "all"}) {
            out += fmt::format("{:<14}", r.groups[0].strata[k].name + "-" + kind);
            for (const auto &g : r.groups) {
                const auto &s = g.strata[k];
                std::size_t v = kind[0] == 'a' && kind[1] == 'c' ? s.acc : kind[0] == 'r' ? s.rej : s.all();
                double p = std::string(kind) == "all" ? (s.all() ? 100.0 : 0.0) : pct(v, s.all());
                out += fmt::format("{:>8} {:>7.2f}%", v, p);
            }
            out += '\n';
        }
    }
    for (const auto &g : r.groups)
        out += fmt::format("{}: {} labelled, {} inconsistent removed, {} abandoned\n", to_string(g.source),
                           g.labelled, g.inconsistent, g.abandoned);
    out += fmt::format("build (esfl): accepted {} + modified {} + composed {} = {}", r.provenance.accepted,
                       r.provenance.modified, r.provenance.composed,
                       r.provenance.accepted + r.provenance.modified + r.provenance.composed);
    if (r.provenance.unlabeled)
        out += fmt::format(" ({} unlabeled)", r.provenance.unlabeled);
    out += '\n';
    return out;
}

IaaReport iaa_report(const std::vector<SentenceRecord> &records,
                     std::optional<std::vector<std::vector<std::string>>> groups, bool skip_empty) {
    std::set<std::string> seen;
    for (const auto &r : records)
        for (const auto &[who, l] : r.labels)
            seen.insert(who);
    std::vector<std::string> annotators(seen.begin(), seen.end());
    std::sort(annotators.begin(), annotators.end(), [](const std::string &a, const std::string &b) {
        return natural_less(a, b);
    });
    if (!groups) {
        groups.emplace();
        if (annotators.size() > 2)
            groups->push_back(annotators);
        for (std::size_t i = 0; i < annotators.size(); ++i)
            for (std::size_t k = i + 1; k < annotators.size(); ++k)
                groups->push_back({annotators[i], annotators[k]});
    }
    IaaReport rep;
    for (const auto &grp : *groups) {
        if (grp.empty())
            throw ValidationError("empty annotator group");
        for (const auto &who : grp)
            if (!seen.count(who))
                throw ValidationError("unknown annotator '" + who + "'");
        IaaRow row{grp, {}, {}};
        std::size_t total = 0;
        for (Source src : {Source::kEsfl, Source::kEnglish}) {
            std::vector<std::vector<std::string>> items;
            for (const auto &r : records) {
                if (r.source != src)
                    continue;
                std::vector<std::string> labels;
                for (const auto &who : grp) {
                    auto it = r.labels.find(who);
                    if (it == r.labels.end())
                        break;
                    labels.push_back(to_string(it->second));
                }
                if (labels.size() == grp.size())
                    items.push_back(std::move(labels));
            }
            row.items[src] = items.size();
            total += items.size();
            row.agreement[src] = items.empty() ? std::nullopt : std::optional<double>(stats::percent_agreement(items));
        }
        if (total == 0 && skip_empty)
            continue;
        if (total == 0) {
            std::string name;
            for (const auto &who : grp)
                name += (name.empty() ? "" : "-") + who;
            throw ValidationError("annotator group " + name + " has no co-labelled items");
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

Json to_json(const IaaReport &r) {
    Json rows = Json::array();
    for (const auto &row : r.rows) {
        Json j = Json::object();
        j["annotators"] = row.annotators;
        for (Source src : {Source::kEsfl, Source::kEnglish}) {
            const auto &a = row.agreement.at(src);
            j[to_string(src)] = a ? Json(round2(*a)) : Json(nullptr);
            j[to_string(src) + "_items"] = row.items.at(src);
        }
        rows.push_back(std::move(j));
    }
    Json j = Json::object();
    j["iaa"] = std::move(rows);
    return j;
}

std::string render_text(const IaaReport &r) {
    std::string out = fmt::format("{:<24}{:>10}{:>10}\n", "", "esfl", "english");
    for (const auto &row : r.rows) {
        std::string name;
        for (const auto &who : row.annotators)
            name += (name.empty() ? "" : "-") + who;
        out += fmt::format("{:<24}", name);
        for (Source src : {Source::kEsfl, Source::kEnglish}) {
            const auto &a = row.agreement.at(src);
            out += a ? fmt::format("{:>10.2f}", *a) : fmt::format("{:>10}", "-");
        }
        out += '\n';
    }
    return out;
}

} // namespace shrg
