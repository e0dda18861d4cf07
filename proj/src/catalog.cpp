#include "shrg/catalog.hpp"

#include <algorithm>

#include "shrg/error.hpp"

namespace shrg {

namespace {

SemGraph bare(SemGraph g) {
    g.top.reset();
    for (auto &n : g.nodes)
        n.anchor.reset();
    return g;
}

std::string describe(const CatalogEntry &e) {
    return e.phenomenon + " (" + e.sentence + ")";
}

} // namespace

bool same_analysis(const SemGraph &a, const SemGraph &b) { return isomorphic(bare(a), bare(b)); }

std::vector<CatalogEntry> catalog_from_json(const Json &j) {
    if (!j.is_array())
        throw ValidationError("revision catalog must be a JSON array");
    std::vector<CatalogEntry> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto &je = j[k];
        auto where = "catalog entry " + std::to_string(k) + ": ";
        try {
            CatalogEntry e;
            e.phenomenon = je.at("phenomenon").get<std::string>();
            e.table = je.value("table", 0);
            e.sentence = je.value("sentence", "");
            std::vector<SyncRule> rules;
            for (const auto &r : je.at("rules"))
                rules.push_back(rule_from_json(r));
            e.inventory = RuleInventory(std::move(rules), SignatureMode::kDelexicalized);
            e.derivation = derivation_from_json(je.at("derivation"));

            const auto &orig = je.at("original");
            const auto &mod = je.at("modified");
            if (!orig.is_array() || !mod.is_array() || orig.size() != mod.size())
                throw ValidationError("\"original\" and \"modified\" must be arrays of equal length");
            for (std::size_t i = 0; i < orig.size(); ++i) {
                RevisionPair p{orig[i].get<std::string>(), std::nullopt};
                const auto &m = mod[i];
                if (m.is_object() && m.contains("sem") && m["sem"].is_null()) {
                    const auto &o = e.inventory.at(p.original);
                    auto stub = m;
                    stub["sem"] = to_json(GraphFragment{});
                    SyncRule r = rule_from_json(stub);
                    SyncRule shape = o;
                    shape.syn_rhs = r.syn_rhs;
                    r.sem = empty_semantics(shape);
                    p.modified = std::move(r);
                } else if (!m.is_null()) {
                    p.modified = rule_from_json(m);
                }
                e.pairs.push_back(std::move(p));
            }
            if (je.contains("rewrite") && !je["rewrite"].is_null())
                e.rewrite = derivation_from_json(je["rewrite"]);
            if (je.contains("original_sem") && !je["original_sem"].is_null())
                e.original_sem = graph_from_json(je["original_sem"]);
            if (je.contains("modified_sem") && !je["modified_sem"].is_null())
                e.modified_sem = graph_from_json(je["modified_sem"]);
            auto present = je.value("present", Json::array());
            for (const auto &p : present)
                e.present.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>(), p.at(2).get<std::string>()});
            auto absent = je.value("absent", Json::array());
            for (const auto &a : absent)
                e.absent.push_back(a.get<std::string>());
            auto counts = je.value("counts", Json::object());
            for (const auto &[label, n] : counts.items())
                e.counts[label] = n.get<std::size_t>();
            out.push_back(std::move(e));
        } catch (const Json::exception &ex) {
            throw ValidationError(where + ex.what());
        } catch (const Error &ex) {
            throw ValidationError(where + ex.what());
        }
    }
    return out;
}

std::vector<CatalogEntry> load_catalog(const std::filesystem::path &path) {
    try {
        return catalog_from_json(read_json(path));
    } catch (const IoError &) {
        throw;
    } catch (const Error &e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

RevisionCheck run_revision(const CatalogEntry &e) {
    RevisionCheck out;
    out.original = compose(e.derivation, e.inventory);
    auto rev = apply_revision(e.derivation, e.inventory, e.pairs, e.rewrite);
    out.modified = compose(rev.derivation, rev.inventory);

    const auto &g = out.modified.graph;
    auto fail = [&](const std::string &msg) { out.failures.push_back(describe(e) + ": " + msg); };
    if (e.original_sem && !same_analysis(out.original.graph, *e.original_sem))
        fail("original derivation does not compose to the original analysis");
    if (e.modified_sem && !same_analysis(g, *e.modified_sem))
        fail("revised graph differs from the modified analysis");
    for (const auto &c : e.present) {
        bool hit = std::any_of(g.edges.begin(), g.edges.end(), [&](const SemEdge &ed) {
            return ed.role == c.role && g.node(ed.src).label == c.src && g.node(ed.tgt).label == c.tgt;
        });
        if (!hit)
            fail("missing " + c.src + " -" + c.role + "-> " + c.tgt);
    }
    for (const auto &label : e.absent)
        if (std::any_of(g.nodes.begin(), g.nodes.end(), [&](const SemNode &n) { return n.label == label; }))
            fail("unexpected " + label);
    for (const auto &[label, n] : e.counts) {
        auto have = static_cast<std::size_t>(
            std::count_if(g.nodes.begin(), g.nodes.end(), [&](const SemNode &x) { return x.label == label; }));
        if (have != n)
            fail(label + " occurs " + std::to_string(have) + " times, expected " + std::to_string(n));
    }
    return out;
}

} // namespace shrg
