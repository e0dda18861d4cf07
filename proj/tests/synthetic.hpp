#pragma once

// Synthetic corpora built from random derivations. Every rule gets its own
// left-hand side, so each CFG signature holds exactly one rule.

#include <string>
#include <vector>

#include "oracles.hpp"
#include "shrg/engine.hpp"
#include "shrg/sembank.hpp"

namespace synthetic {

struct Corpus {
    std::vector<shrg::SentenceRecord> records;
    shrg::RuleInventory inventory;
};

inline void relabel(shrg::Derivation &d, const std::string &prefix, const std::string &lhs,
                    const shrg::RuleInventory &inv, std::vector<shrg::SyncRule> &out) {
    auto r = inv.at(d.rule_id);
    r.id = prefix + d.rule_id;
    r.lhs = lhs;
    std::size_t k = 0;
    std::vector<std::string> child_lhs;
    for (auto &s : r.syn_rhs)
        if (s.is_nonterminal()) {
            s.name = r.id + "." + std::to_string(k++);
            child_lhs.push_back(s.name);
        }
    for (std::size_t j = 0; j < r.sem.nt_edges.size(); ++j)
        r.sem.nt_edges[j].label = child_lhs[j];
    d.rule_id = r.id;
    out.push_back(std::move(r));
    for (std::size_t j = 0; j < d.children.size(); ++j)
        relabel(d.children[j], prefix, child_lhs[j], inv, out);
}

// n records alternating esfl/english, each composed from its own random derivation.
inline Corpus make(std::size_t n, std::uint64_t seed) {
    oracle::SeedGrammar gen(seed);
    std::vector<shrg::SyncRule> rules;
    std::vector<shrg::Derivation> derivs;
    for (std::size_t i = 0; i < n; ++i) {
        auto rd = gen.generate(3);
        auto prefix = "s" + std::to_string(i) + ".";
        relabel(rd.derivation, prefix, prefix + "S", rd.inventory, rules);
        derivs.push_back(std::move(rd.derivation));
    }
    Corpus c;
    c.inventory = shrg::RuleInventory(std::move(rules), shrg::SignatureMode::kDelexicalized);
    for (std::size_t i = 0; i < n; ++i) {
        auto comp = shrg::compose(derivs[i], c.inventory);
        shrg::SentenceRecord r;
        r.id = "syn-" + std::to_string(i);
        r.tokens = shrg::tree_tokens(comp.tree);
        for (const auto &t : r.tokens)
            r.sentence += (r.sentence.empty() ? "" : " ") + t;
        r.source = i % 2 ? shrg::Source::kEnglish : shrg::Source::kEsfl;
        r.tree = comp.tree;
        r.graph = comp.graph;
        r.derivation = derivs[i];
        c.records.push_back(std::move(r));
    }
    return c;
}

// Records whose trees reuse the seed grammar's S/X1/X2/X3 labels, so signatures
// recur across records. Trees and graphs only; derivations come from extraction.
inline std::vector<shrg::SentenceRecord> make_shared_labels(std::size_t n, std::uint64_t seed) {
    oracle::SeedGrammar gen(seed);
    std::vector<shrg::SentenceRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto rd = gen.generate(3);
        auto comp = shrg::compose(rd.derivation, rd.inventory);
        shrg::SentenceRecord r;
        r.id = "shr-" + std::to_string(i);
        r.tokens = shrg::tree_tokens(comp.tree);
        for (const auto &t : r.tokens)
            r.sentence += (r.sentence.empty() ? "" : " ") + t;
        r.source = i % 3 ? shrg::Source::kEsfl : shrg::Source::kEnglish;
        r.tree = comp.tree;
        r.graph = comp.graph;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace synthetic
