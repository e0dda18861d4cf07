#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "shrg/graph.hpp"
#include "shrg/rules.hpp"
#include "shrg/tree.hpp"

namespace shrg {

// Deletes nonterminal edge `nt_index` of host and glues a fresh copy of repl
// in its place, fusing repl.externals[k] with the edge's k-th attachment.
// Fused nodes keep the host id; repl's nonterminal edges take the removed
// edge's position.
GraphFragment replace_hyperedge(const GraphFragment &host, std::size_t nt_index, const GraphFragment &repl);

struct Composition {
    SynTree tree;
    SemGraph graph;
};

// Bottom-up synchronous composition. The graph is canonicalised; nodes
// introduced by a rule are anchored to the character span of that rule's
// yield.
Composition compose(const Derivation &d, const RuleInventory &inv);

// The terminal yield of a derivation, without composing semantics.
SynTree derivation_tree(const Derivation &d, const RuleInventory &inv);

// Top node chosen for a composed graph when the root rule has no externals:
// the first ARG/BV root by (label, outgoing roles), ties by canonical order.
// `tied` reports whether that choice needed the canonical-order tie break.
struct TopChoice {
    std::size_t index;
    bool tied;
};
std::optional<TopChoice> default_top(const SemGraph &g);

struct ExtractOptions {
    std::size_t max_boundary = 8;
    std::string rule_prefix = "r";
};

struct Extraction {
    Derivation derivation;
    std::vector<SyncRule> rules; // one per internal tree node, pre-order
};

// Decomposes a tree/graph pair into synchronous rules. Every internal tree
// node yields a rule whose fragment holds the predicates it introduces plus
// the boundary nodes of its children.
Extraction extract(const SynTree &t, const SemGraph &g, const ExtractOptions &opts = {});

// Replaces every rule by the most frequent rule sharing its CFG signature.
Derivation substitute_rules(const Derivation &d, const RuleInventory &inv, SignatureMode mode);

// One revision: an original rule id and its replacement, or nullopt for a
// rule whose semantic contribution is removed.
struct RevisionPair {
    std::string original;
    std::optional<SyncRule> modified;
};

struct Revision {
    Derivation derivation;
    RuleInventory inventory; // input inventory plus the modified rules
};

// Substitutes revised rules into d, or into `rewrite` (the modified syntax
// skeleton, written with original rule ids) when the revision changes the
// tree. Throws CompositionError on structural mismatch.
Revision apply_revision(const Derivation &d, const RuleInventory &inv, const std::vector<RevisionPair> &pairs,
                        const std::optional<Derivation> &rewrite = std::nullopt);

// Fragment standing in for a deleted semantic contribution: `arity`
// unlabelled pass-through externals.
GraphFragment empty_semantics(const SyncRule &original);

} // namespace shrg
