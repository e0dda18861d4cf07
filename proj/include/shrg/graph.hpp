#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shrg {

using NodeId = std::string;

// Character span [start, end) into the source sentence.
struct Anchor {
    int start = 0;
    int end = 0;
    bool operator==(const Anchor &) const = default;
};

struct SemNode {
    NodeId id;
    // Predicate name. Empty only inside rule fragments, where the label is
    // supplied by whichever fragment gets fused onto this node.
    std::string label;
    std::optional<Anchor> anchor;
    bool operator==(const SemNode &) const = default;
};

struct SemEdge {
    NodeId src;
    std::string role;
    NodeId tgt;
    auto operator<=>(const SemEdge &) const = default;
};

struct SemGraph {
    std::vector<SemNode> nodes;
    std::vector<SemEdge> edges;
    std::optional<NodeId> top;

    bool operator==(const SemGraph &) const = default;

    std::optional<std::size_t> index_of(std::string_view id) const;
    bool contains(std::string_view id) const { return index_of(id).has_value(); }
    const SemNode &node(std::string_view id) const;
    bool empty() const { return nodes.empty(); }
};

enum class LabelPolicy { kRequired, kOptional };

// Throws ValidationError on a broken invariant. Returns non-fatal warnings
// (currently: disconnected graph).
std::vector<std::string> validate(const SemGraph &g, LabelPolicy labels = LabelPolicy::kRequired);

// Deterministic node order: breadth-first from top (outgoing then incoming
// neighbours), ties broken by (label, sorted outgoing roles, id). Unreached
// components restart from the smallest remaining node, preferring in-degree 0.
std::vector<std::size_t> canonical_order(const SemGraph &g);

// Renumbers nodes n0, n1, ... in canonical order and sorts the edges.
SemGraph canonicalize(const SemGraph &g);

// Exact label/role/top-preserving isomorphism test by backtracking.
// Throws SizeLimitError when either graph exceeds node_cap nodes.
bool isomorphic(const SemGraph &a, const SemGraph &b, std::size_t node_cap = 512);

// Nodes whose in-degree counting only ARG* and BV edges is zero.
std::vector<std::size_t> semantic_roots(const SemGraph &g);

// Ordering used when ids must be compared: digit runs compare numerically,
// so n2 < n10.
bool natural_less(std::string_view a, std::string_view b);

// --- hypergraph fragments -------------------------------------------------

struct NtEdge {
    std::string label;
    std::vector<NodeId> attachments;
    bool operator==(const NtEdge &) const = default;
};

// Right-hand side of an HRG rule: a graph with ordered external nodes and
// ordered nonterminal hyperedges.
struct GraphFragment {
    SemGraph graph;
    std::vector<NodeId> externals;
    std::vector<NtEdge> nt_edges;
    bool operator==(const GraphFragment &) const = default;
};

void validate(const GraphFragment &f);

// Renumbers fragment nodes in an order seeded by the externals, then the
// nonterminal attachments, then the remaining canonical order.
GraphFragment canonicalize(const GraphFragment &f);

// Isomorphism that also respects external order and nonterminal edges.
bool isomorphic(const GraphFragment &a, const GraphFragment &b, std::size_t node_cap = 512);

} // namespace shrg
