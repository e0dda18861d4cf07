#include "shrg/engine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "shrg/error.hpp"

namespace shrg {

GraphFragment replace_hyperedge(const GraphFragment &host, std::size_t nt_index, const GraphFragment &repl) {
    if (nt_index >= host.nt_edges.size())
        throw CompositionError("no nonterminal edge at index " + std::to_string(nt_index));
    const NtEdge &edge = host.nt_edges[nt_index];
    if (repl.externals.size() != edge.attachments.size())
        throw ArityError("nonterminal " + edge.label + " has " + std::to_string(edge.attachments.size()) +
                         " attachments but the replacement has " + std::to_string(repl.externals.size()) +
                         " externals");

    GraphFragment out;
    out.graph.nodes = host.graph.nodes;
    out.graph.top = host.graph.top;
    out.externals = host.externals;

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < out.graph.nodes.size(); ++i)
        index.emplace(out.graph.nodes[i].id, i);

    std::unordered_map<std::string, std::string> rename;
    for (std::size_t k = 0; k < repl.externals.size(); ++k)
        rename[repl.externals[k]] = edge.attachments[k];

    std::size_t counter = 0;
    auto fresh = [&] {
        std::string id;
        do {
            id = "v" + std::to_string(counter++);
        } while (index.count(id));
        return id;
    };

    for (const auto &n : repl.graph.nodes) {
        auto it = rename.find(n.id);
        if (it == rename.end()) {
            std::string id = fresh();
            rename[n.id] = id;
            index.emplace(id, out.graph.nodes.size());
            out.graph.nodes.push_back(SemNode{id, n.label, n.anchor});
            continue;
        }
        auto hi = index.find(it->second);
        if (hi == index.end())
            throw CompositionError("attachment '" + it->second + "' is not a node of the host");
        SemNode &target = out.graph.nodes[hi->second];
        if (!n.label.empty()) {
            if (target.label.empty())
                target.label = n.label;
            else if (target.label != n.label)
                throw LabelClashError("cannot fuse '" + target.label + "' with '" + n.label + "' at node " +
                                      target.id);
        }
        if (!target.anchor)
            target.anchor = n.anchor;
    }

    std::set<std::tuple<std::string, std::string, std::string>> seen;
    auto add_edge = [&](SemEdge e) {
        if (seen.emplace(e.src, e.role, e.tgt).second)
            out.graph.edges.push_back(std::move(e));
    };
    for (const auto &e : host.graph.edges)
        add_edge(e);
    for (const auto &e : repl.graph.edges)
        add_edge(SemEdge{rename.at(e.src), e.role, rename.at(e.tgt)});

    for (std::size_t i = 0; i < host.nt_edges.size(); ++i) {
        if (i != nt_index) {
            out.nt_edges.push_back(host.nt_edges[i]);
            continue;
        }
        for (const auto &ne : repl.nt_edges) {
            NtEdge copy{ne.label, {}};
            for (const auto &x : ne.attachments)
                copy.attachments.push_back(rename.at(x));
            out.nt_edges.push_back(std::move(copy));
        }
    }
    return out;
}

namespace {

void build_tree(const Derivation &d, const RuleInventory &inv, SynTree &out, int &next_token) {
    const auto &rule = inv.at(d.rule_id);
    auto nts = rule.nonterminals();
    if (d.children.size() != nts.size())
        validate(d, inv); // throws with the specific message
    out.label = rule.lhs;
    out.token_index = -1;
    std::size_t child = 0;
    for (const auto &s : rule.syn_rhs) {
        if (!s.is_nonterminal()) {
            out.children.push_back(SynTree::leaf(s.name, next_token++));
            continue;
        }
        const auto &cd = d.children[child++];
        const auto &crule = inv.at(cd.rule_id);
        if (crule.lhs != s.name)
            throw CompositionError("lhs mismatch: rule " + rule.id + " expects " + s.name + ", got rule " +
                                   crule.id + " with lhs " + crule.lhs);
        SynTree sub;
        build_tree(cd, inv, sub, next_token);
        out.children.push_back(std::move(sub));
    }
}

GraphFragment compose_node(const Derivation &d, const RuleInventory &inv, const std::vector<Anchor> &spans,
                           int &next_token) {
    const auto &rule = inv.at(d.rule_id);
    int first = next_token;
    std::vector<GraphFragment> parts;
    std::size_t child = 0;
    for (const auto &s : rule.syn_rhs) {
        if (!s.is_nonterminal()) {
            ++next_token;
            continue;
        }
        parts.push_back(compose_node(d.children[child++], inv, spans, next_token));
    }
    GraphFragment frag = rule.sem;
    if (next_token > first) {
        Anchor a{spans[first].start, spans[next_token - 1].end};
        for (auto &n : frag.graph.nodes)
            if (!n.label.empty() && !n.anchor)
                n.anchor = a;
    }
    for (auto &p : parts) {
        if (!p.nt_edges.empty())
            throw CompositionError("dangling nonterminal " + p.nt_edges.front().label);
        frag = replace_hyperedge(frag, 0, p);
    }
    return frag;
}

std::string sorted_out_roles(const SemGraph &g, std::size_t i) {
    std::vector<std::string> roles;
    for (const auto &e : g.edges)
        if (e.src == g.nodes[i].id)
            roles.push_back(e.role);
    std::sort(roles.begin(), roles.end());
    std::string s;
    for (const auto &r : roles)
        s += r + '\x1f';
    return s;
}

} // namespace

SynTree derivation_tree(const Derivation &d, const RuleInventory &inv) {
    SynTree t;
    int next = 0;
    build_tree(d, inv, t, next);
    return t;
}

std::optional<TopChoice> default_top(const SemGraph &g) {
    if (g.nodes.empty())
        return std::nullopt;
    SemGraph untopped = g;
    untopped.top.reset();
    auto order = canonical_order(untopped);
    std::vector<std::size_t> position(g.nodes.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        position[order[k]] = k;
    auto cands = semantic_roots(g);
    if (cands.empty()) {
        cands.resize(g.nodes.size());
        for (std::size_t i = 0; i < cands.size(); ++i)
            cands[i] = i;
    }
    std::vector<std::pair<std::string, std::string>> keys(g.nodes.size());
    for (auto c : cands)
        keys[c] = {g.nodes[c].label, sorted_out_roles(g, c)};
    std::sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b])
            return keys[a] < keys[b];
        return position[a] < position[b];
    });
    bool tied = cands.size() > 1 && keys[cands[0]] == keys[cands[1]];
    return TopChoice{cands[0], tied};
}

Composition compose(const Derivation &d, const RuleInventory &inv) {
    validate(d, inv);
    Composition result;
    result.tree = derivation_tree(d, inv);
    auto spans = token_spans(tree_tokens(result.tree));
    int next = 0;
    GraphFragment root = compose_node(d, inv, spans, next);
    if (!root.nt_edges.empty())
        throw CompositionError("dangling nonterminal " + root.nt_edges.front().label + " at the root");

    // Pass-through nodes that never received a predicate disappear; an
    // unlabelled node that still carries edges means a rule is missing.
    std::unordered_set<std::string> touched;
    for (const auto &e : root.graph.edges) {
        touched.insert(e.src);
        touched.insert(e.tgt);
    }
    SemGraph g;
    for (const auto &n : root.graph.nodes) {
        if (n.label.empty()) {
            if (touched.count(n.id))
                throw CompositionError("node " + n.id + " has edges but no predicate after composition");
            continue;
        }
        g.nodes.push_back(n);
    }
    g.edges = root.graph.edges;

    std::optional<std::string> top;
    for (const auto &x : root.externals)
        if (g.contains(x)) {
            top = x;
            break;
        }
    if (!top)
        if (auto choice = default_top(g))
            top = g.nodes[choice->index].id;
    g.top = top;
    result.graph = canonicalize(g);
    return result;
}

namespace {

struct TreeIndex {
    struct Node {
        const SynTree *tree;
        int parent;
        int depth;
        int lo, hi; // leaf token range [lo, hi)
        std::vector<int> children; // internal children, in order
        int tin, tout;
    };
    std::vector<Node> nodes;     // internal nodes, pre-order
    std::vector<int> leaf_parent; // token -> owning internal node

    int build(const SynTree &t, int parent, int depth, int &clock) {
        int me = static_cast<int>(nodes.size());
        nodes.push_back(Node{&t, parent, depth, 0, 0, {}, clock++, 0});
        int lo = -1, hi = -1;
        for (const auto &c : t.children) {
            if (c.is_leaf()) {
                if (static_cast<int>(leaf_parent.size()) <= c.token_index)
                    leaf_parent.resize(c.token_index + 1, -1);
                leaf_parent[c.token_index] = me;
                if (lo < 0)
                    lo = c.token_index;
                hi = c.token_index + 1;
            } else {
                int ci = build(c, me, depth + 1, clock);
                nodes[me].children.push_back(ci);
                if (lo < 0)
                    lo = nodes[ci].lo;
                hi = nodes[ci].hi;
            }
        }
        nodes[me].lo = lo;
        nodes[me].hi = hi;
        nodes[me].tout = clock;
        return me;
    }

    int lca(int a, int b) const {
        while (nodes[a].depth > nodes[b].depth)
            a = nodes[a].parent;
        while (nodes[b].depth > nodes[a].depth)
            b = nodes[b].parent;
        while (a != b) {
            a = nodes[a].parent;
            b = nodes[b].parent;
        }
        return a;
    }

    bool within(int inner, int outer) const {
        return nodes[outer].tin <= nodes[inner].tin && nodes[inner].tin < nodes[outer].tout;
    }
};

} // namespace

Extraction extract(const SynTree &t, const SemGraph &g, const ExtractOptions &opts) {
    validate(t);
    validate(g);
    TreeIndex ti;
    int clock = 0;
    ti.build(t, -1, 0, clock);
    auto spans = token_spans(tree_tokens(t));

    const std::size_t n = g.nodes.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i)
        index.emplace(g.nodes[i].id, i);
    std::vector<std::vector<std::pair<std::string, std::size_t>>> out(n), in(n);
    for (const auto &e : g.edges) {
        auto s = index.at(e.src), d = index.at(e.tgt);
        out[s].emplace_back(e.role, d);
        in[d].emplace_back(e.role, s);
    }

    std::vector<int> owner(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto &a = g.nodes[i].anchor;
        if (!a)
            continue;
        int first = -1, last = -1;
        for (std::size_t k = 0; k < spans.size(); ++k)
            if (spans[k].start < a->end && a->start < spans[k].end) {
                if (first < 0)
                    first = static_cast<int>(k);
                last = static_cast<int>(k);
            }
        if (first < 0)
            throw ExtractionError("anchor of node " + g.nodes[i].id + " (" + g.nodes[i].label +
                                  ") covers no token");
        int node = ti.leaf_parent[first];
        while (!(ti.nodes[node].lo <= first && ti.nodes[node].hi > last))
            node = ti.nodes[node].parent;
        owner[i] = node;
    }

    // Unanchored nodes (quantifiers, abstract relations) follow their
    // neighbours: BV target first, then dependents, then governors.
    auto order = canonical_order(g);
    auto lca_of = [&](const std::vector<std::size_t> &nodes) {
        int acc = -1;
        for (auto v : nodes)
            acc = acc < 0 ? owner[v] : ti.lca(acc, owner[v]);
        return acc;
    };
    for (;;) {
        bool progress = false;
        bool pending = false;
        for (auto u : order) {
            if (owner[u] >= 0)
                continue;
            pending = true;
            std::vector<std::size_t> cand;
            for (const auto &[r, v] : out[u])
                if (r == "BV")
                    cand.push_back(v);
            if (cand.empty())
                for (const auto &[r, v] : out[u])
                    cand.push_back(v);
            if (cand.empty())
                for (const auto &[r, v] : in[u])
                    cand.push_back(v);
            if (cand.empty())
                continue;
            if (std::all_of(cand.begin(), cand.end(), [&](std::size_t v) { return owner[v] >= 0; })) {
                owner[u] = lca_of(cand);
                progress = true;
            }
        }
        if (!pending)
            break;
        if (progress)
            continue;
        // Stuck on a cycle of unanchored nodes: settle the first one that
        // touches anything already placed.
        for (auto u : order) {
            if (owner[u] >= 0)
                continue;
            std::vector<std::size_t> placed;
            for (const auto *list : {&out[u], &in[u]})
                for (const auto &[r, v] : *list)
                    if (owner[v] >= 0)
                        placed.push_back(v);
            if (!placed.empty()) {
                owner[u] = lca_of(placed);
                progress = true;
                break;
            }
        }
        if (!progress) {
            for (auto u : order)
                if (owner[u] < 0)
                    throw ExtractionError("unanchorable node " + g.nodes[u].id + " (" + g.nodes[u].label + ")");
        }
    }

    std::vector<std::size_t> position(n);
    for (std::size_t k = 0; k < order.size(); ++k)
        position[order[k]] = k;

    const std::size_t m = ti.nodes.size();
    std::vector<std::vector<std::size_t>> own(m);
    for (auto u : order)
        own[owner[u]].push_back(u);

    // A top the composer would not pick by itself is pinned as the root's
    // external, so it must surface through every constituent above its owner.
    std::optional<std::size_t> pinned_top;
    if (g.top) {
        auto top = index.at(*g.top);
        auto choice = default_top(g);
        if (!choice || choice->index != top || choice->tied)
            pinned_top = top;
    }

    std::vector<std::vector<std::size_t>> externals(m);
    for (std::size_t tn = 0; tn < m; ++tn) {
        for (auto u : order) {
            if (!ti.within(owner[u], static_cast<int>(tn)))
                continue;
            bool crossing = tn != 0 && pinned_top == u;
            for (const auto *list : {&out[u], &in[u]})
                for (const auto &[r, v] : *list)
                    if (!ti.within(owner[v], static_cast<int>(tn)))
                        crossing = true;
            if (crossing)
                externals[tn].push_back(u);
        }
        if (externals[tn].size() > opts.max_boundary)
            throw ExtractionError("constituent " + ti.nodes[tn].tree->label + " has " +
                                  std::to_string(externals[tn].size()) + " boundary nodes (limit " +
                                  std::to_string(opts.max_boundary) + ")");
    }
    if (pinned_top)
        externals[0] = {*pinned_top};

    std::vector<std::vector<const SemEdge *>> edges_of(m);
    for (const auto &e : g.edges) {
        int o = ti.lca(owner[index.at(e.src)], owner[index.at(e.tgt)]);
        edges_of[o].push_back(&e);
    }

    Extraction result;
    result.rules.resize(m);
    for (std::size_t tn = 0; tn < m; ++tn) {
        const auto &node = ti.nodes[tn];
        SyncRule &rule = result.rules[tn];
        rule.id = opts.rule_prefix + std::to_string(tn);
        rule.lhs = node.tree->label;
        rule.count = 1;
        for (const auto &c : node.tree->children)
            rule.syn_rhs.push_back(c.is_leaf() ? Symbol::t(c.label) : Symbol::nt(c.label));

        GraphFragment f;
        std::set<std::size_t> present;
        for (auto u : own[tn]) {
            f.graph.nodes.push_back(SemNode{g.nodes[u].id, g.nodes[u].label, std::nullopt});
            present.insert(u);
        }
        for (int c : node.children)
            for (auto u : externals[c])
                if (present.insert(u).second)
                    f.graph.nodes.push_back(SemNode{g.nodes[u].id, "", std::nullopt});
        for (const auto *e : edges_of[tn])
            f.graph.edges.push_back(*e);
        for (auto u : externals[tn]) {
            if (!present.count(u))
                throw ExtractionError("boundary node " + g.nodes[u].id + " missing from constituent " +
                                      node.tree->label);
            f.externals.push_back(g.nodes[u].id);
        }
        for (int c : node.children) {
            NtEdge ne{ti.nodes[c].tree->label, {}};
            for (auto u : externals[c])
                ne.attachments.push_back(g.nodes[u].id);
            f.nt_edges.push_back(std::move(ne));
        }
        rule.sem = canonicalize(f);
    }

    std::function<Derivation(int)> build = [&](int tn) {
        Derivation d{result.rules[tn].id, {}};
        for (int c : ti.nodes[tn].children)
            d.children.push_back(build(c));
        return d;
    };
    result.derivation = build(0);
    return result;
}

Derivation substitute_rules(const Derivation &d, const RuleInventory &inv, SignatureMode mode) {
    const auto &rule = inv.at(d.rule_id);
    const auto &bucket = inv.bucket(cfg_signature(rule, mode), mode);
    Derivation out{d.rule_id, {}};
    if (!bucket.empty() && inv.at(bucket.front()).count > rule.count)
        out.rule_id = bucket.front();
    for (const auto &c : d.children)
        out.children.push_back(substitute_rules(c, inv, mode));
    return out;
}

GraphFragment empty_semantics(const SyncRule &original) {
    GraphFragment f;
    for (std::size_t k = 0; k < original.sem.externals.size(); ++k) {
        std::string id = "e" + std::to_string(k);
        f.graph.nodes.push_back(SemNode{id, "", std::nullopt});
        f.externals.push_back(id);
    }
    for (const auto &nt : original.nonterminals())
        f.nt_edges.push_back(NtEdge{nt, f.externals});
    return f;
}

Revision apply_revision(const Derivation &d, const RuleInventory &inv, const std::vector<RevisionPair> &pairs,
                        const std::optional<Derivation> &rewrite) {
    std::map<std::string, std::string> replace;
    std::vector<SyncRule> added;
    for (const auto &p : pairs) {
        const auto &orig = inv.at(p.original);
        SyncRule r;
        if (p.modified) {
            r = *p.modified;
        } else {
            r.id = orig.id + "~empty";
            r.lhs = orig.lhs;
            r.syn_rhs = orig.syn_rhs;
            r.sem = empty_semantics(orig);
            r.count = 0;
        }
        if (inv.find(r.id))
            throw CompositionError("revised rule id '" + r.id + "' already exists in the inventory");
        if (!rewrite && (r.lhs != orig.lhs || r.nonterminals() != orig.nonterminals()))
            throw CompositionError("structural mismatch: revision of rule " + orig.id +
                                   " changes its syntax; a rewritten derivation is required");
        if (!replace.emplace(orig.id, r.id).second)
            throw CompositionError("rule " + orig.id + " revised twice");
        added.push_back(std::move(r));
    }

    Revision out{Derivation{}, inv.with_rules(std::move(added))};
    std::function<Derivation(const Derivation &)> swap = [&](const Derivation &node) {
        Derivation r{node.rule_id, {}};
        if (auto it = replace.find(node.rule_id); it != replace.end())
            r.rule_id = it->second;
        for (const auto &c : node.children)
            r.children.push_back(swap(c));
        return r;
    };
    out.derivation = swap(rewrite ? *rewrite : d);
    validate(out.derivation, out.inventory);
    return out;
}

} // namespace shrg
