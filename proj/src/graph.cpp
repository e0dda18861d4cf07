#include "shrg/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "shrg/error.hpp"

namespace shrg {

std::optional<std::size_t> SemGraph::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id)
            return i;
    return std::nullopt;
}

const SemNode &SemGraph::node(std::string_view id) const {
    auto idx = index_of(id);
    if (!idx)
        throw ValidationError("unknown node id '" + std::string(id) + "'");
    return nodes[*idx];
}

bool natural_less(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    while (i < a.size() && j < b.size()) {
        if (is_digit(a[i]) && is_digit(b[j])) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && is_digit(a[ie]))
                ++ie;
            while (je < b.size() && is_digit(b[je]))
                ++je;
            auto da = a.substr(i, ie - i), db = b.substr(j, je - j);
            while (da.size() > 1 && da.front() == '0')
                da.remove_prefix(1);
            while (db.size() > 1 && db.front() == '0')
                db.remove_prefix(1);
            if (da.size() != db.size())
                return da.size() < db.size();
            if (da != db)
                return da < db;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j])
                return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    if ((a.size() - i) != (b.size() - j))
        return (a.size() - i) < (b.size() - j);
    return a < b;
}

namespace {

struct Adjacency {
    // (role, neighbour index)
    std::vector<std::vector<std::pair<std::string, std::size_t>>> out, in;
};

Adjacency build_adjacency(const SemGraph &g) {
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        index.emplace(g.nodes[i].id, i);
    Adjacency adj;
    adj.out.resize(g.nodes.size());
    adj.in.resize(g.nodes.size());
    for (const auto &e : g.edges) {
        auto s = index.find(e.src), t = index.find(e.tgt);
        if (s == index.end() || t == index.end())
            throw ValidationError("edge references unknown node: " + e.src + " -" + e.role + "-> " + e.tgt);
        adj.out[s->second].emplace_back(e.role, t->second);
        adj.in[t->second].emplace_back(e.role, s->second);
    }
    return adj;
}

} // namespace

std::vector<std::string> validate(const SemGraph &g, LabelPolicy labels) {
    std::set<std::string_view> ids;
    for (const auto &n : g.nodes) {
        if (n.id.empty())
            throw ValidationError("node with empty id");
        if (!ids.insert(n.id).second)
            throw ValidationError("duplicate node id '" + n.id + "'");
        if (labels == LabelPolicy::kRequired && n.label.empty())
            throw ValidationError("node '" + n.id + "' has an empty label");
        if (n.anchor && (n.anchor->start < 0 || n.anchor->start >= n.anchor->end))
            throw ValidationError("node '" + n.id + "' has an invalid anchor");
    }
    std::set<std::tuple<std::string_view, std::string_view, std::string_view>> triples;
    for (const auto &e : g.edges) {
        if (!ids.count(e.src) || !ids.count(e.tgt))
            throw ValidationError("edge references unknown node: " + e.src + " -" + e.role + "-> " + e.tgt);
        if (e.role.empty())
            throw ValidationError("edge " + e.src + " -> " + e.tgt + " has an empty role");
        if (!triples.emplace(e.src, e.role, e.tgt).second)
            throw ValidationError("duplicate edge " + e.src + " -" + e.role + "-> " + e.tgt);
    }
    if (g.top && !ids.count(*g.top))
        throw ValidationError("top '" + *g.top + "' is not a node");

    std::vector<std::string> warnings;
    if (g.nodes.size() > 1) {
        auto adj = build_adjacency(g);
        std::vector<bool> seen(g.nodes.size(), false);
        std::deque<std::size_t> queue{0};
        seen[0] = true;
        std::size_t reached = 1;
        while (!queue.empty()) {
            auto u = queue.front();
            queue.pop_front();
            for (const auto *list : {&adj.out[u], &adj.in[u]})
                for (const auto &[role, v] : *list)
                    if (!seen[v]) {
                        seen[v] = true;
                        ++reached;
                        queue.push_back(v);
                    }
        }
        if (reached != g.nodes.size())
            warnings.push_back("graph is disconnected");
    }
    return warnings;
}

std::vector<std::size_t> canonical_order(const SemGraph &g) {
    const std::size_t n = g.nodes.size();
    auto adj = build_adjacency(g);

    std::vector<std::string> out_roles(n);
    std::vector<std::size_t> in_degree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> roles;
        for (const auto &[role, v] : adj.out[i])
            roles.push_back(role);
        std::sort(roles.begin(), roles.end());
        for (const auto &r : roles) {
            out_roles[i] += r;
            out_roles[i] += '\x1f';
        }
        in_degree[i] = adj.in[i].size();
    }
    auto key_less = [&](std::size_t a, std::size_t b) {
        if (g.nodes[a].label != g.nodes[b].label)
            return g.nodes[a].label < g.nodes[b].label;
        if (out_roles[a] != out_roles[b])
            return out_roles[a] < out_roles[b];
        return natural_less(g.nodes[a].id, g.nodes[b].id);
    };
    auto neighbour_less = [&](const std::pair<std::string, std::size_t> &a,
                              const std::pair<std::string, std::size_t> &b) {
        if (a.first != b.first)
            return a.first < b.first;
        return key_less(a.second, b.second);
    };

    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<bool> queued(n, false);
    std::deque<std::size_t> queue;
    if (g.top) {
        if (auto t = g.index_of(*g.top)) {
            queue.push_back(*t);
            queued[*t] = true;
        }
    }
    while (order.size() < n) {
        if (queue.empty()) {
            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < n; ++i) {
                if (queued[i])
                    continue;
                if (!best) {
                    best = i;
                    continue;
                }
                bool root_i = in_degree[i] == 0, root_b = in_degree[*best] == 0;
                if (root_i != root_b) {
                    if (root_i)
                        best = i;
                } else if (key_less(i, *best)) {
                    best = i;
                }
            }
            queue.push_back(*best);
            queued[*best] = true;
        }
        auto u = queue.front();
        queue.pop_front();
        order.push_back(u);
        auto outs = adj.out[u];
        auto ins = adj.in[u];
        std::sort(outs.begin(), outs.end(), neighbour_less);
        std::sort(ins.begin(), ins.end(), neighbour_less);
        for (const auto *list : {&outs, &ins})
            for (const auto &[role, v] : *list)
                if (!queued[v]) {
                    queued[v] = true;
                    queue.push_back(v);
                }
    }
    return order;
}

namespace {

SemGraph renumber(const SemGraph &g, const std::vector<std::size_t> &order,
                  std::unordered_map<std::string, std::string> &rename) {
    SemGraph out;
    out.nodes.reserve(g.nodes.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto &src = g.nodes[order[k]];
        std::string id = "n" + std::to_string(k);
        rename[src.id] = id;
        out.nodes.push_back(SemNode{id, src.label, src.anchor});
    }
    std::vector<std::tuple<std::size_t, std::string, std::size_t>> keyed;
    keyed.reserve(g.edges.size());
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t k = 0; k < order.size(); ++k)
        position[g.nodes[order[k]].id] = k;
    for (const auto &e : g.edges)
        keyed.emplace_back(position.at(e.src), e.role, position.at(e.tgt));
    std::sort(keyed.begin(), keyed.end());
    for (const auto &[s, role, t] : keyed)
        out.edges.push_back(SemEdge{out.nodes[s].id, role, out.nodes[t].id});
    if (g.top)
        out.top = rename.at(*g.top);
    return out;
}

} // namespace

SemGraph canonicalize(const SemGraph &g) {
    std::unordered_map<std::string, std::string> rename;
    return renumber(g, canonical_order(g), rename);
}

std::vector<std::size_t> semantic_roots(const SemGraph &g) {
    auto adj = build_adjacency(g);
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        bool has_incoming = std::any_of(adj.in[i].begin(), adj.in[i].end(), [](const auto &p) {
            return p.first == "BV" || p.first.rfind("ARG", 0) == 0;
        });
        if (!has_incoming)
            roots.push_back(i);
    }
    return roots;
}

namespace {

// Per-node structural signature used to prune candidate pairs.
std::vector<std::string> node_signatures(const SemGraph &g, const Adjacency &adj) {
    std::vector<std::string> sig(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        std::vector<std::string> outs, ins;
        for (const auto &[r, v] : adj.out[i])
            outs.push_back(r);
        for (const auto &[r, v] : adj.in[i])
            ins.push_back(r);
        std::sort(outs.begin(), outs.end());
        std::sort(ins.begin(), ins.end());
        std::string s = g.nodes[i].label;
        s += '\x1e';
        for (const auto &r : outs)
            s += r + '\x1f';
        s += '\x1e';
        for (const auto &r : ins)
            s += r + '\x1f';
        sig[i] = std::move(s);
    }
    return sig;
}

using PairRoles = std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>>;

PairRoles pair_roles(const Adjacency &adj) {
    PairRoles roles;
    for (std::size_t u = 0; u < adj.out.size(); ++u)
        for (const auto &[r, v] : adj.out[u])
            roles[{u, v}].push_back(r);
    for (auto &[k, v] : roles)
        std::sort(v.begin(), v.end());
    return roles;
}

const std::vector<std::string> &lookup(const PairRoles &roles, std::size_t u, std::size_t v) {
    static const std::vector<std::string> none;
    auto it = roles.find({u, v});
    return it == roles.end() ? none : it->second;
}

} // namespace

bool isomorphic(const SemGraph &a, const SemGraph &b, std::size_t node_cap) {
    if (a.nodes.size() > node_cap || b.nodes.size() > node_cap)
        throw SizeLimitError("isomorphism check limited to " + std::to_string(node_cap) + " nodes");
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size())
        return false;
    if (a.top.has_value() != b.top.has_value())
        return false;
    const std::size_t n = a.nodes.size();
    auto adj_a = build_adjacency(a), adj_b = build_adjacency(b);
    auto sig_a = node_signatures(a, adj_a), sig_b = node_signatures(b, adj_b);
    {
        auto sa = sig_a, sb = sig_b;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb)
            return false;
    }
    auto roles_a = pair_roles(adj_a), roles_b = pair_roles(adj_b);

    std::vector<long> map_ab(n, -1), map_ba(n, -1);
    auto order = canonical_order(a);

    auto compatible = [&](std::size_t u, std::size_t x) {
        if (sig_a[u] != sig_b[x])
            return false;
        if (lookup(roles_a, u, u) != lookup(roles_b, x, x))
            return false;
        for (const auto &[r, w] : adj_a.out[u])
            if (map_ab[w] >= 0 && lookup(roles_a, u, w) != lookup(roles_b, x, map_ab[w]))
                return false;
        for (const auto &[r, w] : adj_a.in[u])
            if (map_ab[w] >= 0 && lookup(roles_a, w, u) != lookup(roles_b, map_ab[w], x))
                return false;
        // Edges in b between x and already-mapped nodes must have a preimage.
        for (const auto &[r, y] : adj_b.out[x])
            if (map_ba[y] >= 0 && lookup(roles_a, u, map_ba[y]).empty())
                return false;
        for (const auto &[r, y] : adj_b.in[x])
            if (map_ba[y] >= 0 && lookup(roles_a, map_ba[y], u).empty())
                return false;
        return true;
    };

    if (a.top) {
        auto ta = *a.index_of(*a.top), tb = *b.index_of(*b.top);
        if (!compatible(ta, tb))
            return false;
        map_ab[ta] = static_cast<long>(tb);
        map_ba[tb] = static_cast<long>(ta);
    }

    auto search = [&](auto &&self, std::size_t k) -> bool {
        while (k < n && map_ab[order[k]] >= 0)
            ++k;
        if (k == n)
            return true;
        auto u = order[k];
        for (std::size_t x = 0; x < n; ++x) {
            if (map_ba[x] >= 0 || !compatible(u, x))
                continue;
            map_ab[u] = static_cast<long>(x);
            map_ba[x] = static_cast<long>(u);
            if (self(self, k + 1))
                return true;
            map_ab[u] = -1;
            map_ba[x] = -1;
        }
        return false;
    };
    return search(search, 0);
}

// --- fragments ---------------------------------------------------------------

void validate(const GraphFragment &f) {
    validate(f.graph, LabelPolicy::kOptional);
    std::set<std::string_view> seen;
    for (const auto &x : f.externals) {
        if (!f.graph.contains(x))
            throw ValidationError("external '" + x + "' is not a node of the fragment");
        if (!seen.insert(x).second)
            throw ValidationError("external '" + x + "' listed twice");
    }
    for (const auto &e : f.nt_edges) {
        if (e.label.empty())
            throw ValidationError("nonterminal edge with empty label");
        std::set<std::string_view> att;
        for (const auto &x : e.attachments) {
            if (!f.graph.contains(x))
                throw ValidationError("nonterminal " + e.label + " attaches unknown node '" + x + "'");
            if (!att.insert(x).second)
                throw ValidationError("nonterminal " + e.label + " attaches node '" + x + "' twice");
        }
    }
}

GraphFragment canonicalize(const GraphFragment &f) {
    std::vector<std::size_t> order;
    std::vector<bool> placed(f.graph.nodes.size(), false);
    auto place = [&](const NodeId &id) {
        auto idx = f.graph.index_of(id);
        if (idx && !placed[*idx]) {
            placed[*idx] = true;
            order.push_back(*idx);
        }
    };
    for (const auto &x : f.externals)
        place(x);
    for (const auto &e : f.nt_edges)
        for (const auto &x : e.attachments)
            place(x);
    for (auto i : canonical_order(f.graph))
        if (!placed[i]) {
            placed[i] = true;
            order.push_back(i);
        }
    std::unordered_map<std::string, std::string> rename;
    GraphFragment out;
    out.graph = renumber(f.graph, order, rename);
    for (const auto &x : f.externals)
        out.externals.push_back(rename.at(x));
    for (const auto &e : f.nt_edges) {
        NtEdge ne{e.label, {}};
        for (const auto &x : e.attachments)
            ne.attachments.push_back(rename.at(x));
        out.nt_edges.push_back(std::move(ne));
    }
    return out;
}

namespace {

// Folds externals and nonterminal edges into plain labelled structure so the
// graph isomorphism search can compare fragments.
SemGraph encode_fragment(const GraphFragment &f) {
    SemGraph g = f.graph;
    const std::string hub = "\x01hub";
    g.nodes.push_back(SemNode{hub, "\x01fragment", std::nullopt});
    for (std::size_t k = 0; k < f.externals.size(); ++k)
        g.edges.push_back(SemEdge{hub, "\x01ext" + std::to_string(k), f.externals[k]});
    for (std::size_t i = 0; i < f.nt_edges.size(); ++i) {
        std::string id = "\x01nt" + std::to_string(i);
        g.nodes.push_back(SemNode{id, "\x01nt:" + f.nt_edges[i].label, std::nullopt});
        g.edges.push_back(SemEdge{hub, "\x01pos" + std::to_string(i), id});
        for (std::size_t k = 0; k < f.nt_edges[i].attachments.size(); ++k)
            g.edges.push_back(SemEdge{id, "\x01att" + std::to_string(k), f.nt_edges[i].attachments[k]});
    }
    g.top = hub;
    return g;
}

} // namespace

bool isomorphic(const GraphFragment &a, const GraphFragment &b, std::size_t node_cap) {
    if (a.externals.size() != b.externals.size() || a.nt_edges.size() != b.nt_edges.size())
        return false;
    if (a.graph.top.has_value() != b.graph.top.has_value())
        return false;
    return isomorphic(encode_fragment(a), encode_fragment(b), node_cap + 1 + a.nt_edges.size());
}

} // namespace shrg
