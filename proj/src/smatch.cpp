#include "shrg/smatch.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "shrg/error.hpp"

namespace shrg {

TripleSet to_triples(const SemGraph &g, bool include_top) {
    TripleSet t;
    for (const auto &n : g.nodes)
        t.instances.emplace_back(n.id, n.label);
    for (const auto &e : g.edges)
        t.relations.emplace_back(e.src, e.role, e.tgt);
    if (include_top && g.top)
        t.top.push_back(*g.top);
    return t;
}

std::uint64_t record_seed(std::uint64_t seed, std::string_view id) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    // splitmix64 finaliser
    std::uint64_t z = seed ^ h;
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

// Both graphs as integers, nodes in canonical order, so that the search
// never depends on input id spelling.
struct Side {
    std::vector<std::size_t> order; // position -> index in the original graph
    std::vector<int> label;
    std::vector<std::tuple<int, int, int>> edges; // (src, role, tgt) positions
    int top = -1;
    std::string key;
};

struct Interner {
    std::unordered_map<std::string, int> ids;
    int operator()(const std::string &s) { return ids.emplace(s, static_cast<int>(ids.size())).first->second; }
};

Side make_side(const SemGraph &g, bool include_top, Interner &labels, Interner &roles) {
    Side s;
    s.order = canonical_order(g);
    std::vector<int> pos(g.nodes.size());
    for (std::size_t k = 0; k < s.order.size(); ++k)
        pos[s.order[k]] = static_cast<int>(k);
    std::unordered_map<std::string_view, int> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        index.emplace(g.nodes[i].id, pos[i]);
    for (auto i : s.order) {
        s.label.push_back(labels(g.nodes[i].label));
        s.key += g.nodes[i].label;
        s.key += '\x1f';
    }
    std::vector<std::tuple<int, std::string, int>> named;
    for (const auto &e : g.edges) {
        named.emplace_back(index.at(e.src), e.role, index.at(e.tgt));
    }
    std::sort(named.begin(), named.end());
    for (const auto &[a, r, b] : named) {
        s.edges.emplace_back(a, roles(r), b);
        s.key += std::to_string(a) + ' ' + r + ' ' + std::to_string(b) + '\x1e';
    }
    if (include_top && g.top) {
        s.top = index.at(*g.top);
        s.key += "top " + std::to_string(s.top);
    }
    return s;
}

class Matcher {
  public:
    Matcher(const Side &a, const Side &b) : a_(a), b_(b), na_(a.label.size()), nb_(b.label.size()) {
        incident_.resize(na_);
        for (std::size_t e = 0; e < a_.edges.size(); ++e) {
            auto [s, r, t] = a_.edges[e];
            incident_[s].push_back(e);
            if (t != s)
                incident_[t].push_back(e);
        }
        for (const auto &[s, r, t] : b_.edges)
            b_edges_.insert(key(s, r, t));
        stamp_.assign(a_.edges.size(), 0);
    }

    std::size_t total(const std::vector<int> &map) const {
        std::size_t m = 0;
        for (std::size_t i = 0; i < na_; ++i)
            if (map[i] >= 0 && a_.label[i] == b_.label[map[i]])
                ++m;
        for (const auto &[s, r, t] : a_.edges)
            if (map[s] >= 0 && map[t] >= 0 && b_edges_.count(key(map[s], r, map[t])))
                ++m;
        if (a_.top >= 0 && b_.top >= 0 && map[a_.top] == b_.top && a_.label[a_.top] == b_.label[b_.top])
            ++m;
        return m;
    }

    std::size_t climb(std::vector<int> &map) {
        std::vector<int> inv(nb_, -1);
        for (std::size_t i = 0; i < na_; ++i)
            if (map[i] >= 0)
                inv[map[i]] = static_cast<int>(i);
        for (;;) {
            long best = 0;
            int bi = -1, bj = -2;
            for (std::size_t i = 0; i < na_; ++i) {
                for (int j = -1; j < static_cast<int>(nb_); ++j) {
                    if (j == map[i])
                        continue;
                    long d;
                    if (j >= 0 && inv[j] >= 0)
                        d = swap_delta(map, static_cast<int>(i), inv[j]);
                    else
                        d = move_delta(map, static_cast<int>(i), j);
                    if (d > best) {
                        best = d;
                        bi = static_cast<int>(i);
                        bj = j;
                    }
                }
            }
            if (best <= 0)
                break;
            if (bj >= 0 && inv[bj] >= 0) {
                int k = inv[bj];
                int old = map[bi];
                map[k] = old;
                map[bi] = bj;
                inv[bj] = bi;
                if (old >= 0)
                    inv[old] = k;
            } else {
                if (map[bi] >= 0)
                    inv[map[bi]] = -1;
                map[bi] = bj;
                if (bj >= 0)
                    inv[bj] = bi;
            }
        }
        return total(map);
    }

    std::vector<int> smart_init() const {
        std::vector<int> map(na_, -1);
        std::vector<bool> used(nb_, false);
        if (a_.top >= 0 && b_.top >= 0 && a_.label[a_.top] == b_.label[b_.top]) {
            map[a_.top] = b_.top;
            used[b_.top] = true;
        }
        for (std::size_t i = 0; i < na_; ++i) {
            if (map[i] >= 0)
                continue;
            for (std::size_t j = 0; j < nb_; ++j)
                if (!used[j] && a_.label[i] == b_.label[j]) {
                    map[i] = static_cast<int>(j);
                    used[j] = true;
                    break;
                }
        }
        return map;
    }

    std::vector<int> random_init(std::mt19937_64 &rng) const {
        std::vector<int> map(na_, -1);
        std::vector<bool> used(nb_, false);
        std::vector<std::size_t> order(na_);
        for (std::size_t i = 0; i < na_; ++i)
            order[i] = i;
        for (std::size_t i = na_; i > 1; --i)
            std::swap(order[i - 1], order[rng() % i]);
        for (auto i : order) {
            std::vector<int> same, any;
            for (std::size_t j = 0; j < nb_; ++j)
                if (!used[j]) {
                    any.push_back(static_cast<int>(j));
                    if (a_.label[i] == b_.label[j])
                        same.push_back(static_cast<int>(j));
                }
            int pick = -1;
            if (!same.empty())
                pick = same[rng() % same.size()];
            else if (!any.empty() && rng() % 2)
                pick = any[rng() % any.size()];
            if (pick >= 0) {
                map[i] = pick;
                used[pick] = true;
            }
        }
        return map;
    }

  private:
    std::uint64_t key(int s, int r, int t) const {
        return (static_cast<std::uint64_t>(s) * (nb_ + 1) + static_cast<std::uint64_t>(t)) * 1000003ull +
               static_cast<std::uint64_t>(r);
    }

    // Triples touching the given nodes under `map`, each counted once.
    long local(const std::vector<int> &map, int x, int y) {
        ++clock_;
        long m = 0;
        for (int v : {x, y}) {
            if (v < 0)
                continue;
            if (map[v] >= 0 && a_.label[v] == b_.label[map[v]])
                ++m;
            if (v == a_.top && b_.top >= 0 && map[v] == b_.top && a_.label[v] == b_.label[b_.top])
                ++m;
            for (auto e : incident_[v]) {
                if (stamp_[e] == clock_)
                    continue;
                stamp_[e] = clock_;
                auto [s, r, t] = a_.edges[e];
                if (map[s] >= 0 && map[t] >= 0 && b_edges_.count(key(map[s], r, map[t])))
                    ++m;
            }
        }
        return m;
    }

    long move_delta(std::vector<int> &map, int i, int j) {
        long before = local(map, i, -1);
        int old = map[i];
        map[i] = j;
        long after = local(map, i, -1);
        map[i] = old;
        return after - before;
    }

    long swap_delta(std::vector<int> &map, int i, int k) {
        long before = local(map, i, k);
        std::swap(map[i], map[k]);
        long after = local(map, i, k);
        std::swap(map[i], map[k]);
        return after - before;
    }

    const Side &a_, &b_;
    std::size_t na_, nb_;
    std::vector<std::vector<std::size_t>> incident_;
    std::unordered_set<std::uint64_t> b_edges_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t clock_ = 0;
};

void finish(SmatchResult &r) {
    if (r.cand_triples == 0 && r.ref_triples == 0) {
        r.precision = r.recall = r.f1 = 1.0;
        return;
    }
    r.precision = r.cand_triples ? static_cast<double>(r.matched) / static_cast<double>(r.cand_triples) : 0.0;
    r.recall = r.ref_triples ? static_cast<double>(r.matched) / static_cast<double>(r.ref_triples) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
}

struct Oriented {
    Side cand, ref;
    bool flipped; // search runs ref -> cand
};

Oriented orient(const SemGraph &cand, const SemGraph &ref, bool include_top) {
    Interner labels, roles;
    Oriented o{make_side(cand, include_top, labels, roles), make_side(ref, include_top, labels, roles), false};
    // Always search from the smaller (then lexically smaller) graph; this
    // makes f1 exactly symmetric.
    auto size_a = o.cand.label.size(), size_b = o.ref.label.size();
    o.flipped = size_b < size_a || (size_a == size_b && o.ref.key < o.cand.key);
    return o;
}

SmatchResult assemble(const SemGraph &cand, const SemGraph &ref, const Oriented &o, const std::vector<int> &map,
                      std::size_t matched, bool include_top) {
    SmatchResult r;
    r.matched = matched;
    r.cand_triples = to_triples(cand, include_top).size();
    r.ref_triples = to_triples(ref, include_top).size();
    const Side &from = o.flipped ? o.ref : o.cand;
    const Side &to = o.flipped ? o.cand : o.ref;
    const SemGraph &gfrom = o.flipped ? ref : cand;
    const SemGraph &gto = o.flipped ? cand : ref;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (map[i] < 0)
            continue;
        const auto &x = gfrom.nodes[from.order[i]].id;
        const auto &y = gto.nodes[to.order[map[i]]].id;
        if (o.flipped)
            r.mapping.emplace_back(y, x);
        else
            r.mapping.emplace_back(x, y);
    }
    std::sort(r.mapping.begin(), r.mapping.end());
    finish(r);
    return r;
}

} // namespace

SmatchResult score(const SemGraph &cand, const SemGraph &ref, const SmatchOptions &opts) {
    if (opts.restarts < 1)
        throw ValidationError("restarts must be at least 1");
    auto o = orient(cand, ref, opts.include_top);
    const Side &from = o.flipped ? o.ref : o.cand;
    const Side &to = o.flipped ? o.cand : o.ref;
    Matcher m(from, to);
    std::mt19937_64 rng(opts.seed);

    auto best_map = m.smart_init();
    auto best = m.climb(best_map);
    std::size_t ceiling = std::min(to_triples(cand, opts.include_top).size(), to_triples(ref, opts.include_top).size());
    for (int k = 1; k < opts.restarts && best < ceiling; ++k) {
        auto map = m.random_init(rng);
        auto got = m.climb(map);
        if (got > best) {
            best = got;
            best_map = std::move(map);
        }
    }
    return assemble(cand, ref, o, best_map, best, opts.include_top);
}

SmatchResult oracle_score(const SemGraph &cand, const SemGraph &ref, bool include_top) {
    if (std::min(cand.nodes.size(), ref.nodes.size()) > 9)
        throw SizeLimitError("exact S-match limited to graphs of at most 9 nodes on the smaller side");
    auto o = orient(cand, ref, include_top);
    const Side &from = o.flipped ? o.ref : o.cand;
    const Side &to = o.flipped ? o.cand : o.ref;
    const std::size_t na = from.label.size(), nb = to.label.size();

    std::set<std::tuple<int, int, int>> to_edges(to.edges.begin(), to.edges.end());
    std::vector<std::vector<std::size_t>> edges_closed_at(na); // edge decided once its later endpoint is assigned
    for (std::size_t e = 0; e < from.edges.size(); ++e) {
        auto [s, r, t] = from.edges[e];
        edges_closed_at[std::max(s, t)].push_back(e);
    }
    std::vector<int> remaining_after(na + 1, 0); // optimistic triples for nodes >= i
    for (std::size_t i = na; i-- > 0;) {
        int extra = 1 + static_cast<int>(edges_closed_at[i].size()) + (static_cast<int>(i) == from.top ? 1 : 0);
        remaining_after[i] = remaining_after[i + 1] + extra;
    }

    std::vector<int> map(na, -1), best_map(na, -1);
    std::vector<bool> used(nb, false);
    long best = -1;
    auto dfs = [&](auto &&self, std::size_t i, long got) -> void {
        if (got + remaining_after[i] <= best)
            return;
        if (i == na) {
            best = got;
            best_map = map;
            return;
        }
        for (int j = 0; j <= static_cast<int>(nb); ++j) {
            int target = j == static_cast<int>(nb) ? -1 : j;
            if (target >= 0 && used[target])
                continue;
            map[i] = target;
            long gain = 0;
            if (target >= 0) {
                if (from.label[i] == to.label[target])
                    ++gain;
                if (static_cast<int>(i) == from.top && target == to.top && from.label[i] == to.label[target])
                    ++gain;
                used[target] = true;
            }
            for (auto e : edges_closed_at[i]) {
                auto [s, r, t] = from.edges[e];
                if (map[s] >= 0 && map[t] >= 0 && to_edges.count({map[s], r, map[t]}))
                    ++gain;
            }
            self(self, i + 1, got + gain);
            if (target >= 0)
                used[target] = false;
            map[i] = -1;
        }
    };
    dfs(dfs, 0, 0);
    return assemble(cand, ref, o, best_map, static_cast<std::size_t>(std::max(best, 0L)), include_top);
}

} // namespace shrg
