#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "shrg/graph.hpp"

namespace shrg {

struct TripleSet {
    std::vector<std::pair<NodeId, std::string>> instances;            // (node, label)
    std::vector<std::tuple<NodeId, std::string, NodeId>> relations;   // (src, role, tgt)
    // zero or one entry; it matches only a top node carrying the same label
    std::vector<NodeId> top;

    std::size_t size() const { return instances.size() + relations.size() + top.size(); }
};

TripleSet to_triples(const SemGraph &g, bool include_top = true);

struct SmatchOptions {
    int restarts = 16;
    std::uint64_t seed = 0;
    bool include_top = true;
};

struct SmatchResult {
    std::size_t matched = 0;
    std::size_t cand_triples = 0;
    std::size_t ref_triples = 0;
    double precision = 0, recall = 0, f1 = 0;
    std::vector<std::pair<NodeId, NodeId>> mapping; // candidate -> reference
};

// Hill climbing over injective candidate->reference node maps.
SmatchResult score(const SemGraph &cand, const SemGraph &ref, const SmatchOptions &opts = {});

// Exhaustive search; throws SizeLimitError when both graphs exceed 9 nodes.
SmatchResult oracle_score(const SemGraph &cand, const SemGraph &ref, bool include_top = true);

// Seed for one record of a batch, independent of batch order and thread count.
std::uint64_t record_seed(std::uint64_t seed, std::string_view id);

} // namespace shrg
