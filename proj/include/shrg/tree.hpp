#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "shrg/graph.hpp"

namespace shrg {

// Constituency tree. Internal nodes carry a nonterminal label and a non-empty
// child list; leaves carry a token and its position in the sentence.
struct SynTree {
    std::string label; // nonterminal, or the token for a leaf
    std::vector<SynTree> children;
    int token_index = -1; // >= 0 exactly for leaves

    bool is_leaf() const { return token_index >= 0; }
    bool operator==(const SynTree &) const = default;

    static SynTree leaf(std::string token, int index) { return SynTree{std::move(token), {}, index}; }
    static SynTree internal(std::string label, std::vector<SynTree> children) {
        return SynTree{std::move(label), std::move(children), -1};
    }
};

// `(S (NP (N I)) (VP (V sleep)))`. Any whitespace separates constituents;
// tokens may not contain whitespace or parentheses.
SynTree parse_tree(std::string_view text);
std::string serialize_tree(const SynTree &t);

std::vector<std::string> tree_tokens(const SynTree &t);

// Character span of every token when tokens are joined by single spaces.
std::vector<Anchor> token_spans(const std::vector<std::string> &tokens);

// Re-numbers leaves 0,1,2,... left to right.
void reindex_leaves(SynTree &t);

// Checks internal/leaf shape and contiguous leaf numbering.
void validate(const SynTree &t);

} // namespace shrg
