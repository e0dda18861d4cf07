#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shrg/graph.hpp"

namespace shrg {

struct Symbol {
    enum class Kind { kNonterminal, kTerminal };
    Kind kind = Kind::kNonterminal;
    std::string name;

    bool is_nonterminal() const { return kind == Kind::kNonterminal; }
    bool operator==(const Symbol &) const = default;

    static Symbol nt(std::string name) { return Symbol{Kind::kNonterminal, std::move(name)}; }
    static Symbol t(std::string token) { return Symbol{Kind::kTerminal, std::move(token)}; }
};

// A CFG production A -> beta synchronised with an HRG fragment. The i-th
// nonterminal of syn_rhs is aligned with the i-th nonterminal edge of sem.
struct SyncRule {
    std::string id;
    std::string lhs;
    std::vector<Symbol> syn_rhs;
    GraphFragment sem;
    std::int64_t count = 0;

    bool operator==(const SyncRule &) const = default;
    std::vector<std::string> nonterminals() const;
};

void validate(const SyncRule &r);

enum class SignatureMode { kDelexicalized, kLexicalized };

std::string to_string(SignatureMode mode);
SignatureMode parse_signature_mode(std::string_view s); // "delex" | "lex"

// `LHS -> s1 + s2 + ...`. Terminals render as `{token}` (lexicalized) or
// `{X}` (delexicalized); punctuation-only terminals render as `punct` in
// delexicalized mode.
std::string cfg_signature(const SyncRule &r, SignatureMode mode);

bool is_punctuation_token(std::string_view token);

// Signatures made of a single lexical node, or a single symbol plus a
// punctuation mark.
bool is_lexical_signature(std::string_view signature);

// Immutable id-indexed rule collection with a signature index whose buckets
// are ordered by (count descending, id ascending).
class RuleInventory {
  public:
    RuleInventory() = default;
    RuleInventory(std::vector<SyncRule> rules, SignatureMode mode);

    SignatureMode mode() const { return mode_; }
    const std::vector<SyncRule> &rules() const { return rules_; }
    std::size_t size() const { return rules_.size(); }

    const SyncRule *find(std::string_view id) const;
    const SyncRule &at(std::string_view id) const; // throws CompositionError
    // Rule ids sharing a signature; the mode defaults to the inventory's own.
    const std::vector<std::string> &bucket(std::string_view signature) const;
    const std::vector<std::string> &bucket(std::string_view signature, SignatureMode mode) const;
    const std::map<std::string, std::vector<std::string>, std::less<>> &by_signature() const {
        return by_signature_[static_cast<int>(mode_)];
    }

    // Copy with extra rules appended (ids must be new).
    RuleInventory with_rules(std::vector<SyncRule> extra) const;

  private:
    std::vector<SyncRule> rules_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::map<std::string, std::vector<std::string>, std::less<>> by_signature_[2];
    SignatureMode mode_ = SignatureMode::kDelexicalized;
};

// Tree of rule applications; one child per nonterminal of the rule, in order.
struct DerivationNode {
    std::string rule_id;
    std::vector<DerivationNode> children;

    bool operator==(const DerivationNode &) const = default;
    std::size_t size() const;
};

using Derivation = DerivationNode;

// Checks lhs/nonterminal alignment of every node against the inventory.
void validate(const Derivation &d, const RuleInventory &inv);

} // namespace shrg
