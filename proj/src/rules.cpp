#include "shrg/rules.hpp"

#include <algorithm>
#include <cctype>

#include "shrg/error.hpp"

namespace shrg {

std::vector<std::string> SyncRule::nonterminals() const {
    std::vector<std::string> out;
    for (const auto &s : syn_rhs)
        if (s.is_nonterminal())
            out.push_back(s.name);
    return out;
}

void validate(const SyncRule &r) {
    if (r.id.empty())
        throw ValidationError("rule with empty id");
    if (r.lhs.empty())
        throw ValidationError("rule " + r.id + ": empty lhs");
    if (r.syn_rhs.empty())
        throw ValidationError("rule " + r.id + ": syntactic rhs must have at least one symbol");
    for (const auto &s : r.syn_rhs)
        if (s.name.empty())
            throw ValidationError("rule " + r.id + ": empty rhs symbol");
    if (r.count < 0)
        throw ValidationError("rule " + r.id + ": negative count");
    try {
        validate(r.sem);
    } catch (const ValidationError &e) {
        throw ValidationError("rule " + r.id + ": " + e.what());
    }
    auto nts = r.nonterminals();
    if (nts.size() != r.sem.nt_edges.size())
        throw ValidationError("rule " + r.id + ": " + std::to_string(nts.size()) + " syntactic nonterminals but " +
                              std::to_string(r.sem.nt_edges.size()) + " nonterminal edges");
    for (std::size_t i = 0; i < nts.size(); ++i)
        if (nts[i] != r.sem.nt_edges[i].label)
            throw ValidationError("rule " + r.id + ": nonterminal " + std::to_string(i) + " is " + nts[i] +
                                  " in syntax but " + r.sem.nt_edges[i].label + " in semantics");
}

std::string to_string(SignatureMode mode) { return mode == SignatureMode::kDelexicalized ? "delex" : "lex"; }

SignatureMode parse_signature_mode(std::string_view s) {
    if (s == "delex")
        return SignatureMode::kDelexicalized;
    if (s == "lex")
        return SignatureMode::kLexicalized;
    throw ValidationError("unknown signature mode '" + std::string(s) + "' (expected delex or lex)");
}

bool is_punctuation_token(std::string_view token) {
    if (token.empty())
        return false;
    return std::all_of(token.begin(), token.end(), [](char c) { return std::ispunct(static_cast<unsigned char>(c)); });
}

std::string cfg_signature(const SyncRule &r, SignatureMode mode) {
    if (r.syn_rhs.empty())
        throw ValidationError("rule " + r.id + ": syntactic rhs must have at least one symbol");
    std::string out = r.lhs + " ->";
    bool first = true;
    for (const auto &s : r.syn_rhs) {
        out += first ? " " : " + ";
        first = false;
        if (s.is_nonterminal())
            out += s.name;
        else if (mode == SignatureMode::kLexicalized)
            out += "{" + s.name + "}";
        else if (is_punctuation_token(s.name))
            out += "punct";
        else
            out += "{X}";
    }
    return out;
}

bool is_lexical_signature(std::string_view signature) {
    auto arrow = signature.find(" -> ");
    if (arrow == std::string_view::npos)
        return false;
    auto rhs = signature.substr(arrow + 4);
    std::vector<std::string_view> parts;
    for (;;) {
        auto plus = rhs.find(" + ");
        parts.push_back(rhs.substr(0, plus));
        if (plus == std::string_view::npos)
            break;
        rhs.remove_prefix(plus + 3);
    }
    auto terminal = [](std::string_view p) {
        return p == "punct" || (p.size() >= 2 && p.front() == '{' && p.back() == '}');
    };
    if (std::all_of(parts.begin(), parts.end(), terminal))
        return true;
    return parts.size() == 2 && (parts[0] == "punct" || parts[1] == "punct");
}

RuleInventory::RuleInventory(std::vector<SyncRule> rules, SignatureMode mode) : rules_(std::move(rules)), mode_(mode) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        validate(rules_[i]);
        if (!index_.emplace(rules_[i].id, i).second)
            throw ValidationError("duplicate rule id '" + rules_[i].id + "'");
    }
    for (int m = 0; m < 2; ++m) {
        auto sig_mode = static_cast<SignatureMode>(m);
        for (const auto &r : rules_)
            by_signature_[m][cfg_signature(r, sig_mode)].push_back(r.id);
        for (auto &[sig, ids] : by_signature_[m])
            std::sort(ids.begin(), ids.end(), [&](const std::string &a, const std::string &b) {
                auto ca = rules_[index_.find(a)->second].count, cb = rules_[index_.find(b)->second].count;
                if (ca != cb)
                    return ca > cb;
                return natural_less(a, b);
            });
    }
}

const SyncRule *RuleInventory::find(std::string_view id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &rules_[it->second];
}

const SyncRule &RuleInventory::at(std::string_view id) const {
    if (const auto *r = find(id))
        return *r;
    throw CompositionError("unknown rule id '" + std::string(id) + "'");
}

const std::vector<std::string> &RuleInventory::bucket(std::string_view signature) const {
    return bucket(signature, mode_);
}

const std::vector<std::string> &RuleInventory::bucket(std::string_view signature, SignatureMode mode) const {
    static const std::vector<std::string> none;
    const auto &index = by_signature_[static_cast<int>(mode)];
    auto it = index.find(signature);
    return it == index.end() ? none : it->second;
}

RuleInventory RuleInventory::with_rules(std::vector<SyncRule> extra) const {
    auto all = rules_;
    for (auto &r : extra)
        all.push_back(std::move(r));
    return RuleInventory(std::move(all), mode_);
}

std::size_t DerivationNode::size() const {
    std::size_t n = 1;
    for (const auto &c : children)
        n += c.size();
    return n;
}

void validate(const Derivation &d, const RuleInventory &inv) {
    const auto &rule = inv.at(d.rule_id);
    auto nts = rule.nonterminals();
    if (d.children.size() < nts.size())
        throw CompositionError("dangling nonterminal: rule " + rule.id + " expects " + std::to_string(nts.size()) +
                               " children, derivation has " + std::to_string(d.children.size()));
    if (d.children.size() > nts.size())
        throw CompositionError("rule " + rule.id + " expects " + std::to_string(nts.size()) +
                               " children, derivation has " + std::to_string(d.children.size()));
    for (std::size_t i = 0; i < nts.size(); ++i) {
        const auto &child = inv.at(d.children[i].rule_id);
        if (child.lhs != nts[i])
            throw CompositionError("lhs mismatch: rule " + rule.id + " expects " + nts[i] + " at position " +
                                   std::to_string(i) + ", got rule " + child.id + " with lhs " + child.lhs);
        validate(d.children[i], inv);
    }
}

} // namespace shrg
