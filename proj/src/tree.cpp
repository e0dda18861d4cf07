#include "shrg/tree.hpp"

#include <cctype>

#include "shrg/error.hpp"

namespace shrg {

namespace {

class TreeParser {
  public:
    explicit TreeParser(std::string_view text) : text_(text) {}

    SynTree parse() {
        skip_space();
        if (pos_ >= text_.size())
            throw ParseError("empty tree", pos_);
        if (text_[pos_] != '(')
            throw ParseError("expected '('", pos_);
        SynTree t = constituent();
        skip_space();
        if (pos_ != text_.size())
            throw ParseError("trailing characters after tree", pos_);
        return t;
    }

  private:
    SynTree constituent() {
        std::size_t open = pos_;
        ++pos_; // '('
        skip_space();
        std::string label = atom();
        if (label.empty())
            throw ParseError("constituent without a label", pos_);
        std::vector<SynTree> children;
        for (;;) {
            skip_space();
            if (pos_ >= text_.size())
                throw ParseError("unbalanced bracket", open);
            char c = text_[pos_];
            if (c == ')') {
                ++pos_;
                break;
            }
            if (c == '(') {
                children.push_back(constituent());
            } else {
                children.push_back(SynTree::leaf(atom(), next_leaf_++));
            }
        }
        if (children.empty())
            throw ParseError("empty constituent '" + label + "'", open);
        return SynTree::internal(std::move(label), std::move(children));
    }

    std::string atom() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')')
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int next_leaf_ = 0;
};

void serialize_into(const SynTree &t, std::string &out) {
    if (t.is_leaf()) {
        out += t.label;
        return;
    }
    out += '(';
    out += t.label;
    for (const auto &c : t.children) {
        out += ' ';
        serialize_into(c, out);
    }
    out += ')';
}

void collect_tokens(const SynTree &t, std::vector<std::string> &out) {
    if (t.is_leaf()) {
        out.push_back(t.label);
        return;
    }
    for (const auto &c : t.children)
        collect_tokens(c, out);
}

void reindex(SynTree &t, int &next) {
    if (t.is_leaf()) {
        t.token_index = next++;
        return;
    }
    for (auto &c : t.children)
        reindex(c, next);
}

void check(const SynTree &t, int &next) {
    if (t.is_leaf()) {
        if (t.token_index != next)
            throw ValidationError("leaf '" + t.label + "' has index " + std::to_string(t.token_index) +
                                  ", expected " + std::to_string(next));
        if (!t.children.empty())
            throw ValidationError("leaf '" + t.label + "' has children");
        ++next;
        return;
    }
    if (t.label.empty())
        throw ValidationError("internal node without label");
    if (t.children.empty())
        throw ValidationError("internal node '" + t.label + "' has no children");
    for (const auto &c : t.children)
        check(c, next);
}

} // namespace

SynTree parse_tree(std::string_view text) { return TreeParser(text).parse(); }

std::string serialize_tree(const SynTree &t) {
    std::string out;
    serialize_into(t, out);
    return out;
}

std::vector<std::string> tree_tokens(const SynTree &t) {
    std::vector<std::string> out;
    collect_tokens(t, out);
    return out;
}

std::vector<Anchor> token_spans(const std::vector<std::string> &tokens) {
    std::vector<Anchor> spans;
    int offset = 0;
    for (const auto &tok : tokens) {
        int len = static_cast<int>(tok.size());
        spans.push_back(Anchor{offset, offset + len});
        offset += len + 1;
    }
    return spans;
}

void reindex_leaves(SynTree &t) {
    int next = 0;
    reindex(t, next);
}

void validate(const SynTree &t) {
    if (t.is_leaf())
        throw ValidationError("tree root must be a constituent");
    int next = 0;
    check(t, next);
}

} // namespace shrg
