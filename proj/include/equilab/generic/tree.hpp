#pragma once

#include <equilab/exact/subspace.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace equilab {

class TreeShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rooted tree whose leaves carry slot indices and whose internal nodes are
/// labelled sum or intersect. Text form: a leaf is its slot number, an
/// internal node is S(...) or I(...), e.g. "S(I(0,1),2)".
struct TreeOp {
    enum class Kind { leaf, sum, intersect };
    Kind kind = Kind::leaf;
    std::size_t slot = 0;
    std::vector<TreeOp> children;

    static TreeOp leaf(std::size_t slot) { return TreeOp{Kind::leaf, slot, {}}; }
    static TreeOp sum(std::vector<TreeOp> c) { return make(Kind::sum, std::move(c)); }
    static TreeOp intersect(std::vector<TreeOp> c) { return make(Kind::intersect, std::move(c)); }

    /// Root of the given kind directly over leaves 0..count-1.
    static TreeOp star(Kind k, std::size_t count) {
        std::vector<TreeOp> c;
        for (std::size_t i = 0; i < count; ++i) c.push_back(leaf(i));
        return make(k, std::move(c));
    }

    [[nodiscard]] std::size_t height() const {
        std::size_t h = 0;
        for (const auto& c : children) h = std::max(h, c.height());
        return h + 1;
    }

    void collect_slots(std::vector<std::size_t>& out) const {
        if (kind == Kind::leaf) out.push_back(slot);
        for (const auto& c : children) c.collect_slots(out);
    }

    /// Number of leaf slots (slots must be exactly 0..count-1, each used once).
    [[nodiscard]] std::size_t leaf_count() const {
        std::vector<std::size_t> s;
        collect_slots(s);
        std::set<std::size_t> uniq(s.begin(), s.end());
        if (uniq.size() != s.size()) throw TreeShapeError("tree uses a leaf slot twice");
        if (!s.empty() && *uniq.rbegin() + 1 != s.size()) throw TreeShapeError("leaf slots must be 0..count-1");
        return s.size();
    }

    [[nodiscard]] std::string to_string() const {
        if (kind == Kind::leaf) return std::to_string(slot);
        std::string s = kind == Kind::sum ? "S(" : "I(";
        for (std::size_t i = 0; i < children.size(); ++i) s += (i ? "," : "") + children[i].to_string();
        return s + ")";
    }

private:
    static TreeOp make(Kind k, std::vector<TreeOp> c) {
        if (c.size() < 2) throw TreeShapeError("internal tree node needs at least two children");
        return TreeOp{k, 0, std::move(c)};
    }
};

namespace detail {

struct TreeParser {
    std::string_view s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    void expect(char c) {
        if (peek() != c) throw TreeShapeError(std::string("tree parse: expected '") + c + "' at " + std::to_string(pos));
        ++pos;
    }
    TreeOp node() {
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t v = 0;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) v = v * 10 + (s[pos++] - '0');
            return TreeOp::leaf(v);
        }
        if (c != 'S' && c != 'I') throw TreeShapeError("tree parse: unexpected character at " + std::to_string(pos));
        ++pos;
        expect('(');
        std::vector<TreeOp> kids{node()};
        while (peek() == ',') {
            ++pos;
            kids.push_back(node());
        }
        expect(')');
        return c == 'S' ? TreeOp::sum(std::move(kids)) : TreeOp::intersect(std::move(kids));
    }
};

}  // namespace detail

inline TreeOp parse_tree(std::string_view text) {
    detail::TreeParser p{text};
    TreeOp t = p.node();
    if (p.peek() != '\0') throw TreeShapeError("tree parse: trailing input");
    (void)t.leaf_count();
    return t;
}

inline Subspace eval_tree(const TreeOp& t, const std::vector<Subspace>& leaves) {
    if (leaves.size() != t.leaf_count())
        throw TreeShapeError("eval_tree: tree has " + std::to_string(t.leaf_count()) + " leaves, got " +
                             std::to_string(leaves.size()));
    for (const auto& l : leaves) require_same_ambient(leaves[0], l);
    auto rec = [&](auto&& self, const TreeOp& node) -> Subspace {
        if (node.kind == TreeOp::Kind::leaf) return leaves[node.slot];
        std::vector<Subspace> parts;
        for (const auto& c : node.children) parts.push_back(self(self, c));
        return node.kind == TreeOp::Kind::sum ? subspace_sum(std::span<const Subspace>(parts))
                                              : subspace_intersect(std::span<const Subspace>(parts));
    };
    return rec(rec, t);
}

}  // namespace equilab
