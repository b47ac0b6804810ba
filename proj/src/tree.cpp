#include "metaweave/tree.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace metaweave::tree {

std::vector<int> PhyloTree::tips() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].is_tip()) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<std::string> PhyloTree::tip_labels() const {
    std::vector<std::string> out;
    for (int t : tips()) out.push_back(nodes[t].label);
    return out;
}

int PhyloTree::find_tip(const std::string& label) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].is_tip() && nodes[i].label == label) return static_cast<int>(i);
    return -1;
}

double PhyloTree::depth(int node) const {
    double d = 0.0;
    while (node != root) {
        d += nodes[node].branch_length;
        node = nodes[node].parent;
    }
    return d;
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void skip_ws() {
        while (!done() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
};

bool is_label_char(char c) {
    switch (c) {
        case '(':
        case ')':
        case ',':
        case ':':
        case ';':
        case '[':
        case ']':
        case '\'':
            return false;
        default:
            return !std::isspace(static_cast<unsigned char>(c));
    }
}

std::string parse_label(Cursor& cur) {
    if (!cur.done() && cur.peek() == '\'') {
        const std::size_t open = cur.pos;
        ++cur.pos;
        std::string label;
        while (true) {
            if (cur.done()) throw ParseError(open, "closing quote");
            char c = cur.text[cur.pos++];
            if (c == '\'') {
                if (!cur.done() && cur.peek() == '\'') { // '' escapes a quote
                    label.push_back('\'');
                    ++cur.pos;
                } else {
                    return label;
                }
            } else {
                label.push_back(c);
            }
        }
    }
    std::string label;
    while (!cur.done() && is_label_char(cur.peek())) label.push_back(cur.text[cur.pos++]);
    return label;
}

struct Parser {
    Cursor cur;
    PhyloTree tree;
    std::vector<std::string>* warnings;

    int make_node(int parent) {
        tree.nodes.push_back(Node{});
        tree.nodes.back().parent = parent;
        if (parent >= 0) tree.nodes[parent].children.push_back((int)tree.nodes.size() - 1);
        return (int)tree.nodes.size() - 1;
    }

    void read_branch_length(int node, bool is_leaf) {
        cur.skip_ws();
        if (!cur.done() && cur.peek() == ':') {
            ++cur.pos;
            cur.skip_ws();
            const char* b = cur.text.data() + cur.pos;
            const char* e = cur.text.data() + cur.text.size();
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(b, e, value);
            if (ec != std::errc() || ptr == b) throw ParseError(cur.pos, "branch length");
            if (value < 0.0) throw ParseError(cur.pos, "nonnegative branch length");
            cur.pos += static_cast<std::size_t>(ptr - b);
            tree.nodes[node].branch_length = value;
        } else if (warnings && tree.nodes[node].parent >= 0) {
            // A root without a length is the norm, not worth a warning.
            const std::string& label = tree.nodes[node].label;
            warnings->push_back("missing branch length for " +
                                (label.empty() ? std::string(is_leaf ? "a tip" : "an internal node")
                                               : "'" + label + "'") +
                                "; using 0");
        }
    }

    int parse_subtree(int parent) {
        cur.skip_ws();
        if (cur.done()) throw ParseError(cur.pos, "subtree");
        if (cur.peek() == '(') {
            const int node = make_node(parent);
            ++cur.pos;
            while (true) {
                parse_subtree(node);
                cur.skip_ws();
                if (cur.done()) throw ParseError(cur.pos, "',' or ')'");
                if (cur.peek() == ',') {
                    ++cur.pos;
                    continue;
                }
                if (cur.peek() == ')') {
                    ++cur.pos;
                    break;
                }
                throw ParseError(cur.pos, "',' or ')'");
            }
            cur.skip_ws();
            tree.nodes[node].label = parse_label(cur); // internal label is optional
            read_branch_length(node, false);
            return node;
        }
        const std::size_t at = cur.pos;
        const int node = make_node(parent);
        tree.nodes[node].label = parse_label(cur);
        if (tree.nodes[node].label.empty()) throw ParseError(at, "tip label");
        read_branch_length(node, true);
        return node;
    }
};

void write_subtree(const PhyloTree& tree, int node, std::string& out) {
    const Node& n = tree.nodes[node];
    if (!n.is_tip()) {
        out.push_back('(');
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) out.push_back(',');
            write_subtree(tree, n.children[i], out);
        }
        out.push_back(')');
    }
    bool needs_quote = false;
    for (char c : n.label)
        if (!is_label_char(c)) needs_quote = true;
    if (needs_quote) {
        out.push_back('\'');
        for (char c : n.label) {
            if (c == '\'') out.push_back('\'');
            out.push_back(c);
        }
        out.push_back('\'');
    } else {
        out += n.label;
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), n.branch_length);
    (void)ec;
    out.push_back(':');
    out.append(buf, ptr);
}

} // namespace

PhyloTree parse_newick(const std::string& text, std::vector<std::string>* warnings) {
    Parser p{Cursor{text}, PhyloTree{}, warnings};
    p.cur.skip_ws();
    if (p.cur.done()) throw ParseError(0, "a tree");
    p.tree.root = p.parse_subtree(-1);
    p.cur.skip_ws();
    if (p.cur.done() || p.cur.peek() != ';') throw ParseError(p.cur.pos, "';'");
    ++p.cur.pos;
    p.cur.skip_ws();
    if (!p.cur.done()) throw ParseError(p.cur.pos, "end of input");

    std::set<std::string> seen;
    for (const Node& n : p.tree.nodes)
        if (n.is_tip() && !seen.insert(n.label).second) throw DuplicateTip(n.label);
    return p.tree;
}

std::string to_newick(const PhyloTree& tree) {
    std::string out;
    if (tree.root >= 0) write_subtree(tree, tree.root, out);
    out.push_back(';');
    return out;
}

} // namespace metaweave::tree
