#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "metaweave/errors.hpp"

namespace metaweave::tree {

struct ParseError : InputError {
    ParseError(std::size_t offset, const std::string& expected)
        : InputError("newick: expected " + expected + " at offset " + std::to_string(offset)),
          offset(offset), expected(expected) {}
    std::size_t offset;
    std::string expected;
};
struct DuplicateTip : InputError {
    explicit DuplicateTip(const std::string& label)
        : InputError("duplicate tip label '" + label + "'"), label(label) {}
    std::string label;
};

struct Node {
    std::string label; // may be empty for internal nodes
    int parent = -1;
    double branch_length = 0.0;
    std::vector<int> children;

    bool is_tip() const { return children.empty(); }
};

struct PhyloTree {
    std::vector<Node> nodes;
    int root = -1;

    bool empty() const { return nodes.empty(); }
    std::vector<int> tips() const;
    std::vector<std::string> tip_labels() const;
    int find_tip(const std::string& label) const; // -1 when absent

    /// Distance from the root to this node; the root's own branch
    /// length (a rooting artifact) never contributes.
    double depth(int node) const;
};

/// Parses a single rooted Newick string. Missing branch lengths become 0;
/// each one appends a note to `warnings` when provided.
PhyloTree parse_newick(const std::string& text, std::vector<std::string>* warnings = nullptr);

std::string to_newick(const PhyloTree& tree);

} // namespace metaweave::tree
