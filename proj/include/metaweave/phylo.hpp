#pragma once

#include <map>
#include <string>
#include <vector>

#include "metaweave/errors.hpp"
#include "metaweave/ingest.hpp"
#include "metaweave/meta.hpp"
#include "metaweave/tree.hpp"

namespace metaweave::phylo {

struct NoOverlap : InputError {
    NoOverlap() : InputError("no requested species is present in the tree") {}
};
struct ZeroDepthTip : InputError {
    explicit ZeroDepthTip(const std::string& label)
        : InputError("tip '" + label + "' has zero root-to-tip distance"), label(label) {}
    std::string label;
};
struct MissingSpecies : InputError {
    explicit MissingSpecies(const std::string& effect_key)
        : InputError("effect '" + effect_key + "' has no species label"), effect_key(effect_key) {}
    std::string effect_key;
};

/// Tips not in `keep` are removed and degree-2 internals collapsed
/// (branch lengths summed); the root survives even at degree 1, so
/// root-to-tip distances of kept tips never change.
tree::PhyloTree prune_tree(const tree::PhyloTree& t, const std::vector<std::string>& keep);

struct CorrelationMatrix {
    std::vector<std::string> labels; // tip order of the tree
    std::vector<std::vector<double>> values;
};

/// corr(i,j) = depth(MRCA(i,j)) / sqrt(depth(i)*depth(j)); diagonal exactly 1.
CorrelationMatrix phylo_correlation(const tree::PhyloTree& t);

/// Per-species correlated aggregation (rho defaults to 0.5); output
/// sorted by species label.
std::vector<meta::AggregatedEffect> species_aggregate(
    const std::vector<ingest::EffectRecord>& effects, double rho = 0.5);

struct TipMatch {
    std::map<std::string, std::string> species_to_tip;
    std::vector<std::string> unmatched_species; // sorted
    std::vector<std::string> unmatched_tips;    // sorted
};

/// Case-insensitive matching with underscore/space equivalence.
TipMatch match_tips(const tree::PhyloTree& t, const std::vector<std::string>& species);

} // namespace metaweave::phylo
