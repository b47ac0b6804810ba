#include "metaweave/phylo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace metaweave::phylo {

namespace {

struct Pruner {
    const tree::PhyloTree& src;
    const std::vector<char>& kept;
    tree::PhyloTree out;

    int copy(int old, int new_parent, double extra_length) {
        const tree::Node& node = src.nodes[old];
        std::vector<int> kept_children;
        for (int c : node.children)
            if (kept[c]) kept_children.push_back(c);

        // A non-root internal left with one child disappears into it.
        if (new_parent >= 0 && !node.is_tip() && kept_children.size() == 1)
            return copy(kept_children[0], new_parent, extra_length + node.branch_length);

        out.nodes.push_back(tree::Node{});
        const int idx = static_cast<int>(out.nodes.size()) - 1;
        out.nodes[idx].label = node.label;
        out.nodes[idx].parent = new_parent;
        out.nodes[idx].branch_length = node.branch_length + extra_length;
        if (new_parent >= 0) out.nodes[new_parent].children.push_back(idx);
        for (int c : kept_children) copy(c, idx, 0.0);
        return idx;
    }
};

std::string fold_name(const std::string& s) {
    std::string out;
    bool in_ws = false;
    for (char c : s) {
        if (c == '_' || c == ' ' || c == '\t') {
            in_ws = !out.empty();
            continue;
        }
        if (in_ws) out.push_back(' ');
        in_ws = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

} // namespace

tree::PhyloTree prune_tree(const tree::PhyloTree& t, const std::vector<std::string>& keep) {
    const std::set<std::string> keep_set(keep.begin(), keep.end());
    std::vector<char> kept(t.nodes.size(), 0);
    bool any = false;
    // Nodes are created parent-first, so a reverse pass settles children
    // before their parents.
    for (std::size_t ri = t.nodes.size(); ri-- > 0;) {
        const tree::Node& n = t.nodes[ri];
        if (n.is_tip()) {
            kept[ri] = keep_set.count(n.label) ? 1 : 0;
            any = any || kept[ri];
        } else {
            for (int c : n.children) kept[ri] |= kept[c];
        }
    }
    if (!any) throw NoOverlap();

    Pruner pruner{t, kept, tree::PhyloTree{}};
    pruner.out.root = pruner.copy(t.root, -1, 0.0);
    return pruner.out;
}

CorrelationMatrix phylo_correlation(const tree::PhyloTree& t) {
    const std::vector<int> tips = t.tips();
    const std::size_t n = tips.size();

    // Root paths (node -> ... -> root) and depths, computed once per tip.
    std::vector<std::vector<int>> paths(n);
    std::vector<double> depth_of_tip(n);
    for (std::size_t i = 0; i < n; ++i) {
        int node = tips[i];
        double d = 0.0;
        while (node != t.root) {
            paths[i].push_back(node);
            d += t.nodes[node].branch_length;
            node = t.nodes[node].parent;
        }
        paths[i].push_back(t.root);
        depth_of_tip[i] = d;
        if (!(d > 0.0)) throw ZeroDepthTip(t.nodes[tips[i]].label);
    }
    std::vector<double> node_depth(t.nodes.size(), 0.0);
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        node_depth[i] = t.depth(static_cast<int>(i));

    CorrelationMatrix m;
    m.labels = t.tip_labels();
    m.values.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        m.values[i][i] = 1.0;
        std::vector<char> on_path(t.nodes.size(), 0);
        for (int node : paths[i]) on_path[node] = 1;
        for (std::size_t j = i + 1; j < n; ++j) {
            int mrca = t.root;
            for (int node : paths[j]) {
                if (on_path[node]) {
                    mrca = node;
                    break;
                }
            }
            const double cov = node_depth[mrca];
            const double corr = cov / std::sqrt(depth_of_tip[i] * depth_of_tip[j]);
            m.values[i][j] = corr;
            m.values[j][i] = corr;
        }
    }
    return m;
}

std::vector<meta::AggregatedEffect> species_aggregate(
    const std::vector<ingest::EffectRecord>& effects, double rho) {
    std::map<std::string, std::vector<meta::Effect>> by_species;
    for (const ingest::EffectRecord& e : effects) {
        if (!e.species) throw MissingSpecies(e.effect_key);
        by_species[*e.species].push_back(meta::Effect{e.effect_key, e.yi, e.vi});
    }
    std::vector<meta::AggregatedEffect> out;
    out.reserve(by_species.size());
    for (const auto& [species, group] : by_species)
        out.push_back(meta::aggregate_correlated(group, rho, species));
    return out;
}

TipMatch match_tips(const tree::PhyloTree& t, const std::vector<std::string>& species) {
    std::map<std::string, std::string> tip_by_folded;
    for (int tip : t.tips()) {
        const std::string& label = t.nodes[tip].label;
        tip_by_folded.emplace(fold_name(label), label);
    }

    TipMatch match;
    std::set<std::string> used_tips;
    std::set<std::string> unmatched_species;
    for (const std::string& name : species) {
        auto it = tip_by_folded.find(fold_name(name));
        if (it == tip_by_folded.end()) {
            unmatched_species.insert(name);
        } else {
            match.species_to_tip[name] = it->second;
            used_tips.insert(it->second);
        }
    }
    match.unmatched_species.assign(unmatched_species.begin(), unmatched_species.end());
    for (const auto& [folded, label] : tip_by_folded)
        if (!used_tips.count(label)) match.unmatched_tips.push_back(label);
    std::sort(match.unmatched_tips.begin(), match.unmatched_tips.end());
    return match;
}

} // namespace metaweave::phylo
