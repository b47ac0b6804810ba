#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metaweave/biblio.hpp"
#include "metaweave/errors.hpp"
#include "metaweave/meta.hpp"
#include "metaweave/svg.hpp"
#include "metaweave/synthmap.hpp"
#include "metaweave/tree.hpp"

namespace metaweave::render {

struct UnknownLevel : InputError {
    explicit UnknownLevel(const std::string& level)
        : InputError("level '" + level + "' is not in the supplied level order"), level(level) {}
    std::string level;
};
struct UnknownSpecies : InputError {
    explicit UnknownSpecies(const std::string& label)
        : InputError("annotation species '" + label + "' is not a tree tip"), label(label) {}
    std::string label;
};
struct MetricMissing : InputError {
    explicit MetricMissing(const std::string& effect_key)
        : InputError("no bubble metric for effect '" + effect_key + "'"),
          effect_key(effect_key) {}
    std::string effect_key;
};
struct NothingToReport : InputError {
    NothingToReport() : InputError("no artifacts supplied to the report builder") {}
};

struct RenderOptions {
    double width = 960.0;
    double height = 640.0;
    std::uint64_t seed = 42;
};

/// Explicit axis orderings; empty vectors fall back to the lexicographic
/// level sets carried by the data.
struct LevelOrders {
    std::vector<std::string> x;
    std::vector<std::string> y;
    std::vector<std::string> shape;
};

svg::SvgDocument render_gap_map(const synthmap::GapMap& map, const LevelOrders& orders = {},
                                const RenderOptions& options = {});

svg::SvgDocument render_sankey(const synthmap::SankeyGraph& graph,
                               const RenderOptions& options = {});

/// Force-directed layout: Fruchterman-Reingold, 500 iterations, linear
/// cooling, seeded initial placement. Clusters of three or more nodes get
/// a convex hull at 40% opacity.
svg::SvgDocument render_network(const biblio::WeightedGraph& graph,
                                const std::vector<int>& clusters,
                                const RenderOptions& options = {});

/// Angular spans (degrees) per node in arc order, plus that order; spans
/// sum to 360 minus the fixed 2-degree inter-arc gaps.
struct ChordLayout {
    std::vector<std::size_t> order; // node indices, strength desc then label
    std::vector<double> spans;      // degrees, aligned with order
    double gap_degrees = 2.0;
};
ChordLayout chord_layout(const biblio::WeightedGraph& graph);

svg::SvgDocument render_chord(const biblio::WeightedGraph& graph,
                              const RenderOptions& options = {});

struct TipAnnotation {
    std::string species; // must name a tree tip
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::string group;
};

svg::SvgDocument render_tree(const tree::PhyloTree& tree,
                             const std::vector<TipAnnotation>& annotations,
                             const RenderOptions& options = {});

struct OrchardPanel {
    std::string label;
    meta::PooledResult pooled; // computed over this panel's effects
    std::vector<meta::Effect> effects;
};

/// Trunk-and-fruit plot: pooled CI (thick) and prediction interval (thin)
/// per panel, effects as deterministically jittered bubbles with area
/// proportional to the metric; metrics above the threshold render grey.
svg::SvgDocument render_orchard(const std::vector<OrchardPanel>& panels,
                                const std::map<std::string, double>& bubble_metric,
                                double threshold = 400.0, const RenderOptions& options = {});

svg::SvgDocument render_orchard(const meta::PooledResult& pooled,
                                const std::vector<meta::Effect>& effects,
                                const std::map<std::string, double>& bubble_metric,
                                double threshold = 400.0, const RenderOptions& options = {});

// --- report ------------------------------------------------------------

struct ReportInputs {
    std::vector<std::pair<std::string, std::string>> figures; // (heading, svg markup)
    std::vector<std::pair<std::string, meta::PooledResult>> pooled_rows;
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, int>>>> tabulations;
    std::vector<meta::LocoEntry> loco;
    std::vector<std::pair<int, meta::PooledResult>> cumulative;
    std::vector<std::pair<std::string, std::string>> input_hashes; // (name, fnv-1a hex)
    std::uint64_t seed = 42;
    std::string version;
};

/// Single self-contained HTML document: inline SVG figures, fixed-format
/// tables, and a provenance footer (hashes, version, seed; no timestamps).
std::string build_report(const ReportInputs& inputs);

} // namespace metaweave::render
