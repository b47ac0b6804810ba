#include "metaweave/synthmap.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace metaweave::synthmap {

namespace {

std::optional<std::string> moderator_value(const ingest::EffectRecord& e,
                                           const std::string& column) {
    auto it = e.moderators.find(column);
    if (it == e.moderators.end()) return std::nullopt;
    return it->second;
}

meta::PooledResult pool_cell(const std::vector<const ingest::EffectRecord*>& rows,
                             meta::Tau2Method tau2) {
    std::vector<meta::Effect> effects;
    std::vector<std::string> studies;
    std::set<std::string> distinct_studies;
    effects.reserve(rows.size());
    for (const ingest::EffectRecord* r : rows) {
        effects.push_back(meta::Effect{r->effect_key, r->yi, r->vi});
        studies.push_back(r->study_key);
        distinct_studies.insert(r->study_key);
    }
    if (effects.size() == 1) return meta::pool_common(effects);
    const meta::PooledResult pooled = meta::pool_random(effects, tau2);
    if (distinct_studies.size() < 2) return pooled;
    return meta::robust_variance(effects, studies, pooled);
}

} // namespace

GapMap gap_map(const std::vector<ingest::EffectRecord>& effects,
               const ingest::ColumnMapping& mapping, const std::string& x_col,
               const std::string& y_col, const std::optional<std::string>& shape_col,
               meta::Tau2Method tau2) {
    if (!mapping.is_moderator(x_col)) throw UnknownColumn(x_col);
    if (!mapping.is_moderator(y_col)) throw UnknownColumn(y_col);
    if (shape_col && !mapping.is_moderator(*shape_col)) throw UnknownColumn(*shape_col);

    using CellKey = std::tuple<std::string, std::string, std::string>;
    std::map<CellKey, std::vector<const ingest::EffectRecord*>> groups;

    GapMap result;
    for (const ingest::EffectRecord& e : effects) {
        const auto x = moderator_value(e, x_col);
        const auto y = moderator_value(e, y_col);
        if (!x || !y) {
            ++result.remainder;
            continue;
        }
        std::string shape;
        if (shape_col) shape = moderator_value(e, *shape_col).value_or("Unreported");
        groups[CellKey{*x, *y, shape}].push_back(&e);
    }

    std::set<std::string> xs, ys, shapes;
    for (const auto& [key, rows] : groups) {
        EvidenceMapCell cell;
        cell.x_level = std::get<0>(key);
        cell.y_level = std::get<1>(key);
        if (shape_col) cell.shape_level = std::get<2>(key);
        std::set<std::string> studies;
        for (const ingest::EffectRecord* r : rows) studies.insert(r->study_key);
        cell.n_studies = static_cast<int>(studies.size());
        cell.n_effects = static_cast<int>(rows.size());
        cell.pooled = pool_cell(rows, tau2);
        xs.insert(cell.x_level);
        ys.insert(cell.y_level);
        if (cell.shape_level) shapes.insert(*cell.shape_level);
        result.cells.push_back(std::move(cell));
    }
    result.x_levels.assign(xs.begin(), xs.end());
    result.y_levels.assign(ys.begin(), ys.end());
    result.shape_levels.assign(shapes.begin(), shapes.end());
    return result;
}

SankeyGraph sankey_flows(const std::vector<ingest::EffectRecord>& effects,
                         const ingest::ColumnMapping& mapping,
                         const std::vector<std::string>& ordered_cols) {
    if (ordered_cols.size() < 2) throw TooFewColumns();
    for (const std::string& col : ordered_cols)
        if (!mapping.is_moderator(col)) throw UnknownColumn(col);

    auto level_of = [](const ingest::EffectRecord& e, const std::string& col) {
        auto it = e.moderators.find(col);
        return it == e.moderators.end() ? "Missing(" + col + ")" : it->second;
    };

    SankeyGraph graph;
    std::map<std::pair<std::size_t, std::string>, std::size_t> node_index;
    for (std::size_t c = 0; c < ordered_cols.size(); ++c) {
        std::map<std::string, int> counts;
        for (const ingest::EffectRecord& e : effects) ++counts[level_of(e, ordered_cols[c])];
        std::vector<std::pair<std::string, int>> ordered(counts.begin(), counts.end());
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [level, count] : ordered) {
            node_index[{c, level}] = graph.nodes.size();
            graph.nodes.push_back(SankeyNode{ordered_cols[c], level, count});
        }
    }

    for (std::size_t c = 0; c + 1 < ordered_cols.size(); ++c) {
        std::map<std::pair<std::size_t, std::size_t>, int> weights;
        for (const ingest::EffectRecord& e : effects) {
            const std::size_t s = node_index.at({c, level_of(e, ordered_cols[c])});
            const std::size_t t = node_index.at({c + 1, level_of(e, ordered_cols[c + 1])});
            ++weights[{s, t}];
        }
        for (const auto& [key, weight] : weights)
            graph.links.push_back(SankeyLink{key.first, key.second, weight});
    }
    return graph;
}

} // namespace metaweave::synthmap
