#include "metaweave/jsonio.hpp"

#include <json.hpp>

namespace metaweave::jsonio {

namespace {

using nlohmann::ordered_json;

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json pooled_node(const meta::PooledResult& r) {
    ordered_json node;
    node["estimate"] = r.estimate;
    node["se"] = r.se;
    node["ci"] = {r.ci_low, r.ci_high};
    node["tau2"] = r.tau2;
    node["q"] = r.q;
    node["i2"] = r.i2;
    if (r.pi_low && r.pi_high)
        node["pi"] = {*r.pi_low, *r.pi_high};
    else
        node["pi"] = nullptr;
    node["k"] = r.k;
    node["m"] = r.m ? ordered_json(*r.m) : ordered_json(nullptr);
    node["method"] = meta::pool_method_label(r.method);
    node["robust"] = r.robust;
    return node;
}

} // namespace

std::string corpus_json(const ingest::LinkedCorpus& corpus) {
    ordered_json doc;
    doc["effects"] = ordered_json::array();
    for (const auto& e : corpus.effects) {
        ordered_json node;
        node["study"] = e.study_key;
        node["effect"] = e.effect_key;
        node["yi"] = e.yi;
        node["vi"] = e.vi;
        node["moderators"] = ordered_json::object();
        for (const auto& [k, v] : e.moderators) node["moderators"][k] = v;
        node["species"] = e.species ? ordered_json(*e.species) : ordered_json(nullptr);
        node["year"] = e.year ? ordered_json(*e.year) : ordered_json(nullptr);
        node["doi"] = e.doi ? ordered_json(*e.doi) : ordered_json(nullptr);
        doc["effects"].push_back(std::move(node));
    }
    doc["bib_records"] = ordered_json::array();
    for (const auto& b : corpus.bib_records) {
        ordered_json node;
        node["key"] = b.key;
        node["doi"] = b.doi ? ordered_json(*b.doi) : ordered_json(nullptr);
        node["title"] = b.title;
        node["authors"] = b.authors;
        node["countries"] = b.countries;
        node["n_references"] = b.references.size();
        doc["bib_records"].push_back(std::move(node));
    }
    doc["links"] = ordered_json::object();
    for (const auto& [effect, index] : corpus.links)
        doc["links"][effect] = corpus.bib_records[index].key;
    doc["unmatched_effects"] = corpus.unmatched_effects;
    doc["unmatched_bib"] = corpus.unmatched_bib;
    return dump(doc);
}

std::string pooled_json(
    const std::vector<std::pair<std::string, meta::PooledResult>>& results) {
    ordered_json doc = ordered_json::array();
    for (const auto& [scope, r] : results) {
        ordered_json node;
        node["scope"] = scope;
        node["result"] = pooled_node(r);
        doc.push_back(std::move(node));
    }
    return dump(doc);
}

std::string cells_json(const synthmap::GapMap& map) {
    ordered_json doc;
    doc["cells"] = ordered_json::array();
    for (const auto& cell : map.cells) {
        ordered_json node;
        node["x"] = cell.x_level;
        node["y"] = cell.y_level;
        node["shape"] =
            cell.shape_level ? ordered_json(*cell.shape_level) : ordered_json(nullptr);
        node["n_studies"] = cell.n_studies;
        node["n_effects"] = cell.n_effects;
        node["pooled"] = pooled_node(cell.pooled);
        doc["cells"].push_back(std::move(node));
    }
    doc["remainder"] = map.remainder;
    doc["x_levels"] = map.x_levels;
    doc["y_levels"] = map.y_levels;
    doc["shape_levels"] = map.shape_levels;
    return dump(doc);
}

std::string sankey_json(const synthmap::SankeyGraph& graph) {
    ordered_json doc;
    doc["nodes"] = ordered_json::array();
    for (const auto& node : graph.nodes)
        doc["nodes"].push_back(
            {{"column", node.column}, {"level", node.level}, {"count", node.count}});
    doc["links"] = ordered_json::array();
    for (const auto& link : graph.links)
        doc["links"].push_back(
            {{"source", link.source}, {"target", link.target}, {"weight", link.weight}});
    return dump(doc);
}

std::string graph_json(const biblio::WeightedGraph& graph, const std::vector<int>& clusters) {
    ordered_json doc;
    auto centrality = biblio::degree_centrality(graph);
    doc["nodes"] = ordered_json::array();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        ordered_json node;
        node["label"] = graph.nodes[i];
        node["cluster"] = i < clusters.size() ? clusters[i] : 0;
        node["degree"] = centrality[i].degree;
        node["strength"] = centrality[i].strength;
        doc["nodes"].push_back(std::move(node));
    }
    doc["edges"] = ordered_json::array();
    for (const auto& edge : graph.edges)
        doc["edges"].push_back({{"source", graph.nodes[edge.a]},
                                {"target", graph.nodes[edge.b]},
                                {"weight", edge.weight}});
    auto summary = biblio::cluster_summary(graph, clusters);
    ordered_json cluster_node;
    cluster_node["count"] = summary.n_clusters;
    cluster_node["mean_size"] = summary.mean_size;
    cluster_node["max_size"] = summary.max_size;
    doc["clusters"] = std::move(cluster_node);
    return dump(doc);
}

std::string tabulations_json(
    const std::vector<std::pair<std::string, std::vector<std::pair<std::string, int>>>>& tabs) {
    ordered_json doc = ordered_json::object();
    for (const auto& [field, rows] : tabs) {
        ordered_json rows_json = ordered_json::array();
        for (const auto& [value, count] : rows)
            rows_json.push_back({{"value", value}, {"count", count}});
        doc[field] = std::move(rows_json);
    }
    return dump(doc);
}

std::string phylo_json(const phylo::CorrelationMatrix& matrix) {
    ordered_json doc;
    doc["labels"] = matrix.labels;
    doc["matrix"] = ordered_json::array();
    for (const auto& row : matrix.values) doc["matrix"].push_back(row);
    return dump(doc);
}

std::string loco_json(const std::vector<meta::LocoEntry>& entries, double full_estimate) {
    ordered_json doc;
    doc["full_estimate"] = full_estimate;
    doc["omissions"] = ordered_json::array();
    for (const auto& entry : entries) {
        ordered_json node;
        node["cluster"] = entry.cluster;
        node["without"] = pooled_node(entry.without);
        node["delta"] = entry.delta;
        doc["omissions"].push_back(std::move(node));
    }
    return dump(doc);
}

std::string cumulative_json(const std::vector<std::pair<int, meta::PooledResult>>& steps) {
    ordered_json doc = ordered_json::array();
    for (const auto& [year, r] : steps) {
        ordered_json node;
        node["through_year"] = year;
        node["result"] = pooled_node(r);
        doc.push_back(std::move(node));
    }
    return dump(doc);
}

std::string altmetrics_json(const altclient::BatchResult& batch) {
    ordered_json doc;
    doc["items"] = ordered_json::array();
    for (const auto& item : batch.items) {
        ordered_json node;
        node["doi"] = item.doi;
        if (item.record) {
            node["status"] =
                item.record->status == altclient::Status::Tracked ? "tracked" : "not_tracked";
            if (item.record->counts) {
                node["score"] = item.record->counts->score;
                node["cited_by_policies_count"] = item.record->counts->policy;
                node["cited_by_patents_count"] = item.record->counts->patent;
            }
        }
        if (item.error) node["error"] = *item.error;
        doc["items"].push_back(std::move(node));
    }
    doc["n_errors"] = batch.n_errors;
    return dump(doc);
}

} // namespace metaweave::jsonio
