#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "metaweave/errors.hpp"
#include "metaweave/ingest.hpp"

namespace metaweave::biblio {

struct UnknownField : InputError {
    explicit UnknownField(const std::string& field)
        : InputError("no tabulation for field '" + field + "'"), field(field) {}
    std::string field;
};

struct IncidenceMatrix {
    std::vector<std::string> row_labels; // first-appearance order, unique
    std::vector<std::string> col_labels;
    std::vector<std::vector<int>> entries; // dense [row][col]; corpora are desk-scale
};

struct Edge {
    std::size_t a = 0; // node indices, a < b
    std::size_t b = 0;
    int weight = 0;
};

struct WeightedGraph {
    std::vector<std::string> nodes;
    std::vector<Edge> edges; // sorted by (a, b)
};

/// Normalized "family, initials" author key: lowercase, diacritics
/// folded, given names reduced to their first letters.
std::string author_key(const std::string& raw_name);

/// Author-by-paper 0/1 incidence. `aliases` maps a normalized key to the
/// key it should merge into (manual disambiguation overrides).
IncidenceMatrix author_incidence(const std::vector<ingest::BibRecord>& records,
                                 const std::map<std::string, std::string>& aliases = {});

/// Co-authorship counts: the incidence product with the diagonal removed.
WeightedGraph coauthorship_graph(const IncidenceMatrix& incidence);

/// Bibliographic coupling between countries. Each affiliation country
/// accumulates the union of its papers' reference keys; edge weight is
/// the size of the pairwise intersection (zero-weight pairs omitted).
WeightedGraph country_coupling_graph(const std::vector<ingest::BibRecord>& records);

/// Cluster ids are consecutive from 0, assigned in order of each
/// component's lexicographically smallest node label.
std::vector<int> connected_components(const WeightedGraph& graph);

struct Centrality {
    int degree = 0;
    int strength = 0;
};

std::vector<Centrality> degree_centrality(const WeightedGraph& graph);

struct ClusterSummary {
    int n_clusters = 0;
    double mean_size = 0.0; // rounded to 2 decimals
    int max_size = 0;
    std::vector<int> sizes; // indexed by cluster id
};

ClusterSummary cluster_summary(const WeightedGraph& graph, const std::vector<int>& components);

/// field is one of journal, funder, language, year, country; missing
/// values group under "Unreported"; sorted by count descending then value.
std::vector<std::pair<std::string, int>> tabulate_field(
    const std::vector<ingest::BibRecord>& records, const std::string& field);

} // namespace metaweave::biblio
