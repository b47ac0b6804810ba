#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "metaweave/altmetric.hpp"
#include "metaweave/biblio.hpp"
#include "metaweave/ingest.hpp"
#include "metaweave/meta.hpp"
#include "metaweave/phylo.hpp"
#include "metaweave/synthmap.hpp"

// JSON artifact writers. Every function returns a complete document with a
// trailing newline and a stable key order, so artifact bytes are
// reproducible across runs.
namespace metaweave::jsonio {

std::string corpus_json(const ingest::LinkedCorpus& corpus);
std::string pooled_json(
    const std::vector<std::pair<std::string, meta::PooledResult>>& results);
std::string cells_json(const synthmap::GapMap& map);
std::string sankey_json(const synthmap::SankeyGraph& graph);
std::string graph_json(const biblio::WeightedGraph& graph, const std::vector<int>& clusters);
std::string tabulations_json(
    const std::vector<std::pair<std::string, std::vector<std::pair<std::string, int>>>>& tabs);
std::string phylo_json(const phylo::CorrelationMatrix& matrix);
std::string loco_json(const std::vector<meta::LocoEntry>& entries, double full_estimate);
std::string cumulative_json(const std::vector<std::pair<int, meta::PooledResult>>& steps);
std::string altmetrics_json(const altclient::BatchResult& batch);

} // namespace metaweave::jsonio
