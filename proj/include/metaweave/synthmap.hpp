#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "metaweave/errors.hpp"
#include "metaweave/ingest.hpp"
#include "metaweave/meta.hpp"

namespace metaweave::synthmap {

struct UnknownColumn : InputError {
    explicit UnknownColumn(const std::string& name)
        : InputError("'" + name + "' is not a declared moderator column"), name(name) {}
    std::string name;
};
struct TooFewColumns : InputError {
    TooFewColumns() : InputError("a flow graph needs at least two columns") {}
};

struct EvidenceMapCell {
    std::string x_level;
    std::string y_level;
    std::optional<std::string> shape_level; // set iff a shape column was requested
    int n_studies = 0;
    int n_effects = 0;
    meta::PooledResult pooled;
};

struct GapMap {
    std::vector<EvidenceMapCell> cells; // lexicographic by (x, y, shape)
    int remainder = 0;                  // rows missing the x or y level
    std::vector<std::string> x_levels;  // sorted distinct levels present
    std::vector<std::string> y_levels;
    std::vector<std::string> shape_levels;
};

/// Cell statistics for nonempty (x, y[, shape]) combinations. Pooling is
/// random-effects with study-clustered robust errors; one-effect cells pass
/// the effect through and one-study cells skip the robust step.
GapMap gap_map(const std::vector<ingest::EffectRecord>& effects,
               const ingest::ColumnMapping& mapping, const std::string& x_col,
               const std::string& y_col,
               const std::optional<std::string>& shape_col = std::nullopt,
               meta::Tau2Method tau2 = meta::Tau2Method::REML);

struct SankeyNode {
    std::string column;
    std::string level;
    int count = 0;
};
struct SankeyLink {
    std::size_t source = 0; // index into nodes
    std::size_t target = 0;
    int weight = 0;
};
struct SankeyGraph {
    std::vector<SankeyNode> nodes; // grouped by column, count desc then label asc
    std::vector<SankeyLink> links; // ordered by (source, target) node order
};

/// Adjacent-column co-occurrence flows; a missing value becomes the
/// explicit level "Missing(<column>)".
SankeyGraph sankey_flows(const std::vector<ingest::EffectRecord>& effects,
                         const ingest::ColumnMapping& mapping,
                         const std::vector<std::string>& ordered_cols);

} // namespace metaweave::synthmap
