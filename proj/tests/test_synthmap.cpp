#include <doctest.h>

#include <string>
#include <vector>

#include "metaweave/synthmap.hpp"

using namespace metaweave;
using namespace metaweave::synthmap;

namespace {

ingest::ColumnMapping mapping_with(std::vector<std::string> moderators) {
    ingest::ColumnMapping m;
    m.study_id = "study";
    m.yi = "yi";
    m.vi = "vi";
    m.moderators = std::move(moderators);
    return m;
}

ingest::EffectRecord row(const std::string& study, const std::string& key, double yi, double vi,
                         std::vector<std::pair<std::string, std::string>> mods) {
    ingest::EffectRecord e;
    e.study_key = study;
    e.effect_key = key;
    e.yi = yi;
    e.vi = vi;
    for (auto& [k, v] : mods) e.moderators[k] = v;
    return e;
}

} // namespace

TEST_CASE("gap map counts studies and effects per cell") {
    const auto m = mapping_with({"intervention", "outcome"});
    std::vector<ingest::EffectRecord> rows = {
        row("S1", "e1", 0.1, 0.04, {{"intervention", "I1"}, {"outcome", "O1"}}),
        row("S1", "e2", 0.2, 0.04, {{"intervention", "I1"}, {"outcome", "O1"}}),
        row("S2", "e3", 0.3, 0.04, {{"intervention", "I1"}, {"outcome", "O2"}}),
    };
    const GapMap g = gap_map(rows, m, "intervention", "outcome");
    REQUIRE(g.cells.size() == 2);
    CHECK(g.remainder == 0);
    CHECK(g.cells[0].x_level == "I1");
    CHECK(g.cells[0].y_level == "O1");
    CHECK(g.cells[0].n_studies == 1);
    CHECK(g.cells[0].n_effects == 2);
    CHECK(g.cells[1].y_level == "O2");
    CHECK(g.cells[1].n_studies == 1);
    CHECK(g.cells[1].n_effects == 1);
    CHECK(g.x_levels == std::vector<std::string>{"I1"});
    CHECK(g.y_levels == std::vector<std::string>{"O1", "O2"});
}

TEST_CASE("gap map of an empty table is empty") {
    const auto m = mapping_with({"x", "y"});
    const GapMap g = gap_map({}, m, "x", "y");
    CHECK(g.cells.empty());
    CHECK(g.remainder == 0);
}

TEST_CASE("gap map splits cells by the shape column") {
    const auto m = mapping_with({"x", "y", "pop"});
    std::vector<ingest::EffectRecord> rows = {
        row("S1", "e1", 0.1, 0.04, {{"x", "A"}, {"y", "B"}, {"pop", "adult"}}),
        row("S2", "e2", 0.2, 0.04, {{"x", "A"}, {"y", "B"}, {"pop", "child"}}),
        row("S3", "e3", 0.3, 0.04, {{"x", "A"}, {"y", "B"}}),
    };
    const GapMap g = gap_map(rows, m, "x", "y", std::string("pop"));
    REQUIRE(g.cells.size() == 3);
    CHECK(g.cells[0].shape_level == "Unreported"); // missing shape keeps the cell
    CHECK(g.cells[1].shape_level == "adult");
    CHECK(g.cells[2].shape_level == "child");
    CHECK(g.shape_levels == std::vector<std::string>{"Unreported", "adult", "child"});
}

TEST_CASE("gap map excludes rows missing x or y into the remainder") {
    const auto m = mapping_with({"x", "y"});
    std::vector<ingest::EffectRecord> rows = {
        row("S1", "e1", 0.1, 0.04, {{"x", "A"}, {"y", "B"}}),
        row("S1", "e2", 0.1, 0.04, {{"x", "A"}}),
        row("S2", "e3", 0.1, 0.04, {{"y", "B"}}),
    };
    const GapMap g = gap_map(rows, m, "x", "y");
    CHECK(g.cells.size() == 1);
    CHECK(g.remainder == 2);
    int total = g.remainder;
    for (const auto& c : g.cells) total += c.n_effects;
    CHECK(total == 3);
}

TEST_CASE("gap map rejects undeclared columns") {
    const auto m = mapping_with({"x", "y"});
    CHECK_THROWS_AS(gap_map({}, m, "x", "nope"), UnknownColumn);
    CHECK_THROWS_AS(gap_map({}, m, "nope", "y"), UnknownColumn);
    CHECK_THROWS_AS(gap_map({}, m, "x", "y", std::string("nope")), UnknownColumn);
}

TEST_CASE("gap map pooled results match direct estimator calls") {
    const auto m = mapping_with({"x", "y"});
    std::vector<ingest::EffectRecord> rows = {
        row("S1", "e1", 0.10, 0.04, {{"x", "A"}, {"y", "B"}}),
        row("S1", "e2", 0.25, 0.05, {{"x", "A"}, {"y", "B"}}),
        row("S2", "e3", 0.40, 0.03, {{"x", "A"}, {"y", "B"}}),
        row("S3", "e4", -0.1, 0.06, {{"x", "A"}, {"y", "B"}}),
        row("S4", "e5", 0.55, 0.08, {{"x", "A"}, {"y", "C"}}),
        row("S4", "e6", 0.35, 0.02, {{"x", "A"}, {"y", "C"}}),
        row("S5", "e7", 0.75, 0.07, {{"x", "D"}, {"y", "B"}}),
    };
    const GapMap g = gap_map(rows, m, "x", "y", std::nullopt, meta::Tau2Method::REML);
    REQUIRE(g.cells.size() == 3);

    // (A,B): 4 effects over 3 studies: robust random-effects.
    {
        std::vector<meta::Effect> eff = {{"e1", 0.10, 0.04},
                                         {"e2", 0.25, 0.05},
                                         {"e3", 0.40, 0.03},
                                         {"e4", -0.1, 0.06}};
        std::vector<std::string> studies = {"S1", "S1", "S2", "S3"};
        const auto expected =
            meta::robust_variance(eff, studies, meta::pool_random(eff, meta::Tau2Method::REML));
        CHECK(g.cells[0].pooled.estimate == expected.estimate);
        CHECK(g.cells[0].pooled.se == expected.se);
        CHECK(g.cells[0].pooled.robust);
        CHECK(g.cells[0].pooled.m == 3);
    }
    // (A,C): 2 effects from one study: plain random-effects.
    {
        std::vector<meta::Effect> eff = {{"e5", 0.55, 0.08}, {"e6", 0.35, 0.02}};
        const auto expected = meta::pool_random(eff, meta::Tau2Method::REML);
        CHECK(g.cells[1].pooled.estimate == expected.estimate);
        CHECK(g.cells[1].pooled.se == expected.se);
        CHECK_FALSE(g.cells[1].pooled.robust);
    }
    // (D,B): single effect passes through.
    CHECK(g.cells[2].pooled.estimate == 0.75);
    CHECK(g.cells[2].pooled.k == 1);
}

TEST_CASE("sankey links carry co-occurrence weights") {
    const auto m = mapping_with({"domain", "norm"});
    std::vector<ingest::EffectRecord> rows = {
        row("S1", "e1", 0, 0.1, {{"domain", "health"}, {"norm", "default"}}),
        row("S2", "e2", 0, 0.1, {{"domain", "health"}, {"norm", "default"}}),
        row("S3", "e3", 0, 0.1, {{"domain", "energy"}, {"norm", "framing"}}),
    };
    const SankeyGraph g = sankey_flows(rows, m, {"domain", "norm"});
    REQUIRE(g.nodes.size() == 4);
    CHECK(g.nodes[0].level == "health"); // count 2 sorts first
    CHECK(g.nodes[0].count == 2);
    CHECK(g.nodes[1].level == "energy");
    CHECK(g.nodes[2].level == "default");
    CHECK(g.nodes[3].level == "framing");
    REQUIRE(g.links.size() == 2);
    CHECK(g.links[0].source == 0);
    CHECK(g.links[0].target == 2);
    CHECK(g.links[0].weight == 2);
    CHECK(g.links[1].source == 1);
    CHECK(g.links[1].target == 3);
    CHECK(g.links[1].weight == 1);

    int first_pair_total = 0;
    for (const auto& l : g.links) first_pair_total += l.weight;
    CHECK(first_pair_total == 3);
}

TEST_CASE("sankey turns missing values into explicit nodes") {
    const auto m = mapping_with({"domain", "norm"});
    std::vector<ingest::EffectRecord> rows = {
        row("S1", "e1", 0, 0.1, {{"domain", "health"}, {"norm", "default"}}),
        row("S2", "e2", 0, 0.1, {{"domain", "health"}}),
    };
    const SankeyGraph g = sankey_flows(rows, m, {"domain", "norm"});
    bool found = false;
    for (const auto& n : g.nodes)
        if (n.level == "Missing(norm)" && n.count == 1) found = true;
    CHECK(found);
    int total = 0;
    for (const auto& l : g.links) total += l.weight;
    CHECK(total == 2);
}

TEST_CASE("sankey chains three columns") {
    const auto m = mapping_with({"a", "b", "c"});
    std::vector<ingest::EffectRecord> rows = {
        row("S1", "e1", 0, 0.1, {{"a", "x"}, {"b", "y"}, {"c", "z"}}),
        row("S2", "e2", 0, 0.1, {{"a", "x"}, {"b", "y"}, {"c", "z"}}),
    };
    const SankeyGraph g = sankey_flows(rows, m, {"a", "b", "c"});
    REQUIRE(g.nodes.size() == 3);
    REQUIRE(g.links.size() == 2);
    CHECK(g.links[0].weight == 2);
    CHECK(g.links[1].weight == 2);
}

TEST_CASE("sankey validates its column list") {
    const auto m = mapping_with({"a", "b"});
    CHECK_THROWS_AS(sankey_flows({}, m, {"a"}), TooFewColumns);
    CHECK_THROWS_AS(sankey_flows({}, m, {"a", "nope"}), UnknownColumn);
}
