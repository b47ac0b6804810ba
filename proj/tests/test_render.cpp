#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "metaweave/biblio.hpp"
#include "metaweave/meta.hpp"
#include "metaweave/render.hpp"
#include "metaweave/synthmap.hpp"
#include "metaweave/tree.hpp"
#include "xml_check.hpp"

using namespace metaweave;

namespace {

void require_well_formed(const std::string& markup) {
    std::string why;
    bool ok = xml_well_formed(markup, &why);
    if (!ok) MESSAGE(why);
    REQUIRE(ok);
}

synthmap::GapMap small_map() {
    synthmap::GapMap map;
    meta::PooledResult p1;
    p1.estimate = 0.4;
    p1.k = 3;
    meta::PooledResult p2;
    p2.estimate = -0.2;
    p2.k = 1;
    map.cells.push_back({"agriculture", "animal", std::nullopt, 2, 3, p1});
    map.cells.push_back({"agriculture", "plant", std::nullopt, 1, 1, p2});
    map.x_levels = {"agriculture"};
    map.y_levels = {"animal", "plant"};
    return map;
}

biblio::WeightedGraph triangle_graph() {
    biblio::WeightedGraph g;
    g.nodes = {"ant", "bee", "cat"};
    g.edges = {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}};
    return g;
}

// tag name of each element whose attribute list mentions the marker
std::vector<std::string> tags_with(const std::string& out, const std::string& marker) {
    std::vector<std::string> tags;
    std::size_t pos = 0;
    while ((pos = out.find(marker, pos)) != std::string::npos) {
        std::size_t open = out.rfind('<', pos);
        REQUIRE(open != std::string::npos);
        std::size_t end = open + 1;
        while (end < out.size() && (std::isalnum(static_cast<unsigned char>(out[end])) ||
                                    out[end] == '-'))
            ++end;
        tags.push_back(out.substr(open + 1, end - open - 1));
        pos += marker.size();
    }
    return tags;
}

// full element text (up to the closing '>') around the first attribute match
std::string element_with(const std::string& out, const std::string& marker) {
    std::size_t pos = out.find(marker);
    REQUIRE(pos != std::string::npos);
    std::size_t open = out.rfind('<', pos);
    std::size_t close = out.find('>', pos);
    REQUIRE(open != std::string::npos);
    REQUIRE(close != std::string::npos);
    return out.substr(open, close - open + 1);
}

} // namespace

TEST_CASE("gap map draws one glyph per cell over a full grid") {
    auto map = small_map();
    auto doc = render::render_gap_map(map);
    std::string out = doc.to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"cell-glyph\"") == 2);
    // 1 column and 2 rows: 2 vertical + 3 horizontal gridlines
    CHECK(count_occurrences(out, "class=\"grid-line\"") == 5);
    CHECK(out.find("agriculture") != std::string::npos);
    CHECK(out.find("plant") != std::string::npos);
}

TEST_CASE("gap map with no cells still draws grid and axes") {
    synthmap::GapMap map;
    map.x_levels = {"a"};
    map.y_levels = {"b"};
    auto out = render::render_gap_map(map).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "cell-glyph") == 0);
    CHECK(count_occurrences(out, "class=\"grid-line\"") == 4);
}

TEST_CASE("gap map respects explicit level orders and rejects unknown levels") {
    auto map = small_map();
    render::LevelOrders orders;
    orders.x = {"agriculture"};
    orders.y = {"plant", "animal", "fungus"}; // extra level widens the grid
    auto out = render::render_gap_map(map, orders).to_string();
    require_well_formed(out);
    CHECK(out.find("fungus") != std::string::npos);

    orders.y = {"plant"}; // "animal" now unmapped
    CHECK_THROWS_AS(render::render_gap_map(map, orders), render::UnknownLevel);
}

TEST_CASE("gap map shape levels pick distinct glyph kinds") {
    synthmap::GapMap map;
    meta::PooledResult p;
    p.estimate = 0.1;
    p.k = 1;
    map.cells.push_back({"x", "y", std::string("adult"), 1, 1, p});
    map.cells.push_back({"x", "y", std::string("juvenile"), 1, 1, p});
    map.x_levels = {"x"};
    map.y_levels = {"y"};
    map.shape_levels = {"adult", "juvenile"};
    auto out = render::render_gap_map(map).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"cell-glyph\"") == 2);
    // first shape level draws a circle, second an area-matched square
    auto tags = tags_with(out, "class=\"cell-glyph\"");
    REQUIRE(tags.size() == 2);
    CHECK(tags[0] == "circle");
    CHECK(tags[1] == "rect");
}

TEST_CASE("gap map output is byte-identical across renders") {
    auto map = small_map();
    CHECK(render::render_gap_map(map).to_string() == render::render_gap_map(map).to_string());
}

TEST_CASE("sankey renders one ribbon per link and one bar per node") {
    synthmap::SankeyGraph g;
    g.nodes = {{"habitat", "forest", 3},
               {"habitat", "reef", 1},
               {"outcome", "growth", 2},
               {"outcome", "survival", 2}};
    g.links = {{0, 2, 2}, {0, 3, 1}, {1, 3, 1}};
    auto out = render::render_sankey(g).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"ribbon\"") == 3);
    CHECK(count_occurrences(out, "class=\"node-bar\"") == 4);
    CHECK(out.find("forest (3)") != std::string::npos);
    CHECK(render::render_sankey(g).to_string() == out);
}

TEST_CASE("sankey single full-weight chain keeps ribbon thickness equal to bars") {
    synthmap::SankeyGraph g;
    g.nodes = {{"a", "only", 4}, {"b", "all", 4}};
    g.links = {{0, 1, 4}};
    auto out = render::render_sankey(g).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"ribbon\"") == 1);
    // a single full-weight link: both bars span the full drawable height
    std::size_t pos = 0;
    std::set<std::string> heights;
    while ((pos = out.find("class=\"node-bar\"", pos)) != std::string::npos) {
        std::size_t open = out.rfind('<', pos);
        std::size_t close = out.find('>', pos);
        std::string bar = out.substr(open, close - open + 1);
        auto hpos = bar.find("height=\"");
        REQUIRE(hpos != std::string::npos);
        heights.insert(bar.substr(hpos + 8, bar.find('"', hpos + 8) - hpos - 8));
        pos = close;
    }
    CHECK(heights.size() == 1);
}

TEST_CASE("network triangle gives three nodes, three edges, one cluster color") {
    auto g = triangle_graph();
    std::vector<int> clusters = biblio::connected_components(g);
    auto out = render::render_network(g, clusters).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"node\"") == 3);
    CHECK(count_occurrences(out, "class=\"edge\"") == 3);
    CHECK(count_occurrences(out, "class=\"hull\"") == 1);
    // one cluster: every node carries the first palette color
    CHECK(count_occurrences(out, std::string("fill=\"") + svg::kPalette[0] + "\"") >= 3);
    CHECK(count_occurrences(out, std::string("fill=\"") + svg::kPalette[1] + "\"") == 0);
}

TEST_CASE("network components get distinct palette colors") {
    biblio::WeightedGraph g;
    g.nodes = {"a", "b", "c", "d", "e"};
    g.edges = {{0, 1, 1}, {0, 2, 2}, {1, 2, 1}, {3, 4, 5}};
    auto clusters = biblio::connected_components(g);
    auto out = render::render_network(g, clusters).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, std::string("fill=\"") + svg::kPalette[0] + "\"") >= 1);
    CHECK(count_occurrences(out, std::string("fill=\"") + svg::kPalette[1] + "\"") >= 1);
    CHECK(count_occurrences(out, "class=\"hull\"") == 1); // only the size-3 cluster
}

TEST_CASE("network layout is seed-stable and seed-sensitive") {
    auto g = triangle_graph();
    auto clusters = biblio::connected_components(g);
    render::RenderOptions base;
    auto a = render::render_network(g, clusters, base).to_string();
    auto b = render::render_network(g, clusters, base).to_string();
    CHECK(a == b);
    render::RenderOptions other;
    other.seed = 7;
    auto c = render::render_network(g, clusters, other).to_string();
    CHECK(c != a);
    CHECK(count_occurrences(c, "class=\"node\"") == 3);
    CHECK(count_occurrences(c, "class=\"edge\"") == 3);
}

TEST_CASE("chord layout spans scale with strength and fill the circle") {
    // star: hub strength 3, leaves 1 each; spans 3:1
    biblio::WeightedGraph g;
    g.nodes = {"hub", "l1", "l2", "l3"};
    g.edges = {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}};
    auto layout = render::chord_layout(g);
    REQUIRE(layout.order.size() == 4);
    CHECK(g.nodes[layout.order[0]] == "hub");
    double usable = 360.0 - 4 * layout.gap_degrees;
    CHECK(layout.spans[0] == doctest::Approx(usable * 3.0 / 6.0).epsilon(1e-12));
    CHECK(layout.spans[1] == doctest::Approx(usable / 6.0).epsilon(1e-12));
    CHECK(layout.spans[0] / layout.spans[1] == doctest::Approx(3.0).epsilon(1e-12));
    double sum = 0.0;
    for (double s : layout.spans) sum += s;
    CHECK(std::abs(sum - usable) < 0.01);

    auto out = render::render_chord(g).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"arc\"") == 4);
    CHECK(count_occurrences(out, "class=\"ribbon\"") == 3);
    CHECK(count_occurrences(out, "class=\"arc-label\"") == 4);
    CHECK(out.find("data-span=\"" + svg::fmt2(usable * 3.0 / 6.0) + "\"") != std::string::npos);
}

TEST_CASE("chord two nodes one edge renders two arcs and one ribbon") {
    biblio::WeightedGraph g;
    g.nodes = {"left", "right"};
    g.edges = {{0, 1, 5}};
    auto out = render::render_chord(g).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"arc\"") == 2);
    CHECK(count_occurrences(out, "class=\"ribbon\"") == 1);
    CHECK(render::render_chord(g).to_string() == out);
}

TEST_CASE("chord equal-strength ties order by label") {
    biblio::WeightedGraph g;
    g.nodes = {"zeta", "alpha"};
    g.edges = {{0, 1, 2}};
    auto layout = render::chord_layout(g);
    CHECK(g.nodes[layout.order[0]] == "alpha");
    CHECK(g.nodes[layout.order[1]] == "zeta");
}

TEST_CASE("annotated tree draws a point and whisker per annotation") {
    auto t = tree::parse_newick("((A:1,B:1):1,C:2);");
    std::vector<render::TipAnnotation> notes = {
        {"A", 0.2, 0.1, 0.3, "insects"},
        {"B", -0.1, -0.4, 0.2, "insects"},
        {"C", 0.5, 0.3, 0.7, "plants"},
    };
    auto out = render::render_tree(t, notes).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"tip-point\"") == 3);
    CHECK(count_occurrences(out, "class=\"ci-whisker\"") == 3);
    CHECK(count_occurrences(out, "class=\"tip-label\"") == 3);
    // 4 horizontal segments (every non-root node) + 2 vertical connectors
    CHECK(count_occurrences(out, "class=\"branch\"") == 6);
    CHECK(render::render_tree(t, notes).to_string() == out);
}

TEST_CASE("unannotated tips render grey") {
    auto t = tree::parse_newick("((A:1,B:1):1,C:2);");
    std::vector<render::TipAnnotation> notes = {{"A", 0.2, 0.1, 0.3, "insects"}};
    auto out = render::render_tree(t, notes).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, std::string("fill=\"") + svg::kMissingColor + "\"") == 2);
    CHECK(count_occurrences(out, "class=\"tip-point\"") == 1);
}

TEST_CASE("annotation for a label that is not a tip fails") {
    auto t = tree::parse_newick("((A:1,B:1):1,C:2);");
    std::vector<render::TipAnnotation> notes = {{"missing", 0.0, 0.0, 0.0, "g"}};
    CHECK_THROWS_AS(render::render_tree(t, notes), render::UnknownSpecies);
}

TEST_CASE("orchard renders fruit per effect with trunk CI and PI") {
    std::vector<meta::Effect> effects = {{"e1", 0.0, 0.04}, {"e2", 0.5, 0.04},
                                         {"e3", 1.0, 0.04}};
    auto pooled = meta::pool_random(effects, meta::Tau2Method::DL);
    REQUIRE(pooled.pi_low.has_value());
    // hand-checked interval 0.5 +- 12.706*sqrt(0.21+1/12)
    CHECK(*pooled.pi_low == doctest::Approx(-6.382).epsilon(1e-3));
    CHECK(*pooled.pi_high == doctest::Approx(7.382).epsilon(1e-3));
    std::map<std::string, double> metric = {{"e1", 10.0}, {"e2", 450.0}, {"e3", 100.0}};
    auto out = render::render_orchard(pooled, effects, metric).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"fruit\"") == 3);
    CHECK(count_occurrences(out, "class=\"trunk-ci\"") == 1);
    CHECK(count_occurrences(out, "class=\"trunk-pi\"") == 1);
    // e2 exceeds the default threshold of 400 and turns grey
    CHECK(count_occurrences(out, std::string("fill=\"") + svg::kMissingColor + "\"") == 1);

    // PI endpoints map to the expected pixel coordinates
    double lo = *pooled.pi_low, hi = *pooled.pi_high;
    double pad = 0.06 * (hi - lo);
    auto to_px = [&](double v) {
        return 150.0 + (v - (lo - pad)) / ((hi + pad) - (lo - pad)) * (920.0 - 150.0);
    };
    std::string pi_line = element_with(out, "class=\"trunk-pi\"");
    CHECK(pi_line.find("x1=\"" + svg::fmt2(to_px(lo)) + "\"") != std::string::npos);
    CHECK(pi_line.find("x2=\"" + svg::fmt2(to_px(hi)) + "\"") != std::string::npos);
    CHECK(render::render_orchard(pooled, effects, metric).to_string() == out);
}

TEST_CASE("orchard constant metric gives equal bubble radii") {
    std::vector<meta::Effect> effects = {{"e1", 0.0, 0.04}, {"e2", 0.5, 0.04},
                                         {"e3", 1.0, 0.04}};
    auto pooled = meta::pool_random(effects, meta::Tau2Method::DL);
    std::map<std::string, double> metric = {{"e1", 50.0}, {"e2", 50.0}, {"e3", 50.0}};
    auto out = render::render_orchard(pooled, effects, metric).to_string();
    require_well_formed(out);
    std::set<std::string> radii;
    std::size_t pos = 0;
    while ((pos = out.find("class=\"fruit\"", pos)) != std::string::npos) {
        auto rpos = out.find("r=\"", pos);
        REQUIRE(rpos != std::string::npos);
        auto rend = out.find('"', rpos + 3);
        radii.insert(out.substr(rpos + 3, rend - rpos - 3));
        pos = rend;
    }
    CHECK(radii.size() == 1);
}

TEST_CASE("orchard panels split by group and missing metrics fail") {
    std::vector<meta::Effect> g1 = {{"a1", 0.1, 0.04}, {"a2", 0.3, 0.04}, {"a3", 0.2, 0.05}};
    std::vector<meta::Effect> g2 = {{"b1", -0.2, 0.03}, {"b2", 0.0, 0.06}, {"b3", -0.1, 0.04}};
    std::vector<render::OrchardPanel> panels = {
        {"birds", meta::pool_random(g1, meta::Tau2Method::REML), g1},
        {"fish", meta::pool_random(g2, meta::Tau2Method::REML), g2},
    };
    std::map<std::string, double> metric = {{"a1", 1}, {"a2", 2}, {"a3", 3},
                                            {"b1", 4}, {"b2", 5}, {"b3", 6}};
    auto out = render::render_orchard(panels, metric).to_string();
    require_well_formed(out);
    CHECK(count_occurrences(out, "class=\"fruit\"") == 6);
    CHECK(count_occurrences(out, "class=\"trunk-ci\"") == 2);
    CHECK(count_occurrences(out, "class=\"panel-label\"") == 2);

    metric.erase("b2");
    CHECK_THROWS_AS(render::render_orchard(panels, metric), render::MetricMissing);
}

TEST_CASE("report bundles figures and tables with provenance") {
    render::ReportInputs inputs;
    auto map = small_map();
    inputs.figures.push_back({"Evidence gap map", render::render_gap_map(map).to_string()});
    inputs.version = "0.1.0";
    auto html = render::build_report(inputs);
    CHECK(count_occurrences(html, "<section class=\"figure\">") == 1);
    CHECK(count_occurrences(html, "<section class=\"table\">") == 0);
    CHECK(html.find("tool version 0.1.0") != std::string::npos);
    CHECK(html.find("seed 42") != std::string::npos);
    // self-contained: no external asset references
    CHECK(html.find("<link") == std::string::npos);
    CHECK(html.find("src=") == std::string::npos);
}

TEST_CASE("report with full artifact set has six figures and four tables") {
    render::ReportInputs inputs;
    for (const char* name : {"map", "sankey", "network", "chord", "tree", "orchard"})
        inputs.figures.push_back({name, "<svg xmlns=\"http://www.w3.org/2000/svg\"></svg>"});
    meta::PooledResult pooled;
    pooled.estimate = 0.3;
    pooled.k = 5;
    inputs.pooled_rows.push_back({"all effects", pooled});
    inputs.tabulations.push_back({"journal", {{"Oikos", 3}, {"Unreported", 1}}});
    meta::LocoEntry entry;
    entry.cluster = "s1";
    entry.without = pooled;
    entry.delta = 0.01;
    inputs.loco.push_back(entry);
    inputs.cumulative.push_back({1999, pooled});
    inputs.input_hashes.push_back({"effects.csv", "a1b2c3"});
    inputs.version = "0.1.0";
    auto html = render::build_report(inputs);
    CHECK(count_occurrences(html, "<section class=\"figure\">") == 6);
    CHECK(count_occurrences(html, "<section class=\"table\">") == 4);
    CHECK(html.find("fnv1a64:a1b2c3") != std::string::npos);
    CHECK(render::build_report(inputs) == html);
}

TEST_CASE("report with nothing to show fails") {
    CHECK_THROWS_AS(render::build_report({}), render::NothingToReport);
}
