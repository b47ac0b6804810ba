#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "metaweave/cli.hpp"
#include "metaweave/fsutil.hpp"
#include "xml_check.hpp"

namespace fs = std::filesystem;
using metaweave::fsutil::read_file;

namespace {

const std::string kData = std::string(METAWEAVE_TEST_DATA_DIR) + "/effects.csv";
const std::string kConfig = std::string(METAWEAVE_TEST_DATA_DIR) + "/columns.toml";
const std::string kBib = std::string(METAWEAVE_TEST_DATA_DIR) + "/refs.bib";
const std::string kTree = std::string(METAWEAVE_TEST_DATA_DIR) + "/tree.nwk";

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"metaweave"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return metaweave::cli::run(static_cast<int>(argv.size()), argv.data());
}

// fresh scratch directory per test, removed up front so reruns start clean
fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("metaweave_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("usage errors exit 1 and help exits 0") {
    CHECK(run_cli({"no-such-subcommand"}) == 1);
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"map"}) == 1); // missing required flags
    CHECK(run_cli({"--help"}) == 0);
    CHECK(run_cli({"--version"}) == 0);
}

TEST_CASE("missing input file exits 2") {
    auto out = scratch("missing");
    CHECK(run_cli({"map", "--data", "/nonexistent.csv", "--config", kConfig, "--x",
                   "intervention", "--y", "outcome", "--out", out.string()}) == 2);
    CHECK(run_cli({"biblio-authors", "--bib", "/nonexistent.bib", "--out", out.string()}) == 2);
}

TEST_CASE("numerical failures exit 3") {
    auto dir = scratch("numeric");
    // a single study means leave-one-cluster-out has nothing to drop
    std::ofstream(dir / "one_study.csv")
        << "study,es,yi,vi,intervention,outcome,taxon,species,year,doi\n"
           "S1,S1.1,0.1,0.04,habitat,abundance,insect,Apis mellifera,2015,\n"
           "S1,S1.2,0.3,0.04,habitat,abundance,insect,Apis mellifera,2015,\n";
    CHECK(run_cli({"loco", "--data", (dir / "one_study.csv").string(), "--config", kConfig,
                   "--out", dir.string()}) == 3);
}

TEST_CASE("map writes cells.json and gap_map.svg") {
    auto out = scratch("map");
    CHECK(run_cli({"map", "--data", kData, "--config", kConfig, "--x", "intervention", "--y",
                   "outcome", "--out", out.string()}) == 0);

    auto cells = nlohmann::json::parse(read_file(out / "cells.json"));
    CHECK(cells["cells"].size() == 4); // 2 interventions x 2 outcomes, all populated
    CHECK(cells["x_levels"].size() == 2);
    for (const auto& cell : cells["cells"]) {
        CHECK(cell["n_effects"].get<int>() >= 1);
        CHECK(cell["pooled"]["k"].get<int>() == cell["n_effects"].get<int>());
    }

    std::string svg = read_file(out / "gap_map.svg");
    std::string why;
    CHECK_MESSAGE(xml_well_formed(svg, &why), why);
    CHECK(count_occurrences(svg, "class=\"cell-glyph\"") == 4);
}

TEST_CASE("pool honours the tau2 flag and group subgrouping") {
    auto out = scratch("pool");
    CHECK(run_cli({"pool", "--data", kData, "--config", kConfig, "--group", "intervention",
                   "--tau2", "dl", "--out", out.string()}) == 0);
    auto pooled = nlohmann::json::parse(read_file(out / "pooled.json"));
    REQUIRE(pooled.size() == 3); // all effects + 2 intervention levels
    CHECK(pooled[0]["scope"] == "all effects");
    CHECK(pooled[0]["result"]["k"] == 12);
    CHECK(pooled[0]["result"]["method"] == "RE-DL");
    CHECK(pooled[0]["result"]["robust"] == true);
    CHECK(pooled[1]["scope"] == "intervention = habitat");

    CHECK(run_cli({"pool", "--data", kData, "--config", kConfig, "--tau2", "bogus", "--out",
                   out.string()}) == 1);
}

TEST_CASE("sankey, phylo, and biblio commands produce well-formed artifacts") {
    auto out = scratch("figures");
    std::string why;

    CHECK(run_cli({"sankey", "--data", kData, "--config", kConfig, "--sankey-cols",
                   "intervention,outcome,taxon", "--out", out.string()}) == 0);
    CHECK(xml_well_formed(read_file(out / "sankey.svg"), &why));
    auto sankey = nlohmann::json::parse(read_file(out / "sankey.json"));
    CHECK(sankey["nodes"].size() == 6); // 2 levels per column

    CHECK(run_cli({"phylo", "--tree", kTree, "--data", kData, "--config", kConfig, "--group",
                   "taxon", "--out", out.string()}) == 0);
    CHECK(xml_well_formed(read_file(out / "phylo_tree.svg"), &why));
    auto phylo = nlohmann::json::parse(read_file(out / "phylo.json"));
    CHECK(phylo["labels"].size() == 4); // matrix over the matched tips only
    std::string tree_svg = read_file(out / "phylo_tree.svg");
    CHECK(count_occurrences(tree_svg, "class=\"tip-label\"") == 5); // full tree drawn

    CHECK(run_cli({"biblio-authors", "--bib", kBib, "--out", out.string()}) == 0);
    auto authors = nlohmann::json::parse(read_file(out / "authors_graph.json"));
    CHECK(authors["nodes"].size() == 5); // smith a. folds into smith, alice
    CHECK(xml_well_formed(read_file(out / "authors_network.svg"), &why));

    CHECK(run_cli({"biblio-countries", "--bib", kBib, "--out", out.string()}) == 0);
    auto countries = nlohmann::json::parse(read_file(out / "countries_graph.json"));
    CHECK(countries["nodes"].size() == 5);
    CHECK(xml_well_formed(read_file(out / "countries_chord.svg"), &why));
}

TEST_CASE("alt-fetch --cache-only with an empty cache reports misses and exits 4") {
    auto dir = scratch("altfetch");
    auto cache = dir / "cache";
    CHECK(run_cli({"alt-fetch", "--data", kData, "--config", kConfig, "--cache",
                   cache.string(), "--cache-only", "--out", dir.string()}) == 4);
    auto report = nlohmann::json::parse(read_file(dir / "altmetrics.json"));
    CHECK(report["n_errors"].get<int>() == 9); // every DOI-bearing row misses
    for (const auto& item : report["items"]) CHECK(item.contains("error"));
}

TEST_CASE("alt-plot reads scores from the cache and renders an orchard") {
    auto dir = scratch("altplot");
    auto cache = dir / "cache";
    fs::create_directories(cache);
    // one cached DOI above the grey threshold, one tracked below, one untracked
    auto put = [&](const std::string& doi, const std::string& body) {
        std::ofstream(cache / (metaweave::fsutil::fnv1a64_hex(doi) + ".json")) << body;
    };
    put("10.1000/alpha",
        R"({"doi":"10.1000/alpha","status":"tracked","fetched_at":"2026-01-01T00:00:00Z",)"
        R"("score":950.5,"cited_by_policies_count":3,"cited_by_patents_count":1})");
    put("10.1000/beta",
        R"({"doi":"10.1000/beta","status":"tracked","fetched_at":"2026-01-01T00:00:00Z",)"
        R"("score":12.0,"cited_by_policies_count":0,"cited_by_patents_count":0})");
    put("10.1000/gamma",
        R"({"doi":"10.1000/gamma","status":"not_tracked","fetched_at":"2026-01-01T00:00:00Z"})");

    CHECK(run_cli({"alt-plot", "--data", kData, "--config", kConfig, "--cache", cache.string(),
                   "--group", "intervention", "--out", dir.string()}) == 0);
    std::string svg = read_file(dir / "orchard.svg");
    std::string why;
    CHECK_MESSAGE(xml_well_formed(svg, &why), why);
    CHECK(count_occurrences(svg, "class=\"fruit\"") == 12);
    CHECK(count_occurrences(svg, "class=\"panel-label\"") == 2);
    // the two S1 effects carry the over-threshold score and render grey
    CHECK(count_occurrences(svg, "fill=\"#BDBDBD\"") == 2);
}

TEST_CASE("report embeds the same figure bytes as the per-figure command") {
    auto out_map = scratch("report_map");
    auto out_rep = scratch("report_full");
    CHECK(run_cli({"map", "--data", kData, "--config", kConfig, "--x", "intervention", "--y",
                   "outcome", "--out", out_map.string()}) == 0);
    CHECK(run_cli({"report", "--data", kData, "--config", kConfig, "--x", "intervention",
                   "--y", "outcome", "--sankey-cols", "intervention,outcome", "--bib", kBib,
                   "--tree", kTree, "--group", "intervention", "--out", out_rep.string()}) == 0);

    std::string html = read_file(out_rep / "report.html");
    std::string gap_map = read_file(out_map / "gap_map.svg");
    CHECK(html.find(gap_map) != std::string::npos);
    CHECK(count_occurrences(html, "<section class=\"figure\">") == 6);
    CHECK(count_occurrences(html, "<section class=\"table\">") == 4);
    CHECK(html.find("fnv1a64:") != std::string::npos);
}

TEST_CASE("cumulative and loco write their tables") {
    auto out = scratch("tables");
    CHECK(run_cli({"cumulative", "--data", kData, "--config", kConfig, "--out",
                   out.string()}) == 0);
    auto cumulative = nlohmann::json::parse(read_file(out / "cumulative.json"));
    REQUIRE(cumulative.size() == 5); // 2015, 2016, 2018, 2019, 2021
    CHECK(cumulative[0]["through_year"] == 2015);
    CHECK(cumulative[4]["result"]["k"] == 12);

    CHECK(run_cli({"loco", "--data", kData, "--config", kConfig, "--out", out.string()}) == 0);
    auto loco = nlohmann::json::parse(read_file(out / "loco.json"));
    CHECK(loco["omissions"].size() == 5); // one per study
}
