#include "metaweave/cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metaweave/altmetric.hpp"
#include "metaweave/biblio.hpp"
#include "metaweave/errors.hpp"
#include "metaweave/fsutil.hpp"
#include "metaweave/ingest.hpp"
#include "metaweave/jsonio.hpp"
#include "metaweave/meta.hpp"
#include "metaweave/phylo.hpp"
#include "metaweave/render.hpp"
#include "metaweave/stats.hpp"
#include "metaweave/synthmap.hpp"
#include "metaweave/tree.hpp"

namespace metaweave::cli {

namespace {

namespace fs = std::filesystem;

struct Opts {
    std::string data;
    std::string config;
    std::string bib;
    std::string tree;
    std::string cache;
    std::string out = "out";
    std::string x;
    std::string y;
    std::string shape;
    std::string group;
    std::vector<std::string> sankey_cols;
    double rho = 0.5;
    std::string tau2 = "reml";
    std::uint64_t seed = 42;
    double threshold = 400.0;
    double rate = 1.0;
    bool cache_only = false;
    bool live = false;
    double width = 960.0;
    double height = 640.0;
};

meta::Tau2Method tau2_method(const Opts& o) {
    return o.tau2 == "dl" ? meta::Tau2Method::DL : meta::Tau2Method::REML;
}

render::RenderOptions render_options(const Opts& o) {
    render::RenderOptions r;
    r.width = o.width;
    r.height = o.height;
    r.seed = o.seed;
    return r;
}

std::vector<ingest::EffectRecord> load_effects(const Opts& o, ingest::ColumnMapping* out_map) {
    auto mapping = ingest::ColumnMapping::from_toml(fsutil::read_file(o.config));
    if (out_map) *out_map = mapping;
    return ingest::parse_dataset(fsutil::read_file(o.data), mapping);
}

std::vector<ingest::BibRecord> load_bib(const std::string& path) {
    std::string text = fsutil::read_file(path);
    if (fs::path(path).extension() == ".ris") return ingest::parse_ris(text);
    return ingest::parse_bibtex(text);
}

std::vector<meta::Effect> to_meta(const std::vector<ingest::EffectRecord>& records) {
    std::vector<meta::Effect> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.effect_key, r.yi, r.vi});
    return out;
}

std::vector<std::string> study_labels(const std::vector<ingest::EffectRecord>& records) {
    std::vector<std::string> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.study_key);
    return out;
}

/// Random-effects pool with study-clustered robust errors when the data
/// can support them; single effects fall through to the common model.
meta::PooledResult pool_policy(const std::vector<ingest::EffectRecord>& records,
                               meta::Tau2Method method) {
    auto effects = to_meta(records);
    if (effects.size() < 2) return meta::pool_common(effects);
    auto pooled = meta::pool_random(effects, method);
    auto studies = study_labels(records);
    if (std::set<std::string>(studies.begin(), studies.end()).size() >= 2)
        return meta::robust_variance(effects, studies, pooled);
    return pooled;
}

void write_artifact(const Opts& o, const std::string& name, const std::string& content,
                    const std::string& note) {
    fs::path path = fs::path(o.out) / name;
    fsutil::write_file_atomic(path, content);
    std::cout << "wrote " << path.string() << note << "\n";
}

std::string plural(std::size_t n, const char* word) {
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

// --- figure builders shared by single commands and `report` ---------------

svg::SvgDocument build_gap_map(const Opts& o, const std::vector<ingest::EffectRecord>& effects,
                               const ingest::ColumnMapping& mapping, synthmap::GapMap* out_map) {
    std::optional<std::string> shape;
    if (!o.shape.empty()) shape = o.shape;
    auto map = synthmap::gap_map(effects, mapping, o.x, o.y, shape, tau2_method(o));
    if (out_map) *out_map = map;
    return render::render_gap_map(map, {}, render_options(o));
}

svg::SvgDocument build_sankey(const Opts& o, const std::vector<ingest::EffectRecord>& effects,
                              const ingest::ColumnMapping& mapping,
                              synthmap::SankeyGraph* out_graph) {
    auto graph = synthmap::sankey_flows(effects, mapping, o.sankey_cols);
    if (out_graph) *out_graph = graph;
    return render::render_sankey(graph, render_options(o));
}

struct PhyloArtifacts {
    phylo::CorrelationMatrix matrix;
    svg::SvgDocument figure{0, 0, ""};
    std::size_t n_annotated = 0;
    std::size_t n_unmatched = 0;
};

PhyloArtifacts build_phylo(const Opts& o, const std::vector<ingest::EffectRecord>* effects) {
    PhyloArtifacts art;
    std::vector<std::string> warnings;
    auto full_tree = tree::parse_newick(fsutil::read_file(o.tree), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << o.tree << ": " << w << "\n";

    std::vector<render::TipAnnotation> annotations;
    if (effects) {
        auto aggregated = phylo::species_aggregate(*effects, o.rho);
        std::vector<std::string> species;
        species.reserve(aggregated.size());
        for (const auto& agg : aggregated) species.push_back(agg.key);
        auto match = phylo::match_tips(full_tree, species);
        art.n_unmatched = match.unmatched_species.size();

        // group label per species: first value of the group moderator seen
        std::map<std::string, std::string> group_of;
        if (!o.group.empty())
            for (const auto& record : *effects) {
                if (!record.species) continue;
                auto mod = record.moderators.find(o.group);
                if (mod == record.moderators.end()) continue;
                group_of.emplace(*record.species, mod->second);
            }
        const double z = stats::normal_quantile(0.975);
        std::vector<std::string> kept;
        for (const auto& agg : aggregated) {
            auto tip = match.species_to_tip.find(agg.key);
            if (tip == match.species_to_tip.end()) continue;
            double half = z * std::sqrt(agg.vi);
            auto group = group_of.count(agg.key) ? group_of[agg.key] : std::string("All");
            annotations.push_back({tip->second, agg.yi, agg.yi - half, agg.yi + half, group});
            kept.push_back(tip->second);
        }
        art.n_annotated = annotations.size();
        art.matrix = phylo::phylo_correlation(phylo::prune_tree(full_tree, kept));
    } else {
        art.matrix = phylo::phylo_correlation(full_tree);
    }
    art.figure = render::render_tree(full_tree, annotations, render_options(o));
    return art;
}

struct GraphArtifacts {
    biblio::WeightedGraph graph;
    std::vector<int> clusters;
    biblio::ClusterSummary summary;
};

GraphArtifacts build_author_graph(const std::vector<ingest::BibRecord>& records) {
    GraphArtifacts art;
    art.graph = biblio::coauthorship_graph(biblio::author_incidence(records));
    art.clusters = biblio::connected_components(art.graph);
    art.summary = biblio::cluster_summary(art.graph, art.clusters);
    return art;
}

GraphArtifacts build_country_graph(const std::vector<ingest::BibRecord>& records) {
    GraphArtifacts art;
    art.graph = biblio::country_coupling_graph(records);
    art.clusters = biblio::connected_components(art.graph);
    art.summary = biblio::cluster_summary(art.graph, art.clusters);
    return art;
}

/// Bubble metric per effect key: cached Altmetric score via the effect's
/// DOI; zero for untracked, uncached, or DOI-less effects. Reads the
/// cache directory only, never the network.
std::map<std::string, double> bubble_metric(const Opts& o,
                                            const std::vector<ingest::EffectRecord>& effects) {
    std::map<std::string, double> score_of_doi;
    if (!o.cache.empty() && fs::exists(o.cache))
        for (const auto& record : altclient::load_cache(o.cache))
            score_of_doi[record.doi] = record.counts ? record.counts->score : 0.0;
    std::map<std::string, double> metric;
    for (const auto& record : effects) {
        double score = 0.0;
        if (record.doi) {
            auto it = score_of_doi.find(ingest::normalize_doi(*record.doi));
            if (it != score_of_doi.end()) score = it->second;
        }
        metric[record.effect_key] = score;
    }
    return metric;
}

svg::SvgDocument build_orchard(const Opts& o,
                               const std::vector<ingest::EffectRecord>& records) {
    auto metric = bubble_metric(o, records);
    if (o.group.empty()) {
        auto pooled = pool_policy(records, tau2_method(o));
        return render::render_orchard(pooled, to_meta(records), metric, o.threshold,
                                      render_options(o));
    }
    std::map<std::string, std::vector<ingest::EffectRecord>> groups;
    for (const auto& record : records) {
        auto mod = record.moderators.find(o.group);
        groups[mod == record.moderators.end() ? "Unreported" : mod->second].push_back(record);
    }
    std::vector<render::OrchardPanel> panels;
    for (const auto& [label, members] : groups)
        panels.push_back({label, pool_policy(members, tau2_method(o)), to_meta(members)});
    return render::render_orchard(panels, metric, o.threshold, render_options(o));
}

// --- subcommand handlers ----------------------------------------------------

int cmd_map(const Opts& o) {
    ingest::ColumnMapping mapping;
    auto effects = load_effects(o, &mapping);
    synthmap::GapMap map;
    auto figure = build_gap_map(o, effects, mapping, &map);
    write_artifact(o, "cells.json", jsonio::cells_json(map),
                   " (" + plural(map.cells.size(), "cell") + ", " +
                       std::to_string(map.remainder) + " unmapped rows)");
    write_artifact(o, "gap_map.svg", figure.to_string(), "");
    return 0;
}

int cmd_sankey(const Opts& o) {
    ingest::ColumnMapping mapping;
    auto effects = load_effects(o, &mapping);
    synthmap::SankeyGraph graph;
    auto figure = build_sankey(o, effects, mapping, &graph);
    write_artifact(o, "sankey.json", jsonio::sankey_json(graph),
                   " (" + plural(graph.nodes.size(), "node") + ", " +
                       plural(graph.links.size(), "link") + ")");
    write_artifact(o, "sankey.svg", figure.to_string(), "");
    return 0;
}

int cmd_phylo(const Opts& o) {
    std::vector<ingest::EffectRecord> effects;
    bool have_data = !o.data.empty();
    if (have_data) effects = load_effects(o, nullptr);
    auto art = build_phylo(o, have_data ? &effects : nullptr);
    std::string note = " (" + plural(art.matrix.labels.size(), "tip") + ")";
    write_artifact(o, "phylo.json", jsonio::phylo_json(art.matrix), note);
    std::string fig_note;
    if (have_data)
        fig_note = " (" + plural(art.n_annotated, "annotated tip") + ", " +
                   std::to_string(art.n_unmatched) + " unmatched species)";
    write_artifact(o, "phylo_tree.svg", art.figure.to_string(), fig_note);
    return 0;
}

int cmd_biblio_authors(const Opts& o) {
    auto records = load_bib(o.bib);
    auto art = build_author_graph(records);
    write_artifact(o, "authors_graph.json", jsonio::graph_json(art.graph, art.clusters),
                   " (" + plural(art.graph.nodes.size(), "author") + ", " +
                       plural(art.graph.edges.size(), "edge") + ", " +
                       plural(art.summary.n_clusters, "cluster") + ")");
    write_artifact(
        o, "authors_network.svg",
        render::render_network(art.graph, art.clusters, render_options(o)).to_string(), "");
    return 0;
}

int cmd_biblio_countries(const Opts& o) {
    auto records = load_bib(o.bib);
    auto art = build_country_graph(records);
    write_artifact(o, "countries_graph.json", jsonio::graph_json(art.graph, art.clusters),
                   " (" + std::to_string(art.graph.nodes.size()) +
                       (art.graph.nodes.size() == 1 ? " country, " : " countries, ") +
                       plural(art.graph.edges.size(), "edge") + ")");
    write_artifact(o, "countries_chord.svg",
                   render::render_chord(art.graph, render_options(o)).to_string(), "");
    return 0;
}

int cmd_alt_fetch(const Opts& o) {
    auto effects = load_effects(o, nullptr);
    std::vector<std::string> dois;
    for (const auto& record : effects)
        if (record.doi) dois.push_back(*record.doi);

    altclient::ClientOptions copts;
    copts.cache_dir = o.cache;
    copts.rate_limit_per_sec = o.rate;
    std::unique_ptr<altclient::HttpTransport> transport;
    if (!o.cache_only) transport = altclient::make_live_transport();
    auto clock = altclient::make_system_clock();
    altclient::AltmetricClient client(copts, transport.get(), clock.get());

    auto mode = o.cache_only ? altclient::FetchMode::CacheOnly : altclient::FetchMode::Live;
    auto batch = client.fetch_batch(dois, mode);
    for (const auto& item : batch.items)
        if (item.error) std::cerr << item.doi << ": " << *item.error << "\n";
    write_artifact(o, "altmetrics.json", jsonio::altmetrics_json(batch),
                   " (" + plural(batch.items.size(), "DOI") + ", " +
                       std::to_string(batch.n_errors) + " errors)");
    return batch.n_errors > 0 ? 4 : 0;
}

int cmd_alt_plot(const Opts& o) {
    auto records = load_effects(o, nullptr);
    auto figure = build_orchard(o, records);
    write_artifact(o, "orchard.svg", figure.to_string(),
                   " (" + plural(records.size(), "effect") + ")");
    return 0;
}

int cmd_pool(const Opts& o) {
    auto records = load_effects(o, nullptr);
    std::vector<std::pair<std::string, meta::PooledResult>> rows;
    rows.push_back({"all effects", pool_policy(records, tau2_method(o))});
    if (!o.group.empty()) {
        std::map<std::string, std::vector<ingest::EffectRecord>> groups;
        for (const auto& record : records) {
            auto mod = record.moderators.find(o.group);
            groups[mod == record.moderators.end() ? "Unreported" : mod->second].push_back(
                record);
        }
        for (const auto& [label, members] : groups)
            rows.push_back({o.group + " = " + label, pool_policy(members, tau2_method(o))});
    }
    write_artifact(o, "pooled.json", jsonio::pooled_json(rows),
                   " (k=" + std::to_string(rows.front().second.k) + ", " +
                       plural(rows.size(), "row") + ")");
    return 0;
}

int cmd_loco(const Opts& o) {
    auto records = load_effects(o, nullptr);
    auto entries =
        meta::leave_one_cluster_out(to_meta(records), study_labels(records), tau2_method(o));
    auto full = pool_policy(records, tau2_method(o));
    write_artifact(o, "loco.json", jsonio::loco_json(entries, full.estimate),
                   " (" + plural(entries.size(), "cluster") + ")");
    return 0;
}

int cmd_cumulative(const Opts& o) {
    auto records = load_effects(o, nullptr);
    std::vector<std::optional<int>> years;
    years.reserve(records.size());
    for (const auto& record : records) years.push_back(record.year);
    auto steps = meta::cumulative_pool(to_meta(records), years, tau2_method(o));
    write_artifact(o, "cumulative.json", jsonio::cumulative_json(steps),
                   " (" + plural(steps.size(), "year") + ")");
    return 0;
}

int cmd_report(const Opts& o) {
    ingest::ColumnMapping mapping;
    auto effects = load_effects(o, &mapping);

    render::ReportInputs inputs;
    inputs.seed = o.seed;
    inputs.version = kVersion;

    if (!o.x.empty() && !o.y.empty())
        inputs.figures.push_back(
            {"Evidence gap map", build_gap_map(o, effects, mapping, nullptr).to_string()});
    if (o.sankey_cols.size() >= 2)
        inputs.figures.push_back(
            {"Moderator composition", build_sankey(o, effects, mapping, nullptr).to_string()});
    if (!o.tree.empty())
        inputs.figures.push_back(
            {"Annotated phylogeny", build_phylo(o, &effects).figure.to_string()});

    std::vector<ingest::BibRecord> bib;
    if (!o.bib.empty()) {
        bib = load_bib(o.bib);
        auto authors = build_author_graph(bib);
        inputs.figures.push_back(
            {"Co-authorship network",
             render::render_network(authors.graph, authors.clusters, render_options(o))
                 .to_string()});
        auto countries = build_country_graph(bib);
        inputs.figures.push_back(
            {"Country coupling",
             render::render_chord(countries.graph, render_options(o)).to_string()});
    }
    inputs.figures.push_back({"Orchard plot", build_orchard(o, effects).to_string()});

    inputs.pooled_rows.push_back({"all effects", pool_policy(effects, tau2_method(o))});
    if (!o.group.empty()) {
        auto pooled = meta::subgroup_pool(to_meta(effects), [&] {
            std::vector<std::string> labels;
            for (const auto& record : effects) {
                auto mod = record.moderators.find(o.group);
                labels.push_back(mod == record.moderators.end() ? "Unreported" : mod->second);
            }
            return labels;
        }(), tau2_method(o));
        for (const auto& [label, result] : pooled)
            inputs.pooled_rows.push_back({o.group + " = " + label, result});
    }

    if (!bib.empty())
        for (const char* field : {"journal", "year", "country"})
            inputs.tabulations.push_back({field, biblio::tabulate_field(bib, field)});

    inputs.loco =
        meta::leave_one_cluster_out(to_meta(effects), study_labels(effects), tau2_method(o));

    bool all_years = !effects.empty();
    for (const auto& record : effects) all_years = all_years && record.year.has_value();
    if (all_years) {
        std::vector<std::optional<int>> years;
        for (const auto& record : effects) years.push_back(record.year);
        inputs.cumulative = meta::cumulative_pool(to_meta(effects), years, tau2_method(o));
    }

    for (const auto& [name, path] : std::initializer_list<std::pair<const char*, std::string>>{
             {"data", o.data}, {"config", o.config}, {"bib", o.bib}, {"tree", o.tree}})
        if (!path.empty())
            inputs.input_hashes.push_back(
                {fs::path(path).filename().string(), fsutil::fnv1a64_hex(fsutil::read_file(path))});

    auto html = render::build_report(inputs);
    write_artifact(o, "report.html", html,
                   " (" + plural(inputs.figures.size(), "figure") + ", 4 tables)");
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    Opts o;
    CLI::App app{"research synthesis toolkit: meta-analysis, evidence maps, "
                 "bibliometric networks, phylogenies, and report assembly"};
    app.set_version_flag("--version", std::string("metaweave ") + kVersion);
    app.require_subcommand(1);

    auto add_data = [&](CLI::App* cmd) {
        cmd->add_option("--data", o.data, "effect table (CSV)")->required();
        cmd->add_option("--config", o.config, "column mapping (TOML)")->required();
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out, "output directory (default out)");
    };
    auto add_render = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seed, "layout and jitter seed (default 42)");
        cmd->add_option("--width", o.width, "figure width in px (default 960)");
        cmd->add_option("--height", o.height, "figure height in px (default 640)");
    };
    auto add_tau2 = [&](CLI::App* cmd) {
        cmd->add_option("--tau2", o.tau2, "heterogeneity estimator (default reml)")
            ->check(CLI::IsMember({"dl", "reml"}));
    };
    auto add_rho = [&](CLI::App* cmd) {
        cmd->add_option("--rho", o.rho, "within-study correlation (default 0.5)")
            ->check(CLI::Range(0.0, 1.0));
    };

    std::map<std::string, int (*)(const Opts&)> handlers;

    auto* map_cmd = app.add_subcommand("map", "evidence gap map cells and figure");
    add_data(map_cmd);
    map_cmd->add_option("--x", o.x, "column for the x axis")->required();
    map_cmd->add_option("--y", o.y, "column for the y axis")->required();
    map_cmd->add_option("--shape", o.shape, "optional third dimension column");
    add_tau2(map_cmd);
    add_render(map_cmd);
    add_out(map_cmd);
    handlers["map"] = cmd_map;

    auto* sankey_cmd = app.add_subcommand("sankey", "moderator composition flows");
    add_data(sankey_cmd);
    sankey_cmd
        ->add_option("--sankey-cols", o.sankey_cols, "ordered moderator columns (comma separated)")
        ->required()
        ->delimiter(',');
    add_render(sankey_cmd);
    add_out(sankey_cmd);
    handlers["sankey"] = cmd_sankey;

    auto* phylo_cmd =
        app.add_subcommand("phylo", "phylogenetic correlation matrix and annotated tree");
    phylo_cmd->add_option("--tree", o.tree, "phylogeny (Newick)")->required();
    phylo_cmd->add_option("--data", o.data, "effect table (CSV)");
    phylo_cmd->add_option("--config", o.config, "column mapping (TOML)");
    phylo_cmd->add_option("--group", o.group, "moderator column for tip colors");
    add_rho(phylo_cmd);
    add_render(phylo_cmd);
    add_out(phylo_cmd);
    handlers["phylo"] = cmd_phylo;

    auto* authors_cmd = app.add_subcommand("biblio-authors", "co-authorship network");
    authors_cmd->add_option("--bib", o.bib, "bibliography (.bib or .ris)")->required();
    add_render(authors_cmd);
    add_out(authors_cmd);
    handlers["biblio-authors"] = cmd_biblio_authors;

    auto* countries_cmd =
        app.add_subcommand("biblio-countries", "country bibliographic coupling chord");
    countries_cmd->add_option("--bib", o.bib, "bibliography (.bib or .ris)")->required();
    add_render(countries_cmd);
    add_out(countries_cmd);
    handlers["biblio-countries"] = cmd_biblio_countries;

    auto* fetch_cmd = app.add_subcommand("alt-fetch", "fetch attention records per effect DOI");
    add_data(fetch_cmd);
    fetch_cmd->add_option("--cache", o.cache, "cache directory")->required();
    fetch_cmd->add_flag("--cache-only", o.cache_only, "serve from cache, never the network");
    fetch_cmd->add_option("--rate", o.rate, "max requests per second (default 1)");
    add_out(fetch_cmd);
    handlers["alt-fetch"] = cmd_alt_fetch;

    auto* plot_cmd = app.add_subcommand("alt-plot", "orchard plot with attention bubbles");
    add_data(plot_cmd);
    plot_cmd->add_option("--cache", o.cache, "attention cache directory (read-only)");
    plot_cmd->add_option("--group", o.group, "moderator column for panels");
    plot_cmd->add_option("--threshold", o.threshold, "grey-out score threshold (default 400)");
    add_tau2(plot_cmd);
    add_render(plot_cmd);
    add_out(plot_cmd);
    handlers["alt-plot"] = cmd_alt_plot;

    auto* pool_cmd = app.add_subcommand("pool", "pooled estimates");
    add_data(pool_cmd);
    pool_cmd->add_option("--group", o.group, "moderator column for subgroup rows");
    add_tau2(pool_cmd);
    add_out(pool_cmd);
    handlers["pool"] = cmd_pool;

    auto* loco_cmd = app.add_subcommand("loco", "leave-one-study-out sensitivity");
    add_data(loco_cmd);
    add_tau2(loco_cmd);
    add_out(loco_cmd);
    handlers["loco"] = cmd_loco;

    auto* cumulative_cmd = app.add_subcommand("cumulative", "cumulative synthesis by year");
    add_data(cumulative_cmd);
    add_tau2(cumulative_cmd);
    add_out(cumulative_cmd);
    handlers["cumulative"] = cmd_cumulative;

    auto* report_cmd = app.add_subcommand("report", "single-file HTML report of all artifacts");
    add_data(report_cmd);
    report_cmd->add_option("--x", o.x, "gap map x column");
    report_cmd->add_option("--y", o.y, "gap map y column");
    report_cmd->add_option("--shape", o.shape, "gap map shape column");
    report_cmd->add_option("--sankey-cols", o.sankey_cols, "ordered moderator columns")
        ->delimiter(',');
    report_cmd->add_option("--bib", o.bib, "bibliography (.bib or .ris)");
    report_cmd->add_option("--tree", o.tree, "phylogeny (Newick)");
    report_cmd->add_option("--cache", o.cache, "attention cache directory");
    report_cmd->add_option("--group", o.group, "moderator column for panels and subgroups");
    report_cmd->add_option("--threshold", o.threshold, "grey-out score threshold");
    add_rho(report_cmd);
    add_tau2(report_cmd);
    add_render(report_cmd);
    add_out(report_cmd);
    handlers["report"] = cmd_report;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        for (auto* sub : app.get_subcommands())
            if (handlers.count(sub->get_name())) return handlers[sub->get_name()](o);
        return 1;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NetworkError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

} // namespace metaweave::cli
