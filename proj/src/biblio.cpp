#include "metaweave/biblio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_map>

namespace metaweave::biblio {

namespace {

// Latin-1 supplement and Latin Extended-A letters folded to ASCII.
const std::unordered_map<std::string, const char*>& diacritic_folds() {
    static const std::unordered_map<std::string, const char*> table = {
        {"à", "a"}, {"á", "a"}, {"â", "a"}, {"ã", "a"}, {"ä", "a"},
        {"å", "a"}, {"æ", "ae"}, {"ç", "c"}, {"è", "e"}, {"é", "e"},
        {"ê", "e"}, {"ë", "e"}, {"ì", "i"}, {"í", "i"}, {"î", "i"},
        {"ï", "i"}, {"ð", "d"}, {"ñ", "n"}, {"ò", "o"}, {"ó", "o"},
        {"ô", "o"}, {"õ", "o"}, {"ö", "o"}, {"ø", "o"}, {"ù", "u"},
        {"ú", "u"}, {"û", "u"}, {"ü", "u"}, {"ý", "y"}, {"ÿ", "y"},
        {"ß", "ss"},
        {"ā", "a"}, {"ă", "a"}, {"ą", "a"}, {"ć", "c"}, {"č", "c"},
        {"ď", "d"}, {"đ", "d"}, {"ē", "e"}, {"ė", "e"}, {"ę", "e"},
        {"ě", "e"}, {"ğ", "g"}, {"ı", "i"}, {"ł", "l"}, {"ń", "n"},
        {"ň", "n"}, {"ō", "o"}, {"ő", "o"}, {"œ", "oe"}, {"ř", "r"},
        {"ś", "s"}, {"ş", "s"}, {"š", "s"}, {"ţ", "t"}, {"ť", "t"},
        {"ū", "u"}, {"ů", "u"}, {"ű", "u"}, {"ź", "z"}, {"ż", "z"},
        {"ž", "z"},
    };
    return table;
}

// Lowercases ASCII and folds accented letters; other bytes pass through.
std::string fold(const std::string& s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        if ((c & 0xE0) == 0xC0) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0) len = 4;
        if (len == 1) {
            out.push_back(static_cast<char>(std::tolower(c)));
            ++i;
            continue;
        }
        std::string unit = s.substr(i, len);
        // Fold uppercase accented letters through their lowercase forms.
        auto it = diacritic_folds().find(unit);
        if (it == diacritic_folds().end() && len == 2) {
            const unsigned char b0 = static_cast<unsigned char>(unit[0]);
            const unsigned char b1 = static_cast<unsigned char>(unit[1]);
            unsigned cp = ((b0 & 0x1Fu) << 6) | (b1 & 0x3Fu);
            if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
                cp += 0x20; // Latin-1 uppercase block
            } else if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
                cp |= 1; // Extended-A: even upper, odd lower
            } else if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
                if (cp % 2 == 1) cp += 1; // parity flips in these runs
            }
            std::string lowered;
            lowered.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            lowered.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            it = diacritic_folds().find(lowered);
        }
        if (it != diacritic_folds().end()) out += it->second;
        else out += unit;
        i += len;
    }
    return out;
}

std::string squeeze(const std::string& s) {
    std::string out;
    bool in_ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = !out.empty();
        } else {
            if (in_ws) out.push_back(' ');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

std::string initials_of(const std::string& given) {
    std::string initials;
    bool at_start = true;
    for (char c : given) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            if (at_start) initials.push_back(c);
            at_start = false;
        } else {
            at_start = true; // spaces, dots and hyphens all delimit name parts
        }
    }
    return initials;
}

std::string paper_label(const ingest::BibRecord& record, std::size_t index) {
    if (!record.key.empty()) return record.key;
    return "paper" + std::to_string(index + 1);
}

std::vector<Edge> sorted_edges(std::map<std::pair<std::size_t, std::size_t>, int>&& weights) {
    std::vector<Edge> edges;
    edges.reserve(weights.size());
    for (const auto& [key, w] : weights)
        if (w > 0) edges.push_back(Edge{key.first, key.second, w});
    return edges; // the map is already (a, b)-ordered
}

} // namespace

std::string author_key(const std::string& raw_name) {
    const std::string name = squeeze(fold(raw_name));
    std::string family, given;
    const std::size_t comma = name.find(',');
    if (comma != std::string::npos) {
        family = name.substr(0, comma);
        given = name.substr(comma + 1);
    } else {
        const std::size_t last_space = name.rfind(' ');
        if (last_space == std::string::npos) {
            family = name;
        } else {
            family = name.substr(last_space + 1);
            given = name.substr(0, last_space);
        }
    }
    family = squeeze(family);
    const std::string initials = initials_of(given);
    if (initials.empty()) return family;
    return family + ", " + initials;
}

IncidenceMatrix author_incidence(const std::vector<ingest::BibRecord>& records,
                                 const std::map<std::string, std::string>& aliases) {
    IncidenceMatrix m;
    std::unordered_map<std::string, std::size_t> row_of;

    for (std::size_t p = 0; p < records.size(); ++p)
        m.col_labels.push_back(paper_label(records[p], p));

    for (std::size_t p = 0; p < records.size(); ++p) {
        for (const std::string& raw : records[p].authors) {
            std::string key = author_key(raw);
            if (auto it = aliases.find(key); it != aliases.end()) key = it->second;
            auto [it, inserted] = row_of.emplace(key, m.row_labels.size());
            if (inserted) m.row_labels.push_back(key);
            if (m.entries.size() < m.row_labels.size())
                m.entries.resize(m.row_labels.size(),
                                 std::vector<int>(records.size(), 0));
            m.entries[it->second][p] = 1;
        }
    }
    return m;
}

WeightedGraph coauthorship_graph(const IncidenceMatrix& incidence) {
    WeightedGraph g;
    g.nodes = incidence.row_labels;
    const std::size_t rows = incidence.row_labels.size();
    const std::size_t cols = incidence.col_labels.size();

    std::map<std::pair<std::size_t, std::size_t>, int> weights;
    for (std::size_t a = 0; a < rows; ++a) {
        for (std::size_t b = a + 1; b < rows; ++b) {
            int w = 0;
            for (std::size_t p = 0; p < cols; ++p)
                w += incidence.entries[a][p] * incidence.entries[b][p];
            if (w > 0) weights[{a, b}] = w;
        }
    }
    g.edges = sorted_edges(std::move(weights));
    return g;
}

WeightedGraph country_coupling_graph(const std::vector<ingest::BibRecord>& records) {
    WeightedGraph g;
    std::unordered_map<std::string, std::size_t> node_of;
    std::vector<std::set<std::string>> bibliographies;

    for (const ingest::BibRecord& record : records) {
        for (const std::string& country : record.countries) {
            auto [it, inserted] = node_of.emplace(country, g.nodes.size());
            if (inserted) {
                g.nodes.push_back(country);
                bibliographies.emplace_back();
            }
            bibliographies[it->second].insert(record.references.begin(),
                                              record.references.end());
        }
    }

    std::map<std::pair<std::size_t, std::size_t>, int> weights;
    for (std::size_t a = 0; a < g.nodes.size(); ++a) {
        for (std::size_t b = a + 1; b < g.nodes.size(); ++b) {
            int w = 0;
            for (const std::string& ref : bibliographies[a])
                if (bibliographies[b].count(ref)) ++w;
            if (w > 0) weights[{a, b}] = w;
        }
    }
    g.edges = sorted_edges(std::move(weights));
    return g;
}

std::vector<int> connected_components(const WeightedGraph& graph) {
    const std::size_t n = graph.nodes.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const Edge& e : graph.edges) parent[find(e.a)] = find(e.b);

    // Components keyed by their lexicographically smallest node label.
    std::map<std::string, std::vector<std::size_t>> roots;
    std::vector<std::string> smallest(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (smallest[r].empty() || graph.nodes[i] < smallest[r]) smallest[r] = graph.nodes[i];
    }
    std::map<std::string, std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) order.emplace(smallest[find(i)], 0);
    std::size_t next = 0;
    for (auto& [label, id] : order) id = next++;

    std::vector<int> components(n);
    for (std::size_t i = 0; i < n; ++i)
        components[i] = static_cast<int>(order.at(smallest[find(i)]));
    return components;
}

std::vector<Centrality> degree_centrality(const WeightedGraph& graph) {
    std::vector<Centrality> out(graph.nodes.size());
    for (const Edge& e : graph.edges) {
        out[e.a].degree += 1;
        out[e.b].degree += 1;
        out[e.a].strength += e.weight;
        out[e.b].strength += e.weight;
    }
    return out;
}

ClusterSummary cluster_summary(const WeightedGraph& graph, const std::vector<int>& components) {
    ClusterSummary summary;
    if (components.empty()) return summary;
    const int n_clusters = 1 + *std::max_element(components.begin(), components.end());
    summary.n_clusters = n_clusters;
    summary.sizes.assign(static_cast<std::size_t>(n_clusters), 0);
    for (int c : components) ++summary.sizes[static_cast<std::size_t>(c)];
    summary.max_size = *std::max_element(summary.sizes.begin(), summary.sizes.end());
    const double mean =
        static_cast<double>(graph.nodes.size()) / static_cast<double>(n_clusters);
    summary.mean_size = std::round(mean * 100.0) / 100.0;
    return summary;
}

std::vector<std::pair<std::string, int>> tabulate_field(
    const std::vector<ingest::BibRecord>& records, const std::string& field) {
    std::map<std::string, int> counts;
    auto add = [&](const std::optional<std::string>& value) {
        ++counts[value && !value->empty() ? *value : std::string("Unreported")];
    };

    if (field == "journal") {
        for (const auto& r : records) add(r.journal);
    } else if (field == "funder") {
        for (const auto& r : records) add(r.funder);
    } else if (field == "language") {
        for (const auto& r : records) add(r.language);
    } else if (field == "year") {
        for (const auto& r : records)
            add(r.year ? std::optional<std::string>(std::to_string(*r.year)) : std::nullopt);
    } else if (field == "country") {
        for (const auto& r : records) {
            if (r.countries.empty()) add(std::nullopt);
            for (const std::string& c : r.countries) add(c);
        }
    } else {
        throw UnknownField(field);
    }

    std::vector<std::pair<std::string, int>> out(counts.begin(), counts.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

} // namespace metaweave::biblio
