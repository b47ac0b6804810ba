#include "metaweave/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "metaweave/rng.hpp"

namespace metaweave::render {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Scale {
    double d0 = 0.0, d1 = 1.0, r0 = 0.0, r1 = 1.0;
    double operator()(double v) const {
        if (d1 == d0) return (r0 + r1) / 2.0;
        return r0 + (v - d0) / (d1 - d0) * (r1 - r0);
    }
};

std::string point(double x, double y) { return svg::fmt2(x) + "," + svg::fmt2(y); }

svg::Element make_line(double x1, double y1, double x2, double y2) {
    svg::Element e("line");
    e.set("x1", x1).set("y1", y1).set("x2", x2).set("y2", y2);
    return e;
}

svg::Element make_text(double x, double y, const std::string& content) {
    svg::Element e("text");
    e.set("x", x).set("y", y);
    e.text(content);
    return e;
}

// Evenly spaced ticks with a 1/2/5 step covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target) {
    if (!(hi > lo)) return {lo};
    double raw = (hi - lo) / std::max(1, target);
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    std::vector<double> ticks;
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + step * 1e-9; v += step) {
        double t = std::abs(v) < step * 1e-9 ? 0.0 : v;
        ticks.push_back(t);
    }
    return ticks;
}

// Marker with unit area pi*r^2 at (cx, cy); kind cycles circle, square,
// triangle, diamond. Square/triangle/diamond are area-matched to the circle.
svg::Element make_glyph(int kind, double cx, double cy, double r) {
    double area = kPi * r * r;
    switch (kind % 4) {
        case 0: {
            svg::Element e("circle");
            e.set("cx", cx).set("cy", cy).set("r", r);
            return e;
        }
        case 1: {
            double side = std::sqrt(area);
            svg::Element e("rect");
            e.set("x", cx - side / 2).set("y", cy - side / 2).set("width", side).set("height",
                                                                                     side);
            return e;
        }
        case 2: {
            // equilateral triangle, centroid at (cx, cy)
            double side = std::sqrt(area * 4.0 / std::sqrt(3.0));
            double h = side * std::sqrt(3.0) / 2.0;
            svg::Element e("path");
            e.set("d", "M " + point(cx, cy - h * 2.0 / 3.0) + " L " +
                           point(cx + side / 2, cy + h / 3.0) + " L " +
                           point(cx - side / 2, cy + h / 3.0) + " Z");
            return e;
        }
        default: {
            double half = std::sqrt(area / 2.0);
            svg::Element e("path");
            e.set("d", "M " + point(cx, cy - half) + " L " + point(cx + half, cy) + " L " +
                           point(cx, cy + half) + " L " + point(cx - half, cy) + " Z");
            return e;
        }
    }
}

std::vector<std::string> resolve_order(const std::vector<std::string>& requested,
                                       const std::vector<std::string>& observed) {
    if (requested.empty()) return observed;
    std::set<std::string> allowed(requested.begin(), requested.end());
    for (const auto& level : observed)
        if (!allowed.count(level)) throw UnknownLevel(level);
    return requested;
}

std::size_t level_index(const std::vector<std::string>& order, const std::string& level) {
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] == level) return i;
    throw UnknownLevel(level);
}

// Andrew's monotone chain; returns hull in counter-clockwise order
// (screen coordinates), fewer than 3 points when degenerate.
std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::size_t n = pts.size();
    if (n < 3) return pts;
    auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                    const std::pair<double, double>& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

svg::Element label_group(double font_size) {
    svg::Element g("g");
    g.set("class", "labels")
        .set("font-family", "sans-serif")
        .set("font-size", font_size)
        .set("fill", "#222222");
    return g;
}

} // namespace

// --- gap map -------------------------------------------------------------

svg::SvgDocument render_gap_map(const synthmap::GapMap& map, const LevelOrders& orders,
                                const RenderOptions& options) {
    std::vector<std::string> xo = resolve_order(orders.x, map.x_levels);
    std::vector<std::string> yo = resolve_order(orders.y, map.y_levels);
    std::vector<std::string> so = resolve_order(orders.shape, map.shape_levels);

    svg::SvgDocument doc(options.width, options.height, "Evidence gap map");

    const double x0 = 150, y0 = 36;
    const double x1 = options.width - 200, y1 = options.height - 86;
    std::size_t nx = std::max<std::size_t>(1, xo.size());
    std::size_t ny = std::max<std::size_t>(1, yo.size());
    double cw = (x1 - x0) / static_cast<double>(nx);
    double ch = (y1 - y0) / static_cast<double>(ny);

    svg::Element grid("g");
    grid.set("class", "grid").set("stroke", "#CCCCCC").set("stroke-width", 1.0);
    for (std::size_t i = 0; i <= nx; ++i) {
        double gx = x0 + cw * static_cast<double>(i);
        grid.add(make_line(gx, y0, gx, y1).set("class", "grid-line"));
    }
    for (std::size_t j = 0; j <= ny; ++j) {
        double gy = y0 + ch * static_cast<double>(j);
        grid.add(make_line(x0, gy, x1, gy).set("class", "grid-line"));
    }
    doc.root().add(std::move(grid));

    int max_effects = 1;
    double max_abs = 0.0;
    for (const auto& cell : map.cells) {
        max_effects = std::max(max_effects, cell.n_effects);
        if (cell.pooled.k > 0) max_abs = std::max(max_abs, std::abs(cell.pooled.estimate));
    }
    double rmax = 0.38 * std::min(cw, ch);

    svg::Element glyphs("g");
    glyphs.set("class", "cells").set("stroke", "#333333").set("stroke-width", 0.6);
    std::size_t i = 0;
    while (i < map.cells.size()) {
        std::size_t j = i;
        while (j < map.cells.size() && map.cells[j].x_level == map.cells[i].x_level &&
               map.cells[j].y_level == map.cells[i].y_level)
            ++j;
        std::size_t xi = level_index(xo, map.cells[i].x_level);
        std::size_t yi = level_index(yo, map.cells[i].y_level);
        double cy = y0 + ch * (static_cast<double>(yi) + 0.5);
        std::size_t group_n = j - i;
        for (std::size_t s = 0; s < group_n; ++s) {
            const auto& cell = map.cells[i + s];
            double cx = x0 + cw * static_cast<double>(xi) +
                        cw * static_cast<double>(s + 1) / static_cast<double>(group_n + 1);
            double r = std::max(
                3.0, rmax * std::sqrt(static_cast<double>(cell.n_effects) / max_effects));
            int kind = 0;
            if (cell.shape_level) kind = static_cast<int>(level_index(so, *cell.shape_level));
            std::string fill = svg::kMissingColor;
            if (cell.pooled.k > 0 && max_abs > 0.0)
                fill = svg::diverging_color(cell.pooled.estimate / max_abs);
            else if (cell.pooled.k > 0)
                fill = svg::diverging_color(0.0);
            svg::Element glyph = make_glyph(kind, cx, cy, r);
            glyph.set("class", "cell-glyph").set("fill", fill);
            std::string tip = cell.x_level + " / " + cell.y_level;
            if (cell.shape_level) tip += " / " + *cell.shape_level;
            tip += ": " + std::to_string(cell.n_studies) + " studies, " +
                   std::to_string(cell.n_effects) + " effects, pooled " +
                   svg::fmt2(cell.pooled.estimate);
            glyph.child("title").text(tip);
            glyphs.add(std::move(glyph));
        }
        i = j;
    }
    doc.root().add(std::move(glyphs));

    svg::Element labels = label_group(12.0);
    for (std::size_t xi = 0; xi < xo.size(); ++xi) {
        double cx = x0 + cw * (static_cast<double>(xi) + 0.5);
        labels.add(make_text(cx, y1 + 18, xo[xi])
                       .set("class", "x-label")
                       .set("text-anchor", "middle"));
    }
    for (std::size_t yi = 0; yi < yo.size(); ++yi) {
        double cy = y0 + ch * (static_cast<double>(yi) + 0.5);
        labels.add(
            make_text(x0 - 8, cy + 4, yo[yi]).set("class", "y-label").set("text-anchor", "end"));
    }
    doc.root().add(std::move(labels));

    svg::Element legend("g");
    legend.set("class", "legend").set("font-family", "sans-serif").set("font-size", 11.0);
    double lx = x1 + 24, ly = y0 + 6;
    legend.add(make_text(lx, ly, "Pooled estimate").set("fill", "#222222"));
    const int bands = 7;
    for (int b = 0; b < bands; ++b) {
        double t = 1.0 - 2.0 * b / (bands - 1);
        svg::Element sw("rect");
        sw.set("x", lx)
            .set("y", ly + 8 + 14.0 * b)
            .set("width", 16.0)
            .set("height", 14.0)
            .set("fill", svg::diverging_color(t));
        legend.add(std::move(sw));
    }
    legend.add(make_text(lx + 22, ly + 19, svg::fmt2(max_abs)).set("fill", "#222222"));
    legend.add(make_text(lx + 22, ly + 8 + 14.0 * bands / 2.0 + 4, "0.00").set("fill", "#222222"));
    legend.add(
        make_text(lx + 22, ly + 8 + 14.0 * bands - 3, svg::fmt2(-max_abs)).set("fill", "#222222"));
    double sy = ly + 8 + 14.0 * bands + 26;
    legend.add(make_text(lx, sy, "Effects per cell").set("fill", "#222222"));
    for (auto [count, dy] : std::initializer_list<std::pair<int, double>>{
             {1, 16.0}, {max_effects, 40.0}}) {
        double r = std::max(3.0, rmax * std::sqrt(static_cast<double>(count) / max_effects));
        svg::Element c("circle");
        c.set("cx", lx + 10).set("cy", sy + dy).set("r", r).set("fill", "none").set("stroke",
                                                                                    "#333333");
        legend.add(std::move(c));
        legend.add(make_text(lx + 28, sy + dy + 4, std::to_string(count)).set("fill", "#222222"));
    }
    if (!so.empty()) {
        double gy = sy + 66;
        legend.add(make_text(lx, gy, "Shape").set("fill", "#222222"));
        for (std::size_t s = 0; s < so.size(); ++s) {
            double cy = gy + 16 + 18.0 * static_cast<double>(s);
            svg::Element glyph = make_glyph(static_cast<int>(s), lx + 10, cy, 5.0);
            glyph.set("fill", "#FFFFFF").set("stroke", "#333333").set("stroke-width", 0.8);
            legend.add(std::move(glyph));
            legend.add(make_text(lx + 24, cy + 4, so[s]).set("fill", "#222222"));
        }
    }
    doc.root().add(std::move(legend));
    return doc;
}

// --- sankey ----------------------------------------------------------------

svg::SvgDocument render_sankey(const synthmap::SankeyGraph& graph,
                               const RenderOptions& options) {
    svg::SvgDocument doc(options.width, options.height, "Moderator composition flow");

    // nodes arrive grouped by column in synthmap order
    std::vector<std::pair<std::string, std::vector<std::size_t>>> columns;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (columns.empty() || columns.back().first != graph.nodes[i].column)
            columns.push_back({graph.nodes[i].column, {}});
        columns.back().second.push_back(i);
    }
    if (columns.empty()) return doc;

    const double x0 = 60, y0 = 48, x1 = options.width - 60, y1 = options.height - 30;
    const double bar_w = 20.0, gap = 8.0;
    std::size_t ncols = columns.size();
    double dx = ncols > 1 ? (x1 - x0 - bar_w) / static_cast<double>(ncols - 1) : 0.0;

    // per-node geometry in layout space
    std::vector<double> node_x(graph.nodes.size()), node_top(graph.nodes.size()),
        node_h(graph.nodes.size()), unit(graph.nodes.size());
    for (std::size_t c = 0; c < ncols; ++c) {
        const auto& ids = columns[c].second;
        int total = 0;
        for (std::size_t id : ids) total += graph.nodes[id].count;
        double avail = (y1 - y0) - gap * static_cast<double>(ids.size() - 1);
        double per_count = total > 0 ? avail / total : 0.0;
        double cx = ncols > 1 ? x0 + dx * static_cast<double>(c) : (x0 + x1 - bar_w) / 2.0;
        double cursor = y0;
        for (std::size_t id : ids) {
            node_x[id] = cx;
            node_top[id] = cursor;
            node_h[id] = per_count * graph.nodes[id].count;
            unit[id] = per_count;
            cursor += node_h[id] + gap;
        }
    }

    std::map<std::size_t, std::size_t> col_of; // node -> column index
    std::map<std::size_t, std::size_t> pos_in_col;
    for (std::size_t c = 0; c < ncols; ++c)
        for (std::size_t p = 0; p < columns[c].second.size(); ++p) {
            col_of[columns[c].second[p]] = c;
            pos_in_col[columns[c].second[p]] = p;
        }

    svg::Element ribbons("g");
    ribbons.set("class", "ribbons");
    std::vector<double> out_off(graph.nodes.size(), 0.0), in_off(graph.nodes.size(), 0.0);
    for (const auto& link : graph.links) {
        double th_s = unit[link.source] * link.weight;
        double th_t = unit[link.target] * link.weight;
        double sx = node_x[link.source] + bar_w;
        double tx = node_x[link.target];
        double sy0 = node_top[link.source] + out_off[link.source];
        double ty0 = node_top[link.target] + in_off[link.target];
        out_off[link.source] += th_s;
        in_off[link.target] += th_t;
        double mx = (sx + tx) / 2.0;
        std::string d = "M " + point(sx, sy0) + " C " + point(mx, sy0) + " " + point(mx, ty0) +
                        " " + point(tx, ty0) + " L " + point(tx, ty0 + th_t) + " C " +
                        point(mx, ty0 + th_t) + " " + point(mx, sy0 + th_s) + " " +
                        point(sx, sy0 + th_s) + " Z";
        svg::Element ribbon("path");
        ribbon.set("class", "ribbon")
            .set("d", d)
            .set("fill", svg::kPalette[pos_in_col[link.source] % svg::kPalette.size()])
            .set("fill-opacity", 0.5);
        ribbon.child("title").text(graph.nodes[link.source].level + " to " +
                                   graph.nodes[link.target].level + ": " +
                                   std::to_string(link.weight));
        ribbons.add(std::move(ribbon));
    }
    doc.root().add(std::move(ribbons));

    svg::Element bars("g");
    bars.set("class", "bars");
    svg::Element labels = label_group(11.0);
    for (std::size_t c = 0; c < ncols; ++c) {
        double cx = ncols > 1 ? x0 + dx * static_cast<double>(c) : (x0 + x1 - bar_w) / 2.0;
        labels.add(make_text(cx + bar_w / 2, y0 - 14, columns[c].first)
                       .set("class", "column-label")
                       .set("text-anchor", "middle")
                       .set("font-size", 13.0));
        for (std::size_t p = 0; p < columns[c].second.size(); ++p) {
            std::size_t id = columns[c].second[p];
            svg::Element bar("rect");
            bar.set("class", "node-bar")
                .set("x", node_x[id])
                .set("y", node_top[id])
                .set("width", bar_w)
                .set("height", node_h[id])
                .set("fill", svg::kPalette[p % svg::kPalette.size()]);
            bar.child("title").text(graph.nodes[id].level + " (" +
                                    std::to_string(graph.nodes[id].count) + ")");
            bars.add(std::move(bar));
            std::string text = graph.nodes[id].level + " (" +
                               std::to_string(graph.nodes[id].count) + ")";
            bool last = c + 1 == ncols;
            labels.add(make_text(last ? node_x[id] - 6 : node_x[id] + bar_w + 6,
                                 node_top[id] + node_h[id] / 2 + 4, text)
                           .set("class", "node-label")
                           .set("text-anchor", last ? "end" : "start"));
        }
    }
    doc.root().add(std::move(bars));
    doc.root().add(std::move(labels));
    return doc;
}

// --- network ---------------------------------------------------------------

svg::SvgDocument render_network(const biblio::WeightedGraph& graph,
                                const std::vector<int>& clusters,
                                const RenderOptions& options) {
    svg::SvgDocument doc(options.width, options.height, "Collaboration network");
    std::size_t n = graph.nodes.size();
    if (n == 0) return doc;

    const double margin = 48.0;
    double w = options.width - 2 * margin;
    double h = options.height - 2 * margin;

    Xorshift64Star rng(options.seed);
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = rng.next_range(0.0, w);
        py[i] = rng.next_range(0.0, h);
    }

    // Fruchterman-Reingold with linear cooling; weights shape only the
    // drawing, not the layout forces.
    const int iterations = 500;
    double k = std::sqrt(w * h / static_cast<double>(n));
    std::vector<double> dx(n), dy(n);
    for (int it = 0; it < iterations; ++it) {
        double t = (w / 10.0) * (1.0 - static_cast<double>(it) / iterations);
        std::fill(dx.begin(), dx.end(), 0.0);
        std::fill(dy.begin(), dy.end(), 0.0);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                double ddx = px[a] - px[b], ddy = py[a] - py[b];
                double dist = std::max(1e-2, std::sqrt(ddx * ddx + ddy * ddy));
                double force = k * k / dist;
                dx[a] += ddx / dist * force;
                dy[a] += ddy / dist * force;
                dx[b] -= ddx / dist * force;
                dy[b] -= ddy / dist * force;
            }
        for (const auto& e : graph.edges) {
            double ddx = px[e.a] - px[e.b], ddy = py[e.a] - py[e.b];
            double dist = std::max(1e-2, std::sqrt(ddx * ddx + ddy * ddy));
            double force = dist * dist / k;
            dx[e.a] -= ddx / dist * force;
            dy[e.a] -= ddy / dist * force;
            dx[e.b] += ddx / dist * force;
            dy[e.b] += ddy / dist * force;
        }
        for (std::size_t v = 0; v < n; ++v) {
            double len = std::sqrt(dx[v] * dx[v] + dy[v] * dy[v]);
            if (len > 1e-12) {
                double cap = std::min(len, t);
                px[v] += dx[v] / len * cap;
                py[v] += dy[v] / len * cap;
            }
            px[v] = std::clamp(px[v], 0.0, w);
            py[v] = std::clamp(py[v], 0.0, h);
        }
    }

    // stretch the final layout to the viewport
    double xmin = px[0], xmax = px[0], ymin = py[0], ymax = py[0];
    for (std::size_t v = 1; v < n; ++v) {
        xmin = std::min(xmin, px[v]);
        xmax = std::max(xmax, px[v]);
        ymin = std::min(ymin, py[v]);
        ymax = std::max(ymax, py[v]);
    }
    Scale sx{xmin, xmax, margin, options.width - margin};
    Scale sy{ymin, ymax, margin, options.height - margin};
    for (std::size_t v = 0; v < n; ++v) {
        px[v] = sx(px[v]);
        py[v] = sy(py[v]);
    }

    auto centrality = biblio::degree_centrality(graph);
    double max_strength = 0.0;
    for (const auto& c : centrality)
        max_strength = std::max(max_strength, static_cast<double>(c.strength));
    auto radius = [&](std::size_t v) {
        if (max_strength <= 0.0) return 5.0;
        return 3.5 + 8.5 * std::sqrt(centrality[v].strength / max_strength);
    };

    // hulls behind everything else
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t v = 0; v < n && v < clusters.size(); ++v)
        members[clusters[v]].push_back(v);
    svg::Element hulls("g");
    hulls.set("class", "hulls");
    for (const auto& [cluster, ids] : members) {
        if (ids.size() < 3) continue;
        // buffered hull: each center expands to a small octagon first, so
        // collinear or coincident layouts still yield a real polygon
        std::vector<std::pair<double, double>> pts;
        for (std::size_t v : ids) {
            double pad = radius(v) + 8.0;
            for (int o = 0; o < 8; ++o) {
                double ang = kPi * o / 4.0;
                pts.push_back({px[v] + pad * std::cos(ang), py[v] + pad * std::sin(ang)});
            }
        }
        auto hull = convex_hull(std::move(pts));
        if (hull.size() < 3) continue;
        std::string pts_attr;
        for (const auto& p : hull) {
            if (!pts_attr.empty()) pts_attr += " ";
            pts_attr += point(p.first, p.second);
        }
        svg::Element hull_el("polygon");
        hull_el.set("class", "hull")
            .set("points", pts_attr)
            .set("fill", svg::kPalette[static_cast<std::size_t>(cluster) % svg::kPalette.size()])
            .set("fill-opacity", 0.4)
            .set("stroke", "none");
        hulls.add(std::move(hull_el));
    }
    doc.root().add(std::move(hulls));

    double max_weight = 0.0;
    for (const auto& e : graph.edges) max_weight = std::max(max_weight, static_cast<double>(e.weight));
    svg::Element edges("g");
    edges.set("class", "edges").set("stroke", "#888888").set("stroke-opacity", 0.6);
    for (const auto& e : graph.edges) {
        double width = max_weight > 0 ? 0.5 + 1.5 * e.weight / max_weight : 1.0;
        edges.add(make_line(px[e.a], py[e.a], px[e.b], py[e.b])
                      .set("class", "edge")
                      .set("stroke-width", width));
    }
    doc.root().add(std::move(edges));

    svg::Element nodes("g");
    nodes.set("class", "nodes").set("stroke", "#FFFFFF").set("stroke-width", 0.8);
    for (std::size_t v = 0; v < n; ++v) {
        int cluster = v < clusters.size() ? clusters[v] : 0;
        svg::Element node("circle");
        node.set("class", "node")
            .set("cx", px[v])
            .set("cy", py[v])
            .set("r", radius(v))
            .set("fill", svg::kPalette[static_cast<std::size_t>(cluster) % svg::kPalette.size()]);
        node.child("title").text(graph.nodes[v] + " (strength " +
                                 std::to_string(centrality[v].strength) + ")");
        nodes.add(std::move(node));
    }
    doc.root().add(std::move(nodes));

    if (n <= 25) {
        svg::Element labels = label_group(10.0);
        for (std::size_t v = 0; v < n; ++v)
            labels.add(make_text(px[v], py[v] - radius(v) - 4, graph.nodes[v])
                           .set("class", "node-label")
                           .set("text-anchor", "middle"));
        doc.root().add(std::move(labels));
    }
    return doc;
}

// --- chord -------------------------------------------------------------------

ChordLayout chord_layout(const biblio::WeightedGraph& graph) {
    ChordLayout layout;
    std::size_t n = graph.nodes.size();
    if (n == 0) return layout;
    auto centrality = biblio::degree_centrality(graph);
    layout.order.resize(n);
    for (std::size_t i = 0; i < n; ++i) layout.order[i] = i;
    std::sort(layout.order.begin(), layout.order.end(), [&](std::size_t a, std::size_t b) {
        if (centrality[a].strength != centrality[b].strength)
            return centrality[a].strength > centrality[b].strength;
        return graph.nodes[a] < graph.nodes[b];
    });
    double total = 0.0;
    for (const auto& c : centrality) total += c.strength;
    double usable = 360.0 - layout.gap_degrees * static_cast<double>(n);
    layout.spans.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        layout.spans[i] = total > 0.0 ? usable * centrality[layout.order[i]].strength / total
                                      : usable / static_cast<double>(n);
    }
    return layout;
}

svg::SvgDocument render_chord(const biblio::WeightedGraph& graph,
                              const RenderOptions& options) {
    svg::SvgDocument doc(options.width, options.height, "Coupling strength chord diagram");
    std::size_t n = graph.nodes.size();
    if (n == 0) return doc;

    ChordLayout layout = chord_layout(graph);
    auto centrality = biblio::degree_centrality(graph);

    double cx = options.width / 2.0, cy = options.height / 2.0;
    double r1 = 0.36 * std::min(options.width, options.height);
    double r0 = r1 - 16.0;
    auto at = [&](double r, double deg) {
        double rad = deg * kPi / 180.0;
        return std::pair<double, double>{cx + r * std::cos(rad), cy + r * std::sin(rad)};
    };
    auto pt = [&](double r, double deg) {
        auto [x, y] = at(r, deg);
        return point(x, y);
    };

    std::vector<double> arc_start(n), arc_end(n);
    std::vector<std::size_t> arc_pos(n); // node -> position in arc order
    {
        double cursor = -90.0;
        for (std::size_t i = 0; i < layout.order.size(); ++i) {
            std::size_t v = layout.order[i];
            arc_pos[v] = i;
            arc_start[v] = cursor;
            arc_end[v] = cursor + layout.spans[i];
            cursor = arc_end[v] + layout.gap_degrees;
        }
    }

    // each arc hands out sub-spans to its incident edges, ordered by the
    // partner's position around the circle
    struct Slot {
        double lo = 0.0, hi = 0.0;
    };
    std::map<std::pair<std::size_t, std::size_t>, Slot> slots; // (node, edge idx) -> span
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::size_t> incident;
        for (std::size_t e = 0; e < graph.edges.size(); ++e)
            if (graph.edges[e].a == v || graph.edges[e].b == v) incident.push_back(e);
        std::sort(incident.begin(), incident.end(), [&](std::size_t ea, std::size_t eb) {
            std::size_t pa = graph.edges[ea].a == v ? graph.edges[ea].b : graph.edges[ea].a;
            std::size_t pb = graph.edges[eb].a == v ? graph.edges[eb].b : graph.edges[eb].a;
            if (arc_pos[pa] != arc_pos[pb]) return arc_pos[pa] < arc_pos[pb];
            return ea < eb;
        });
        double strength = static_cast<double>(centrality[v].strength);
        double cursor = arc_start[v];
        for (std::size_t e : incident) {
            double frac = strength > 0.0 ? static_cast<double>(graph.edges[e].weight) / strength
                                         : 0.0;
            double span = (arc_end[v] - arc_start[v]) * frac;
            slots[{v, e}] = {cursor, cursor + span};
            cursor += span;
        }
    }

    svg::Element ribbons("g");
    ribbons.set("class", "ribbons");
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        Slot sa = slots[{edge.a, e}];
        Slot sb = slots[{edge.b, e}];
        // color from whichever endpoint sits earlier in arc order
        std::size_t lead = arc_pos[edge.a] < arc_pos[edge.b] ? edge.a : edge.b;
        std::string d = "M " + pt(r0, sa.lo) + " A " + svg::fmt2(r0) + " " + svg::fmt2(r0) +
                        " 0 " + (sa.hi - sa.lo > 180.0 ? "1" : "0") + " 1 " + pt(r0, sa.hi) +
                        " Q " + point(cx, cy) + " " + pt(r0, sb.lo) + " A " + svg::fmt2(r0) +
                        " " + svg::fmt2(r0) + " 0 " + (sb.hi - sb.lo > 180.0 ? "1" : "0") +
                        " 1 " + pt(r0, sb.hi) + " Q " + point(cx, cy) + " " + pt(r0, sa.lo) +
                        " Z";
        svg::Element ribbon("path");
        ribbon.set("class", "ribbon")
            .set("d", d)
            .set("fill", svg::kPalette[arc_pos[lead] % svg::kPalette.size()])
            .set("fill-opacity", 0.4);
        ribbon.child("title").text(graph.nodes[edge.a] + " and " + graph.nodes[edge.b] + ": " +
                                   std::to_string(edge.weight));
        ribbons.add(std::move(ribbon));
    }
    doc.root().add(std::move(ribbons));

    svg::Element arcs("g");
    arcs.set("class", "arcs").set("stroke", "#FFFFFF").set("stroke-width", 1.0);
    for (std::size_t i = 0; i < layout.order.size(); ++i) {
        std::size_t v = layout.order[i];
        double a0 = arc_start[v], a1 = arc_end[v];
        const char* laf = (a1 - a0) > 180.0 ? "1" : "0";
        std::string d = "M " + pt(r1, a0) + " A " + svg::fmt2(r1) + " " + svg::fmt2(r1) + " 0 " +
                        laf + " 1 " + pt(r1, a1) + " L " + pt(r0, a1) + " A " + svg::fmt2(r0) +
                        " " + svg::fmt2(r0) + " 0 " + laf + " 0 " + pt(r0, a0) + " Z";
        svg::Element arc("path");
        arc.set("class", "arc")
            .set("d", d)
            .set("fill", svg::kPalette[i % svg::kPalette.size()])
            .set("data-span", a1 - a0);
        arc.child("title").text(graph.nodes[v] + " (strength " +
                                std::to_string(centrality[v].strength) + ")");
        arcs.add(std::move(arc));
    }
    doc.root().add(std::move(arcs));

    svg::Element labels = label_group(11.0);
    for (std::size_t i = 0; i < layout.order.size(); ++i) {
        std::size_t v = layout.order[i];
        double mid = (arc_start[v] + arc_end[v]) / 2.0;
        auto [lx, ly] = at(r1 + 7.0, mid);
        bool right = std::cos(mid * kPi / 180.0) >= 0.0;
        double rot = right ? mid : mid + 180.0;
        svg::Element text = make_text(lx, ly, graph.nodes[v]);
        text.set("class", "arc-label")
            .set("text-anchor", right ? "start" : "end")
            .set("dominant-baseline", "middle")
            .set("transform",
                 "rotate(" + svg::fmt2(rot) + " " + svg::fmt2(lx) + " " + svg::fmt2(ly) + ")");
        labels.add(std::move(text));
    }
    doc.root().add(std::move(labels));
    return doc;
}

// --- annotated phylogeny ------------------------------------------------------

svg::SvgDocument render_tree(const tree::PhyloTree& tree,
                             const std::vector<TipAnnotation>& annotations,
                             const RenderOptions& options) {
    svg::SvgDocument doc(options.width, options.height, "Annotated phylogeny");
    if (tree.empty()) return doc;

    std::vector<int> tips = tree.tips();
    std::map<std::string, std::size_t> tip_rank;
    for (std::size_t i = 0; i < tips.size(); ++i) tip_rank[tree.nodes[tips[i]].label] = i;

    std::map<std::string, const TipAnnotation*> by_tip;
    std::vector<std::string> group_order;
    std::map<std::string, std::size_t> group_index;
    for (const auto& a : annotations) {
        if (!tip_rank.count(a.species)) throw UnknownSpecies(a.species);
        by_tip[a.species] = &a;
        if (!group_index.count(a.group)) {
            group_index[a.group] = group_order.size();
            group_order.push_back(a.group);
        }
    }
    auto group_color = [&](const std::string& group) {
        return svg::kPalette[group_index.at(group) % svg::kPalette.size()];
    };

    const double x0 = 20, y0 = 36, y1 = options.height - 40;
    const double tree_x1 = options.width * 0.56;
    const double panel_x0 = tree_x1 + 140, panel_x1 = options.width - 30;

    double max_depth = 0.0;
    for (int t : tips) max_depth = std::max(max_depth, tree.depth(t));
    Scale depth_scale{0.0, max_depth > 0 ? max_depth : 1.0, x0, tree_x1};
    double dy = tips.size() > 1 ? (y1 - y0) / static_cast<double>(tips.size() - 1) : 0.0;

    // y position per node: tips evenly spaced, internals at the mean of
    // their children (children precede parents in a post-order walk here)
    std::vector<double> node_y(tree.nodes.size(), 0.0), node_x(tree.nodes.size(), 0.0);
    for (std::size_t i = 0; i < tips.size(); ++i)
        node_y[static_cast<std::size_t>(tips[i])] =
            tips.size() > 1 ? y0 + dy * static_cast<double>(i) : (y0 + y1) / 2.0;
    // children always have larger indices than parents (parser allocates
    // parents first), so a reverse walk sees children resolved
    for (std::size_t i = tree.nodes.size(); i-- > 0;) {
        const auto& node = tree.nodes[i];
        node_x[i] = depth_scale(tree.depth(static_cast<int>(i)));
        if (!node.is_tip()) {
            double sum = 0.0;
            for (int c : node.children) sum += node_y[static_cast<std::size_t>(c)];
            node_y[i] = sum / static_cast<double>(node.children.size());
        }
    }

    svg::Element branches("g");
    branches.set("class", "branches").set("stroke", "#555555").set("stroke-width", 1.2).set(
        "fill", "none");
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& node = tree.nodes[i];
        if (node.parent >= 0) {
            auto p = static_cast<std::size_t>(node.parent);
            branches.add(
                make_line(node_x[p], node_y[i], node_x[i], node_y[i]).set("class", "branch"));
        }
        if (!node.is_tip()) {
            double lo = node_y[static_cast<std::size_t>(node.children.front())];
            double hi = node_y[static_cast<std::size_t>(node.children.back())];
            branches.add(make_line(node_x[i], lo, node_x[i], hi).set("class", "branch"));
        }
    }
    doc.root().add(std::move(branches));

    svg::Element tip_labels = label_group(11.0);
    for (int t : tips) {
        auto ti = static_cast<std::size_t>(t);
        const std::string& label = tree.nodes[ti].label;
        auto it = by_tip.find(label);
        std::string fill = it != by_tip.end() ? group_color(it->second->group)
                                              : svg::kMissingColor;
        tip_labels.add(make_text(node_x[ti] + 6, node_y[ti] + 4, label)
                           .set("class", "tip-label")
                           .set("fill", fill));
    }
    doc.root().add(std::move(tip_labels));

    // effect panel on the right
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& a : annotations) {
        if (first) {
            lo = a.ci_low;
            hi = a.ci_high;
            first = false;
        }
        lo = std::min(lo, a.ci_low);
        hi = std::max(hi, a.ci_high);
    }
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
    if (hi == lo) hi = lo + 1.0;
    double pad = 0.06 * (hi - lo);
    Scale ex{lo - pad, hi + pad, panel_x0, panel_x1};

    svg::Element panel("g");
    panel.set("class", "effect-panel");
    panel.add(make_line(ex(0.0), y0 - 8, ex(0.0), y1 + 8)
                  .set("class", "zero-line")
                  .set("stroke", "#999999")
                  .set("stroke-dasharray", "4 3"));
    panel.add(make_line(panel_x0, y1 + 14, panel_x1, y1 + 14)
                  .set("class", "axis")
                  .set("stroke", "#333333"));
    svg::Element ticks = label_group(10.0);
    for (double tick : nice_ticks(lo - pad, hi + pad, 4)) {
        panel.add(make_line(ex(tick), y1 + 14, ex(tick), y1 + 18).set("stroke", "#333333"));
        ticks.add(make_text(ex(tick), y1 + 30, svg::fmt2(tick)).set("text-anchor", "middle"));
    }
    ticks.add(make_text((panel_x0 + panel_x1) / 2, y0 - 16, "Aggregated effect (95% CI)")
                  .set("text-anchor", "middle")
                  .set("font-size", 12.0));
    for (const auto& a : annotations) {
        double ty = node_y[static_cast<std::size_t>(tips[tip_rank.at(a.species)])];
        panel.add(make_line(ex(a.ci_low), ty, ex(a.ci_high), ty)
                      .set("class", "ci-whisker")
                      .set("stroke", group_color(a.group))
                      .set("stroke-width", 1.6));
        svg::Element dot("circle");
        dot.set("class", "tip-point")
            .set("cx", ex(a.estimate))
            .set("cy", ty)
            .set("r", 3.5)
            .set("fill", group_color(a.group));
        dot.child("title").text(a.species + ": " + svg::fmt2(a.estimate) + " [" +
                                svg::fmt2(a.ci_low) + ", " + svg::fmt2(a.ci_high) + "]");
        panel.add(std::move(dot));
    }
    doc.root().add(std::move(panel));
    doc.root().add(std::move(ticks));

    if (!group_order.empty()) {
        svg::Element legend = label_group(11.0);
        legend.set("class", "legend");
        double lx = x0 + 4, ly = y0 - 18;
        double cursor = lx;
        for (const auto& group : group_order) {
            svg::Element sw("rect");
            sw.set("x", cursor).set("y", ly - 9).set("width", 10.0).set("height", 10.0).set(
                "fill", group_color(group));
            legend.add(std::move(sw));
            legend.add(make_text(cursor + 14, ly, group));
            cursor += 22.0 + 6.5 * static_cast<double>(group.size());
        }
        doc.root().add(std::move(legend));
    }
    return doc;
}

// --- orchard -------------------------------------------------------------------

svg::SvgDocument render_orchard(const std::vector<OrchardPanel>& panels,
                                const std::map<std::string, double>& bubble_metric,
                                double threshold, const RenderOptions& options) {
    svg::SvgDocument doc(options.width, options.height, "Orchard plot");
    if (panels.empty()) return doc;

    double lo = 0.0, hi = 0.0;
    bool first = true;
    double max_metric = 0.0;
    for (const auto& panel : panels) {
        auto widen = [&](double v) {
            if (first) {
                lo = hi = v;
                first = false;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        };
        widen(panel.pooled.ci_low);
        widen(panel.pooled.ci_high);
        if (panel.pooled.pi_low) widen(*panel.pooled.pi_low);
        if (panel.pooled.pi_high) widen(*panel.pooled.pi_high);
        for (const auto& effect : panel.effects) {
            widen(effect.yi);
            auto it = bubble_metric.find(effect.key);
            if (it == bubble_metric.end()) throw MetricMissing(effect.key);
            max_metric = std::max(max_metric, it->second);
        }
    }
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
    if (hi == lo) hi = lo + 1.0;
    double pad = 0.06 * (hi - lo);

    const double x0 = 150, x1 = options.width - 40, y_top = 40, y_bot = options.height - 56;
    Scale ex{lo - pad, hi + pad, x0, x1};
    double band = (y_bot - y_top) / static_cast<double>(panels.size());
    double rmax = std::min(16.0, band * 0.16);

    svg::Element frame("g");
    frame.set("class", "frame");
    frame.add(make_line(ex(0.0), y_top, ex(0.0), y_bot)
                  .set("class", "zero-line")
                  .set("stroke", "#999999")
                  .set("stroke-dasharray", "4 3"));
    frame.add(make_line(x0, y_bot, x1, y_bot).set("class", "axis").set("stroke", "#333333"));
    svg::Element axis_labels = label_group(10.0);
    for (double tick : nice_ticks(lo - pad, hi + pad, 5)) {
        frame.add(make_line(ex(tick), y_bot, ex(tick), y_bot + 4).set("stroke", "#333333"));
        axis_labels.add(make_text(ex(tick), y_bot + 16, svg::fmt2(tick))
                            .set("text-anchor", "middle"));
    }
    axis_labels.add(make_text((x0 + x1) / 2, y_bot + 34, "Effect size")
                        .set("text-anchor", "middle")
                        .set("font-size", 12.0));
    doc.root().add(std::move(frame));

    Xorshift64Star rng(options.seed);
    svg::Element body("g");
    body.set("class", "panels");
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        double cy = y_top + band * (static_cast<double>(p) + 0.5);
        const char* color = svg::kPalette[p % svg::kPalette.size()];

        svg::Element fruit_g("g");
        fruit_g.set("class", "fruit-layer");
        for (const auto& effect : panel.effects) {
            double metric = bubble_metric.at(effect.key);
            double jitter = (rng.next_double() * 2.0 - 1.0) * band * 0.26;
            double size_frac = max_metric > 0.0 ? metric / max_metric : 0.0;
            double r = std::max(2.4, rmax * std::sqrt(size_frac));
            svg::Element fruit("circle");
            fruit.set("class", "fruit")
                .set("cx", ex(effect.yi))
                .set("cy", cy + jitter)
                .set("r", r)
                .set("fill", metric > threshold ? svg::kMissingColor : color)
                .set("fill-opacity", 0.7)
                .set("stroke", "#444444")
                .set("stroke-width", 0.5);
            fruit.child("title").text(effect.key + ": " + svg::fmt2(effect.yi) + " (metric " +
                                      svg::fmt2(metric) + ")");
            fruit_g.add(std::move(fruit));
        }
        body.add(std::move(fruit_g));

        svg::Element trunk("g");
        trunk.set("class", "trunk");
        if (panel.pooled.pi_low && panel.pooled.pi_high)
            trunk.add(make_line(ex(*panel.pooled.pi_low), cy, ex(*panel.pooled.pi_high), cy)
                          .set("class", "trunk-pi")
                          .set("stroke", "#333333")
                          .set("stroke-width", 1.2));
        trunk.add(make_line(ex(panel.pooled.ci_low), cy, ex(panel.pooled.ci_high), cy)
                      .set("class", "trunk-ci")
                      .set("stroke", "#333333")
                      .set("stroke-width", 5.0));
        double dx = ex(panel.pooled.estimate);
        svg::Element diamond("path");
        diamond.set("class", "trunk-point")
            .set("d", "M " + point(dx, cy - 7) + " L " + point(dx + 7, cy) + " L " +
                          point(dx, cy + 7) + " L " + point(dx - 7, cy) + " Z")
            .set("fill", "#FFFFFF")
            .set("stroke", "#333333")
            .set("stroke-width", 1.4);
        diamond.child("title").text(panel.label + ": " + svg::fmt2(panel.pooled.estimate) + " [" +
                                    svg::fmt2(panel.pooled.ci_low) + ", " +
                                    svg::fmt2(panel.pooled.ci_high) + "]");
        trunk.add(std::move(diamond));
        body.add(std::move(trunk));
    }
    doc.root().add(std::move(body));

    svg::Element labels = label_group(12.0);
    for (std::size_t p = 0; p < panels.size(); ++p) {
        double cy = y_top + band * (static_cast<double>(p) + 0.5);
        std::string text = panels[p].label + " (k=" + std::to_string(panels[p].pooled.k) + ")";
        labels.add(make_text(x0 - 10, cy + 4, text)
                       .set("class", "panel-label")
                       .set("text-anchor", "end"));
    }
    doc.root().add(std::move(labels));
    doc.root().add(std::move(axis_labels));
    return doc;
}

svg::SvgDocument render_orchard(const meta::PooledResult& pooled,
                                const std::vector<meta::Effect>& effects,
                                const std::map<std::string, double>& bubble_metric,
                                double threshold, const RenderOptions& options) {
    std::vector<OrchardPanel> panels{{"All effects", pooled, effects}};
    return render_orchard(panels, bubble_metric, threshold, options);
}

// --- report ----------------------------------------------------------------------

namespace {

std::string html_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

void append_pooled_row(std::string& out, const std::string& label,
                       const meta::PooledResult& r) {
    out += "<tr><td>" + html_escape(label) + "</td><td>" +
           meta::pool_method_label(r.method) + (r.robust ? " (robust)" : "") + "</td><td>" +
           std::to_string(r.k) + "</td><td>" + fmt4(r.estimate) + "</td><td>" + fmt4(r.se) +
           "</td><td>[" + fmt4(r.ci_low) + ", " + fmt4(r.ci_high) + "]</td><td>" +
           (r.pi_low && r.pi_high ? "[" + fmt4(*r.pi_low) + ", " + fmt4(*r.pi_high) + "]"
                                  : std::string("--")) +
           "</td><td>" + fmt4(r.tau2) + "</td><td>" + fmt4(r.i2) + "</td></tr>\n";
}

} // namespace

std::string build_report(const ReportInputs& inputs) {
    bool any = !inputs.figures.empty() || !inputs.pooled_rows.empty() ||
               !inputs.tabulations.empty() || !inputs.loco.empty() || !inputs.cumulative.empty();
    if (!any) throw NothingToReport();

    std::string out;
    out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    out += "<title>Research synthesis report</title>\n<style>\n";
    out += "body{font-family:sans-serif;margin:2rem auto;max-width:70rem;color:#222}\n";
    out += "h2{border-bottom:1px solid #ccc;padding-bottom:.3rem}\n";
    out += "table{border-collapse:collapse;margin:1rem 0}\n";
    out += "td,th{border:1px solid #bbb;padding:.3rem .6rem;text-align:right}\n";
    out += "td:first-child,th:first-child{text-align:left}\n";
    out += "section.figure svg{max-width:100%;height:auto}\n";
    out += "footer{margin-top:2rem;border-top:1px solid #ccc;padding-top:.5rem;"
           "font-size:.85rem;color:#555}\n";
    out += "</style>\n</head>\n<body>\n<h1>Research synthesis report</h1>\n";

    for (const auto& [heading, markup] : inputs.figures) {
        out += "<section class=\"figure\">\n<h2>" + html_escape(heading) + "</h2>\n";
        out += markup;
        if (!markup.empty() && markup.back() != '\n') out += "\n";
        out += "</section>\n";
    }

    if (!inputs.pooled_rows.empty()) {
        out += "<section class=\"table\">\n<h2>Pooled estimates</h2>\n<table>\n";
        out += "<tr><th>Scope</th><th>Model</th><th>k</th><th>Estimate</th><th>SE</th>"
               "<th>95% CI</th><th>95% PI</th><th>tau^2</th><th>I^2 (%)</th></tr>\n";
        for (const auto& [label, r] : inputs.pooled_rows) append_pooled_row(out, label, r);
        out += "</table>\n</section>\n";
    }

    if (!inputs.tabulations.empty()) {
        out += "<section class=\"table\">\n<h2>Corpus tabulations</h2>\n";
        for (const auto& [field, rows] : inputs.tabulations) {
            out += "<h3>" + html_escape(field) + "</h3>\n<table>\n";
            out += "<tr><th>" + html_escape(field) + "</th><th>Records</th></tr>\n";
            for (const auto& [value, count] : rows)
                out += "<tr><td>" + html_escape(value) + "</td><td>" + std::to_string(count) +
                       "</td></tr>\n";
            out += "</table>\n";
        }
        out += "</section>\n";
    }

    if (!inputs.loco.empty()) {
        out += "<section class=\"table\">\n<h2>Leave-one-cluster-out</h2>\n<table>\n";
        out += "<tr><th>Omitted cluster</th><th>Estimate</th><th>95% CI</th>"
               "<th>Shift</th></tr>\n";
        for (const auto& entry : inputs.loco)
            out += "<tr><td>" + html_escape(entry.cluster) + "</td><td>" +
                   fmt4(entry.without.estimate) + "</td><td>[" + fmt4(entry.without.ci_low) +
                   ", " + fmt4(entry.without.ci_high) + "]</td><td>" + fmt4(entry.delta) +
                   "</td></tr>\n";
        out += "</table>\n</section>\n";
    }

    if (!inputs.cumulative.empty()) {
        out += "<section class=\"table\">\n<h2>Cumulative synthesis by year</h2>\n<table>\n";
        out += "<tr><th>Through year</th><th>k</th><th>Estimate</th><th>95% CI</th></tr>\n";
        for (const auto& [year, r] : inputs.cumulative)
            out += "<tr><td>" + std::to_string(year) + "</td><td>" + std::to_string(r.k) +
                   "</td><td>" + fmt4(r.estimate) + "</td><td>[" + fmt4(r.ci_low) + ", " +
                   fmt4(r.ci_high) + "]</td></tr>\n";
        out += "</table>\n</section>\n";
    }

    out += "<footer>\n<p>Provenance</p>\n<ul>\n";
    for (const auto& [name, hash] : inputs.input_hashes)
        out += "<li>input " + html_escape(name) + " fnv1a64:" + hash + "</li>\n";
    out += "<li>tool version " + html_escape(inputs.version) + "</li>\n";
    out += "<li>seed " + std::to_string(inputs.seed) + "</li>\n";
    out += "</ul>\n</footer>\n</body>\n</html>\n";
    return out;
}

} // namespace metaweave::render
