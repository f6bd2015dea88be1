#include "gsav/adjacency.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace gsav {

namespace {

std::vector<int> index_side(const GaussianMap& map, std::vector<PixelRef>& nodes) {
    std::vector<int> idx(static_cast<std::size_t>(map.height) * map.width, -1);
    for (int r = 0; r < map.height; ++r) {
        for (int c = 0; c < map.width; ++c) {
            if (!map.valid(r, c)) continue;
            idx[static_cast<std::size_t>(r) * map.width + c] = static_cast<int>(nodes.size());
            nodes.push_back({map.side, r, c});
        }
    }
    return idx;
}

}  // namespace

bool AdjacencyGraph::is_boundary(int node) const {
    const auto& nb = neighbors[node];
    return nb[0] < 0 || nb[1] < 0 || nb[2] < 0 || nb[3] < 0;
}

AdjacencyGraph build_adjacency(const GaussianMap& map_front, const GaussianMap& map_back,
                               const TemplateGeometry& tmpl_front,
                               const TemplateGeometry& tmpl_back, double stitch_tolerance) {
    if (map_front.height != map_back.height || map_front.width != map_back.width)
        throw std::invalid_argument("build_adjacency: front/back dimension mismatch");
    if (map_front.valid_count() + map_back.valid_count() == 0)
        throw std::invalid_argument("build_adjacency: both masks empty");

    AdjacencyGraph g;
    g.height = map_front.height;
    g.width = map_front.width;
    g.index_front = index_side(map_front, g.nodes);
    g.index_back = index_side(map_back, g.nodes);

    const int h = g.height, w = g.width;
    auto lookup = [&](Side side, int r, int c) -> int {
        if (r < 0 || r >= h || c < 0 || c >= w) return -1;
        const auto& idx = side == Side::front ? g.index_front : g.index_back;
        return idx[static_cast<std::size_t>(r) * w + c];
    };

    g.neighbors.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const PixelRef& p = g.nodes[i];
        g.neighbors[i] = {lookup(p.side, p.row, p.col - 1), lookup(p.side, p.row + 1, p.col),
                          lookup(p.side, p.row, p.col + 1), lookup(p.side, p.row - 1, p.col)};
        for (int k : {0, 1}) {  // left and down produce each edge once with right/up mirror
            const int j = g.neighbors[i][k];
            if (j >= 0) g.edges.emplace_back(std::min<int>(i, j), std::max<int>(i, j));
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());

    // Stitch pairs: closest boundary correspondences within tolerance, greedy,
    // each pixel in at most one pair.
    std::vector<int> front_boundary, back_boundary;
    for (int i = 0; i < g.node_count(); ++i) {
        if (!g.is_boundary(i)) continue;
        (g.nodes[i].side == Side::front ? front_boundary : back_boundary).push_back(i);
    }
    auto base_of = [&](int node) {
        const PixelRef& p = g.nodes[node];
        const TemplateGeometry& t = p.side == Side::front ? tmpl_front : tmpl_back;
        return t.position(p.row, p.col);
    };

    std::vector<std::tuple<double, int, int>> candidates;
    for (int f : front_boundary) {
        const Vec3 pf = base_of(f);
        for (int b : back_boundary) {
            const double d = (pf - base_of(b)).norm();
            if (d <= stitch_tolerance) candidates.emplace_back(d, f, b);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<std::uint8_t> used(g.nodes.size(), 0);
    for (const auto& [d, f, b] : candidates) {
        if (used[f] || used[b]) continue;
        used[f] = used[b] = 1;
        g.stitch_pairs.emplace_back(f, b);
    }
    std::sort(g.stitch_pairs.begin(), g.stitch_pairs.end());

    for (int f : front_boundary)
        if (!used[f])
            g.warnings.push_back("unmatched front boundary pixel (" +
                                 std::to_string(g.nodes[f].row) + "," +
                                 std::to_string(g.nodes[f].col) + ")");
    for (int b : back_boundary)
        if (!used[b])
            g.warnings.push_back("unmatched back boundary pixel (" +
                                 std::to_string(g.nodes[b].row) + "," +
                                 std::to_string(g.nodes[b].col) + ")");
    return g;
}

}  // namespace gsav
