#pragma once

#include "gsav/gaussian_map.hpp"
#include "gsav/gaussian_set.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace gsav {

/// 4-connectivity graph over valid pixels of a front/back map pair, plus
/// stitch pairs joining coincident boundary pixels across the two maps.
/// Node order matches GaussianSet extraction order.
struct AdjacencyGraph {
    int height = 0;
    int width = 0;
    std::vector<PixelRef> nodes;
    // Neighbor node indices in map order (left, down, right, up); -1 if the
    // neighbor pixel is invalid or out of bounds.
    std::vector<std::array<int, 4>> neighbors;
    std::vector<std::pair<int, int>> stitch_pairs;  // (front node, back node)
    std::vector<std::pair<int, int>> edges;         // unordered 4-neighbor edges, i < j
    std::vector<std::string> warnings;              // unmatched boundary pixels

    std::vector<int> index_front;  // H*W -> node index, -1 invalid
    std::vector<int> index_back;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int node_at(Side side, int r, int c) const {
        const auto& idx = side == Side::front ? index_front : index_back;
        return idx[static_cast<std::size_t>(r) * width + c];
    }
    bool is_boundary(int node) const;
};

/// Builds the graph. Stitch pairs greedily match front/back boundary pixels
/// whose template base positions lie within stitch_tolerance (closest pairs
/// first, each pixel used at most once). Unmatched boundary pixels are
/// recorded as warnings, not errors.
AdjacencyGraph build_adjacency(const GaussianMap& map_front, const GaussianMap& map_back,
                               const TemplateGeometry& tmpl_front,
                               const TemplateGeometry& tmpl_back,
                               double stitch_tolerance);

}  // namespace gsav
