#pragma once

#include "gsav/adjacency.hpp"
#include "gsav/gaussian_set.hpp"
#include "gsav/geometry.hpp"

#include <cstdint>
#include <vector>

namespace gsav {

/// Per-node unit normals. A node without all four map neighbors, or whose
/// cross-product sum degenerates, has valid = 0 and a zero vector.
struct NormalField {
    std::vector<Vec3> n;
    std::vector<std::uint8_t> valid;

    int size() const { return static_cast<int>(n.size()); }
    int valid_count() const;
};

/// Normals from the four triangles around each pixel. Front maps traverse
/// neighbors as (left, down, right, up); back maps as (left, up, right, down)
/// so both sides orient outward under the shared map convention.
NormalField compute_normals(const GaussianSet& set, const AdjacencyGraph& graph);

/// Same computation over an arbitrary position array aligned with the graph.
NormalField compute_normals(const std::vector<Vec3>& positions, const AdjacencyGraph& graph);

}  // namespace gsav
