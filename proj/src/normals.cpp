#include "gsav/normals.hpp"

#include <stdexcept>

namespace gsav {

int NormalField::valid_count() const {
    int n = 0;
    for (auto v : valid)
        if (v) ++n;
    return n;
}

NormalField compute_normals(const std::vector<Vec3>& positions, const AdjacencyGraph& graph) {
    if (static_cast<int>(positions.size()) != graph.node_count())
        throw std::invalid_argument("compute_normals: position/graph size mismatch");

    NormalField field;
    field.n.assign(positions.size(), Vec3::Zero());
    field.valid.assign(positions.size(), 0);

    for (int i = 0; i < graph.node_count(); ++i) {
        const auto& nb = graph.neighbors[i];  // (left, down, right, up)
        if (nb[0] < 0 || nb[1] < 0 || nb[2] < 0 || nb[3] < 0) continue;

        // Counter-clockwise traversal producing outward normals: front maps
        // (left, down, right, up), back maps the mirrored (left, up, right, down).
        int j = nb[0], k = nb[1], l = nb[2], m = nb[3];
        if (graph.nodes[i].side == Side::back) std::swap(k, m);

        const Vec3& xi = positions[i];
        const Vec3 dj = positions[j] - xi;
        const Vec3 dk = positions[k] - xi;
        const Vec3 dl = positions[l] - xi;
        const Vec3 dm = positions[m] - xi;
        const Vec3 n_hat = dj.cross(dk) + dk.cross(dl) + dl.cross(dm) + dm.cross(dj);
        const double norm = n_hat.norm();
        if (norm < 1e-12) continue;  // degenerate, left absent
        field.n[i] = n_hat / norm;
        field.valid[i] = 1;
    }
    return field;
}

NormalField compute_normals(const GaussianSet& set, const AdjacencyGraph& graph) {
    return compute_normals(set.positions(), graph);
}

}  // namespace gsav
