#pragma once

#include "gsav/gaussian_map.hpp"
#include "gsav/geometry.hpp"

#include <array>
#include <vector>

namespace gsav {

struct PixelRef {
    Side side = Side::front;
    int row = 0;
    int col = 0;

    friend bool operator==(const PixelRef&, const PixelRef&) = default;
    friend auto operator<=>(const PixelRef& a, const PixelRef& b) {
        if (a.side != b.side) return a.side <=> b.side;
        if (a.row != b.row) return a.row <=> b.row;
        return a.col <=> b.col;
    }
};

/// Flat arrays of valid Gaussians, one per valid map pixel, ordered front
/// row-major then back row-major. Canonical position = base + offset.
struct GaussianSet {
    int n = 0;
    std::vector<Vec3> base_positions;   // template anchor points
    std::vector<Vec3> offsets;          // canonical-space position offsets
    std::vector<Vec3> colors;           // [0,1]
    std::vector<double> opacities;      // [0,1]
    std::vector<Vec3> scales;           // strictly positive, meters
    std::vector<Vec4> rotations;        // unit quaternions (w,x,y,z)
    std::vector<Vec2> labels;           // (p_body, p_cloth), sums to 1
    std::vector<Vec3> render_offsets;   // second offset, zero when absent
    std::vector<PixelRef> provenance;
    std::vector<std::array<float, 16>> raw;  // original channel values

    Vec3 position(int i) const { return base_positions[i] + offsets[i]; }
    std::vector<Vec3> positions() const;
    std::vector<Vec3> rendering_positions() const;  // base + offset + render_offset
};

/// One Gaussian per valid pixel of both maps. Applies channel activations:
/// sigmoid(opacity logit), exp(log-scales), softmax(label logits), quaternion
/// normalization. Throws std::invalid_argument on dimension or mask mismatch
/// against the template pair.
GaussianSet extract_gaussians(const GaussianMap& map_front, const GaussianMap& map_back,
                              const TemplateGeometry& tmpl_front,
                              const TemplateGeometry& tmpl_back);

/// Writes each Gaussian's original channel values back to the map matching its
/// provenance. Inverse of extract_gaussians on valid pixels, bit-exact.
void scatter_to_maps(const GaussianSet& set, GaussianMap& map_front, GaussianMap& map_back);

/// Covariance in canonical space: R(q) diag(s^2) R(q)^T.
/// Throws std::invalid_argument on non-positive scale.
Mat3 covariance_from_params(const Vec3& scale, const Vec4& rotation);

/// Canonical covariances for every Gaussian in the set.
std::vector<Mat3> covariances(const GaussianSet& set);

}  // namespace gsav
