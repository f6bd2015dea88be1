#pragma once

#include "gsav/camera.hpp"
#include "gsav/gaussian_set.hpp"
#include "gsav/geometry.hpp"
#include "gsav/normals.hpp"
#include "gsav/splat_image.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gsav {

struct RenderOptions {
    bool rgb = true;
    bool normal = false;
    bool label = false;
    bool depth = false;
    double opacity_clip = 0.99;
    double sigma_cutoff = 3.0;       // support radius in projected std deviations
    double lowpass_floor = 0.3;      // px^2 added to both 2D covariance diagonals
    double early_stop = 1e-4;        // stop compositing below this transmittance
    int threads = 1;
    int tile = 32;
};

struct ProjectedGaussian {
    Vec2 mean;        // pixels
    Mat2 covariance;  // px^2, low-pass floor included
    double depth = 0; // camera-space z, meters
};

/// Perspective projection of one Gaussian. Returns nullopt when the point is
/// in front of the near plane or the projection is non-finite.
std::optional<ProjectedGaussian> project_gaussian(const Vec3& position, const Mat3& covariance,
                                                  const Camera& camera,
                                                  double lowpass_floor = 0.3);

/// Everything the rasterizer needs; optional attribute arrays enable channels.
struct SplatScene {
    std::vector<Vec3> positions;
    std::vector<Mat3> covariances;
    std::vector<double> opacities;
    std::vector<Vec3> colors;   // empty disables RGB
    NormalField normals;        // empty disables the normal channel
    std::vector<Vec2> labels;   // empty disables label channels

    int size() const { return static_cast<int>(positions.size()); }
};

/// Forward-only splat rasterizer. Gaussians composite front-to-back in depth
/// order (ties by index); per-pixel results are independent of thread count.
SplatImage rasterize(const SplatScene& scene, const Camera& camera, const RenderOptions& options);

}  // namespace gsav
