#pragma once

#include "gsav/geometry.hpp"

namespace gsav {

/// Pinhole camera. Extrinsics map world to camera space: x_cam = R x + t.
/// Pixel (ix, iy) samples the continuous image plane at (ix + 0.5, iy + 0.5).
struct Camera {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    int width = 0, height = 0;
    double near_plane = 0.01;

    Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }

    /// Throws std::invalid_argument on non-positive focals, bad dimensions, or
    /// a rotation that is not orthonormal within 1e-6.
    void validate() const;

    /// Simple look-at constructor used by tools and tests: camera at `eye`
    /// looking toward `target`, `up` approximately up.
    static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal,
                          int width, int height, double near_plane = 0.01);
};

}  // namespace gsav
