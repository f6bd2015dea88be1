#pragma once

#include "gsav/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gsav {

enum class Side : std::uint8_t { front = 0, back = 1 };

inline const char* side_name(Side s) { return s == Side::front ? "front" : "back"; }

/// Channel layout of a Gaussian map. 16 planes per pixel.
namespace channel {
inline constexpr int color_r = 0;
inline constexpr int color_g = 1;
inline constexpr int color_b = 2;
inline constexpr int offset_x = 3;
inline constexpr int offset_y = 4;
inline constexpr int offset_z = 5;
inline constexpr int opacity_logit = 6;
inline constexpr int log_scale_x = 7;
inline constexpr int log_scale_y = 8;
inline constexpr int log_scale_z = 9;
inline constexpr int quat_w = 10;
inline constexpr int quat_x = 11;
inline constexpr int quat_y = 12;
inline constexpr int quat_z = 13;
inline constexpr int label_body = 14;
inline constexpr int label_cloth = 15;
inline constexpr int count = 16;

const char* name(int c);
}  // namespace channel

/// 2D grid of per-pixel Gaussian parameters plus a validity mask.
/// Channels are stored as plane-major float32: channel c, row r, column col
/// lives at c*H*W + r*W + col.
struct GaussianMap {
    int height = 0;
    int width = 0;
    Side side = Side::front;
    std::vector<float> channels;      // channel::count planes
    std::vector<std::uint8_t> mask;   // H*W, nonzero = valid

    GaussianMap() = default;
    GaussianMap(int h, int w, Side s)
        : height(h), width(w), side(s),
          channels(static_cast<std::size_t>(channel::count) * h * w, 0.0f),
          mask(static_cast<std::size_t>(h) * w, 0) {}

    float& at(int c, int r, int col) {
        return channels[(static_cast<std::size_t>(c) * height + r) * width + col];
    }
    float at(int c, int r, int col) const {
        return channels[(static_cast<std::size_t>(c) * height + r) * width + col];
    }
    bool valid(int r, int col) const { return mask[static_cast<std::size_t>(r) * width + col] != 0; }
    void set_valid(int r, int col, bool v) {
        mask[static_cast<std::size_t>(r) * width + col] = v ? 1 : 0;
    }
    std::size_t valid_count() const;

    /// Throws std::invalid_argument on malformed dimensions or a zero-magnitude
    /// quaternion at a valid pixel.
    void validate() const;
};

/// Canonical template surface points anchored to map pixels.
struct TemplateGeometry {
    int height = 0;
    int width = 0;
    Side side = Side::front;
    std::vector<float> positions;     // 3 planes (x, y, z), same layout as GaussianMap
    std::vector<std::uint8_t> mask;

    TemplateGeometry() = default;
    TemplateGeometry(int h, int w, Side s)
        : height(h), width(w), side(s),
          positions(static_cast<std::size_t>(3) * h * w, 0.0f),
          mask(static_cast<std::size_t>(h) * w, 0) {}

    bool valid(int r, int col) const { return mask[static_cast<std::size_t>(r) * width + col] != 0; }
    void set_valid(int r, int col, bool v) {
        mask[static_cast<std::size_t>(r) * width + col] = v ? 1 : 0;
    }
    Vec3 position(int r, int col) const {
        const std::size_t hw = static_cast<std::size_t>(height) * width;
        const std::size_t p = static_cast<std::size_t>(r) * width + col;
        return {positions[p], positions[hw + p], positions[2 * hw + p]};
    }
    void set_position(int r, int col, const Vec3& v) {
        const std::size_t hw = static_cast<std::size_t>(height) * width;
        const std::size_t p = static_cast<std::size_t>(r) * width + col;
        positions[p] = static_cast<float>(v.x());
        positions[hw + p] = static_cast<float>(v.y());
        positions[2 * hw + p] = static_cast<float>(v.z());
    }
};

}  // namespace gsav
