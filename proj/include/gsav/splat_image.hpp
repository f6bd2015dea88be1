#pragma once

#include "gsav/geometry.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gsav {

/// Multi-channel rasterization target. Channel planes are allocated lazily;
/// absent planes read as empty vectors.
struct SplatImage {
    int width = 0;
    int height = 0;
    std::vector<double> rgb;     // 3 interleaved per pixel
    std::vector<double> alpha;   // 1 per pixel
    std::vector<double> normal;  // 3 interleaved per pixel
    std::vector<double> label;   // 2 interleaved per pixel (body, cloth)
    std::vector<double> depth;   // 1 per pixel, meters

    SplatImage() = default;
    SplatImage(int w, int h) : width(w), height(h) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }

    bool has_rgb() const { return !rgb.empty(); }
    bool has_alpha() const { return !alpha.empty(); }
    bool has_normal() const { return !normal.empty(); }
    bool has_label() const { return !label.empty(); }
    bool has_depth() const { return !depth.empty(); }

    void allocate_rgb() { rgb.assign(pixel_count() * 3, 0.0); }
    void allocate_alpha() { alpha.assign(pixel_count(), 0.0); }
    void allocate_normal() { normal.assign(pixel_count() * 3, 0.0); }
    void allocate_label() { label.assign(pixel_count() * 2, 0.0); }
    void allocate_depth() { depth.assign(pixel_count(), 0.0); }

    Vec3 rgb_at(int x, int y) const {
        const std::size_t i = index(x, y) * 3;
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
    Vec3 normal_at(int x, int y) const {
        const std::size_t i = index(x, y) * 3;
        return {normal[i], normal[i + 1], normal[i + 2]};
    }
    Vec2 label_at(int x, int y) const {
        const std::size_t i = index(x, y) * 2;
        return {label[i], label[i + 1]};
    }

    void require_same_size(const SplatImage& other, const char* what) const {
        if (width != other.width || height != other.height)
            throw std::invalid_argument(std::string(what) + ": image size mismatch");
    }
};

}  // namespace gsav
