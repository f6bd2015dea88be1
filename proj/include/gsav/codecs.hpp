#pragma once

#include "gsav/adjacency.hpp"
#include "gsav/camera.hpp"
#include "gsav/gaussian_map.hpp"
#include "gsav/skinning.hpp"
#include "gsav/splat_image.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gsav {

/// I/O failure carrying the byte offset where decoding stopped.
class CodecError : public std::runtime_error {
public:
    CodecError(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// binary formats, little-endian
void write_gaussian_map(const GaussianMap& map, const std::string& path);
GaussianMap read_gaussian_map(const std::string& path);

void write_template(const TemplateGeometry& tmpl, const std::string& path);
TemplateGeometry read_template(const std::string& path);

void write_stitch_pairs(const std::vector<std::pair<int, int>>& pairs, const std::string& path);
std::vector<std::pair<int, int>> read_stitch_pairs(const std::string& path);

void write_weights(const SkinningWeights& weights, const std::string& path);
SkinningWeights read_weights(const std::string& path);

// structured text formats
void write_skeleton(const Skeleton& skeleton, const std::string& path);
Skeleton read_skeleton(const std::string& path);

void write_pose_sequence(const std::vector<Pose>& poses, const std::string& path);
std::vector<Pose> read_pose_sequence(const std::string& path, int expected_joints = -1);

void write_selector(const std::vector<PixelRef>& pixels, const std::string& path);
std::vector<PixelRef> read_selector(const std::string& path);

void write_camera(const Camera& camera, const std::string& path);
Camera read_camera(const std::string& path);

// point clouds and images
struct PointCloud {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;  // may be empty
    std::vector<Vec3> colors;   // [0,1], may be empty
};
void write_ply(const PointCloud& cloud, const std::string& path);
PointCloud read_ply(const std::string& path);

void write_ppm(const SplatImage& image, const std::string& path);

/// Planar float32 channels with a text sidecar header (path + ".hdr").
void write_float_planes(const std::vector<std::vector<double>>& planes,
                        const std::vector<std::string>& names, int width, int height,
                        const std::string& path);
std::vector<std::vector<double>> read_float_planes(const std::string& path,
                                                   std::vector<std::string>* names, int* width,
                                                   int* height);

}  // namespace gsav
