#pragma once

#include "gsav/pipeline.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace gsav {

enum class SceneKind { plane_pair, spheres, capsule, transfer_pair };

SceneKind scene_kind_from_name(const std::string& name);
const char* scene_kind_name(SceneKind kind);

/// Seed fixes all generated data exactly; noise jitters clothing offsets.
struct SyntheticSceneSpec {
    SceneKind kind = SceneKind::capsule;
    int resolution = 48;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

/// Avatars keyed "A" (and "B" for transfer scenes).
std::map<std::string, LayeredAvatar> generate_scene(const SyntheticSceneSpec& spec);

/// Default camera framing the generated scenes.
Camera scene_camera(int width, int height);

}  // namespace gsav
