#pragma once

#include "gsav/adjacency.hpp"
#include "gsav/camera.hpp"
#include "gsav/codecs.hpp"
#include "gsav/collision.hpp"
#include "gsav/config.hpp"
#include "gsav/gaussian_set.hpp"
#include "gsav/losses.hpp"
#include "gsav/renderer.hpp"
#include "gsav/skinning.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gsav {

/// Two-layer avatar: full-body maps plus a clothing subset living on the same
/// pixel grid, sharing one skeleton, weight set, and template.
struct LayeredAvatar {
    GaussianMap body_front, body_back;
    GaussianMap cloth_front, cloth_back;  // masks equal the clothing selector
    TemplateGeometry tmpl_front, tmpl_back;
    Skeleton skeleton;
    SkinningWeights weights;              // one row per body node, extraction order
    std::vector<PixelRef> selector;       // sorted clothing pixels
    std::vector<std::pair<int, int>> stitch_pairs;  // persisted body-graph topology
    // optional second offsets, node order; empty means zero
    std::vector<Vec3> body_render_offsets;
    std::vector<Vec3> cloth_render_offsets;

    /// Throws std::invalid_argument when the selector and cloth masks disagree
    /// or clothing pixels fall outside the body mask.
    void validate() const;
};

/// Derived state shared by posing, fitting, rendering, and transfer.
struct AvatarRuntime {
    GaussianSet body;
    AdjacencyGraph body_graph;
    NormalField body_canonical_normals;
    GaussianSet cloth;                 // may be empty
    AdjacencyGraph cloth_graph;        // subset topology, stitch pairs inherited
    std::vector<int> cloth_to_body;    // cloth node -> body node, same pixel
    SkinningWeights cloth_weights;
};

AvatarRuntime build_runtime(const LayeredAvatar& avatar, double stitch_tolerance = 1e-3);

void save_avatar_bundle(const LayeredAvatar& avatar, const std::string& directory);
LayeredAvatar load_avatar_bundle(const std::string& directory);

/// Pixels whose cloth probability strictly exceeds 0.5. Throws when nothing
/// qualifies.
std::vector<PixelRef> segment_clothing(const GaussianSet& single_layer);

/// Freezes labels to (1,0) body / (0,1) cloth according to the selector.
void freeze_labels(GaussianSet& set, const std::vector<PixelRef>& selector);

struct FitInputs {
    GaussianSet* layer = nullptr;            // offsets are optimized in place
    const AdjacencyGraph* graph = nullptr;
    std::vector<Vec3> target;                // reconstruction point cloud
    // optional collision coupling against the other layer (pixel-paired)
    std::vector<Vec3> other_positions;       // aligned with *layer via pairing below
    NormalField other_normals;
    std::vector<int> pairing;                // layer node -> index into other arrays
    double collision_epsilon = 0.005;
    bool fit_render_offsets = false;         // optimize Δȳ instead of Δx̄
    double layer_epsilon = 0.005;            // ε for the Δȳ hinge
};

struct FitResult {
    LossReport report;
    int iterations = 0;
    int halvings = 0;
    bool aborted = false;
    double initial_total = 0;
    double final_total = 0;
};

/// Deterministic gradient descent with step-halving on increase (at most 20
/// halvings, then abort). Aborts with a report when the loss exceeds 1e3x the
/// initial value.
FitResult fit_geometric_layer(const FitInputs& inputs, const FitConfig& config);

struct TransferResult {
    SplatImage image;
    std::vector<Vec3> resolved_cloth;        // geometric layer after resolution
    std::vector<Vec3> cloth_render_layer;    // resolved + posed Δȳ
    CollisionReport report;
};

/// Poses B's body and A's clothing, resolves collisions on the geometric
/// layers, re-applies A's posed render offsets, and rasterizes the union.
TransferResult transfer_clothing(const LayeredAvatar& a, const AvatarRuntime& a_rt,
                                 const LayeredAvatar& b, const AvatarRuntime& b_rt,
                                 const Pose& pose, const Camera& camera,
                                 const CollisionConfig& config,
                                 const RenderOptions& options);

struct FrameResult {
    SplatImage image;
    std::vector<Vec3> body_points;
    std::vector<Vec3> cloth_points;
};

/// Per-frame layered posing and compositing; optional intra-avatar collision
/// resolution (self transfer) before rendering.
std::vector<FrameResult> animate(const LayeredAvatar& avatar, const AvatarRuntime& rt,
                                 const std::vector<Pose>& poses, const Camera& camera,
                                 const RenderOptions& options,
                                 const CollisionConfig* resolve_config = nullptr);

/// Scene assembly shared by animate and transfer_clothing.
SplatScene make_body_cloth_scene(const GaussianSet& body, const SkinTransforms& body_xf,
                                 const NormalField& body_canonical_normals,
                                 const GaussianSet& cloth, const SkinTransforms& cloth_xf,
                                 const std::vector<Vec3>* cloth_positions_override);

}  // namespace gsav
