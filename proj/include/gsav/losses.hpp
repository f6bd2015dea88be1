#pragma once

#include "gsav/adjacency.hpp"
#include "gsav/gaussian_set.hpp"
#include "gsav/geometry.hpp"
#include "gsav/normals.hpp"
#include "gsav/splat_image.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gsav {

enum class Stage { single_layer, multi_layer };

struct LossWeights {
    double normal = 0.1;
    double stitch = 0.01;
    double off = 0.01;
    double tv = 0.01;
    double edge = 0.01;
    double label = 0.1;
    double tv_label = 0.01;
    double stitch_label = 0.01;
    double l1 = 0.8;
    double ssim = 0.2;
    double coll = 1.0;
    double layer = 1.0;
    double cd = 1.0;

    double term(const std::string& name) const;
    void set_term(const std::string& name, double value);
    /// Throws if any weight is negative or non-finite.
    void validate() const;
};

struct LossReport {
    struct Entry {
        std::string name;
        double value = 0;
        double weight = 0;
    };
    std::vector<Entry> terms;
    double total = 0;

    std::string to_text() const;
};

/// Scalar loss plus its analytic gradient with respect to one per-Gaussian
/// 3-vector variable (stated per operation).
struct ValueGrad {
    double value = 0;
    std::vector<Vec3> grad;
    int skipped = 0;  // pairs/edges excluded (missing normals, zero template edges)
};

/// (1/N) Σ |Δx̄_i|². Gradient w.r.t. offsets.
ValueGrad loss_offset(const GaussianSet& set);

/// Mean over unordered 4-neighbor pairs of |Δx̄_i − Δx̄_j|². Neighbor offsets
/// matching keeps the term zero at zero offsets. Gradient w.r.t. offsets.
ValueGrad loss_tv_positions(const GaussianSet& set, const AdjacencyGraph& graph);

/// Mean over unordered 4-neighbor pairs of Σ_c |p_i,c − p_j,c| on the two
/// label channels.
double loss_tv_labels(const GaussianSet& set, const AdjacencyGraph& graph);

/// Mean over edges of (|x̄_i − x̄_j| − |base_i − base_j|)². Zero-length
/// template edges are skipped (counted). Gradient w.r.t. offsets.
ValueGrad loss_edge(const GaussianSet& set, const AdjacencyGraph& graph);

/// Mean squared distance over stitch pairs of canonical positions.
/// Gradient w.r.t. offsets. Empty pair list yields 0 (skipped = -1 marks it).
ValueGrad loss_stitch_positions(const GaussianSet& set, const AdjacencyGraph& graph);

/// Mean squared label-vector distance over stitch pairs.
double loss_stitch_labels(const GaussianSet& set, const AdjacencyGraph& graph);

/// Mean over masked pixels of the per-pixel L1 difference of normal vectors.
double loss_normal_image(const SplatImage& rendered, const SplatImage& target,
                         const std::vector<std::uint8_t>& mask);

/// Ground-truth segmentation classes per pixel.
enum class SegClass : std::uint8_t { background = 0, body = 1, cloth = 2 };

/// Cross entropy between rendered (S_body, S_cloth) channels and a per-pixel
/// class image; each class term normalized by its own pixel count,
/// probabilities clamped to [1e-6, 1-1e-6]. Empty classes contribute 0.
double loss_label(const SplatImage& rendered, const std::vector<SegClass>& ground_truth);

/// (1/N) Σ max(ε − d_i, 0)² over pixel-paired cloth/body Gaussians with
/// d_i = (x̄_cloth − x̄_body)·n̄_body. Pairs without a body normal are skipped.
/// Gradient w.r.t. cloth positions.
ValueGrad loss_coll(const std::vector<Vec3>& cloth_positions,
                    const std::vector<Vec3>& paired_body_positions,
                    const NormalField& paired_body_normals, double epsilon);

struct LayerLoss {
    double value = 0;
    std::vector<Vec3> grad_body;
    std::vector<Vec3> grad_cloth;
};

/// Hinge on render-offset magnitudes beyond ε/2, both layers.
LayerLoss loss_layer(const std::vector<Vec3>& body_render_offsets,
                     const std::vector<Vec3>& cloth_render_offsets, double epsilon);

/// Symmetric Chamfer distance (mean squared nearest-neighbor distance both
/// directions). Gradient w.r.t. the first set.
ValueGrad loss_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

struct ImageLoss {
    double l1 = 0;
    double ssim = 1;
};

/// Masked mean absolute RGB difference and masked SSIM (11×11 Gaussian
/// window, σ=1.5, C1=0.01², C2=0.03²). Evaluation only, no gradients.
ImageLoss loss_image(const SplatImage& rendered, const SplatImage& target,
                     const std::vector<std::uint8_t>& mask);

/// Weighted stage total. Terms supplied by name; a term outside the stage
/// with positive weight is rejected, a positive-weight stage term that is
/// missing is an error.
LossReport total_loss(const std::map<std::string, double>& terms, const LossWeights& weights,
                      Stage stage);

const std::vector<std::string>& stage_terms(Stage stage);

}  // namespace gsav
