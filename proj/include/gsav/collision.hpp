#pragma once

#include "gsav/geometry.hpp"
#include "gsav/laplacian.hpp"
#include "gsav/normals.hpp"
#include "gsav/skinning.hpp"

#include <string>
#include <vector>

namespace gsav {

struct CollisionConfig {
    double epsilon = 0.005;  // clearance threshold, meters
    double delta = 0.005;    // per-iteration displacement cap, meters
    double alpha = 0.5;      // soft-constraint weight
    int iterations = 5;

    /// Throws std::invalid_argument on non-positive fields or iterations < 1.
    void validate() const;
};

/// Canonical-space re-anchoring guess: carry A's cloth-to-body displacement
/// onto B's body, then pose with B's transforms. selector[i] is the body-array
/// index pixel-aligned with cloth Gaussian i; body_b_valid marks which of B's
/// body entries exist. Missing entries substitute the nearest valid body pixel
/// in map space (same side preferred), counted in substitutions.
struct InitialGuess {
    std::vector<Vec3> posed;      // ξ
    std::vector<Vec3> canonical;  // ξ̄
    int substitutions = 0;
};
InitialGuess initial_guess(const std::vector<Vec3>& cloth_canonical_a,
                           const std::vector<Vec3>& body_canonical_a,
                           const std::vector<Vec3>& body_canonical_b,
                           const std::vector<std::uint8_t>& body_b_valid,
                           const std::vector<int>& selector,
                           const std::vector<PixelRef>& body_pixels,
                           const SkinTransforms& body_b_transforms);

/// Least-squares solution of [L; αI; αI] η = [b; α x_current; α ξ] via the
/// normal equations (LᵀL + 2α²I) η = Lᵀb + α²(x_current + ξ), one axis at a time.
std::vector<Vec3> solve_reanchor(const LaplacianSystem& system,
                                 const std::vector<Vec3>& x_current,
                                 const std::vector<Vec3>& xi, double alpha);

struct NearestBodyResult {
    std::vector<int> index;       // nearest body point per cloth point
    std::vector<Vec3> point;
    std::vector<Vec3> normal;
    std::vector<double> distance;  // signed, along the nearest neighbor's normal
};

/// Exact nearest neighbor among body points that carry a normal; ties break to
/// the lowest body index. d = (cloth − nn) · n_nn.
NearestBodyResult nearest_body(const std::vector<Vec3>& cloth_positions,
                               const std::vector<Vec3>& body_positions,
                               const NormalField& body_normals);

/// One refinement step: ξ = x + clip(ε − d, 0, δ) ⊙ n_nn, then least squares
/// [L; αI] η = [b; α ξ] via (LᵀL + α²I) η = Lᵀb + α²ξ.
std::vector<Vec3> refine_iteration(const std::vector<Vec3>& x_cloth,
                                   const NearestBodyResult& nn, const LaplacianSystem& system,
                                   const CollisionConfig& config);

struct CollisionReport {
    struct IterationStats {
        int iteration = 0;            // 0 = after re-anchoring
        int violations = 0;           // points with d < ε − 1e-3
        double max_penetration = 0;   // max(ε − d, 0)
    };
    std::vector<IterationStats> iterations;
    int substitutions = 0;
    int final_violations = 0;

    std::string to_text() const;
};

struct ResolveInputs {
    // A's clothing
    std::vector<Vec3> cloth_posed;       // x_A^cloth for the query pose
    std::vector<Vec3> cloth_canonical;
    // pixel-aligned body data (arrays over B's body set)
    std::vector<Vec3> body_canonical_a;
    std::vector<Vec3> body_canonical_b;
    std::vector<std::uint8_t> body_b_valid;
    std::vector<int> selector;           // cloth index -> body array index
    std::vector<PixelRef> body_pixels;
    const SkinTransforms* body_b_transforms = nullptr;
    // B's posed body for nearest-neighbor queries
    std::vector<Vec3> body_posed_b;
    const NormalField* body_normals_b = nullptr;
    // clothing topology
    const LaplacianSystem* system = nullptr;  // b must already reference cloth_posed
};

struct ResolveResult {
    std::vector<Vec3> positions;
    CollisionReport report;
};

/// Initial guess, one re-anchoring solve, then config.iterations refinement
/// passes. The cached b is never recomputed.
ResolveResult resolve_collisions(const ResolveInputs& inputs, const CollisionConfig& config);

}  // namespace gsav
