#pragma once

#include "gsav/gaussian_set.hpp"
#include "gsav/geometry.hpp"
#include "gsav/normals.hpp"

#include <string>
#include <vector>

namespace gsav {

struct Skeleton {
    std::vector<std::string> names;
    std::vector<int> parents;  // parent index, -1 for the root (joint 0)
    std::vector<Vec3> rest_positions;

    int joint_count() const { return static_cast<int>(parents.size()); }
    /// Throws std::invalid_argument if the parent graph is not a tree rooted at 0.
    void validate() const;
};

struct Pose {
    std::vector<Vec3> joint_rotations;  // axis-angle per joint, radians
    Vec3 root_translation = Vec3::Zero();

    static Pose identity(int joints) {
        Pose p;
        p.joint_rotations.assign(joints, Vec3::Zero());
        return p;
    }
};

/// Rigid transform per joint relative to the rest pose (identity at zero pose).
struct JointTransforms {
    std::vector<Mat3> rotation;
    std::vector<Vec3> translation;

    int size() const { return static_cast<int>(rotation.size()); }
    Vec3 apply(int j, const Vec3& p) const { return rotation[j] * p + translation[j]; }
};

/// Sparse per-Gaussian blend weights, at most 4 joints per row.
struct SkinningWeights {
    struct Row {
        int count = 0;
        int joint[4] = {0, 0, 0, 0};
        double weight[4] = {0, 0, 0, 0};
    };
    int joint_count = 0;
    std::vector<Row> rows;

    int size() const { return static_cast<int>(rows.size()); }
    static SkinningWeights single_joint(int n);  // weight 1 on joint 0
    /// Throws if a row is negative or deviates from sum 1 by more than tol.
    void validate(double tol = 1e-6) const;
};

/// Blended per-Gaussian transform. The linear part of an LBS blend is not
/// exactly a rotation; a near-singular blend is flagged, not rejected.
struct SkinTransforms {
    std::vector<Mat3> linear;
    std::vector<Vec3> translation;
    std::vector<std::uint8_t> degenerate;  // |det| <= 1e-8

    int size() const { return static_cast<int>(linear.size()); }
    Vec3 apply(int i, const Vec3& p) const { return linear[i] * p + translation[i]; }
    int degenerate_count() const;
};

struct PosedGaussians {
    std::vector<Vec3> positions;
    std::vector<Mat3> covariances;
    NormalField normals;
};

/// Forward kinematics: each joint rotates about its rest position, composed
/// down the tree; the root also receives the pose's translation.
JointTransforms forward_kinematics(const Skeleton& skeleton, const Pose& pose);

/// (A_i | t_i) = sum_j w_ij (R_j | t_j). Throws if a row sum deviates from 1
/// by more than 1e-4.
SkinTransforms blend_transforms(const SkinningWeights& weights, const JointTransforms& joints);

/// x = A x̄ + t, Σ = A Σ̄ Aᵀ, n = A n̄ / |A n̄| (absent when |A n̄| < 1e-12).
PosedGaussians pose_gaussians(const GaussianSet& set, const SkinTransforms& xf,
                              const NormalField& canonical_normals);

/// Positions with the second offset folded in: y = A (base + Δx̄ + Δȳ) + t.
std::vector<Vec3> pose_rendering_layer(const GaussianSet& set, const SkinTransforms& xf);

/// Applies (A | t) to arbitrary points, one transform per point.
std::vector<Vec3> apply_transforms(const SkinTransforms& xf, const std::vector<Vec3>& points);

}  // namespace gsav
