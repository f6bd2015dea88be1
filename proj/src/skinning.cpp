#include "gsav/skinning.hpp"

#include <cmath>
#include <stdexcept>

namespace gsav {

void Skeleton::validate() const {
    const int j = joint_count();
    if (j <= 0) throw std::invalid_argument("skeleton: no joints");
    if (static_cast<int>(rest_positions.size()) != j)
        throw std::invalid_argument("skeleton: rest position count mismatch");
    if (parents[0] != -1) throw std::invalid_argument("skeleton: joint 0 must be the root");
    for (int i = 1; i < j; ++i) {
        if (parents[i] < 0 || parents[i] >= j)
            throw std::invalid_argument("skeleton: parent index out of range");
        // walk to the root; a walk longer than j joints means a cycle
        int cur = i, steps = 0;
        while (cur != 0) {
            cur = parents[cur];
            if (cur < 0 || ++steps > j)
                throw std::invalid_argument("skeleton: parent graph has a cycle");
        }
    }
    for (const Vec3& p : rest_positions)
        if (!p.allFinite()) throw std::invalid_argument("skeleton: non-finite rest position");
}

SkinningWeights SkinningWeights::single_joint(int n) {
    SkinningWeights w;
    w.joint_count = 1;
    w.rows.resize(n);
    for (auto& row : w.rows) {
        row.count = 1;
        row.joint[0] = 0;
        row.weight[0] = 1.0;
    }
    return w;
}

void SkinningWeights::validate(double tol) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        double sum = 0;
        for (int k = 0; k < r.count; ++k) {
            if (r.joint[k] < 0 || r.joint[k] >= joint_count)
                throw std::invalid_argument("skinning weights: joint index out of range");
            if (r.weight[k] < 0)
                throw std::invalid_argument("skinning weights: negative weight in row " +
                                            std::to_string(i));
            sum += r.weight[k];
        }
        if (std::abs(sum - 1.0) > tol)
            throw std::invalid_argument("skinning weights: row " + std::to_string(i) +
                                        " sums to " + std::to_string(sum));
    }
}

int SkinTransforms::degenerate_count() const {
    int n = 0;
    for (auto d : degenerate)
        if (d) ++n;
    return n;
}

JointTransforms forward_kinematics(const Skeleton& skeleton, const Pose& pose) {
    skeleton.validate();
    const int j = skeleton.joint_count();
    if (static_cast<int>(pose.joint_rotations.size()) != j)
        throw std::invalid_argument("forward_kinematics: pose joint count mismatch");

    JointTransforms out;
    out.rotation.resize(j);
    out.translation.resize(j);
    for (int i = 0; i < j; ++i) {
        const Mat3 local_r = rotation_from_axis_angle(pose.joint_rotations[i]);
        const Vec3& pivot = skeleton.rest_positions[i];
        // local transform rotates about the joint's rest position
        const Vec3 local_t = pivot - local_r * pivot;
        if (i == 0) {
            out.rotation[0] = local_r;
            out.translation[0] = local_t + pose.root_translation;
        } else {
            const int p = skeleton.parents[i];
            out.rotation[i] = out.rotation[p] * local_r;
            out.translation[i] = out.rotation[p] * local_t + out.translation[p];
        }
    }
    return out;
}

SkinTransforms blend_transforms(const SkinningWeights& weights, const JointTransforms& joints) {
    if (weights.joint_count > joints.size())
        throw std::invalid_argument("blend_transforms: weights reference missing joints");

    SkinTransforms out;
    const int n = weights.size();
    out.linear.resize(n);
    out.translation.resize(n);
    out.degenerate.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        const auto& row = weights.rows[i];
        double sum = 0;
        Mat3 a = Mat3::Zero();
        Vec3 t = Vec3::Zero();
        for (int k = 0; k < row.count; ++k) {
            sum += row.weight[k];
            a += row.weight[k] * joints.rotation[row.joint[k]];
            t += row.weight[k] * joints.translation[row.joint[k]];
        }
        if (std::abs(sum - 1.0) > 1e-4)
            throw std::invalid_argument("blend_transforms: weight row " + std::to_string(i) +
                                        " sums to " + std::to_string(sum));
        out.linear[i] = a;
        out.translation[i] = t;
        if (std::abs(a.determinant()) <= 1e-8) out.degenerate[i] = 1;
    }
    return out;
}

PosedGaussians pose_gaussians(const GaussianSet& set, const SkinTransforms& xf,
                              const NormalField& canonical_normals) {
    if (xf.size() != set.n)
        throw std::invalid_argument("pose_gaussians: transform count mismatch");
    PosedGaussians out;
    out.positions.resize(set.n);
    out.covariances.resize(set.n);
    out.normals.n.assign(set.n, Vec3::Zero());
    out.normals.valid.assign(set.n, 0);

    const bool have_normals = canonical_normals.size() == set.n;
    for (int i = 0; i < set.n; ++i) {
        const Mat3& a = xf.linear[i];
        out.positions[i] = a * set.position(i) + xf.translation[i];
        out.covariances[i] =
            a * covariance_from_params(set.scales[i], set.rotations[i]) * a.transpose();
        if (have_normals && canonical_normals.valid[i]) {
            const Vec3 rn = a * canonical_normals.n[i];
            const double norm = rn.norm();
            if (norm >= 1e-12) {
                out.normals.n[i] = rn / norm;
                out.normals.valid[i] = 1;
            }
        }
    }
    return out;
}

std::vector<Vec3> pose_rendering_layer(const GaussianSet& set, const SkinTransforms& xf) {
    if (xf.size() != set.n)
        throw std::invalid_argument("pose_rendering_layer: transform count mismatch");
    std::vector<Vec3> out(set.n);
    for (int i = 0; i < set.n; ++i)
        out[i] = xf.linear[i] * (set.base_positions[i] + set.offsets[i] + set.render_offsets[i]) +
                 xf.translation[i];
    return out;
}

std::vector<Vec3> apply_transforms(const SkinTransforms& xf, const std::vector<Vec3>& points) {
    if (xf.size() != static_cast<int>(points.size()))
        throw std::invalid_argument("apply_transforms: size mismatch");
    std::vector<Vec3> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = xf.apply(static_cast<int>(i), points[i]);
    return out;
}

}  // namespace gsav
