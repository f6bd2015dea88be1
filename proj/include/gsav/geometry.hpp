#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace gsav {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Rotation matrix from an axis-angle vector (angle = |v|, axis = v/|v|).
/// Below 1e-8 rad the exponential map is replaced by its second-order series.
inline Mat3 rotation_from_axis_angle(const Vec3& v) {
    const double angle = v.norm();
    if (angle < 1e-8) {
        Mat3 skew;
        skew << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
        return Mat3::Identity() + skew + 0.5 * (skew * skew);
    }
    return Eigen::AngleAxisd(angle, v / angle).toRotationMatrix();
}

/// Rotation matrix from a (not necessarily unit) quaternion stored as (w,x,y,z).
inline Mat3 rotation_from_quaternion(const Vec4& q) {
    Quat quat(q[0], q[1], q[2], q[3]);
    quat.normalize();
    return quat.toRotationMatrix();
}

/// Deterministic summation with a fixed pairwise reduction tree.
/// The result depends only on the element order, never on thread count.
inline double pairwise_sum(std::span<const double> v) {
    if (v.empty()) return 0.0;
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// Seeded random source. Distribution transforms are implemented here so
/// streams are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t next_u64() { return eng_(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }

    Vec3 vec3(double lo, double hi) {
        const double x = uniform(lo, hi), y = uniform(lo, hi), z = uniform(lo, hi);
        return {x, y, z};
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Runs fn(begin, end) over [0, count) split into contiguous chunks.
/// threads <= 1 runs inline. Chunk boundaries do not depend on thread count,
/// so per-index work stays bit-identical.
inline void parallel_for(std::int64_t count, int threads,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        fn(0, count);
        return;
    }
    const int used = static_cast<int>(std::min<std::int64_t>(threads, count));
    const std::int64_t chunk = (count + used - 1) / used;
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (int t = 0; t < used; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace gsav
