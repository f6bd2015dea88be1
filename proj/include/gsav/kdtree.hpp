#pragma once

#include "gsav/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gsav {

/// Exact nearest-neighbor search over a fixed 3D point set.
/// Ties on squared distance resolve to the lowest point index.
class KdTree3 {
public:
    explicit KdTree3(std::vector<Vec3> points) : points_(std::move(points)) {
        if (points_.empty()) throw std::invalid_argument("kdtree: empty point set");
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), 0);
        nodes_.reserve(points_.size());
        root_ = build(0, static_cast<int>(order_.size()));
    }

    int size() const { return static_cast<int>(points_.size()); }
    const Vec3& point(int i) const { return points_[i]; }

    struct Hit {
        int index = -1;
        double dist_sq = std::numeric_limits<double>::infinity();
    };

    Hit nearest(const Vec3& query) const {
        Hit best;
        search(root_, query, best);
        return best;
    }

private:
    struct Node {
        int point = -1;  // index into points_
        int axis = 0;
        int left = -1;
        int right = -1;
    };

    int build(int lo, int hi) {
        if (lo >= hi) return -1;
        // split along the widest extent
        Vec3 mn = points_[order_[lo]], mx = mn;
        for (int i = lo + 1; i < hi; ++i) {
            mn = mn.cwiseMin(points_[order_[i]]);
            mx = mx.cwiseMax(points_[order_[i]]);
        }
        int axis = 0;
        (mx - mn).maxCoeff(&axis);

        const int mid = (lo + hi) / 2;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [&](int a, int b) {
                             const double pa = points_[a][axis], pb = points_[b][axis];
                             if (pa != pb) return pa < pb;
                             return a < b;
                         });
        Node node;
        node.point = order_[mid];
        node.axis = axis;
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int left = build(lo, mid);
        const int right = build(mid + 1, hi);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    void consider(int point, const Vec3& query, Hit& best) const {
        const double d = (points_[point] - query).squaredNorm();
        if (d < best.dist_sq || (d == best.dist_sq && point < best.index)) {
            best.dist_sq = d;
            best.index = point;
        }
    }

    void search(int node, const Vec3& query, Hit& best) const {
        if (node < 0) return;
        const Node& n = nodes_[node];
        consider(n.point, query, best);
        const double delta = query[n.axis] - points_[n.point][n.axis];
        const int near = delta < 0 ? n.left : n.right;
        const int far = delta < 0 ? n.right : n.left;
        search(near, query, best);
        if (delta * delta <= best.dist_sq) search(far, query, best);
    }

    std::vector<Vec3> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace gsav
