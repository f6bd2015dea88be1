#include "gsav/laplacian.hpp"

#include <cmath>
#include <stdexcept>

namespace gsav {

void LaplacianSystem::set_reference(const std::vector<Vec3>& reference) {
    if (static_cast<int>(reference.size()) != n)
        throw std::invalid_argument("laplacian: reference size mismatch");
    Eigen::Matrix<double, Eigen::Dynamic, 3> x(n, 3);
    for (int i = 0; i < n; ++i) x.row(i) = reference[i].transpose();
    b = laplacian * x;
}

LaplacianSystem build_laplacian(const AdjacencyGraph& graph, const std::vector<int>& subset_nodes) {
    if (subset_nodes.empty()) throw std::invalid_argument("build_laplacian: empty subset");

    std::vector<int> local(graph.node_count(), -1);
    for (std::size_t i = 0; i < subset_nodes.size(); ++i) {
        const int node = subset_nodes[i];
        if (node < 0 || node >= graph.node_count())
            throw std::invalid_argument("build_laplacian: subset node out of range");
        local[node] = static_cast<int>(i);
    }

    const int n = static_cast<int>(subset_nodes.size());
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> degree(n, 0.0);
    auto add_edge = [&](int gi, int gj) {
        const int i = local[gi], j = local[gj];
        if (i < 0 || j < 0) return;
        triplets.emplace_back(i, j, -1.0);
        triplets.emplace_back(j, i, -1.0);
        degree[i] += 1.0;
        degree[j] += 1.0;
    };
    for (const auto& [i, j] : graph.edges) add_edge(i, j);
    for (const auto& [i, j] : graph.stitch_pairs) add_edge(i, j);
    for (int i = 0; i < n; ++i)
        if (degree[i] > 0) triplets.emplace_back(i, i, degree[i]);

    LaplacianSystem sys;
    sys.n = n;
    sys.laplacian.resize(n, n);
    sys.laplacian.setFromTriplets(triplets.begin(), triplets.end());
    sys.laplacian.makeCompressed();
    sys.laplacian_sq = (sys.laplacian * sys.laplacian).pruned();
    sys.laplacian_sq.makeCompressed();
    return sys;
}

LaplacianSystem build_laplacian(const AdjacencyGraph& graph) {
    std::vector<int> all(graph.node_count());
    for (int i = 0; i < graph.node_count(); ++i) all[i] = i;
    return build_laplacian(graph, all);
}

Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& rhs,
                          double tol, int max_iterations, int* iterations) {
    const Eigen::Index n = rhs.size();
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0) {
        if (iterations) *iterations = 0;
        return Eigen::VectorXd::Zero(n);
    }

    Eigen::VectorXd inv_diag(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = a.coeff(i, i);
        inv_diag[i] = d > 0 ? 1.0 / d : 1.0;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);

    for (int it = 0; it < max_iterations; ++it) {
        if (r.norm() <= tol * rhs_norm) {
            if (iterations) *iterations = it;
            return x;
        }
        const Eigen::VectorXd ap = a * p;
        const double pap = p.dot(ap);
        if (pap <= 0) throw std::runtime_error("solve_spd: matrix is not positive definite");
        const double step = rz / pap;
        x += step * p;
        r -= step * ap;
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    if (r.norm() <= tol * rhs_norm) {
        if (iterations) *iterations = max_iterations;
        return x;
    }
    throw std::runtime_error("solve_spd: no convergence after " + std::to_string(max_iterations) +
                             " iterations");
}

}  // namespace gsav
