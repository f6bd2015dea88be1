#pragma once

#include "gsav/adjacency.hpp"
#include "gsav/geometry.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace gsav {

/// Uniform graph Laplacian over a node subset (degree on the diagonal, -1 per
/// neighbor), with cached Laplacian coordinates b = L x for a reference point
/// set. Edges are the map 4-neighbor edges plus stitch edges inside the subset.
struct LaplacianSystem {
    int n = 0;
    Eigen::SparseMatrix<double> laplacian;       // n x n, symmetric, zero row sums
    Eigen::SparseMatrix<double> laplacian_sq;    // L^T L (= L L for symmetric L)
    Eigen::Matrix<double, Eigen::Dynamic, 3> b;  // cached coordinates, may be empty

    /// b = L * reference, computed once and reused.
    void set_reference(const std::vector<Vec3>& reference);
};

/// subset_nodes lists graph node indices (the clothing subset); the Laplacian
/// is built over them in the given order. Isolated nodes keep a zero row.
LaplacianSystem build_laplacian(const AdjacencyGraph& graph, const std::vector<int>& subset_nodes);

/// Laplacian over all graph nodes.
LaplacianSystem build_laplacian(const AdjacencyGraph& graph);

struct SolveStats {
    int max_iterations = 0;  // worst axis
};

/// Jacobi-preconditioned conjugate gradient for an SPD system, relative
/// residual below tol. Throws std::runtime_error on non-convergence.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& rhs,
                          double tol = 1e-8, int max_iterations = 10000, int* iterations = nullptr);

}  // namespace gsav
