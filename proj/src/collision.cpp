#include "gsav/collision.hpp"

#include "gsav/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gsav {

void CollisionConfig::validate() const {
    if (!(epsilon > 0)) throw std::invalid_argument("collision config: epsilon must be > 0");
    if (!(delta > 0)) throw std::invalid_argument("collision config: delta must be > 0");
    if (!(alpha > 0)) throw std::invalid_argument("collision config: alpha must be > 0");
    if (iterations < 1) throw std::invalid_argument("collision config: iterations must be >= 1");
}

std::string CollisionReport::to_text() const {
    std::ostringstream os;
    os << "substitutions = " << substitutions << "\n";
    for (const auto& it : iterations)
        os << "iteration " << it.iteration << ": violations = " << it.violations
           << ", max penetration = " << it.max_penetration << "\n";
    os << "final violations = " << final_violations << "\n";
    return os.str();
}

InitialGuess initial_guess(const std::vector<Vec3>& cloth_canonical_a,
                           const std::vector<Vec3>& body_canonical_a,
                           const std::vector<Vec3>& body_canonical_b,
                           const std::vector<std::uint8_t>& body_b_valid,
                           const std::vector<int>& selector,
                           const std::vector<PixelRef>& body_pixels,
                           const SkinTransforms& body_b_transforms) {
    const std::size_t n = cloth_canonical_a.size();
    const std::size_t m = body_canonical_a.size();
    if (selector.size() != n) throw std::invalid_argument("initial_guess: selector size mismatch");
    if (body_canonical_b.size() != m || body_b_valid.size() != m || body_pixels.size() != m ||
        static_cast<std::size_t>(body_b_transforms.size()) != m)
        throw std::invalid_argument("initial_guess: body array size mismatch");

    // nearest valid B pixel in map space, same side preferred
    auto substitute = [&](int body_index) {
        const PixelRef& miss = body_pixels[body_index];
        long best_cost = std::numeric_limits<long>::max();
        int best = -1;
        for (std::size_t k = 0; k < m; ++k) {
            if (!body_b_valid[k]) continue;
            const PixelRef& p = body_pixels[k];
            const long dr = p.row - miss.row, dc = p.col - miss.col;
            long cost = dr * dr + dc * dc;
            if (p.side != miss.side) cost += 1L << 40;
            if (cost < best_cost) {
                best_cost = cost;
                best = static_cast<int>(k);
            }
        }
        if (best < 0) throw std::invalid_argument("initial_guess: body B has no valid pixels");
        return best;
    };

    InitialGuess out;
    out.canonical.resize(n);
    out.posed.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        int sel = selector[i];
        if (sel < 0 || sel >= static_cast<int>(m))
            throw std::invalid_argument("initial_guess: selector index out of range");
        if (!body_b_valid[sel]) {
            sel = substitute(sel);
            ++out.substitutions;
        }
        out.canonical[i] =
            (cloth_canonical_a[i] - body_canonical_a[selector[i]]) + body_canonical_b[sel];
        out.posed[i] = body_b_transforms.apply(sel, out.canonical[i]);
    }
    return out;
}

namespace {

std::vector<Vec3> solve_stacked(const LaplacianSystem& system,
                                const Eigen::SparseMatrix<double>& normal_matrix,
                                const Eigen::Matrix<double, Eigen::Dynamic, 3>& rhs) {
    std::vector<Vec3> out(system.n);
    for (int axis = 0; axis < 3; ++axis) {
        const Eigen::VectorXd sol = solve_spd(normal_matrix, rhs.col(axis));
        for (int i = 0; i < system.n; ++i) out[i][axis] = sol[i];
    }
    return out;
}

Eigen::SparseMatrix<double> shifted(const Eigen::SparseMatrix<double>& base, double shift) {
    Eigen::SparseMatrix<double> identity(base.rows(), base.cols());
    identity.setIdentity();
    return (base + shift * identity).pruned();
}

Eigen::Matrix<double, Eigen::Dynamic, 3> to_matrix(const std::vector<Vec3>& v) {
    Eigen::Matrix<double, Eigen::Dynamic, 3> x(v.size(), 3);
    for (std::size_t i = 0; i < v.size(); ++i) x.row(i) = v[i].transpose();
    return x;
}

}  // namespace

std::vector<Vec3> solve_reanchor(const LaplacianSystem& system, const std::vector<Vec3>& x_current,
                                 const std::vector<Vec3>& xi, double alpha) {
    if (static_cast<int>(x_current.size()) != system.n ||
        static_cast<int>(xi.size()) != system.n || system.b.rows() != system.n)
        throw std::invalid_argument("solve_reanchor: dimension mismatch");
    const double a2 = alpha * alpha;
    const Eigen::Matrix<double, Eigen::Dynamic, 3> rhs =
        system.laplacian.transpose() * system.b + a2 * (to_matrix(x_current) + to_matrix(xi));
    return solve_stacked(system, shifted(system.laplacian_sq, 2.0 * a2), rhs);
}

NearestBodyResult nearest_body(const std::vector<Vec3>& cloth_positions,
                               const std::vector<Vec3>& body_positions,
                               const NormalField& body_normals) {
    if (body_positions.empty()) throw std::invalid_argument("nearest_body: empty body set");
    if (body_normals.n.size() != body_positions.size())
        throw std::invalid_argument("nearest_body: normal field size mismatch");

    // candidates restricted to body points carrying a normal
    std::vector<Vec3> candidates;
    std::vector<int> candidate_index;
    candidates.reserve(body_positions.size());
    for (std::size_t i = 0; i < body_positions.size(); ++i) {
        if (!body_normals.valid[i]) continue;
        candidates.push_back(body_positions[i]);
        candidate_index.push_back(static_cast<int>(i));
    }
    if (candidates.empty())
        throw std::invalid_argument("nearest_body: no body points carry normals");
    const KdTree3 tree(std::move(candidates));

    NearestBodyResult out;
    const std::size_t n = cloth_positions.size();
    out.index.resize(n);
    out.point.resize(n);
    out.normal.resize(n);
    out.distance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto hit = tree.nearest(cloth_positions[i]);
        const int body = candidate_index[hit.index];
        out.index[i] = body;
        out.point[i] = body_positions[body];
        out.normal[i] = body_normals.n[body];
        out.distance[i] = (cloth_positions[i] - out.point[i]).dot(out.normal[i]);
    }
    return out;
}

std::vector<Vec3> refine_iteration(const std::vector<Vec3>& x_cloth, const NearestBodyResult& nn,
                                   const LaplacianSystem& system, const CollisionConfig& config) {
    config.validate();
    if (static_cast<int>(x_cloth.size()) != system.n || nn.distance.size() != x_cloth.size())
        throw std::invalid_argument("refine_iteration: dimension mismatch");

    std::vector<Vec3> xi(x_cloth.size());
    for (std::size_t i = 0; i < x_cloth.size(); ++i) {
        const double move = std::clamp(config.epsilon - nn.distance[i], 0.0, config.delta);
        xi[i] = x_cloth[i] + move * nn.normal[i];
    }
    const double a2 = config.alpha * config.alpha;
    const Eigen::Matrix<double, Eigen::Dynamic, 3> rhs =
        system.laplacian.transpose() * system.b + a2 * to_matrix(xi);
    return solve_stacked(system, shifted(system.laplacian_sq, a2), rhs);
}

ResolveResult resolve_collisions(const ResolveInputs& inputs, const CollisionConfig& config) {
    config.validate();
    if (!inputs.system || !inputs.body_normals_b || !inputs.body_b_transforms)
        throw std::invalid_argument("resolve_collisions: incomplete inputs");
    if (inputs.system->b.rows() != inputs.system->n)
        throw std::invalid_argument("resolve_collisions: Laplacian reference not set");

    constexpr double report_tolerance = 1e-3;
    ResolveResult result;

    const InitialGuess guess =
        initial_guess(inputs.cloth_canonical, inputs.body_canonical_a, inputs.body_canonical_b,
                      inputs.body_b_valid, inputs.selector, inputs.body_pixels,
                      *inputs.body_b_transforms);
    result.report.substitutions = guess.substitutions;

    std::vector<Vec3> x =
        solve_reanchor(*inputs.system, inputs.cloth_posed, guess.posed, config.alpha);

    auto audit = [&](int iteration, const NearestBodyResult& nn) {
        CollisionReport::IterationStats stats;
        stats.iteration = iteration;
        for (double d : nn.distance) {
            if (d < config.epsilon - report_tolerance) ++stats.violations;
            stats.max_penetration = std::max(stats.max_penetration, config.epsilon - d);
        }
        result.report.iterations.push_back(stats);
        return stats.violations;
    };

    NearestBodyResult nn = nearest_body(x, inputs.body_posed_b, *inputs.body_normals_b);
    audit(0, nn);
    for (int it = 1; it <= config.iterations; ++it) {
        x = refine_iteration(x, nn, *inputs.system, config);
        nn = nearest_body(x, inputs.body_posed_b, *inputs.body_normals_b);
        result.report.final_violations = audit(it, nn);
    }
    result.positions = std::move(x);
    return result;
}

}  // namespace gsav
