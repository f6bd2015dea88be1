#include "gsav/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gsav {

void Camera::validate() const {
    if (!(fx > 0) || !(fy > 0)) throw std::invalid_argument("camera: focal lengths must be > 0");
    if (width <= 0 || height <= 0) throw std::invalid_argument("camera: bad image size");
    if (!(near_plane > 0)) throw std::invalid_argument("camera: near plane must be > 0");
    const Mat3 err = rotation * rotation.transpose() - Mat3::Identity();
    if (err.cwiseAbs().maxCoeff() > 1e-6)
        throw std::invalid_argument("camera: rotation is not orthonormal");
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal,
                       int width, int height, double near_plane) {
    const Vec3 forward = (target - eye).normalized();  // camera +z
    const Vec3 right = forward.cross(up).normalized();
    const Vec3 down = forward.cross(right);  // camera +y points down the image
    Camera cam;
    cam.rotation.row(0) = right;
    cam.rotation.row(1) = down;
    cam.rotation.row(2) = forward;
    cam.translation = -cam.rotation * eye;
    cam.fx = cam.fy = focal;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    cam.width = width;
    cam.height = height;
    cam.near_plane = near_plane;
    return cam;
}

std::optional<ProjectedGaussian> project_gaussian(const Vec3& position, const Mat3& covariance,
                                                  const Camera& camera, double lowpass_floor) {
    const Vec3 p = camera.to_camera(position);
    if (p.z() < camera.near_plane) return std::nullopt;

    ProjectedGaussian out;
    out.depth = p.z();
    out.mean = {camera.fx * p.x() / p.z() + camera.cx, camera.fy * p.y() / p.z() + camera.cy};

    const double iz = 1.0 / p.z(), iz2 = iz * iz;
    Eigen::Matrix<double, 2, 3> jac;
    jac << camera.fx * iz, 0, -camera.fx * p.x() * iz2,
           0, camera.fy * iz, -camera.fy * p.y() * iz2;
    const Eigen::Matrix<double, 2, 3> jw = jac * camera.rotation;
    out.covariance = jw * covariance * jw.transpose();
    out.covariance(0, 0) += lowpass_floor;
    out.covariance(1, 1) += lowpass_floor;

    if (!out.mean.allFinite() || !out.covariance.allFinite()) return std::nullopt;
    return out;
}

namespace {

struct Splat {
    int index;  // original Gaussian index (depth tie-break)
    Vec2 mean;
    Mat2 inv_cov;
    double opacity;
    double depth;
    int x0, x1, y0, y1;  // inclusive pixel bounds
};

}  // namespace

SplatImage rasterize(const SplatScene& scene, const Camera& camera,
                     const RenderOptions& options) {
    camera.validate();
    const int n = scene.size();
    if (static_cast<int>(scene.covariances.size()) != n ||
        static_cast<int>(scene.opacities.size()) != n)
        throw std::invalid_argument("rasterize: attribute array size mismatch");
    const bool want_rgb = options.rgb && !scene.colors.empty();
    const bool want_normal = options.normal && scene.normals.size() == n;
    const bool want_label = options.label && !scene.labels.empty();
    if (options.rgb && scene.colors.empty() && n > 0)
        throw std::invalid_argument("rasterize: rgb requested but colors absent");
    if (options.normal && scene.normals.size() != n && n > 0)
        throw std::invalid_argument("rasterize: normal channel requested but normals absent");
    if (options.label && scene.labels.empty() && n > 0)
        throw std::invalid_argument("rasterize: label channels requested but labels absent");

    SplatImage image(camera.width, camera.height);
    image.allocate_alpha();
    if (want_rgb || options.rgb) image.allocate_rgb();
    if (want_normal || options.normal) image.allocate_normal();
    if (want_label || options.label) image.allocate_label();
    if (options.depth) image.allocate_depth();
    if (n == 0) return image;

    std::vector<Splat> splats;
    splats.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (!(scene.positions[i].allFinite() && scene.opacities[i] >= 0)) continue;
        const auto proj =
            project_gaussian(scene.positions[i], scene.covariances[i], camera, options.lowpass_floor);
        if (!proj) continue;
        const Mat2& cov = proj->covariance;
        const double det = cov.determinant();
        if (det < 1e-12) continue;  // singular footprint

        // support box from the largest eigenvalue
        const double tr = cov.trace();
        const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
        const double lambda_max = tr / 2.0 + disc;
        const double radius = options.sigma_cutoff * std::sqrt(lambda_max);

        Splat s;
        s.index = i;
        s.mean = proj->mean;
        s.depth = proj->depth;
        s.opacity = scene.opacities[i];
        s.inv_cov << cov(1, 1), -cov(0, 1), -cov(1, 0), cov(0, 0);
        s.inv_cov /= det;
        s.x0 = std::max(0, static_cast<int>(std::floor(s.mean.x() - radius)));
        s.x1 = std::min(camera.width - 1, static_cast<int>(std::ceil(s.mean.x() + radius)));
        s.y0 = std::max(0, static_cast<int>(std::floor(s.mean.y() - radius)));
        s.y1 = std::min(camera.height - 1, static_cast<int>(std::ceil(s.mean.y() + radius)));
        if (s.x0 > s.x1 || s.y0 > s.y1) continue;
        splats.push_back(s);
    }

    std::sort(splats.begin(), splats.end(), [](const Splat& a, const Splat& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.index < b.index;
    });

    // Tile binning preserves the global front-to-back order within each tile,
    // so per-pixel compositing is identical to a whole-image sorted pass.
    const int tile = std::max(1, options.tile);
    const int tiles_x = (camera.width + tile - 1) / tile;
    const int tiles_y = (camera.height + tile - 1) / tile;
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(tiles_x) * tiles_y);
    for (std::size_t k = 0; k < splats.size(); ++k) {
        const Splat& s = splats[k];
        for (int ty = s.y0 / tile; ty <= s.y1 / tile; ++ty)
            for (int tx = s.x0 / tile; tx <= s.x1 / tile; ++tx)
                bins[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(static_cast<int>(k));
    }

    std::vector<double> transmittance(image.pixel_count(), 1.0);
    parallel_for(static_cast<std::int64_t>(bins.size()), options.threads,
                 [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t bin = lo; bin < hi; ++bin) {
            const int tx = static_cast<int>(bin % tiles_x);
            const int ty = static_cast<int>(bin / tiles_x);
            const int px0 = tx * tile, px1 = std::min(camera.width, px0 + tile);
            const int py0 = ty * tile, py1 = std::min(camera.height, py0 + tile);
            for (int k : bins[bin]) {
                const Splat& s = splats[k];
                const int x0 = std::max(s.x0, px0), x1 = std::min(s.x1, px1 - 1);
                const int y0 = std::max(s.y0, py0), y1 = std::min(s.y1, py1 - 1);
                for (int y = y0; y <= y1; ++y) {
                    for (int x = x0; x <= x1; ++x) {
                        const std::size_t p = image.index(x, y);
                        double& t = transmittance[p];
                        if (t < options.early_stop) continue;
                        const Vec2 delta(x + 0.5 - s.mean.x(), y + 0.5 - s.mean.y());
                        const double power = 0.5 * delta.dot(s.inv_cov * delta);
                        double w = s.opacity * std::exp(-power);
                        w = std::clamp(w, 0.0, options.opacity_clip);
                        if (w <= 0) continue;
                        const double contrib = w * t;
                        const int i = s.index;
                        if (want_rgb)
                            for (int c = 0; c < 3; ++c) image.rgb[p * 3 + c] += scene.colors[i][c] * contrib;
                        if (want_normal && scene.normals.valid[i])
                            for (int c = 0; c < 3; ++c)
                                image.normal[p * 3 + c] += scene.normals.n[i][c] * contrib;
                        if (want_label) {
                            image.label[p * 2] += scene.labels[i][0] * contrib;
                            image.label[p * 2 + 1] += scene.labels[i][1] * contrib;
                        }
                        if (options.depth) image.depth[p] += s.depth * contrib;
                        t *= 1.0 - w;
                    }
                }
            }
        }
    });

    for (std::size_t p = 0; p < image.pixel_count(); ++p) image.alpha[p] = 1.0 - transmittance[p];

    if (want_normal) {
        // renormalize composited normals on confidently covered pixels
        for (std::size_t p = 0; p < image.pixel_count(); ++p) {
            Vec3 v(image.normal[p * 3], image.normal[p * 3 + 1], image.normal[p * 3 + 2]);
            if (image.alpha[p] > 0.5 && v.norm() > 1e-12)
                v.normalize();
            else
                v.setZero();
            for (int c = 0; c < 3; ++c) image.normal[p * 3 + c] = v[c];
        }
    }
    return image;
}

}  // namespace gsav
