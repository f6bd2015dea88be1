#include "gsav/gaussian_set.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gsav {

namespace {

void check_pair(const GaussianMap& map, const TemplateGeometry& tmpl) {
    if (map.height != tmpl.height || map.width != tmpl.width)
        throw std::invalid_argument("extract_gaussians: map/template dimension mismatch on " +
                                    std::string(side_name(map.side)) + " side");
    for (int r = 0; r < map.height; ++r)
        for (int c = 0; c < map.width; ++c)
            if (map.valid(r, c) && !tmpl.valid(r, c))
                throw std::invalid_argument(
                    "extract_gaussians: map pixel valid outside template mask at " +
                    std::string(side_name(map.side)) + " (" + std::to_string(r) + "," +
                    std::to_string(c) + ")");
}

void extract_side(const GaussianMap& map, const TemplateGeometry& tmpl, GaussianSet& out) {
    namespace ch = channel;
    for (int r = 0; r < map.height; ++r) {
        for (int c = 0; c < map.width; ++c) {
            if (!map.valid(r, c)) continue;
            std::array<float, 16> raw;
            for (int k = 0; k < ch::count; ++k) raw[k] = map.at(k, r, c);

            out.colors.emplace_back(raw[ch::color_r], raw[ch::color_g], raw[ch::color_b]);
            out.base_positions.push_back(tmpl.position(r, c));
            out.offsets.emplace_back(raw[ch::offset_x], raw[ch::offset_y], raw[ch::offset_z]);
            out.opacities.push_back(1.0 / (1.0 + std::exp(-static_cast<double>(raw[ch::opacity_logit]))));
            out.scales.emplace_back(std::exp(static_cast<double>(raw[ch::log_scale_x])),
                                    std::exp(static_cast<double>(raw[ch::log_scale_y])),
                                    std::exp(static_cast<double>(raw[ch::log_scale_z])));

            Vec4 q(raw[ch::quat_w], raw[ch::quat_x], raw[ch::quat_y], raw[ch::quat_z]);
            const double qn = q.norm();
            if (qn < 1e-12)
                throw std::invalid_argument("extract_gaussians: zero quaternion at " +
                                            std::string(side_name(map.side)) + " (" +
                                            std::to_string(r) + "," + std::to_string(c) + ")");
            out.rotations.push_back(q / qn);

            // softmax over the two label logits
            const double lb = raw[ch::label_body], lc = raw[ch::label_cloth];
            const double m = std::max(lb, lc);
            const double eb = std::exp(lb - m), ec = std::exp(lc - m);
            out.labels.emplace_back(eb / (eb + ec), ec / (eb + ec));

            out.render_offsets.emplace_back(0.0, 0.0, 0.0);
            out.provenance.push_back({map.side, r, c});
            out.raw.push_back(raw);
        }
    }
}

}  // namespace

std::vector<Vec3> GaussianSet::positions() const {
    std::vector<Vec3> p(n);
    for (int i = 0; i < n; ++i) p[i] = base_positions[i] + offsets[i];
    return p;
}

std::vector<Vec3> GaussianSet::rendering_positions() const {
    std::vector<Vec3> p(n);
    for (int i = 0; i < n; ++i) p[i] = base_positions[i] + offsets[i] + render_offsets[i];
    return p;
}

GaussianSet extract_gaussians(const GaussianMap& map_front, const GaussianMap& map_back,
                              const TemplateGeometry& tmpl_front,
                              const TemplateGeometry& tmpl_back) {
    if (map_front.height != map_back.height || map_front.width != map_back.width)
        throw std::invalid_argument("extract_gaussians: front/back map dimension mismatch");
    if (map_front.side != Side::front || map_back.side != Side::back)
        throw std::invalid_argument("extract_gaussians: map sides mislabeled");
    check_pair(map_front, tmpl_front);
    check_pair(map_back, tmpl_back);

    GaussianSet set;
    extract_side(map_front, tmpl_front, set);
    extract_side(map_back, tmpl_back, set);
    set.n = static_cast<int>(set.provenance.size());
    return set;
}

void scatter_to_maps(const GaussianSet& set, GaussianMap& map_front, GaussianMap& map_back) {
    for (int i = 0; i < set.n; ++i) {
        const PixelRef& p = set.provenance[i];
        GaussianMap& map = p.side == Side::front ? map_front : map_back;
        if (p.row < 0 || p.row >= map.height || p.col < 0 || p.col >= map.width)
            throw std::invalid_argument("scatter_to_maps: provenance outside map bounds");
        for (int k = 0; k < channel::count; ++k) map.at(k, p.row, p.col) = set.raw[i][k];
        map.set_valid(p.row, p.col, true);
    }
}

Mat3 covariance_from_params(const Vec3& scale, const Vec4& rotation) {
    if (!(scale.x() > 0 && scale.y() > 0 && scale.z() > 0))
        throw std::invalid_argument("covariance_from_params: non-positive scale");
    const Mat3 r = rotation_from_quaternion(rotation);
    return r * scale.cwiseProduct(scale).asDiagonal() * r.transpose();
}

std::vector<Mat3> covariances(const GaussianSet& set) {
    std::vector<Mat3> out(set.n);
    for (int i = 0; i < set.n; ++i) out[i] = covariance_from_params(set.scales[i], set.rotations[i]);
    return out;
}

}  // namespace gsav
