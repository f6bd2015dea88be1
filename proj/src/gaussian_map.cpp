#include "gsav/gaussian_map.hpp"

#include <stdexcept>
#include <string>

namespace gsav {

namespace channel {
const char* name(int c) {
    static const char* names[count] = {
        "color_r",      "color_g",     "color_b",     "offset_x",   "offset_y", "offset_z",
        "opacity_logit", "log_scale_x", "log_scale_y", "log_scale_z", "quat_w",  "quat_x",
        "quat_y",       "quat_z",      "label_body",  "label_cloth"};
    if (c < 0 || c >= count) return "unknown";
    return names[c];
}
}  // namespace channel

std::size_t GaussianMap::valid_count() const {
    std::size_t n = 0;
    for (auto m : mask)
        if (m) ++n;
    return n;
}

void GaussianMap::validate() const {
    if (height <= 0 || width <= 0)
        throw std::invalid_argument("gaussian map: non-positive dimensions");
    const std::size_t hw = static_cast<std::size_t>(height) * width;
    if (channels.size() != hw * channel::count)
        throw std::invalid_argument("gaussian map: channel buffer size mismatch");
    if (mask.size() != hw) throw std::invalid_argument("gaussian map: mask size mismatch");
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (!valid(r, c)) continue;
            const double qw = at(channel::quat_w, r, c);
            const double qx = at(channel::quat_x, r, c);
            const double qy = at(channel::quat_y, r, c);
            const double qz = at(channel::quat_z, r, c);
            if (qw * qw + qx * qx + qy * qy + qz * qz < 1e-24)
                throw std::invalid_argument("gaussian map: zero-magnitude quaternion at " +
                                            std::string(side_name(side)) + " pixel (" +
                                            std::to_string(r) + "," + std::to_string(c) + ")");
        }
    }
}

}  // namespace gsav
