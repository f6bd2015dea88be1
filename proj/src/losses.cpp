#include "gsav/losses.hpp"

#include "gsav/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gsav {

namespace {

const std::vector<std::string>& all_term_names() {
    static const std::vector<std::string> names = {"l1",    "ssim",     "normal", "stitch",
                                                   "off",   "tv",       "edge",   "label",
                                                   "tv_label", "stitch_label", "coll", "layer", "cd"};
    return names;
}

double clamp_prob(double p) { return std::clamp(p, 1e-6, 1.0 - 1e-6); }

}  // namespace

double LossWeights::term(const std::string& name) const {
    if (name == "normal") return normal;
    if (name == "stitch") return stitch;
    if (name == "off") return off;
    if (name == "tv") return tv;
    if (name == "edge") return edge;
    if (name == "label") return label;
    if (name == "tv_label") return tv_label;
    if (name == "stitch_label") return stitch_label;
    if (name == "l1") return l1;
    if (name == "ssim") return ssim;
    if (name == "coll") return coll;
    if (name == "layer") return layer;
    if (name == "cd") return cd;
    throw std::invalid_argument("unknown loss term '" + name + "'");
}

void LossWeights::set_term(const std::string& name, double value) {
    if (name == "normal") normal = value;
    else if (name == "stitch") stitch = value;
    else if (name == "off") off = value;
    else if (name == "tv") tv = value;
    else if (name == "edge") edge = value;
    else if (name == "label") label = value;
    else if (name == "tv_label") tv_label = value;
    else if (name == "stitch_label") stitch_label = value;
    else if (name == "l1") l1 = value;
    else if (name == "ssim") ssim = value;
    else if (name == "coll") coll = value;
    else if (name == "layer") layer = value;
    else if (name == "cd") cd = value;
    else throw std::invalid_argument("unknown loss term '" + name + "'");
}

void LossWeights::validate() const {
    for (const auto& name : all_term_names()) {
        const double v = term(name);
        if (!(v >= 0) || !std::isfinite(v))
            throw std::invalid_argument("loss weight '" + name + "' must be finite and >= 0");
    }
}

std::string LossReport::to_text() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& t : terms)
        os << t.name << " = " << t.value << "  (weight " << t.weight << ")\n";
    os << "total = " << total << "\n";
    return os.str();
}

ValueGrad loss_offset(const GaussianSet& set) {
    if (set.n == 0) throw std::invalid_argument("loss_offset: empty set");
    ValueGrad out;
    out.grad.assign(set.n, Vec3::Zero());
    std::vector<double> terms(set.n);
    for (int i = 0; i < set.n; ++i) {
        terms[i] = set.offsets[i].squaredNorm();
        out.grad[i] = 2.0 / set.n * set.offsets[i];
    }
    out.value = pairwise_sum(terms) / set.n;
    return out;
}

ValueGrad loss_tv_positions(const GaussianSet& set, const AdjacencyGraph& graph) {
    if (graph.node_count() != set.n)
        throw std::invalid_argument("loss_tv_positions: graph/set size mismatch");
    ValueGrad out;
    out.grad.assign(set.n, Vec3::Zero());
    if (graph.edges.empty()) return out;
    const double inv = 1.0 / graph.edges.size();
    std::vector<double> terms(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [i, j] = graph.edges[e];
        const Vec3 d = set.offsets[i] - set.offsets[j];
        terms[e] = d.squaredNorm();
        out.grad[i] += 2.0 * inv * d;
        out.grad[j] -= 2.0 * inv * d;
    }
    out.value = pairwise_sum(terms) * inv;
    return out;
}

double loss_tv_labels(const GaussianSet& set, const AdjacencyGraph& graph) {
    if (graph.node_count() != set.n)
        throw std::invalid_argument("loss_tv_labels: graph/set size mismatch");
    if (graph.edges.empty()) return 0;
    std::vector<double> terms(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [i, j] = graph.edges[e];
        terms[e] = (set.labels[i] - set.labels[j]).cwiseAbs().sum();
    }
    return pairwise_sum(terms) / graph.edges.size();
}

ValueGrad loss_edge(const GaussianSet& set, const AdjacencyGraph& graph) {
    if (graph.node_count() != set.n)
        throw std::invalid_argument("loss_edge: graph/set size mismatch");
    ValueGrad out;
    out.grad.assign(set.n, Vec3::Zero());
    std::vector<double> terms;
    terms.reserve(graph.edges.size());
    std::vector<std::pair<int, int>> kept;
    kept.reserve(graph.edges.size());
    for (const auto& [i, j] : graph.edges) {
        if ((set.base_positions[i] - set.base_positions[j]).norm() < 1e-12) {
            ++out.skipped;
            continue;
        }
        kept.emplace_back(i, j);
    }
    if (kept.empty()) return out;
    const double inv = 1.0 / kept.size();
    for (const auto& [i, j] : kept) {
        const Vec3 d = set.position(i) - set.position(j);
        const double len = d.norm();
        const double rest = (set.base_positions[i] - set.base_positions[j]).norm();
        const double diff = len - rest;
        terms.push_back(diff * diff);
        if (len > 1e-12) {
            const Vec3 g = 2.0 * inv * diff / len * d;
            out.grad[i] += g;
            out.grad[j] -= g;
        }
    }
    out.value = pairwise_sum(terms) * inv;
    return out;
}

ValueGrad loss_stitch_positions(const GaussianSet& set, const AdjacencyGraph& graph) {
    if (graph.node_count() != set.n)
        throw std::invalid_argument("loss_stitch_positions: graph/set size mismatch");
    ValueGrad out;
    out.grad.assign(set.n, Vec3::Zero());
    if (graph.stitch_pairs.empty()) {
        out.skipped = -1;  // no pairs; caller may warn
        return out;
    }
    const double inv = 1.0 / graph.stitch_pairs.size();
    std::vector<double> terms(graph.stitch_pairs.size());
    for (std::size_t e = 0; e < graph.stitch_pairs.size(); ++e) {
        const auto [i, j] = graph.stitch_pairs[e];
        const Vec3 d = set.position(i) - set.position(j);
        terms[e] = d.squaredNorm();
        out.grad[i] += 2.0 * inv * d;
        out.grad[j] -= 2.0 * inv * d;
    }
    out.value = pairwise_sum(terms) * inv;
    return out;
}

double loss_stitch_labels(const GaussianSet& set, const AdjacencyGraph& graph) {
    if (graph.node_count() != set.n)
        throw std::invalid_argument("loss_stitch_labels: graph/set size mismatch");
    if (graph.stitch_pairs.empty()) return 0;
    std::vector<double> terms(graph.stitch_pairs.size());
    for (std::size_t e = 0; e < graph.stitch_pairs.size(); ++e) {
        const auto [i, j] = graph.stitch_pairs[e];
        terms[e] = (set.labels[i] - set.labels[j]).squaredNorm();
    }
    return pairwise_sum(terms) / graph.stitch_pairs.size();
}

double loss_normal_image(const SplatImage& rendered, const SplatImage& target,
                         const std::vector<std::uint8_t>& mask) {
    rendered.require_same_size(target, "loss_normal_image");
    if (mask.size() != rendered.pixel_count())
        throw std::invalid_argument("loss_normal_image: mask size mismatch");
    if (!rendered.has_normal() || !target.has_normal())
        throw std::invalid_argument("loss_normal_image: normal channel absent");

    std::vector<double> terms;
    terms.reserve(rendered.pixel_count());
    for (std::size_t p = 0; p < rendered.pixel_count(); ++p) {
        if (!mask[p]) continue;
        double l1 = 0;
        for (int c = 0; c < 3; ++c) l1 += std::abs(rendered.normal[p * 3 + c] - target.normal[p * 3 + c]);
        terms.push_back(l1);
    }
    if (terms.empty()) throw std::invalid_argument("loss_normal_image: empty mask");
    return pairwise_sum(terms) / terms.size();
}

double loss_label(const SplatImage& rendered, const std::vector<SegClass>& ground_truth) {
    if (!rendered.has_label()) throw std::invalid_argument("loss_label: label channels absent");
    if (ground_truth.size() != rendered.pixel_count())
        throw std::invalid_argument("loss_label: ground truth size mismatch");

    std::vector<double> body_terms, cloth_terms, bg_terms;
    for (std::size_t p = 0; p < ground_truth.size(); ++p) {
        const double sb = rendered.label[p * 2];
        const double sc = rendered.label[p * 2 + 1];
        switch (ground_truth[p]) {
            case SegClass::body: body_terms.push_back(-std::log(clamp_prob(sb))); break;
            case SegClass::cloth: cloth_terms.push_back(-std::log(clamp_prob(sc))); break;
            case SegClass::background:
                bg_terms.push_back(-std::log(clamp_prob(1.0 - sb - sc)));
                break;
        }
    }
    double total = 0;
    if (!body_terms.empty()) total += pairwise_sum(body_terms) / body_terms.size();
    if (!cloth_terms.empty()) total += pairwise_sum(cloth_terms) / cloth_terms.size();
    if (!bg_terms.empty()) total += pairwise_sum(bg_terms) / bg_terms.size();
    return total;
}

ValueGrad loss_coll(const std::vector<Vec3>& cloth_positions,
                    const std::vector<Vec3>& paired_body_positions,
                    const NormalField& paired_body_normals, double epsilon) {
    const std::size_t n = cloth_positions.size();
    if (paired_body_positions.size() != n || paired_body_normals.n.size() != n)
        throw std::invalid_argument("loss_coll: pairing size mismatch");
    ValueGrad out;
    out.grad.assign(n, Vec3::Zero());
    if (n == 0) return out;

    std::vector<double> terms;
    terms.reserve(n);
    std::vector<std::size_t> term_index;
    for (std::size_t i = 0; i < n; ++i) {
        if (!paired_body_normals.valid[i]) {
            ++out.skipped;
            continue;
        }
        const Vec3& normal = paired_body_normals.n[i];
        const double d = (cloth_positions[i] - paired_body_positions[i]).dot(normal);
        const double hinge = std::max(epsilon - d, 0.0);
        terms.push_back(hinge * hinge);
        term_index.push_back(i);
    }
    if (terms.empty()) return out;
    const double inv = 1.0 / terms.size();
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::size_t i = term_index[k];
        const Vec3& normal = paired_body_normals.n[i];
        const double d = (cloth_positions[i] - paired_body_positions[i]).dot(normal);
        const double hinge = std::max(epsilon - d, 0.0);
        if (hinge > 0) out.grad[i] = -2.0 * inv * hinge * normal;
    }
    out.value = pairwise_sum(terms) * inv;
    return out;
}

LayerLoss loss_layer(const std::vector<Vec3>& body_render_offsets,
                     const std::vector<Vec3>& cloth_render_offsets, double epsilon) {
    LayerLoss out;
    out.grad_body.assign(body_render_offsets.size(), Vec3::Zero());
    out.grad_cloth.assign(cloth_render_offsets.size(), Vec3::Zero());
    const double half = epsilon / 2.0;

    auto accumulate = [&](const std::vector<Vec3>& offsets, std::vector<Vec3>& grad) {
        if (offsets.empty()) return 0.0;
        const double inv = 1.0 / offsets.size();
        std::vector<double> terms(offsets.size());
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            const double norm = offsets[i].norm();
            const double hinge = std::max(norm - half, 0.0);
            terms[i] = hinge * hinge;
            if (hinge > 0 && norm > 1e-12) grad[i] = 2.0 * inv * hinge / norm * offsets[i];
        }
        return pairwise_sum(terms) * inv;
    };
    out.value = accumulate(body_render_offsets, out.grad_body) +
                accumulate(cloth_render_offsets, out.grad_cloth);
    return out;
}

ValueGrad loss_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("loss_chamfer: empty point set");
    ValueGrad out;
    out.grad.assign(a.size(), Vec3::Zero());

    const KdTree3 tree_b(b);
    std::vector<double> fwd(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto hit = tree_b.nearest(a[i]);
        fwd[i] = hit.dist_sq;
        out.grad[i] += 2.0 / a.size() * (a[i] - b[hit.index]);
    }

    const KdTree3 tree_a(a);
    std::vector<double> bwd(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        const auto hit = tree_a.nearest(b[j]);
        bwd[j] = hit.dist_sq;
        out.grad[hit.index] += 2.0 / b.size() * (a[hit.index] - b[j]);
    }
    out.value = pairwise_sum(fwd) / a.size() + pairwise_sum(bwd) / b.size();
    return out;
}

namespace {

// Masked SSIM statistics with the window renormalized over in-bounds pixels.
double ssim_channel(const SplatImage& x, const SplatImage& y,
                    const std::vector<std::uint8_t>& mask, int channel) {
    constexpr int radius = 5;  // 11x11 window
    constexpr double sigma = 1.5;
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;

    static const std::vector<double> kernel = [] {
        std::vector<double> k(11 * 11);
        double sum = 0;
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx) {
                const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                k[(dy + radius) * 11 + (dx + radius)] = w;
                sum += w;
            }
        for (double& w : k) w /= sum;
        return k;
    }();

    std::vector<double> terms;
    terms.reserve(x.pixel_count());
    for (int py = 0; py < x.height; ++py) {
        for (int px = 0; px < x.width; ++px) {
            if (!mask[x.index(px, py)]) continue;
            double wsum = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int qy = py + dy;
                if (qy < 0 || qy >= x.height) continue;
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int qx = px + dx;
                    if (qx < 0 || qx >= x.width) continue;
                    const double w = kernel[(dy + radius) * 11 + (dx + radius)];
                    const double a = x.rgb[x.index(qx, qy) * 3 + channel];
                    const double b = y.rgb[y.index(qx, qy) * 3 + channel];
                    wsum += w;
                    sx += w * a;
                    sy += w * b;
                    sxx += w * a * a;
                    syy += w * b * b;
                    sxy += w * a * b;
                }
            }
            const double mx = sx / wsum, my = sy / wsum;
            const double vx = sxx / wsum - mx * mx;
            const double vy = syy / wsum - my * my;
            const double cov = sxy / wsum - mx * my;
            terms.push_back(((2 * mx * my + c1) * (2 * cov + c2)) /
                            ((mx * mx + my * my + c1) * (vx + vy + c2)));
        }
    }
    if (terms.empty()) throw std::invalid_argument("loss_image: empty mask");
    return pairwise_sum(terms) / terms.size();
}

}  // namespace

ImageLoss loss_image(const SplatImage& rendered, const SplatImage& target,
                     const std::vector<std::uint8_t>& mask) {
    rendered.require_same_size(target, "loss_image");
    if (mask.size() != rendered.pixel_count())
        throw std::invalid_argument("loss_image: mask size mismatch");
    if (!rendered.has_rgb() || !target.has_rgb())
        throw std::invalid_argument("loss_image: rgb channel absent");

    std::vector<double> abs_terms;
    abs_terms.reserve(rendered.pixel_count() * 3);
    for (std::size_t p = 0; p < rendered.pixel_count(); ++p) {
        if (!mask[p]) continue;
        for (int c = 0; c < 3; ++c)
            abs_terms.push_back(std::abs(rendered.rgb[p * 3 + c] - target.rgb[p * 3 + c]));
    }
    if (abs_terms.empty()) throw std::invalid_argument("loss_image: empty mask");

    ImageLoss out;
    out.l1 = pairwise_sum(abs_terms) / abs_terms.size();
    double ssim_sum = 0;
    for (int c = 0; c < 3; ++c) ssim_sum += ssim_channel(rendered, target, mask, c);
    out.ssim = ssim_sum / 3.0;
    return out;
}

const std::vector<std::string>& stage_terms(Stage stage) {
    static const std::vector<std::string> single = {"l1",  "ssim",  "normal",   "stitch",
                                                    "off", "tv",    "edge",     "label",
                                                    "tv_label", "stitch_label"};
    static const std::vector<std::string> multi = {"l1",  "ssim", "normal", "stitch", "off", "tv",
                                                   "edge", "label", "coll",  "layer",  "cd"};
    return stage == Stage::single_layer ? single : multi;
}

LossReport total_loss(const std::map<std::string, double>& terms, const LossWeights& weights,
                      Stage stage) {
    weights.validate();
    const auto& allowed = stage_terms(stage);
    auto in_stage = [&](const std::string& name) {
        return std::find(allowed.begin(), allowed.end(), name) != allowed.end();
    };

    for (const auto& [name, value] : terms) {
        (void)value;
        if (!in_stage(name) && weights.term(name) > 0)
            throw std::invalid_argument("total_loss: term '" + name +
                                        "' is not part of this stage");
    }

    LossReport report;
    std::vector<double> contributions;
    for (const auto& name : allowed) {
        const double w = weights.term(name);
        const auto it = terms.find(name);
        if (it == terms.end()) {
            if (w > 0)
                throw std::invalid_argument("total_loss: stage requires term '" + name +
                                            "' but it was not supplied");
            continue;
        }
        report.terms.push_back({name, it->second, w});
        contributions.push_back(w * it->second);
    }
    report.total = pairwise_sum(contributions);
    return report;
}

}  // namespace gsav
