#include "gsav/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace gsav {

namespace fs = std::filesystem;

void LayeredAvatar::validate() const {
    if (body_front.height != body_back.height || body_front.width != body_back.width)
        throw std::invalid_argument("avatar: body map dimension mismatch");
    if (cloth_front.height != body_front.height || cloth_front.width != body_front.width)
        throw std::invalid_argument("avatar: cloth/body map dimension mismatch");

    std::set<PixelRef> selector_set(selector.begin(), selector.end());
    for (int side = 0; side < 2; ++side) {
        const GaussianMap& cloth = side == 0 ? cloth_front : cloth_back;
        const GaussianMap& body = side == 0 ? body_front : body_back;
        for (int r = 0; r < cloth.height; ++r) {
            for (int c = 0; c < cloth.width; ++c) {
                const PixelRef p{static_cast<Side>(side), r, c};
                const bool in_selector = selector_set.count(p) != 0;
                if (cloth.valid(r, c) != in_selector)
                    throw std::invalid_argument("avatar: cloth mask disagrees with selector at " +
                                                std::string(side_name(p.side)) + " (" +
                                                std::to_string(r) + "," + std::to_string(c) + ")");
                if (cloth.valid(r, c) && !body.valid(r, c))
                    throw std::invalid_argument("avatar: clothing pixel outside body mask at " +
                                                std::string(side_name(p.side)) + " (" +
                                                std::to_string(r) + "," + std::to_string(c) + ")");
            }
        }
    }
}

AvatarRuntime build_runtime(const LayeredAvatar& avatar, double stitch_tolerance) {
    avatar.validate();
    AvatarRuntime rt;
    rt.body = extract_gaussians(avatar.body_front, avatar.body_back, avatar.tmpl_front,
                                avatar.tmpl_back);
    rt.body_graph = build_adjacency(avatar.body_front, avatar.body_back, avatar.tmpl_front,
                                    avatar.tmpl_back, stitch_tolerance);
    if (!avatar.stitch_pairs.empty()) rt.body_graph.stitch_pairs = avatar.stitch_pairs;
    rt.body_canonical_normals = compute_normals(rt.body, rt.body_graph);

    if (static_cast<int>(avatar.weights.rows.size()) != rt.body.n)
        throw std::invalid_argument("avatar: weight rows (" +
                                    std::to_string(avatar.weights.rows.size()) +
                                    ") do not match body Gaussians (" + std::to_string(rt.body.n) +
                                    ")");
    if (!avatar.body_render_offsets.empty()) {
        if (static_cast<int>(avatar.body_render_offsets.size()) != rt.body.n)
            throw std::invalid_argument("avatar: body render offset count mismatch");
        rt.body.render_offsets = avatar.body_render_offsets;
    }

    if (!avatar.selector.empty()) {
        rt.cloth = extract_gaussians(avatar.cloth_front, avatar.cloth_back, avatar.tmpl_front,
                                     avatar.tmpl_back);
        rt.cloth_graph = build_adjacency(avatar.cloth_front, avatar.cloth_back, avatar.tmpl_front,
                                         avatar.tmpl_back, stitch_tolerance);
        // the clothing subset inherits the body topology's stitch pairs
        rt.cloth_graph.stitch_pairs.clear();
        for (const auto& [bf, bb] : rt.body_graph.stitch_pairs) {
            const PixelRef& pf = rt.body_graph.nodes[bf];
            const PixelRef& pb = rt.body_graph.nodes[bb];
            const int cf = rt.cloth_graph.node_at(pf.side, pf.row, pf.col);
            const int cb = rt.cloth_graph.node_at(pb.side, pb.row, pb.col);
            if (cf >= 0 && cb >= 0) rt.cloth_graph.stitch_pairs.emplace_back(cf, cb);
        }

        rt.cloth_to_body.resize(rt.cloth.n);
        rt.cloth_weights.joint_count = avatar.weights.joint_count;
        rt.cloth_weights.rows.resize(rt.cloth.n);
        for (int i = 0; i < rt.cloth.n; ++i) {
            const PixelRef& p = rt.cloth.provenance[i];
            const int body_node = rt.body_graph.node_at(p.side, p.row, p.col);
            if (body_node < 0)
                throw std::invalid_argument("avatar: cloth pixel has no body Gaussian");
            rt.cloth_to_body[i] = body_node;
            rt.cloth_weights.rows[i] = avatar.weights.rows[body_node];
        }
        if (!avatar.cloth_render_offsets.empty()) {
            if (static_cast<int>(avatar.cloth_render_offsets.size()) != rt.cloth.n)
                throw std::invalid_argument("avatar: cloth render offset count mismatch");
            rt.cloth.render_offsets = avatar.cloth_render_offsets;
        }
    }
    return rt;
}

namespace {

std::string path_in(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

void write_render_offsets(const std::vector<Vec3>& offsets, const std::vector<PixelRef>& pixels,
                          int height, int width, const std::string& path) {
    const std::size_t hw = static_cast<std::size_t>(height) * width;
    std::vector<std::vector<double>> planes(6, std::vector<double>(hw, 0.0));
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        const PixelRef& p = pixels[i];
        const std::size_t at = static_cast<std::size_t>(p.row) * width + p.col;
        const int base = p.side == Side::front ? 0 : 3;
        for (int c = 0; c < 3; ++c) planes[base + c][at] = offsets[i][c];
    }
    write_float_planes(planes, {"front_x", "front_y", "front_z", "back_x", "back_y", "back_z"},
                       width, height, path);
}

std::vector<Vec3> read_render_offsets(const std::vector<PixelRef>& pixels, const std::string& path) {
    int w = 0, h = 0;
    std::vector<std::string> names;
    const auto planes = read_float_planes(path, &names, &w, &h);
    if (planes.size() != 6) throw std::runtime_error(path + ": expected 6 render offset planes");
    std::vector<Vec3> offsets(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const PixelRef& p = pixels[i];
        const std::size_t at = static_cast<std::size_t>(p.row) * w + p.col;
        const int base = p.side == Side::front ? 0 : 3;
        offsets[i] = {planes[base][at], planes[base + 1][at], planes[base + 2][at]};
    }
    return offsets;
}

std::vector<PixelRef> node_pixels(const GaussianMap& front, const GaussianMap& back) {
    std::vector<PixelRef> out;
    for (const GaussianMap* map : {&front, &back})
        for (int r = 0; r < map->height; ++r)
            for (int c = 0; c < map->width; ++c)
                if (map->valid(r, c)) out.push_back({map->side, r, c});
    return out;
}

bool any_nonzero(const std::vector<Vec3>& v) {
    for (const Vec3& x : v)
        if (x.squaredNorm() > 0) return true;
    return false;
}

}  // namespace

void save_avatar_bundle(const LayeredAvatar& avatar, const std::string& directory) {
    avatar.validate();
    fs::create_directories(directory);
    write_gaussian_map(avatar.body_front, path_in(directory, "body_front.gmap"));
    write_gaussian_map(avatar.body_back, path_in(directory, "body_back.gmap"));
    write_gaussian_map(avatar.cloth_front, path_in(directory, "cloth_front.gmap"));
    write_gaussian_map(avatar.cloth_back, path_in(directory, "cloth_back.gmap"));
    write_template(avatar.tmpl_front, path_in(directory, "tmpl_front.tmpl"));
    write_template(avatar.tmpl_back, path_in(directory, "tmpl_back.tmpl"));
    write_skeleton(avatar.skeleton, path_in(directory, "skeleton.txt"));
    write_weights(avatar.weights, path_in(directory, "weights.bin"));
    write_selector(avatar.selector, path_in(directory, "selector.txt"));
    write_stitch_pairs(avatar.stitch_pairs, path_in(directory, "stitch.bin"));
    if (any_nonzero(avatar.body_render_offsets))
        write_render_offsets(avatar.body_render_offsets,
                             node_pixels(avatar.body_front, avatar.body_back),
                             avatar.body_front.height, avatar.body_front.width,
                             path_in(directory, "body_render_offsets.raw"));
    if (any_nonzero(avatar.cloth_render_offsets))
        write_render_offsets(avatar.cloth_render_offsets,
                             node_pixels(avatar.cloth_front, avatar.cloth_back),
                             avatar.cloth_front.height, avatar.cloth_front.width,
                             path_in(directory, "cloth_render_offsets.raw"));
}

LayeredAvatar load_avatar_bundle(const std::string& directory) {
    LayeredAvatar avatar;
    avatar.body_front = read_gaussian_map(path_in(directory, "body_front.gmap"));
    avatar.body_back = read_gaussian_map(path_in(directory, "body_back.gmap"));
    avatar.cloth_front = read_gaussian_map(path_in(directory, "cloth_front.gmap"));
    avatar.cloth_back = read_gaussian_map(path_in(directory, "cloth_back.gmap"));
    avatar.tmpl_front = read_template(path_in(directory, "tmpl_front.tmpl"));
    avatar.tmpl_back = read_template(path_in(directory, "tmpl_back.tmpl"));
    avatar.skeleton = read_skeleton(path_in(directory, "skeleton.txt"));
    avatar.weights = read_weights(path_in(directory, "weights.bin"));
    avatar.selector = read_selector(path_in(directory, "selector.txt"));
    avatar.stitch_pairs = read_stitch_pairs(path_in(directory, "stitch.bin"));
    if (fs::exists(path_in(directory, "body_render_offsets.raw")))
        avatar.body_render_offsets =
            read_render_offsets(node_pixels(avatar.body_front, avatar.body_back),
                                path_in(directory, "body_render_offsets.raw"));
    if (fs::exists(path_in(directory, "cloth_render_offsets.raw")))
        avatar.cloth_render_offsets =
            read_render_offsets(node_pixels(avatar.cloth_front, avatar.cloth_back),
                                path_in(directory, "cloth_render_offsets.raw"));
    avatar.validate();
    return avatar;
}

std::vector<PixelRef> segment_clothing(const GaussianSet& single_layer) {
    std::vector<PixelRef> selector;
    for (int i = 0; i < single_layer.n; ++i)
        if (single_layer.labels[i][1] > 0.5) selector.push_back(single_layer.provenance[i]);
    if (selector.empty())
        throw std::invalid_argument("segment_clothing: no Gaussian has p_cloth > 0.5");
    std::sort(selector.begin(), selector.end());
    return selector;
}

void freeze_labels(GaussianSet& set, const std::vector<PixelRef>& selector) {
    std::set<PixelRef> cloth(selector.begin(), selector.end());
    for (int i = 0; i < set.n; ++i) {
        const bool is_cloth = cloth.count(set.provenance[i]) != 0;
        set.labels[i] = is_cloth ? Vec2(0.0, 1.0) : Vec2(1.0, 0.0);
    }
}

namespace {

struct FitEval {
    double total = 0;
    std::map<std::string, double> terms;
    std::vector<Vec3> grad;
};

FitEval evaluate_fit(const FitInputs& in, const LossWeights& weights) {
    GaussianSet& layer = *in.layer;
    FitEval eval;
    eval.grad.assign(layer.n, Vec3::Zero());

    const std::vector<Vec3> moving =
        in.fit_render_offsets ? layer.rendering_positions() : layer.positions();

    if (weights.cd > 0) {
        ValueGrad cd = loss_chamfer(moving, in.target);
        eval.terms["cd"] = cd.value;
        for (int i = 0; i < layer.n; ++i) eval.grad[i] += weights.cd * cd.grad[i];
    }
    if (in.fit_render_offsets) {
        if (weights.layer > 0) {
            LayerLoss layer_loss = loss_layer({}, layer.render_offsets, in.layer_epsilon);
            eval.terms["layer"] = layer_loss.value;
            for (int i = 0; i < layer.n; ++i)
                eval.grad[i] += weights.layer * layer_loss.grad_cloth[i];
        }
    } else {
        if (weights.off > 0) {
            ValueGrad off = loss_offset(layer);
            eval.terms["off"] = off.value;
            for (int i = 0; i < layer.n; ++i) eval.grad[i] += weights.off * off.grad[i];
        }
        if (weights.tv > 0) {
            ValueGrad tv = loss_tv_positions(layer, *in.graph);
            eval.terms["tv"] = tv.value;
            for (int i = 0; i < layer.n; ++i) eval.grad[i] += weights.tv * tv.grad[i];
        }
        if (weights.edge > 0) {
            ValueGrad edge = loss_edge(layer, *in.graph);
            eval.terms["edge"] = edge.value;
            for (int i = 0; i < layer.n; ++i) eval.grad[i] += weights.edge * edge.grad[i];
        }
        if (weights.stitch > 0) {
            ValueGrad stitch = loss_stitch_positions(layer, *in.graph);
            eval.terms["stitch"] = stitch.value;
            for (int i = 0; i < layer.n; ++i) eval.grad[i] += weights.stitch * stitch.grad[i];
        }
        if (weights.coll > 0 && !in.pairing.empty()) {
            std::vector<Vec3> body_at(layer.n);
            NormalField normals_at;
            normals_at.n.assign(layer.n, Vec3::Zero());
            normals_at.valid.assign(layer.n, 0);
            for (int i = 0; i < layer.n; ++i) {
                const int j = in.pairing[i];
                if (j < 0) continue;
                body_at[i] = in.other_positions[j];
                normals_at.n[i] = in.other_normals.n[j];
                normals_at.valid[i] = in.other_normals.valid[j];
            }
            ValueGrad coll = loss_coll(moving, body_at, normals_at, in.collision_epsilon);
            eval.terms["coll"] = coll.value;
            for (int i = 0; i < layer.n; ++i) eval.grad[i] += weights.coll * coll.grad[i];
        }
    }

    std::vector<double> contributions;
    for (const auto& [name, value] : eval.terms)
        contributions.push_back(weights.term(name) * value);
    eval.total = pairwise_sum(contributions);
    return eval;
}

}  // namespace

FitResult fit_geometric_layer(const FitInputs& inputs, const FitConfig& config) {
    config.validate();
    if (!inputs.layer || inputs.layer->n == 0)
        throw std::invalid_argument("fit_geometric_layer: empty layer");
    if (inputs.target.empty()) throw std::invalid_argument("fit_geometric_layer: empty target");
    if (!inputs.fit_render_offsets && !inputs.graph)
        throw std::invalid_argument("fit_geometric_layer: adjacency required");

    // desk-scale fitting runs on point-based terms only
    LossWeights weights = config.weights;
    for (const char* name : {"l1", "ssim", "normal", "label", "tv_label", "stitch_label"})
        weights.set_term(name, 0.0);
    if (!inputs.fit_render_offsets) weights.set_term("layer", 0.0);
    if (inputs.pairing.empty()) weights.set_term("coll", 0.0);

    GaussianSet& layer = *inputs.layer;
    auto& variable = inputs.fit_render_offsets ? layer.render_offsets : layer.offsets;

    FitResult result;
    FitEval eval = evaluate_fit(inputs, weights);
    result.initial_total = eval.total;
    double step = config.step_size;

    for (int iter = 0; iter < config.budget; ++iter) {
        const std::vector<Vec3> saved = variable;
        const double previous = eval.total;

        int halvings = 0;
        FitEval trial;
        while (true) {
            for (int i = 0; i < layer.n; ++i) variable[i] = saved[i] - step * eval.grad[i];
            trial = evaluate_fit(inputs, weights);
            if (trial.total <= previous) break;
            ++halvings;
            ++result.halvings;
            if (halvings > 20) {
                variable = saved;
                result.aborted = true;
                break;
            }
            step /= 2;
        }
        if (result.aborted) break;
        eval = std::move(trial);
        ++result.iterations;
        if (halvings == 0) step = std::min(step * 2.0, config.step_size);

        if (eval.total > 1e3 * std::max(result.initial_total, 1e-30)) {
            result.aborted = true;
            break;
        }
        if (std::abs(previous - eval.total) <= config.tolerance * std::max(1.0, std::abs(eval.total)))
            break;
    }

    result.final_total = eval.total;
    result.report = total_loss(eval.terms, weights, Stage::multi_layer);
    return result;
}

SplatScene make_body_cloth_scene(const GaussianSet& body, const SkinTransforms& body_xf,
                                 const NormalField& body_canonical_normals,
                                 const GaussianSet& cloth, const SkinTransforms& cloth_xf,
                                 const std::vector<Vec3>* cloth_positions_override) {
    SplatScene scene;
    const int total = body.n + cloth.n;
    scene.positions.reserve(total);
    scene.covariances.reserve(total);
    scene.opacities.reserve(total);
    scene.colors.reserve(total);
    scene.labels.reserve(total);
    scene.normals.n.reserve(total);
    scene.normals.valid.reserve(total);

    PosedGaussians posed_body = pose_gaussians(body, body_xf, body_canonical_normals);
    const std::vector<Vec3> body_render = pose_rendering_layer(body, body_xf);
    for (int i = 0; i < body.n; ++i) {
        scene.positions.push_back(body_render[i]);
        scene.covariances.push_back(posed_body.covariances[i]);
        scene.opacities.push_back(body.opacities[i]);
        scene.colors.push_back(body.colors[i]);
        scene.labels.emplace_back(1.0, 0.0);  // frozen labels in the layered stage
        scene.normals.n.push_back(posed_body.normals.n[i]);
        scene.normals.valid.push_back(posed_body.normals.valid[i]);
    }

    if (cloth.n > 0) {
        PosedGaussians posed_cloth = pose_gaussians(cloth, cloth_xf, NormalField{});
        std::vector<Vec3> cloth_positions;
        if (cloth_positions_override) {
            cloth_positions = *cloth_positions_override;
        } else {
            cloth_positions = pose_rendering_layer(cloth, cloth_xf);
        }
        for (int i = 0; i < cloth.n; ++i) {
            scene.positions.push_back(cloth_positions[i]);
            scene.covariances.push_back(posed_cloth.covariances[i]);
            scene.opacities.push_back(cloth.opacities[i]);
            scene.colors.push_back(cloth.colors[i]);
            scene.labels.emplace_back(0.0, 1.0);
            scene.normals.n.push_back(Vec3::Zero());
            scene.normals.valid.push_back(0);
        }
    }
    return scene;
}

TransferResult transfer_clothing(const LayeredAvatar& a, const AvatarRuntime& a_rt,
                                 const LayeredAvatar& b, const AvatarRuntime& b_rt,
                                 const Pose& pose, const Camera& camera,
                                 const CollisionConfig& config, const RenderOptions& options) {
    if (a.skeleton.joint_count() != b.skeleton.joint_count() ||
        a.skeleton.parents != b.skeleton.parents)
        throw std::invalid_argument("transfer_clothing: skeleton topology mismatch");
    if (a_rt.cloth.n == 0) throw std::invalid_argument("transfer_clothing: avatar A has no clothing");
    if (a.body_front.height != b.body_front.height || a.body_front.width != b.body_front.width)
        throw std::invalid_argument("transfer_clothing: map resolution mismatch");

    const JointTransforms fk_a = forward_kinematics(a.skeleton, pose);
    const JointTransforms fk_b = forward_kinematics(b.skeleton, pose);
    const SkinTransforms cloth_xf_a = blend_transforms(a_rt.cloth_weights, fk_a);
    const SkinTransforms body_xf_b = blend_transforms(b.weights, fk_b);

    PosedGaussians posed_body_b = pose_gaussians(b_rt.body, body_xf_b, b_rt.body_canonical_normals);

    // pixel-aligned body arrays over A's body node order
    const int m = a_rt.body.n;
    ResolveInputs inputs;
    inputs.cloth_posed = apply_transforms(
        cloth_xf_a, a_rt.cloth.positions());
    inputs.cloth_canonical = a_rt.cloth.positions();
    inputs.body_canonical_a.resize(m);
    inputs.body_canonical_b.assign(m, Vec3::Zero());
    inputs.body_b_valid.assign(m, 0);
    inputs.body_pixels.resize(m);
    SkinTransforms b_xf_at;
    b_xf_at.linear.assign(m, Mat3::Identity());
    b_xf_at.translation.assign(m, Vec3::Zero());
    b_xf_at.degenerate.assign(m, 0);
    for (int k = 0; k < m; ++k) {
        inputs.body_canonical_a[k] = a_rt.body.position(k);
        const PixelRef& p = a_rt.body.provenance[k];
        inputs.body_pixels[k] = p;
        const int j = b_rt.body_graph.node_at(p.side, p.row, p.col);
        if (j < 0) continue;
        inputs.body_b_valid[k] = 1;
        inputs.body_canonical_b[k] = b_rt.body.position(j);
        b_xf_at.linear[k] = body_xf_b.linear[j];
        b_xf_at.translation[k] = body_xf_b.translation[j];
    }
    inputs.body_b_transforms = &b_xf_at;
    inputs.selector = a_rt.cloth_to_body;
    inputs.body_posed_b = posed_body_b.positions;
    inputs.body_normals_b = &posed_body_b.normals;

    LaplacianSystem system = build_laplacian(a_rt.cloth_graph);
    system.set_reference(inputs.cloth_posed);
    inputs.system = &system;

    ResolveResult resolved = resolve_collisions(inputs, config);

    TransferResult result;
    result.resolved_cloth = resolved.positions;
    result.report = resolved.report;

    // rendering layer: resolved geometric layer plus A's posed second offsets
    result.cloth_render_layer = resolved.positions;
    for (int i = 0; i < a_rt.cloth.n; ++i)
        result.cloth_render_layer[i] += cloth_xf_a.linear[i] * a_rt.cloth.render_offsets[i];

    const SplatScene scene =
        make_body_cloth_scene(b_rt.body, body_xf_b, b_rt.body_canonical_normals, a_rt.cloth,
                              cloth_xf_a, &result.cloth_render_layer);
    result.image = rasterize(scene, camera, options);
    return result;
}

std::vector<FrameResult> animate(const LayeredAvatar& avatar, const AvatarRuntime& rt,
                                 const std::vector<Pose>& poses, const Camera& camera,
                                 const RenderOptions& options,
                                 const CollisionConfig* resolve_config) {
    std::vector<FrameResult> frames;
    frames.reserve(poses.size());
    for (const Pose& pose : poses) {
        FrameResult frame;
        if (resolve_config && rt.cloth.n > 0) {
            TransferResult t = transfer_clothing(avatar, rt, avatar, rt, pose, camera,
                                                 *resolve_config, options);
            frame.image = std::move(t.image);
            frame.cloth_points = std::move(t.cloth_render_layer);
            const JointTransforms fk = forward_kinematics(avatar.skeleton, pose);
            frame.body_points =
                pose_rendering_layer(rt.body, blend_transforms(avatar.weights, fk));
        } else {
            const JointTransforms fk = forward_kinematics(avatar.skeleton, pose);
            const SkinTransforms body_xf = blend_transforms(avatar.weights, fk);
            SkinTransforms cloth_xf;
            if (rt.cloth.n > 0) cloth_xf = blend_transforms(rt.cloth_weights, fk);
            frame.body_points = pose_rendering_layer(rt.body, body_xf);
            if (rt.cloth.n > 0) frame.cloth_points = pose_rendering_layer(rt.cloth, cloth_xf);
            const SplatScene scene = make_body_cloth_scene(
                rt.body, body_xf, rt.body_canonical_normals, rt.cloth, cloth_xf, nullptr);
            frame.image = rasterize(scene, camera, options);
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace gsav
