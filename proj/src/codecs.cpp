#include "gsav/codecs.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gsav {

namespace {

class ByteWriter {
public:
    explicit ByteWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void magic(const char m[4]) { out_.write(m, 4); }
    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        char buf[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                       static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
        out_.write(buf, 4);
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void f32_block(const float* data, std::size_t count) {
        if constexpr (std::endian::native == std::endian::little) {
            out_.write(reinterpret_cast<const char*>(data), count * 4);
        } else {
            for (std::size_t i = 0; i < count; ++i) f32(data[i]);
        }
    }
    void bytes(const std::uint8_t* data, std::size_t count) {
        out_.write(reinterpret_cast<const char*>(data), count);
    }
    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed: " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

class ByteReader {
public:
    explicit ByteReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open for reading: " + path);
    }
    std::size_t offset() const { return offset_; }
    void expect_magic(const char m[4], const char* what) {
        char buf[4];
        read(buf, 4, what);
        if (std::memcmp(buf, m, 4) != 0)
            throw CodecError(path_ + ": bad magic for " + what, offset_ - 4);
    }
    std::uint8_t u8(const char* what) {
        char c;
        read(&c, 1, what);
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32(const char* what) {
        unsigned char buf[4];
        read(reinterpret_cast<char*>(buf), 4, what);
        return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
               (static_cast<std::uint32_t>(buf[2]) << 16) |
               (static_cast<std::uint32_t>(buf[3]) << 24);
    }
    float f32(const char* what) {
        const std::uint32_t bits = u32(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    void f32_block(float* data, std::size_t count, const char* what) {
        if constexpr (std::endian::native == std::endian::little) {
            read(reinterpret_cast<char*>(data), count * 4, what);
        } else {
            for (std::size_t i = 0; i < count; ++i) data[i] = f32(what);
        }
    }
    void bytes(std::uint8_t* data, std::size_t count, const char* what) {
        read(reinterpret_cast<char*>(data), count, what);
    }
    void expect_eof(const char* what) {
        in_.peek();
        if (!in_.eof())
            throw CodecError(path_ + ": trailing bytes after " + what, offset_);
    }

private:
    void read(char* dst, std::size_t count, const char* what) {
        in_.read(dst, static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in_.gcount()) != count)
            throw CodecError(path_ + ": truncated while reading " + what,
                             offset_ + static_cast<std::size_t>(in_.gcount()));
        offset_ += count;
    }
    std::string path_;
    std::ifstream in_;
    std::size_t offset_ = 0;
};

constexpr std::uint32_t kFormatVersion = 1;

std::string gfmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

void write_gaussian_map(const GaussianMap& map, const std::string& path) {
    map.validate();
    ByteWriter w(path);
    w.magic("GMAP");
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(map.height));
    w.u32(static_cast<std::uint32_t>(map.width));
    w.u32(channel::count);
    w.u8(static_cast<std::uint8_t>(map.side));
    w.f32_block(map.channels.data(), map.channels.size());
    w.bytes(map.mask.data(), map.mask.size());
    w.close();
}

GaussianMap read_gaussian_map(const std::string& path) {
    ByteReader r(path);
    r.expect_magic("GMAP", "gaussian map");
    const std::uint32_t version = r.u32("version");
    if (version != kFormatVersion)
        throw CodecError(path + ": unsupported gaussian map version " + std::to_string(version),
                         r.offset());
    const std::uint32_t h = r.u32("height");
    const std::uint32_t w = r.u32("width");
    const std::uint32_t c = r.u32("channel count");
    if (c != channel::count)
        throw CodecError(path + ": expected 16 channels, found " + std::to_string(c), r.offset());
    const std::uint8_t side = r.u8("side");
    if (side > 1) throw CodecError(path + ": bad side byte", r.offset());
    if (h == 0 || w == 0 || h > 1u << 16 || w > 1u << 16)
        throw CodecError(path + ": implausible dimensions", r.offset());

    GaussianMap map(static_cast<int>(h), static_cast<int>(w), static_cast<Side>(side));
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    for (std::uint32_t plane = 0; plane < c; ++plane) {
        const std::string what = std::string("channel plane ") + std::to_string(plane) + " (" +
                                 channel::name(static_cast<int>(plane)) + ")";
        r.f32_block(map.channels.data() + plane * hw, hw, what.c_str());
    }
    r.bytes(map.mask.data(), hw, "mask");
    r.expect_eof("gaussian map");
    map.validate();
    return map;
}

void write_template(const TemplateGeometry& tmpl, const std::string& path) {
    ByteWriter w(path);
    w.magic("TMPL");
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(tmpl.height));
    w.u32(static_cast<std::uint32_t>(tmpl.width));
    w.u32(3);
    w.u8(static_cast<std::uint8_t>(tmpl.side));
    w.f32_block(tmpl.positions.data(), tmpl.positions.size());
    w.bytes(tmpl.mask.data(), tmpl.mask.size());
    w.close();
}

TemplateGeometry read_template(const std::string& path) {
    ByteReader r(path);
    r.expect_magic("TMPL", "template geometry");
    if (r.u32("version") != kFormatVersion)
        throw CodecError(path + ": unsupported template version", r.offset());
    const std::uint32_t h = r.u32("height");
    const std::uint32_t w = r.u32("width");
    if (r.u32("channel count") != 3)
        throw CodecError(path + ": template must have 3 channels", r.offset());
    const std::uint8_t side = r.u8("side");
    if (side > 1) throw CodecError(path + ": bad side byte", r.offset());

    TemplateGeometry tmpl(static_cast<int>(h), static_cast<int>(w), static_cast<Side>(side));
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    static const char* axes[3] = {"position plane x", "position plane y", "position plane z"};
    for (int plane = 0; plane < 3; ++plane)
        r.f32_block(tmpl.positions.data() + static_cast<std::size_t>(plane) * hw, hw, axes[plane]);
    r.bytes(tmpl.mask.data(), hw, "mask");
    r.expect_eof("template geometry");
    return tmpl;
}

void write_stitch_pairs(const std::vector<std::pair<int, int>>& pairs, const std::string& path) {
    ByteWriter w(path);
    w.magic("STCH");
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(pairs.size()));
    for (const auto& [a, b] : pairs) {
        w.u32(static_cast<std::uint32_t>(a));
        w.u32(static_cast<std::uint32_t>(b));
    }
    w.close();
}

std::vector<std::pair<int, int>> read_stitch_pairs(const std::string& path) {
    ByteReader r(path);
    r.expect_magic("STCH", "stitch pairs");
    if (r.u32("version") != kFormatVersion)
        throw CodecError(path + ": unsupported stitch version", r.offset());
    const std::uint32_t count = r.u32("pair count");
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto a = r.u32("stitch front index");
        const auto b = r.u32("stitch back index");
        pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
    r.expect_eof("stitch pairs");
    return pairs;
}

void write_weights(const SkinningWeights& weights, const std::string& path) {
    ByteWriter w(path);
    w.magic("WGHT");
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(weights.rows.size()));
    w.u32(static_cast<std::uint32_t>(weights.joint_count));
    for (const auto& row : weights.rows) {
        w.u8(static_cast<std::uint8_t>(row.count));
        for (int k = 0; k < row.count; ++k) {
            w.u32(static_cast<std::uint32_t>(row.joint[k]));
            w.f32(static_cast<float>(row.weight[k]));
        }
    }
    w.close();
}

SkinningWeights read_weights(const std::string& path) {
    ByteReader r(path);
    r.expect_magic("WGHT", "skinning weights");
    if (r.u32("version") != kFormatVersion)
        throw CodecError(path + ": unsupported weights version", r.offset());
    const std::uint32_t n = r.u32("row count");
    SkinningWeights weights;
    weights.joint_count = static_cast<int>(r.u32("joint count"));
    weights.rows.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto& row = weights.rows[i];
        row.count = r.u8("weight row size");
        if (row.count > 4)
            throw CodecError(path + ": weight row exceeds 4 entries", r.offset());
        for (int k = 0; k < row.count; ++k) {
            row.joint[k] = static_cast<int>(r.u32("weight joint index"));
            row.weight[k] = r.f32("weight value");
        }
    }
    r.expect_eof("skinning weights");
    weights.validate(1e-4);
    return weights;
}

void write_skeleton(const Skeleton& skeleton, const std::string& path) {
    skeleton.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "joints " << skeleton.joint_count() << "\n";
    for (int i = 0; i < skeleton.joint_count(); ++i) {
        out << skeleton.names[i] << " " << skeleton.parents[i] << " "
            << gfmt(skeleton.rest_positions[i].x()) << " " << gfmt(skeleton.rest_positions[i].y())
            << " " << gfmt(skeleton.rest_positions[i].z()) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Skeleton read_skeleton(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string tag;
    int joints = 0;
    if (!(in >> tag >> joints) || tag != "joints" || joints <= 0)
        throw std::runtime_error(path + ": expected 'joints <count>' header");
    Skeleton s;
    s.names.resize(joints);
    s.parents.resize(joints);
    s.rest_positions.resize(joints);
    for (int i = 0; i < joints; ++i) {
        double x, y, z;
        if (!(in >> s.names[i] >> s.parents[i] >> x >> y >> z))
            throw std::runtime_error(path + ": truncated joint record " + std::to_string(i));
        s.rest_positions[i] = {x, y, z};
    }
    s.validate();
    return s;
}

void write_pose_sequence(const std::vector<Pose>& poses, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const int joints = poses.empty() ? 0 : static_cast<int>(poses[0].joint_rotations.size());
    out << "joints " << joints << " frames " << poses.size() << "\n";
    for (std::size_t f = 0; f < poses.size(); ++f) {
        out << f;
        for (const Vec3& aa : poses[f].joint_rotations)
            out << " " << gfmt(aa.x()) << " " << gfmt(aa.y()) << " " << gfmt(aa.z());
        const Vec3& t = poses[f].root_translation;
        out << " " << gfmt(t.x()) << " " << gfmt(t.y()) << " " << gfmt(t.z()) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<Pose> read_pose_sequence(const std::string& path, int expected_joints) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string tag1, tag2;
    int joints = 0;
    std::size_t frames = 0;
    if (!(in >> tag1 >> joints >> tag2 >> frames) || tag1 != "joints" || tag2 != "frames")
        throw std::runtime_error(path + ": expected 'joints <J> frames <F>' header");
    if (expected_joints >= 0 && joints != expected_joints)
        throw std::runtime_error(path + ": pose has " + std::to_string(joints) +
                                 " joints, skeleton has " + std::to_string(expected_joints));
    std::vector<Pose> poses(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        std::size_t index;
        if (!(in >> index) || index != f)
            throw std::runtime_error(path + ": bad frame index in record " + std::to_string(f));
        poses[f].joint_rotations.resize(joints);
        for (int j = 0; j < joints; ++j) {
            double x, y, z;
            if (!(in >> x >> y >> z))
                throw std::runtime_error(path + ": truncated pose record " + std::to_string(f));
            poses[f].joint_rotations[j] = {x, y, z};
        }
        double tx, ty, tz;
        if (!(in >> tx >> ty >> tz))
            throw std::runtime_error(path + ": truncated root translation in record " +
                                     std::to_string(f));
        poses[f].root_translation = {tx, ty, tz};
    }
    return poses;
}

void write_selector(const std::vector<PixelRef>& pixels, const std::string& path) {
    std::vector<PixelRef> sorted = pixels;
    std::sort(sorted.begin(), sorted.end());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "pixels " << sorted.size() << "\n";
    for (const PixelRef& p : sorted)
        out << side_name(p.side) << " " << p.row << " " << p.col << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<PixelRef> read_selector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string tag;
    std::size_t count = 0;
    if (!(in >> tag >> count) || tag != "pixels")
        throw std::runtime_error(path + ": expected 'pixels <count>' header");
    std::vector<PixelRef> pixels(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string side;
        if (!(in >> side >> pixels[i].row >> pixels[i].col))
            throw std::runtime_error(path + ": truncated selector record " + std::to_string(i));
        if (side == "front")
            pixels[i].side = Side::front;
        else if (side == "back")
            pixels[i].side = Side::back;
        else
            throw std::runtime_error(path + ": bad side '" + side + "' in record " +
                                     std::to_string(i));
    }
    return pixels;
}

void write_camera(const Camera& camera, const std::string& path) {
    camera.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "fx = " << gfmt(camera.fx) << "\nfy = " << gfmt(camera.fy) << "\ncx = "
        << gfmt(camera.cx) << "\ncy = " << gfmt(camera.cy) << "\nwidth = " << camera.width
        << "\nheight = " << camera.height << "\nnear = " << gfmt(camera.near_plane) << "\n";
    out << "rotation =";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << " " << gfmt(camera.rotation(r, c));
    out << "\ntranslation = " << gfmt(camera.translation.x()) << " "
        << gfmt(camera.translation.y()) << " " << gfmt(camera.translation.z()) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

Camera read_camera(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    Camera cam;
    std::string line;
    bool have_rotation = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key, eq;
        if (!(ls >> key)) continue;
        if (!(ls >> eq) || eq != "=")
            throw std::runtime_error(path + ": expected 'key = value', got: " + line);
        if (key == "fx") ls >> cam.fx;
        else if (key == "fy") ls >> cam.fy;
        else if (key == "cx") ls >> cam.cx;
        else if (key == "cy") ls >> cam.cy;
        else if (key == "width") ls >> cam.width;
        else if (key == "height") ls >> cam.height;
        else if (key == "near") ls >> cam.near_plane;
        else if (key == "rotation") {
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) ls >> cam.rotation(r, c);
            have_rotation = true;
        } else if (key == "translation") {
            ls >> cam.translation.x() >> cam.translation.y() >> cam.translation.z();
        } else {
            throw std::runtime_error(path + ": unknown camera key '" + key + "'");
        }
        if (!ls) throw std::runtime_error(path + ": malformed value for key '" + key + "'");
    }
    if (!have_rotation) throw std::runtime_error(path + ": missing rotation");
    cam.validate();
    return cam;
}

void write_ply(const PointCloud& cloud, const std::string& path) {
    const bool normals = !cloud.normals.empty();
    const bool colors = !cloud.colors.empty();
    if (normals && cloud.normals.size() != cloud.positions.size())
        throw std::invalid_argument("write_ply: normal count mismatch");
    if (colors && cloud.colors.size() != cloud.positions.size())
        throw std::invalid_argument("write_ply: color count mismatch");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << cloud.positions.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (normals) out << "property float nx\nproperty float ny\nproperty float nz\n";
    if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";

    auto put_f32 = [&](double v) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        const char buf[4] = {static_cast<char>(bits), static_cast<char>(bits >> 8),
                             static_cast<char>(bits >> 16), static_cast<char>(bits >> 24)};
        out.write(buf, 4);
    };
    for (std::size_t i = 0; i < cloud.positions.size(); ++i) {
        for (int c = 0; c < 3; ++c) put_f32(cloud.positions[i][c]);
        if (normals)
            for (int c = 0; c < 3; ++c) put_f32(cloud.normals[i][c]);
        if (colors) {
            for (int c = 0; c < 3; ++c) {
                const double v = std::clamp(cloud.colors[i][c], 0.0, 1.0);
                out.put(static_cast<char>(std::lround(v * 255.0)));
            }
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

PointCloud read_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);

    std::string line;
    if (!std::getline(in, line) || line != "ply")
        throw std::runtime_error(path + ": not a PLY file");
    std::size_t vertices = 0;
    std::vector<std::string> properties;
    bool binary_le = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            binary_le = fmt == "binary_little_endian";
        } else if (word == "element") {
            std::string name;
            ls >> name >> vertices;
            if (name != "vertex")
                throw std::runtime_error(path + ": unsupported PLY element '" + name + "'");
        } else if (word == "property") {
            std::string type, name;
            ls >> type >> name;
            if (type != "float" && type != "uchar")
                throw std::runtime_error(path + ": unsupported PLY property type '" + type + "'");
            properties.push_back(type + ":" + name);
        } else if (word == "end_header") {
            break;
        } else if (word == "comment" || word == "ply") {
            continue;
        } else {
            throw std::runtime_error(path + ": unsupported PLY header line: " + line);
        }
    }
    if (!binary_le) throw std::runtime_error(path + ": only binary_little_endian PLY supported");

    auto get_f32 = [&](const char* what) {
        unsigned char buf[4];
        in.read(reinterpret_cast<char*>(buf), 4);
        if (in.gcount() != 4)
            throw CodecError(path + ": truncated reading " + what,
                             static_cast<std::size_t>(in.tellg()));
        std::uint32_t bits = static_cast<std::uint32_t>(buf[0]) |
                             (static_cast<std::uint32_t>(buf[1]) << 8) |
                             (static_cast<std::uint32_t>(buf[2]) << 16) |
                             (static_cast<std::uint32_t>(buf[3]) << 24);
        float f;
        std::memcpy(&f, &bits, 4);
        return static_cast<double>(f);
    };

    PointCloud cloud;
    cloud.positions.resize(vertices);
    const bool has = [&](const char* p) {
        return std::find(properties.begin(), properties.end(), p) != properties.end();
    }("float:nx");
    const bool has_color = std::find(properties.begin(), properties.end(),
                                     std::string("uchar:red")) != properties.end();
    if (has) cloud.normals.resize(vertices);
    if (has_color) cloud.colors.resize(vertices);
    for (std::size_t i = 0; i < vertices; ++i) {
        for (int c = 0; c < 3; ++c) cloud.positions[i][c] = get_f32("vertex position");
        if (has)
            for (int c = 0; c < 3; ++c) cloud.normals[i][c] = get_f32("vertex normal");
        if (has_color) {
            for (int c = 0; c < 3; ++c) {
                char byte;
                in.read(&byte, 1);
                if (in.gcount() != 1)
                    throw CodecError(path + ": truncated reading vertex color",
                                     static_cast<std::size_t>(in.tellg()));
                cloud.colors[i][c] = static_cast<unsigned char>(byte) / 255.0;
            }
        }
    }
    return cloud;
}

void write_ppm(const SplatImage& image, const std::string& path) {
    if (!image.has_rgb()) throw std::invalid_argument("write_ppm: image has no RGB channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) {
            const double v = std::clamp(image.rgb[p * 3 + c], 0.0, 1.0);
            out.put(static_cast<char>(std::lround(v * 255.0)));
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_float_planes(const std::vector<std::vector<double>>& planes,
                        const std::vector<std::string>& names, int width, int height,
                        const std::string& path) {
    if (planes.size() != names.size())
        throw std::invalid_argument("write_float_planes: plane/name count mismatch");
    const std::size_t hw = static_cast<std::size_t>(width) * height;
    std::ofstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("cannot open for writing: " + path + ".hdr");
    hdr << "width = " << width << "\nheight = " << height << "\nplanes =";
    for (const auto& n : names) hdr << " " << n;
    hdr << "\n";
    if (!hdr) throw std::runtime_error("write failed: " + path + ".hdr");

    ByteWriter w(path);
    for (const auto& plane : planes) {
        if (plane.size() != hw)
            throw std::invalid_argument("write_float_planes: plane size mismatch");
        for (double v : plane) w.f32(static_cast<float>(v));
    }
    w.close();
}

std::vector<std::vector<double>> read_float_planes(const std::string& path,
                                                   std::vector<std::string>* names, int* width,
                                                   int* height) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("cannot open for reading: " + path + ".hdr");
    int w = 0, h = 0;
    std::vector<std::string> plane_names;
    std::string line;
    while (std::getline(hdr, line)) {
        std::istringstream ls(line);
        std::string key, eq;
        if (!(ls >> key >> eq) || eq != "=") continue;
        if (key == "width") ls >> w;
        else if (key == "height") ls >> h;
        else if (key == "planes") {
            std::string n;
            while (ls >> n) plane_names.push_back(n);
        }
    }
    if (w <= 0 || h <= 0 || plane_names.empty())
        throw std::runtime_error(path + ".hdr: malformed sidecar header");

    ByteReader r(path);
    const std::size_t hw = static_cast<std::size_t>(w) * h;
    std::vector<std::vector<double>> planes(plane_names.size());
    std::vector<float> buf(hw);
    for (std::size_t p = 0; p < planes.size(); ++p) {
        r.f32_block(buf.data(), hw, plane_names[p].c_str());
        planes[p].assign(buf.begin(), buf.end());
    }
    r.expect_eof("float planes");
    if (names) *names = plane_names;
    if (width) *width = w;
    if (height) *height = h;
    return planes;
}

}  // namespace gsav
