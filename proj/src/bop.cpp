#include "cadsynth/bop.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cadsynth/errors.hpp"

namespace cadsynth {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ojson mat_json(const Mat3 &r) {
    ojson a = ojson::array();
    for (double v : r.m) a.push_back(v);
    return a;
}

ojson vec_json(const Vec3 &v) { return ojson::array({v.x, v.y, v.z}); }

ojson bbox_json(const BBox &b) { return ojson::array({b[0], b[1], b[2], b[3]}); }

ojson cam_k_json(const CameraIntrinsics &k) { return mat_json(k.matrix()); }

void write_text(const fs::path &path, const std::string &text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string dump(const ojson &j) { return j.dump(2) + "\n"; }

Image16 widen_mask(const Image8 &m) {
    Image16 out(m.width, m.height, 1);
    for (std::size_t i = 0; i < m.pixels.size(); ++i) out.pixels[i] = m.pixels[i] ? kMaskOn : 0;
    return out;
}

/// Accepts 8- or 16-bit masks; any nonzero value is foreground.
Image8 read_mask(const fs::path &path) {
    Image8 out;
    try {
        const Image16 m = read_png16(path);
        out = Image8(m.width, m.height, 1, 0);
        for (std::size_t i = 0; i < m.pixels.size(); ++i) out.pixels[i] = m.pixels[i] ? kMaskOn : 0;
    } catch (const FormatError &) {
        const Image8 m = read_png8(path);
        out = Image8(m.width, m.height, 1, 0);
        for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = m.pixels[i * m.channels] ? kMaskOn : 0;
    }
    return out;
}

/// JSON access with the key path carried into error messages.
class JsonPath {
public:
    JsonPath(const ojson &j, std::string path) : j_(j), path_(std::move(path)) {}

    JsonPath operator[](const std::string &key) const {
        if (!j_.is_object()) fail("expected an object");
        const auto it = j_.find(key);
        if (it == j_.end()) throw FormatError(path_ + ": missing key \"" + key + "\"");
        return {*it, path_ + "[\"" + key + "\"]"};
    }
    JsonPath operator[](std::size_t i) const {
        if (!j_.is_array() || i >= j_.size()) fail("expected an array with index " + std::to_string(i));
        return {j_[i], path_ + "[" + std::to_string(i) + "]"};
    }
    bool has(const std::string &key) const { return j_.is_object() && j_.contains(key); }
    std::size_t size() const { return j_.size(); }
    const ojson &raw() const { return j_; }
    const std::string &path() const { return path_; }

    double number() const {
        if (!j_.is_number()) fail("expected a number");
        return j_.get<double>();
    }
    int integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<int>();
    }
    std::vector<double> numbers(std::size_t n) const {
        if (!j_.is_array() || j_.size() != n) fail("expected an array of " + std::to_string(n) + " numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back((*this)[i].number());
        return out;
    }
    Mat3 mat3() const {
        const auto v = numbers(9);
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
        return r;
    }
    Vec3 vec3() const {
        const auto v = numbers(3);
        return {v[0], v[1], v[2]};
    }
    BBox bbox() const {
        if (!j_.is_array() || j_.size() != 4) fail("expected an array of 4 integers");
        return {(*this)[0].integer(), (*this)[1].integer(), (*this)[2].integer(), (*this)[3].integer()};
    }
    [[noreturn]] void fail(const std::string &what) const { throw FormatError(path_ + ": " + what); }

private:
    const ojson &j_;
    std::string path_;
};

ojson read_json(const fs::path &path) {
    if (!fs::exists(path)) throw IoError("missing file " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return ojson::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(path.filename().string() + ": " + e.what());
    }
}

int parse_image_id(const std::string &key, const std::string &file) {
    int id = 0;
    std::size_t pos = 0;
    try {
        id = std::stoi(key, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos != key.size() || key.empty() || id < 0) throw FormatError(file + ": key \"" + key + "\" is not an image id");
    return id;
}

double model_diameter(const Mesh &mesh) {
    const auto &v = mesh.vertices;
    if (v.size() > 20000) return length(mesh.bounds().extent());  // bounding-box diagonal as an upper bound
    double best = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, dot(v[i] - v[j], v[i] - v[j]));
    return std::sqrt(best);
}

}  // namespace

BopGt to_bop_gt(const InstanceAnnotation &a) {
    return {a.pose_m2c.rotation, a.pose_m2c.translation * 1000.0, a.obj_id};
}

BopGtInfo to_bop_gt_info(const InstanceAnnotation &a) {
    return {a.bbox_obj, a.bbox_visib, a.px_count_all, a.px_count_visib, a.px_count_visib, a.visib_fract};
}

RigidTransform pose_from_bop(const Mat3 &r, const Vec3 &t_mm) { return {r, t_mm / 1000.0}; }

Image16 encode_depth(const FrameBuffers &frame, double depth_scale) {
    if (!(depth_scale > 0)) throw Error("depth_scale must be > 0");
    Image16 out(frame.width, frame.height, 1);
    for (std::size_t i = 0; i < frame.depth.size(); ++i) {
        const double z = frame.depth[i];
        if (z <= 0) continue;
        const double stored = std::round(z * 1000.0 / depth_scale);
        if (!(stored <= 65535.0))
            throw Error(fmt::format("depth {:.4f} m does not fit 16 bits at depth_scale {}; use a larger depth_scale",
                                    z, depth_scale));
        out.pixels[i] = static_cast<std::uint16_t>(stored);
    }
    return out;
}

BopFrame make_bop_frame(const Scene &scene, const FrameBuffers &buffers, const FrameAnnotation &ann,
                        const Image8 &rgb, double depth_scale) {
    BopFrame f;
    f.intrinsics = scene.camera.intrinsics;
    f.depth_scale = depth_scale;
    f.cam_R_w2c = scene.camera.world_to_camera.rotation;
    f.cam_t_w2c = scene.camera.world_to_camera.translation * 1000.0;
    for (const InstanceAnnotation &a : ann.instances) {
        f.gt.push_back(to_bop_gt(a));
        f.gt_info.push_back(to_bop_gt_info(a));
    }
    f.rgb = rgb;
    f.depth = encode_depth(buffers, depth_scale);
    f.masks = ann.amodal_masks;
    f.masks_visib = ann.visible_masks;
    return f;
}

namespace bop_paths {
fs::path scene_dir(const fs::path &root, int scene_id) { return root / "train_pbr" / fmt::format("{:06}", scene_id); }
fs::path model(const fs::path &root, int obj_id) { return root / "models" / fmt::format("obj_{:06}.ply", obj_id); }
fs::path rgb(const fs::path &dir, int image_id) { return dir / "rgb" / fmt::format("{:06}.png", image_id); }
fs::path depth(const fs::path &dir, int image_id) { return dir / "depth" / fmt::format("{:06}.png", image_id); }
fs::path mask(const fs::path &dir, int image_id, int gt) {
    return dir / "mask" / fmt::format("{:06}_{:06}.png", image_id, gt);
}
fs::path mask_visib(const fs::path &dir, int image_id, int gt) {
    return dir / "mask_visib" / fmt::format("{:06}_{:06}.png", image_id, gt);
}
}  // namespace bop_paths

std::string scene_camera_json(const std::map<int, BopFrame> &frames) {
    ojson j = ojson::object();
    for (const auto &[id, f] : frames) {
        ojson e;
        e["cam_K"] = cam_k_json(f.intrinsics);
        e["depth_scale"] = f.depth_scale;
        if (f.cam_R_w2c && f.cam_t_w2c) {
            e["cam_R_w2c"] = mat_json(*f.cam_R_w2c);
            e["cam_t_w2c"] = vec_json(*f.cam_t_w2c);
        }
        j[std::to_string(id)] = e;
    }
    return dump(j);
}

std::string scene_gt_json(const std::map<int, BopFrame> &frames) {
    ojson j = ojson::object();
    for (const auto &[id, f] : frames) {
        ojson list = ojson::array();
        for (const BopGt &g : f.gt) {
            ojson e;
            e["cam_R_m2c"] = mat_json(g.cam_R_m2c);
            e["cam_t_m2c"] = vec_json(g.cam_t_m2c);
            e["obj_id"] = g.obj_id;
            list.push_back(e);
        }
        j[std::to_string(id)] = list;
    }
    return dump(j);
}

std::string scene_gt_info_json(const std::map<int, BopFrame> &frames) {
    ojson j = ojson::object();
    for (const auto &[id, f] : frames) {
        ojson list = ojson::array();
        for (const BopGtInfo &g : f.gt_info) {
            ojson e;
            e["bbox_obj"] = bbox_json(g.bbox_obj);
            e["bbox_visib"] = bbox_json(g.bbox_visib);
            e["px_count_all"] = g.px_count_all;
            e["px_count_valid"] = g.px_count_valid;
            e["px_count_visib"] = g.px_count_visib;
            e["visib_fract"] = g.visib_fract;
            list.push_back(e);
        }
        j[std::to_string(id)] = list;
    }
    return dump(j);
}

BopWriter::BopWriter(fs::path root, int scene_id, const CameraIntrinsics &intrinsics, double depth_scale)
    : root_(std::move(root)),
      scene_dir_(bop_paths::scene_dir(root_, scene_id)),
      intrinsics_(intrinsics),
      depth_scale_(depth_scale) {
    std::error_code ec;
    fs::create_directories(scene_dir_, ec);
    if (ec) throw IoError("cannot create " + scene_dir_.string() + ": " + ec.message());
}

void BopWriter::write_models(const std::map<int, std::shared_ptr<const Mesh>> &models) {
    fs::create_directories(root_ / "models");
    ojson info = ojson::object();
    for (const auto &[id, mesh] : models) {
        if (!mesh) continue;
        const Mesh mm = scaled(*mesh, 1000.0);
        write_ply(mm, bop_paths::model(root_, id), PlyEncoding::binary_little_endian);
        const Aabb b = mm.bounds();
        ojson e;
        e["diameter"] = model_diameter(mm);
        e["min_x"] = b.lo.x;
        e["min_y"] = b.lo.y;
        e["min_z"] = b.lo.z;
        e["size_x"] = b.hi.x - b.lo.x;
        e["size_y"] = b.hi.y - b.lo.y;
        e["size_z"] = b.hi.z - b.lo.z;
        info[std::to_string(id)] = e;
    }
    write_text(root_ / "models" / "models_info.json", dump(info));
}

void BopWriter::write_frame(int image_id, const BopFrame &frame) {
    if (frame.rgb) {
        fs::create_directories(scene_dir_ / "rgb");
        write_png(bop_paths::rgb(scene_dir_, image_id), *frame.rgb);
    }
    if (frame.depth) {
        fs::create_directories(scene_dir_ / "depth");
        write_png(bop_paths::depth(scene_dir_, image_id), *frame.depth);
    }
    if (!frame.masks.empty()) fs::create_directories(scene_dir_ / "mask");
    for (std::size_t i = 0; i < frame.masks.size(); ++i)
        write_png(bop_paths::mask(scene_dir_, image_id, static_cast<int>(i)), widen_mask(frame.masks[i]));
    if (!frame.masks_visib.empty()) fs::create_directories(scene_dir_ / "mask_visib");
    for (std::size_t i = 0; i < frame.masks_visib.size(); ++i)
        write_png(bop_paths::mask_visib(scene_dir_, image_id, static_cast<int>(i)), widen_mask(frame.masks_visib[i]));

    BopFrame record = frame;
    record.rgb.reset();
    record.depth.reset();
    record.masks.clear();
    record.masks_visib.clear();
    records_[image_id] = std::move(record);
}

void BopWriter::flush() const {
    ojson cam;
    cam["cx"] = intrinsics_.cx;
    cam["cy"] = intrinsics_.cy;
    cam["depth_scale"] = depth_scale_;
    cam["fx"] = intrinsics_.fx;
    cam["fy"] = intrinsics_.fy;
    cam["height"] = intrinsics_.height;
    cam["width"] = intrinsics_.width;
    write_text(root_ / "camera.json", dump(cam));
    write_text(scene_dir_ / "scene_camera.json", scene_camera_json(records_));
    write_text(scene_dir_ / "scene_gt.json", scene_gt_json(records_));
    write_text(scene_dir_ / "scene_gt_info.json", scene_gt_info_json(records_));
}

void export_scene(const BopScene &scene, const fs::path &root) {
    BopWriter w(root, scene.scene_id, scene.intrinsics, scene.depth_scale);
    w.write_models(scene.models);
    for (const auto &[id, f] : scene.frames) w.write_frame(id, f);
    w.flush();
}

BopScene import_scene(const fs::path &root, int scene_id) {
    BopScene s;
    s.scene_id = scene_id;
    const fs::path dir = bop_paths::scene_dir(root, scene_id);
    if (!fs::is_directory(dir)) throw IoError("missing scene directory " + dir.string());
    if (!fs::is_directory(root / "models")) throw IoError("missing models/ directory under " + root.string());

    const ojson cam_doc = read_json(root / "camera.json");
    const JsonPath cam(cam_doc, "camera.json");
    s.intrinsics.fx = cam["fx"].number();
    s.intrinsics.fy = cam["fy"].number();
    s.intrinsics.cx = cam["cx"].number();
    s.intrinsics.cy = cam["cy"].number();
    s.intrinsics.width = cam["width"].integer();
    s.intrinsics.height = cam["height"].integer();
    if (cam.has("depth_scale")) s.depth_scale = cam["depth_scale"].number();

    const ojson sc_doc = read_json(dir / "scene_camera.json");
    const ojson gt_doc = read_json(dir / "scene_gt.json");
    const fs::path info_path = dir / "scene_gt_info.json";
    const ojson info_doc = fs::exists(info_path) ? read_json(info_path) : ojson::object();
    if (!sc_doc.is_object()) throw FormatError("scene_camera.json: expected an object");
    if (!gt_doc.is_object()) throw FormatError("scene_gt.json: expected an object");

    for (const auto &[key, value] : sc_doc.items()) {
        const int id = parse_image_id(key, "scene_camera.json");
        const JsonPath e(value, "scene_camera.json[\"" + key + "\"]");
        BopFrame f;
        const Mat3 k = e["cam_K"].mat3();
        f.intrinsics = s.intrinsics;
        f.intrinsics.fx = k(0, 0);
        f.intrinsics.fy = k(1, 1);
        f.intrinsics.cx = k(0, 2);
        f.intrinsics.cy = k(1, 2);
        f.depth_scale = e.has("depth_scale") ? e["depth_scale"].number() : s.depth_scale;
        if (e.has("cam_R_w2c") && e.has("cam_t_w2c")) {
            f.cam_R_w2c = e["cam_R_w2c"].mat3();
            f.cam_t_w2c = e["cam_t_w2c"].vec3();
        }
        s.frames[id] = std::move(f);
    }

    for (const auto &[key, value] : gt_doc.items()) {
        const int id = parse_image_id(key, "scene_gt.json");
        const auto it = s.frames.find(id);
        if (it == s.frames.end()) throw FormatError("scene_gt.json: image " + key + " missing from scene_camera.json");
        BopFrame &f = it->second;
        const JsonPath list(value, "scene_gt.json[\"" + key + "\"]");
        if (!value.is_array()) list.fail("expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const JsonPath e = list[i];
            f.gt.push_back({e["cam_R_m2c"].mat3(), e["cam_t_m2c"].vec3(), e["obj_id"].integer()});
        }
        if (info_doc.contains(key)) {
            const JsonPath il(info_doc[key], "scene_gt_info.json[\"" + key + "\"]");
            if (!il.raw().is_array() || il.size() != f.gt.size()) il.fail("expected one record per scene_gt entry");
            for (std::size_t i = 0; i < il.size(); ++i) {
                const JsonPath e = il[i];
                BopGtInfo g;
                g.bbox_obj = e["bbox_obj"].bbox();
                g.bbox_visib = e["bbox_visib"].bbox();
                g.px_count_all = e["px_count_all"].integer();
                g.px_count_visib = e["px_count_visib"].integer();
                g.px_count_valid = e.has("px_count_valid") ? e["px_count_valid"].integer() : g.px_count_visib;
                g.visib_fract = e["visib_fract"].number();
                f.gt_info.push_back(g);
            }
        }
        for (const BopGt &g : f.gt) {
            if (s.models.contains(g.obj_id)) continue;
            const fs::path mp = bop_paths::model(root, g.obj_id);
            if (!fs::exists(mp)) throw IoError("missing model file " + mp.string());
            Mesh m = scaled(load_mesh(mp), 1e-3);
            m.object_id = g.obj_id;
            s.models[g.obj_id] = std::make_shared<const Mesh>(std::move(m));
        }
    }

    for (auto &[id, f] : s.frames) {
        if (const fs::path p = bop_paths::rgb(dir, id); fs::exists(p)) f.rgb = read_png8(p);
        if (const fs::path p = bop_paths::depth(dir, id); fs::exists(p)) f.depth = read_png16(p);
        for (std::size_t i = 0; i < f.gt.size(); ++i) {
            const fs::path pm = bop_paths::mask(dir, id, static_cast<int>(i));
            const fs::path pv = bop_paths::mask_visib(dir, id, static_cast<int>(i));
            if (fs::exists(pm)) f.masks.push_back(read_mask(pm));
            if (fs::exists(pv)) f.masks_visib.push_back(read_mask(pv));
        }
        if (!f.masks.empty() && f.masks.size() != f.gt.size())
            throw IoError(fmt::format("image {}: mask files exist for only some annotations", id));
        if (!f.masks_visib.empty() && f.masks_visib.size() != f.gt.size())
            throw IoError(fmt::format("image {}: mask_visib files exist for only some annotations", id));
    }
    return s;
}

}  // namespace cadsynth
