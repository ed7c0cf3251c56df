#include "cadsynth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <climits>
#include <fstream>
#include <map>
#include <mutex>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cadsynth/annotate.hpp"
#include "cadsynth/bop.hpp"
#include "cadsynth/image_io.hpp"
#include "cadsynth/parallel.hpp"
#include "cadsynth/render.hpp"

namespace cadsynth {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

TextureMap first_channel(const TextureMap &t) {
    if (t.channels() == 1) return t;
    TextureMap out(t.width(), t.height(), 1, ColorSpace::linear, t.wrap());
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) out.at(x, y, 0) = t.at(x, y, 0);
    return out;
}

TextureMap rgb_only(const TextureMap &t) {
    if (t.channels() == 3) return t;
    TextureMap out(t.width(), t.height(), 3, t.color_space(), t.wrap());
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = t.at(x, y, std::min(c, t.channels() - 1));
    return out;
}

TextureMap scalar_map(const MapSource &m, double fallback) {
    if (m.path) return first_channel(load_texture(*m.path, ColorSpace::linear));
    return TextureMap::constant_scalar(m.value.empty() ? fallback : m.value[0]);
}

Vec3 vec_of(const std::vector<double> &v, const Vec3 &fallback) {
    return v.size() == 3 ? Vec3(v[0], v[1], v[2]) : fallback;
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

Image8 quantize(const TextureMap &t) {
    Image8 img(t.width(), t.height(), t.channels());
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x)
            for (int c = 0; c < t.channels(); ++c) {
                const double v = std::clamp(static_cast<double>(t.at(x, y, c)), 0.0, 1.0);
                img.at(x, y, c) = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
            }
    return img;
}

struct FrameResult {
    BopFrame frame;
    RenderStats stats;
    int redraws = 0;
    int overlaps = 0;
    int instances = 0;
    std::array<double, kStageCount> seconds{};
    double busy = 0;
};

void add_times(RunReport &r, const FrameResult &f) {
    for (std::size_t i = 0; i < kStageCount; ++i) r.stage_seconds[i] += f.seconds[i];
    r.total_seconds += f.busy;
    r.samples += f.stats.samples;
    r.rejected_samples += f.stats.rejected_samples;
    r.spawn_redraws += static_cast<std::uint64_t>(f.redraws);
    r.accepted_overlaps += static_cast<std::uint64_t>(f.overlaps);
    r.instance_counts.push_back(f.instances);
}

void finish_run(const fs::path &root, const RunReport &report) {
    write_text(root / "report.json", report.to_json().dump(2) + "\n");
    write_text(root / "MANIFEST", manifest_text(root, report));
}

}  // namespace

const char *stage_name(Stage s) {
    switch (s) {
        case Stage::load_assets: return "load_assets";
        case Stage::randomize: return "randomize";
        case Stage::texture_synthesis: return "texture_synthesis";
        case Stage::render: return "render";
        case Stage::annotate: return "annotate";
        case Stage::export_frame: return "export";
    }
    return "unknown";
}

MaterialMaps load_material(const MaterialSource &src) {
    MaterialMaps m = MaterialMaps::uniform(vec_of(src.albedo.value, Vec3(0.5)), 0.5, 0.0, src.specular);
    if (src.albedo.path) {
        m.albedo = rgb_only(load_texture(*src.albedo.path, ColorSpace::srgb));
        m.albedo.set_color_space(ColorSpace::srgb);
    }
    if (src.normal.path)
        m.normal = rgb_only(load_texture(*src.normal.path, ColorSpace::linear));
    else if (src.normal.value.size() == 3)
        m.normal = TextureMap::constant_rgb(vec_of(src.normal.value, Vec3(0.5, 0.5, 1.0)));
    m.roughness = scalar_map(src.roughness, 0.5);
    m.metallic = scalar_map(src.metallic, 0.0);
    m.displacement = scalar_map(src.displacement, 0.0);
    m.displacement_scale = src.displacement_scale;
    m.validate();
    return m;
}

TextureMap load_environment(const EnvironmentSource &src) {
    if (!src.path) return TextureMap::constant_rgb(src.constant, ColorSpace::linear, 2, 1);
    TextureMap t = load_texture(*src.path, ColorSpace::srgb);
    if (t.color_space() == ColorSpace::srgb) {
        for (float &v : t.data()) v = static_cast<float>(srgb_to_linear(v));
        t.set_color_space(ColorSpace::linear);
    }
    return rgb_only(t);
}

Assets load_assets(const DatasetConfig &config) {
    Assets a;
    for (const ModelSource &src : config.models) {
        Mesh m = load_mesh(src.path);
        if (src.scale != 1.0) m = scaled(m, src.scale);
        m.object_id = src.obj_id;
        a.models.push_back(std::make_shared<const Mesh>(std::move(m)));
    }
    for (const EnvironmentSource &src : config.environments)
        a.environments.push_back(std::make_shared<const TextureMap>(load_environment(src)));
    for (const MaterialSource &src : config.materials)
        a.materials.push_back(std::make_shared<const MaterialMaps>(load_material(src)));
    return a;
}

RandomStream frame_stream(std::uint64_t seed, int frame) {
    return RandomStream(seed).child(static_cast<std::uint64_t>(frame));
}

FrameScene randomize_frame(const DatasetConfig &config, const Assets &assets, int frame) {
    const RandomStream rng = frame_stream(config.seed, frame);
    FrameScene fs;
    Scene &scene = fs.scene;

    RandomStream cam_rng = rng.child(1);
    scene.camera.intrinsics = config.camera_intrinsics();
    scene.camera.world_to_camera = sample_camera_pose(config.camera, cam_rng).world_to_camera;

    SpawnSpec spawn;
    spawn.volume = config.spawn_volume;
    spawn.catalog = assets.models;
    spawn.count = config.count;
    spawn.unique_models = config.unique_models;
    spawn.rest_on_plane = config.rest_on_plane;
    spawn.plane_height = config.support_plane ? config.support_plane->height : config.spawn_volume.lo.y;
    spawn.max_placement_attempts = config.max_placement_attempts;
    RandomStream spawn_rng = rng.child(2);
    SpawnResult spawned = spawn_objects(spawn, spawn_rng);
    fs.spawn_redraws = spawned.redraws;
    fs.accepted_overlaps = spawned.accepted_overlaps;
    for (const SpawnedObject &o : spawned.objects) {
        scene.instances.push_back({o.mesh, o.model_to_world, {}});
        fs.model_indices.push_back(o.model_index);
    }

    LightSpec lights = config.lights;
    lights.env_catalog = assets.environments;
    RandomStream light_rng = rng.child(3);
    LightSample ls = sample_lights(lights, light_rng);
    scene.environment = ls.environment;
    scene.point_lights = std::move(ls.lights);
    fs.env_index = ls.env_index;

    if (config.support_plane) {
        const SupportPlaneConfig &p = *config.support_plane;
        scene.support_plane = SupportPlane{p.height, MaterialMaps::uniform(p.albedo, p.roughness, p.metallic)};
    }
    return fs;
}

void synthesize_materials(FrameScene &fs, const DatasetConfig &config, const Assets &assets, int frame) {
    MaterialSpec spec = config.material_params;
    spec.catalog = assets.materials;
    fs.materials = assign_materials(fs.scene.instances.size(), spec, frame_stream(config.seed, frame).child(4));
    for (std::size_t i = 0; i < fs.materials.size(); ++i) fs.scene.instances[i].material = fs.materials[i].material;
}

ojson RunReport::to_json() const {
    ojson j;
    j["seed"] = seed;
    j["num_images"] = num_images;
    j["frames_completed"] = frames_completed;
    j["status"] = complete ? "complete" : "incomplete";
    if (failed_frame) {
        j["failed_frame"] = *failed_frame;
        j["failed_stage"] = failed_stage;
        j["error"] = error;
    }
    j["threads"] = threads;
    ojson stages = ojson::object();
    for (std::size_t i = 0; i < kStageCount; ++i) stages[stage_name(static_cast<Stage>(i))] = stage_seconds[i];
    j["stage_seconds"] = stages;
    j["total_seconds"] = total_seconds;
    j["wall_seconds"] = wall_seconds;
    j["spawn_redraws"] = spawn_redraws;
    j["accepted_overlaps"] = accepted_overlaps;
    j["samples"] = samples;
    j["rejected_samples"] = rejected_samples;
    j["instance_counts"] = instance_counts;
    return j;
}

FrameError::FrameError(const RunReport &report)
    : Error(fmt::format("frame {} failed in stage {}: {}", report.failed_frame.value_or(-1), report.failed_stage,
                        report.error)),
      report_(report) {}

std::string manifest_text(const fs::path &root, const RunReport &report) {
    std::vector<std::string> files;
    if (fs::is_directory(root))
        for (const auto &e : fs::recursive_directory_iterator(root)) {
            if (!e.is_regular_file()) continue;
            const std::string rel = e.path().lexically_relative(root).generic_string();
            if (rel == "MANIFEST" || rel == "report.json") continue;
            files.push_back(rel);
        }
    std::sort(files.begin(), files.end());
    std::string s = fmt::format("status: {}\nnum_images: {}\nframes_written: {}\n",
                                report.complete ? "complete" : "incomplete", report.num_images,
                                report.frames_completed);
    if (report.failed_frame)
        s += fmt::format("failed_frame: {}\nfailed_stage: {}\n", *report.failed_frame, report.failed_stage);
    s += fmt::format("files: {}\n", files.size());
    for (const auto &f : files) s += f + "\n";
    return s;
}

RunReport run_generate(const DatasetConfig &config, const GenerateHooks &hooks) {
    const auto wall0 = Clock::now();
    RunReport report;
    report.seed = config.seed;
    report.num_images = config.num_images;
    report.threads = thread_count();
    config.profile.validate();

    const auto load0 = Clock::now();
    if (hooks.on_stage) hooks.on_stage(-1, Stage::load_assets);
    const Assets assets = load_assets(config);
    fs::create_directories(config.output_root);
    BopWriter writer(config.output_root, config.scene_id, config.camera_intrinsics(), config.depth_scale);
    {
        std::map<int, std::shared_ptr<const Mesh>> models;
        for (const auto &m : assets.models) models[m->object_id] = m;
        writer.write_models(models);
    }
    report.stage_seconds[static_cast<std::size_t>(Stage::load_assets)] = seconds_since(load0);
    report.total_seconds = report.stage_seconds[static_cast<std::size_t>(Stage::load_assets)];

    std::mutex mu;
    std::map<int, FrameResult> pending;
    int next = 0;
    std::atomic<int> fail_at{INT_MAX};
    std::string fail_stage, fail_msg;

    auto record_failure = [&](int k, Stage stage, const std::string &msg) {
        // caller holds mu
        if (k < fail_at.load()) {
            fail_at = k;
            fail_stage = stage_name(stage);
            fail_msg = msg;
        }
        spdlog::error("frame {} failed in stage {}: {}", k, stage_name(stage), msg);
    };

    auto process = [&](int k) {
        if (k > fail_at.load()) return;
        FrameResult r;
        Stage stage = Stage::randomize;
        const auto busy0 = Clock::now();
        auto enter = [&](Stage s) {
            stage = s;
            if (hooks.on_stage) hooks.on_stage(k, s);
            return Clock::now();
        };
        auto leave = [&](Stage s, Clock::time_point t0) { r.seconds[static_cast<std::size_t>(s)] += seconds_since(t0); };
        try {
            auto t = enter(Stage::randomize);
            FrameScene fs = randomize_frame(config, assets, k);
            r.redraws = fs.spawn_redraws;
            r.overlaps = fs.accepted_overlaps;
            r.instances = static_cast<int>(fs.scene.instances.size());
            leave(Stage::randomize, t);

            t = enter(Stage::texture_synthesis);
            synthesize_materials(fs, config, assets, k);
            leave(Stage::texture_synthesis, t);

            t = enter(Stage::render);
            const FrameBuffers buffers = render_frame(fs.scene, config.profile, static_cast<std::uint64_t>(k),
                                                      config.seed, &r.stats);
            const Image8 rgb = post_process(buffers, config.profile);
            leave(Stage::render, t);

            t = enter(Stage::annotate);
            const FrameAnnotation ann = annotate_frame(fs.scene, buffers);
            leave(Stage::annotate, t);

            t = enter(Stage::export_frame);
            r.frame = make_bop_frame(fs.scene, buffers, ann, rgb, config.depth_scale);
            leave(Stage::export_frame, t);
        } catch (const std::exception &e) {
            std::lock_guard lock(mu);
            record_failure(k, stage, e.what());
            return;
        }
        r.busy = seconds_since(busy0);

        std::lock_guard lock(mu);
        pending.emplace(k, std::move(r));
        while (next < fail_at.load()) {
            auto it = pending.find(next);
            if (it == pending.end()) break;
            FrameResult &f = it->second;
            const auto t0 = Clock::now();
            try {
                writer.write_frame(next, f.frame);
            } catch (const std::exception &e) {
                record_failure(next, Stage::export_frame, e.what());
                break;
            }
            const double dt = seconds_since(t0);
            f.seconds[static_cast<std::size_t>(Stage::export_frame)] += dt;
            f.busy += dt;
            add_times(report, f);
            spdlog::debug("frame {} written", next);
            pending.erase(it);
            ++next;
        }
    };

    if (config.num_images >= report.threads && report.threads > 1)
        parallel_for(0, config.num_images, process);
    else
        for (int k = 0; k < config.num_images && k <= fail_at.load(); ++k) process(k);

    report.frames_completed = next;
    report.complete = fail_at.load() == INT_MAX;
    if (!report.complete) {
        report.failed_frame = fail_at.load();
        report.failed_stage = fail_stage;
        report.error = fail_msg;
    }
    writer.flush();
    report.wall_seconds = seconds_since(wall0);
    finish_run(config.output_root, report);
    if (!report.complete) throw FrameError(report);
    spdlog::info("wrote {} frames to {}", report.frames_completed, config.output_root.string());
    return report;
}

RunReport run_import_digital_twin(const TwinOptions &opt) {
    const auto wall0 = Clock::now();
    RunReport report;
    report.seed = opt.seed;
    report.threads = thread_count();
    opt.profile.validate();

    const auto load0 = Clock::now();
    const BopScene src = import_scene(opt.source_root, opt.scene_id);
    Assets assets;
    if (opt.config) assets = load_assets(*opt.config);
    if (assets.materials.empty())
        assets.materials.push_back(std::make_shared<const MaterialMaps>(MaterialMaps::uniform(Vec3(0.5), 0.5, 0.0)));
    if (assets.environments.empty())
        assets.environments.push_back(
            std::make_shared<const TextureMap>(TextureMap::constant_rgb(Vec3(1.0), ColorSpace::linear, 2, 1)));

    fs::create_directories(opt.output_root / "models");
    for (const auto &e : fs::directory_iterator(opt.source_root / "models"))
        if (e.is_regular_file())
            fs::copy_file(e.path(), opt.output_root / "models" / e.path().filename(),
                          fs::copy_options::overwrite_existing);
    BopWriter writer(opt.output_root, opt.scene_id, src.intrinsics, src.depth_scale);
    report.stage_seconds[static_cast<std::size_t>(Stage::load_assets)] = seconds_since(load0);
    report.total_seconds = report.stage_seconds[static_cast<std::size_t>(Stage::load_assets)];
    report.num_images = static_cast<int>(src.frames.size());

    LightSpec lights = opt.config ? opt.config->lights : LightSpec{};
    if (!opt.config) {
        lights.exposure_ev = {0, 0};
        lights.rotation = {0, 0};
        lights.extra_light_count = {0, 0};
    }
    lights.env_catalog = assets.environments;
    MaterialSpec mspec = opt.config ? opt.config->material_params : MaterialSpec{};
    mspec.catalog = assets.materials;

    for (const auto &[id, f] : src.frames) {
        FrameResult r;
        const auto busy0 = Clock::now();
        auto t = Clock::now();
        const RandomStream rng = frame_stream(opt.seed, id);
        Scene scene;
        scene.camera.intrinsics = f.intrinsics;
        scene.camera.intrinsics.width = src.intrinsics.width;
        scene.camera.intrinsics.height = src.intrinsics.height;
        const RigidTransform w2c =
            f.cam_R_w2c && f.cam_t_w2c ? pose_from_bop(*f.cam_R_w2c, *f.cam_t_w2c) : RigidTransform{};
        scene.camera.world_to_camera = w2c;
        const RigidTransform c2w = w2c.inverse();
        for (const BopGt &g : f.gt) {
            auto it = src.models.find(g.obj_id);
            if (it == src.models.end()) throw IoError(fmt::format("models/: no model for obj_id {}", g.obj_id));
            scene.instances.push_back({it->second, c2w * pose_from_bop(g.cam_R_m2c, g.cam_t_m2c), {}});
        }
        RandomStream light_rng = rng.child(3);
        LightSample ls = sample_lights(lights, light_rng);
        scene.environment = ls.environment;
        scene.point_lights = std::move(ls.lights);
        r.seconds[static_cast<std::size_t>(Stage::randomize)] = seconds_since(t);

        t = Clock::now();
        const auto mats = assign_materials(scene.instances.size(), mspec, rng.child(4));
        for (std::size_t i = 0; i < mats.size(); ++i) scene.instances[i].material = mats[i].material;
        r.seconds[static_cast<std::size_t>(Stage::texture_synthesis)] = seconds_since(t);

        t = Clock::now();
        const FrameBuffers buffers = render_frame(scene, opt.profile, static_cast<std::uint64_t>(id), opt.seed,
                                                  &r.stats);
        const Image8 rgb = post_process(buffers, opt.profile);
        r.seconds[static_cast<std::size_t>(Stage::render)] = seconds_since(t);

        t = Clock::now();
        const FrameAnnotation ann = annotate_frame(scene, buffers);
        r.seconds[static_cast<std::size_t>(Stage::annotate)] = seconds_since(t);

        t = Clock::now();
        BopFrame out = make_bop_frame(scene, buffers, ann, rgb, src.depth_scale);
        out.intrinsics = f.intrinsics;
        out.cam_R_w2c = f.cam_R_w2c;
        out.cam_t_w2c = f.cam_t_w2c;
        out.gt = f.gt;
        writer.write_frame(id, out);
        r.seconds[static_cast<std::size_t>(Stage::export_frame)] = seconds_since(t);
        r.instances = static_cast<int>(scene.instances.size());
        r.busy = seconds_since(busy0);
        add_times(report, r);
        ++report.frames_completed;
    }
    writer.flush();
    report.complete = true;
    report.wall_seconds = seconds_since(wall0);
    finish_run(opt.output_root, report);
    return report;
}

void resample_texture_file(const fs::path &exemplar, const fs::path &out, int width, int height,
                           const ResampleOptions &options, std::uint64_t seed) {
    if (width < 1 || height < 1) throw SpecError("output size must be positive");
    const TextureMap ex = load_texture(exemplar, ColorSpace::srgb);
    RandomStream rng(seed);
    const TextureMap result = resample(ex, width, height, options, rng);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    std::string ext = out.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".hdr")
        write_hdr(out, rgb_only(result));
    else
        write_png(out, quantize(result));
}

}  // namespace cadsynth
