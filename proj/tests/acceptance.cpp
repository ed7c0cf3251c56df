// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cadsynth/annotate.hpp"
#include "cadsynth/bop.hpp"
#include "cadsynth/bvh.hpp"
#include "cadsynth/defects.hpp"
#include "cadsynth/noise.hpp"
#include "cadsynth/parallel.hpp"
#include "cadsynth/pipeline.hpp"
#include "cadsynth/randomize.hpp"
#include "cadsynth/render.hpp"
#include "cadsynth/resample.hpp"
#include "reference_noise.hpp"
#include "test_support.hpp"

using namespace cadsynth;
using namespace cadsynth::testing;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string &what) {
        if (pass) detail += (detail.empty() ? "" : "; ") + what;
    }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Mat3 rot_x(double a) {
    return Mat3::from_rows({1, 0, 0}, {0, std::cos(a), -std::sin(a)}, {0, std::sin(a), std::cos(a)});
}

Vec3 rand_vec(RandomStream &rng, double lo, double hi) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

TextureMap random_rgb(int w, int h, std::uint64_t seed, int levels = 0) {
    TextureMap t(w, h, 3);
    RandomStream rng(seed);
    for (float &v : t.data())
        v = levels > 0 ? static_cast<float>(rng.uniform_int(0, levels - 1)) / static_cast<float>(levels - 1)
                       : static_cast<float>(rng.uniform());
    return t;
}

/// Blotchy color texture: a few octaves of noise per channel.
TextureMap structured_rgb(int w, int h, std::uint64_t seed) {
    TextureMap t(w, h, 3);
    for (int c = 0; c < 3; ++c) {
        NoiseParams p;
        p.seed = seed + static_cast<std::uint64_t>(c);
        p.frequency = 6;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                t.at(x, y, c) = static_cast<float>(0.5 + 0.5 * fbm((x + 0.5) / w, (y + 0.5) / h, p));
    }
    return t;
}

// 1. Furnace

Outcome furnace() {
    Outcome o;
    const Vec3 env{0.5};
    Scene s;
    RigidTransform m2w;
    m2w.rotation = rot_x(-kPi / 2);
    s.instances.push_back(instance_of(make_sphere(1.0, 96, 48), m2w, MaterialMaps::uniform(Vec3(1.0), 1.0, 0.0, 0.0)));
    s.camera = camera_at(front_view(3.0), 64, 64, 0.9);
    s.environment = EnvironmentLight::constant(env);
    const auto t0 = Clock::now();
    const FrameBuffers f = render_frame(s, RenderProfile::path_traced(512), 0, 1);
    const double secs = seconds_since(t0);
    double worst = 0, sum = 0;
    int n = 0;
    for (std::size_t i = 0; i < f.radiance.size(); ++i) {
        if (!f.instance_id[i]) continue;
        for (double v : {f.radiance[i].x, f.radiance[i].y, f.radiance[i].z}) worst = std::max(worst, std::abs(v / env.x - 1));
        sum += f.radiance[i].y;
        ++n;
    }
    o.require(n > 1000, fmt::format("only {} sphere pixels", n));
    o.require(worst <= 0.015, fmt::format("worst pixel deviation {:.4f} > 0.015", worst));
    o.require(secs < 60, fmt::format("runtime {:.1f} s >= 60 s", secs));
    o.note(fmt::format("{} sphere pixels, mean {:.5f}, worst deviation {:.4f}, {:.2f} s", n, sum / n, worst, secs));
    return o;
}

// 2. Lambert point light

Outcome lambert() {
    Outcome o;
    Scene s;
    s.support_plane = SupportPlane{0.0, MaterialMaps::uniform(Vec3(0.6), 1.0, 0.0, 0.0)};
    s.camera = camera_at(look_at({0, 1.0, -0.3}, {}, {0, 1, 0}), 33, 33, 0.2);
    const Vec3 lp{0.4, 0.8, 0.0};
    const double intensity = 2.0;
    s.point_lights.push_back({lp, Vec3(intensity), 0.0});
    const FrameBuffers f = render_frame(s, RenderProfile::path_traced(256), 0, 5);
    const RenderScene rs(s);
    double worst = 0;
    for (const auto &[x, y] : std::vector<std::pair<int, int>>{{16, 16}, {4, 4}, {28, 8}, {10, 27}}) {
        const auto hit = rs.intersect(rs.camera_ray(x, y));
        if (!hit) {
            o.require(false, fmt::format("pixel ({}, {}) misses the plane", x, y));
            continue;
        }
        const Vec3 to = lp - hit->position;
        const double d2 = dot(to, to);
        const double expected = 0.6 / kPi * intensity * (to.y / std::sqrt(d2)) / d2;
        const double rel = std::abs(f.radiance[f.index(x, y)].x / expected - 1);
        worst = std::max(worst, rel);
    }
    o.require(worst <= 0.02, fmt::format("relative error {:.4f} > 0.02", worst));
    o.note(fmt::format("worst relative error {:.4f} over 4 pixels", worst));
    return o;
}

// 3. BVH

std::optional<double> oracle_hit(const BvhTriangle &tri, const Vec3 &o, const Vec3 &d) {
    const Vec3 n = cross(tri.v1 - tri.v0, tri.v2 - tri.v0);
    const double denom = dot(n, d);
    if (std::abs(denom) < 1e-14) return std::nullopt;
    const double t = dot(n, tri.v0 - o) / denom;
    if (t <= 0) return std::nullopt;
    const Vec3 p = o + d * t;
    const double e0 = dot(n, cross(tri.v1 - tri.v0, p - tri.v0));
    const double e1 = dot(n, cross(tri.v2 - tri.v1, p - tri.v1));
    const double e2 = dot(n, cross(tri.v0 - tri.v2, p - tri.v2));
    if (e0 < 0 || e1 < 0 || e2 < 0) return std::nullopt;
    return t;
}

Outcome bvh() {
    Outcome o;
    RandomStream rng(3);
    std::vector<BvhTriangle> tris;
    for (std::uint32_t i = 0; i < 2000; ++i) {
        const Vec3 c = rand_vec(rng, -1, 1);
        tris.push_back({c + rand_vec(rng, -0.12, 0.12), c + rand_vec(rng, -0.12, 0.12), c + rand_vec(rng, -0.12, 0.12),
                        i % 11, i});
    }
    const Bvh tree(tris);
    int hits = 0, mismatches = 0;
    double worst_dt = 0;
    for (int r = 0; r < 1000; ++r) {
        const Vec3 origin = rand_vec(rng, -2, 2);
        const Vec3 dir = normalize(rand_vec(rng, -0.4, 0.4) - origin);
        double best = std::numeric_limits<double>::infinity();
        std::optional<std::size_t> best_i;
        for (std::size_t i = 0; i < tris.size(); ++i)
            if (auto t = oracle_hit(tris[i], origin, dir); t && *t < best) {
                best = *t;
                best_i = i;
            }
        const auto h = tree.intersect(Ray{origin, dir});
        if (h.has_value() != best_i.has_value()) {
            ++mismatches;
            continue;
        }
        if (!h) continue;
        ++hits;
        if (h->instance != tris[*best_i].instance || h->triangle != tris[*best_i].triangle) ++mismatches;
        worst_dt = std::max(worst_dt, std::abs(h->t - best));
    }
    o.require(mismatches == 0, fmt::format("{} rays disagree on hit or instance", mismatches));
    o.require(worst_dt <= 1e-6, fmt::format("max |dt| {:.3g} > 1e-6", worst_dt));
    o.require(hits >= 300, fmt::format("only {} hits", hits));
    o.note(fmt::format("1000 rays, {} hits, 0 mismatches, max |dt| {:.2g}", hits, worst_dt));
    return o;
}

// 4. Resampler

Outcome resampler() {
    Outcome o;
    {  // (a)
        const TextureMap ex = random_rgb(32, 32, 1);
        const ResampleState s = resample_init(ex, 32, 32, 32, [](int, int) { return Int2{0, 0}; });
        o.require(s.realize() == ex, "(a) identity init does not reproduce the exemplar");
        RandomStream rng(2);
        ResampleOptions zero;
        zero.iterations = 0;
        zero.patch_size = 64;
        const TextureMap out = resample(ex, 32, 32, zero, rng);
        int foreign = 0;  // zero iterations still yield pure exemplar texels
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                bool found = false;
                for (int v = 0; v < 32 && !found; ++v)
                    for (int u = 0; u < 32 && !found; ++u)
                        found = out.at(x, y, 0) == ex.at(u, v, 0) && out.at(x, y, 1) == ex.at(u, v, 1) &&
                                out.at(x, y, 2) == ex.at(u, v, 2);
                foreign += !found;
            }
        o.require(foreign == 0, "(a) zero-iteration output contains non-exemplar texels");
    }
    {  // (b)
        int violations = 0;
        for (int inst = 0; inst < 50; ++inst) {
            const TextureMap ex = random_rgb(16, 16, 100 + inst, 4);
            RandomStream rng(200 + inst);
            ResampleState s = with_fixed_radius(resample_init(ex, 16, 16, 4, rng, 2));
            for (int it = 0; it < 4; ++it) {
                IterationStats st;
                s = resample_iterate(s, &st);
                for (std::size_t i = 0; i < st.chosen_difference.size(); ++i)
                    violations += st.chosen_difference[i] > st.previous_difference[i];
            }
        }
        o.require(violations == 0, fmt::format("(b) {} per-pixel increases", violations));
    }
    {  // (c)
        int mismatches = 0;
        for (int k = 0; k < 10; ++k) {
            const TextureMap ex = random_rgb(8, 8, 300 + k);
            RandomStream rng(400 + k);
            const ResampleState s = resample_init(ex, 8, 8, 3, rng);
            const TextureMap cur = s.realize();
            for (int trial = 0; trial < 64; ++trial) {
                const Int2 p{trial % 8, trial / 8};
                const Int2 cand{(trial * 3 + k) % 8, (trial * 5 + 1) % 8};
                for (int r : {1, 2, 3}) {
                    double sum = 0;
                    for (int oy = -r; oy <= r; ++oy)
                        for (int ox = -r; ox <= r; ++ox) {
                            const int px = ((p.x + ox) % 8 + 8) % 8, py = ((p.y + oy) % 8 + 8) % 8;
                            const int qx = ((cand.x + ox) % 8 + 8) % 8, qy = ((cand.y + oy) % 8 + 8) % 8;
                            double texel = 0;
                            for (int c = 0; c < 3; ++c) {
                                const double d = static_cast<double>(cur.at(px, py, c)) - ex.at(qx, qy, c);
                                texel += d * d;
                            }
                            sum += texel;
                        }
                    mismatches += neighborhood_difference(s, p, cand, r) != sum;
                }
            }
        }
        o.require(mismatches == 0, fmt::format("(c) {} oracle mismatches", mismatches));
    }
    // (d)
    o.require(ResampleOptions{}.iterations == 15, "(d) default iteration count is not 15");
    double secs = 0;
    {  // (e)
        const TextureMap ex = structured_rgb(128, 128, 9);
        RandomStream rng(10);
        std::vector<IterationStats> trace;
        const auto t0 = Clock::now();
        const TextureMap out = resample(ex, 256, 256, ResampleOptions{}, rng, &trace);
        secs = seconds_since(t0);
        o.require(out.width() == 256 && out.height() == 256, "(e) wrong output size");
        o.require(trace.size() == 15, fmt::format("(e) {} iterations run", trace.size()));
        o.require(secs < 10, fmt::format("(e) {:.2f} s >= 10 s", secs));
    }
    o.note(fmt::format("(a)-(d) exact; (e) 256x256, 15 iterations in {:.2f} s on {} threads", secs, thread_count()));
    return o;
}

// 5. Defects

Outcome defects() {
    Outcome o;
    MaterialMaps m = MaterialMaps::uniform(Vec3(0.5), 0.4, 0.2);
    m.albedo = random_rgb(48, 48, 7);
    m.albedo.set_color_space(ColorSpace::srgb);
    m.roughness = TextureMap(48, 48, 1);
    RandomStream fill(8);
    for (float &v : m.roughness.data()) v = static_cast<float>(fill.uniform(0.2, 0.8));

    o.require(apply_rust(m, TextureMap::constant_scalar(0.0, 48, 48), {0.3, 0.1, 0}, {0.5, 0.2, 0}, {}) == m,
              "rust with zero mask changed the material");
    RandomStream rng(9);
    o.require(apply_scratches(m, 0, {1, 3}, {0.2, 0.5}, rng) == m, "zero scratches changed the material");
    NoiseParams polish;
    o.require(apply_polish_lines(m, 0.7, 8.0, polish, 0.0) == m, "zero-strength polish changed the material");
    o.require(hsv_shift(m.albedo, 0, 0, 0) == m.albedo, "zero HSV shift changed the albedo");

    NoiseParams p;
    p.seed = 17;
    double previous = 2.0, worst = 0;
    for (double threshold : {-0.4, -0.2, 0.0, 0.2, 0.4}) {
        p.threshold = threshold;
        const int n = 256;
        const double coverage = mask_coverage(defect_mask(n, n, p));
        int count = 0;
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) count += fbm((x + 0.5) / n, (y + 0.5) / n, p) > threshold;
        const double oracle = count / double(n * n);
        worst = std::max(worst, std::abs(coverage - oracle));
        o.require(std::abs(coverage - oracle) <= 0.01,
                  fmt::format("threshold {}: coverage {:.4f} vs oracle {:.4f}", threshold, coverage, oracle));
        o.require(coverage <= previous, fmt::format("coverage increased at threshold {}", threshold));
        previous = coverage;
    }
    o.note(fmt::format("identities exact; coverage monotone, max |coverage - oracle| {:.4f}", worst));
    return o;
}

// 6. Noise

Outcome noise() {
    Outcome o;
    RandomStream rng(1);
    const SimplexNoise n(42);
    double lo = 1, hi = -1;
    for (int i = 0; i < 1000000; ++i) {
        const double v = n(rng.uniform(-1000, 1000), rng.uniform(-1000, 1000));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    o.require(lo >= -1 && hi <= 1, fmt::format("range [{}, {}] leaves [-1, 1]", lo, hi));
    double worst = 0;
    for (int i = 0; i < 16; ++i) {
        const double x = -7.3 + 1.91 * i + 0.013 * i * i, y = 4.1 - 0.77 * i;
        worst = std::max(worst, std::abs(n(x, y) - reference::simplex(n.permutation(), x, y)));
    }
    o.require(worst <= 1e-6, fmt::format("reference deviation {:.3g}", worst));
    o.require(simplex2(0.3, 0.7, 5) == simplex2(0.3, 0.7, 5), "not deterministic");
    o.note(fmt::format("1e6 points in [{:.4f}, {:.4f}]; 16 probes, max deviation {:.2g}", lo, hi, worst));
    return o;
}

// 7. BOP round trip

BopScene bop_scene() {
    BopScene out;
    out.scene_id = 2;
    auto sphere = std::make_shared<const Mesh>(make_sphere(0.1, 24, 12, 1));
    auto box = std::make_shared<const Mesh>(make_box(Vec3(0.05, 0.08, 0.03), 5));
    out.models = {{1, sphere}, {5, box}};
    RandomStream rng(12);
    for (int f = 0; f < 4; ++f) {
        Scene s;
        const CameraSample cam = sample_camera_pose(CameraRangeSpec{}, rng);
        s.camera = camera_at(cam.world_to_camera, 64, 48);
        RigidTransform a, b;
        a.rotation = sample_uniform_rotation(rng);
        a.translation = rand_vec(rng, -0.1, 0.1);
        b.rotation = sample_uniform_rotation(rng);
        b.translation = rand_vec(rng, -0.1, 0.1);
        s.instances.push_back({sphere, a, MaterialMaps::uniform(Vec3(0.6), 0.4, 0)});
        s.instances.push_back({box, b, MaterialMaps::uniform(Vec3(0.3), 0.4, 0)});
        s.environment = EnvironmentLight::constant(Vec3(0.8));
        const FrameBuffers fb = render_frame(s, RenderProfile::preview(), static_cast<std::uint64_t>(f), 1);
        const FrameAnnotation ann = annotate_frame(s, fb);
        out.intrinsics = s.camera.intrinsics;
        out.frames[f * 3] = make_bop_frame(s, fb, ann, post_process(fb, RenderProfile::preview()), kDefaultDepthScale);
    }
    return out;
}

std::map<std::string, std::string> json_files(const fs::path &root) {
    std::map<std::string, std::string> files;
    for (const auto &e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() == ".json")
            files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
    return files;
}

Outcome bop_round_trip() {
    Outcome o;
    TempDir a("bop_a"), b("bop_b");
    const BopScene scene = bop_scene();
    export_scene(scene, a.path());
    export_scene(import_scene(a.path(), scene.scene_id), b.path());
    const auto ja = json_files(a.path()), jb = json_files(b.path());
    o.require(ja.size() >= 5, fmt::format("only {} JSON files", ja.size()));
    for (const auto &[name, text] : ja) {
        const auto it = jb.find(name);
        o.require(it != jb.end() && it->second == text, name + " differs after re-export");
    }

    RandomStream rng(13);
    FrameBuffers fb(1000, 1);
    for (std::size_t i = 0; i < 1000; ++i) {
        fb.depth[i] = rng.uniform(0.05, 6.5);
        fb.instance_id[i] = 1;
    }
    const Image16 d = encode_depth(fb, kDefaultDepthScale);
    double worst = 0;
    for (std::size_t i = 0; i < 1000; ++i)
        worst = std::max(worst, std::abs(decode_depth_mm(d.pixels[i], kDefaultDepthScale) - fb.depth[i] * 1000));
    o.require(worst <= kDefaultDepthScale / 2 + 1e-9, fmt::format("depth error {:.4f} mm", worst));

    InstanceAnnotation one_meter;
    one_meter.pose_m2c.translation = {0, 0, 1.0};
    o.require(to_bop_gt(one_meter).cam_t_m2c.z == 1000.0, "1 m does not convert to 1000.0 mm");
    o.note(fmt::format("{} JSON files byte-identical; max depth error {:.4f} mm; 1 m -> 1000.0 mm", ja.size(), worst));
    return o;
}

// 8. Annotation consistency

void write_meshes(const TempDir &dir) {
    write_ply(make_box(Vec3(0.03, 0.02, 0.04)), dir / "block.ply");
    write_ply(make_sphere(0.03, 32, 16), dir / "ball.ply");
    write_ply(make_box(Vec3(0.06, 0.01, 0.01)), dir / "rod.ply");
}

Outcome annotation() {
    Outcome o;
    TempDir dir("ann");
    write_meshes(dir);
    const json doc = {{"seed", 5},
                      {"resolution", {256, 256}},
                      {"camera", {{"r", {0.35, 0.6}}}},
                      {"spawn", {{"models", {"block.ply", "ball.ply", "rod.ply"}}, {"count", {1, 10}}}},
                      {"lights", {{"environments", {{{"constant", {0.7, 0.7, 0.7}}}}}}},
                      {"output_root", "out"}};
    const DatasetConfig cfg = parse_config(doc, dir.path());
    const Assets assets = load_assets(cfg);
    int checked = 0, outside = 0, partition_errors = 0;
    for (int frame = 0; frame < 100; ++frame) {
        const FrameScene fs = randomize_frame(cfg, assets, frame);
        const Scene &s = fs.scene;
        const FrameBuffers fb = render_frame(s, RenderProfile::preview(), static_cast<std::uint64_t>(frame), cfg.seed);
        const FrameAnnotation ann = annotate_frame(s, fb);
        for (std::size_t p = 0; p < fb.instance_id.size(); ++p) {
            int owners = 0;
            for (const Image8 &m : ann.visible_masks) owners += m.pixels[p] != 0;
            partition_errors += owners != (fb.instance_id[p] != 0 ? 1 : 0);
        }
        for (std::size_t i = 0; i < s.instances.size(); ++i) {
            const InstanceAnnotation &a = ann.instances[i];
            const Vec3 c = a.pose_m2c.apply(s.instances[i].mesh->bounds().center());
            if (a.px_count_all == 0 || c.z <= 0) continue;
            const Vec2 uv = project_point(s.camera.intrinsics, c);
            // bbox_obj is clipped to the image
            if (uv.x < -0.5 || uv.y < -0.5 || uv.x > s.camera.intrinsics.width - 0.5 ||
                uv.y > s.camera.intrinsics.height - 0.5)
                continue;
            ++checked;
            const BBox &b = a.bbox_obj;
            const bool inside = uv.x >= b[0] - 2.0 && uv.x <= b[0] + b[2] + 2.0 && uv.y >= b[1] - 2.0 &&
                                uv.y <= b[1] + b[3] + 2.0;
            outside += !inside;
        }
    }
    o.require(checked >= 100, fmt::format("only {} centroids checked", checked));
    o.require(outside == 0, fmt::format("{} centroids outside bbox_obj + 2 px", outside));
    o.require(partition_errors == 0, fmt::format("{} pixels break the partition", partition_errors));

    Scene s;
    s.camera = camera_at(front_view(2.0), 128, 128);
    s.instances.push_back(instance_of(make_sphere(0.5, 64, 32, 3)));
    s.instances.push_back(instance_of(make_box(Vec3(1.0, 1.0, 0.01), 9), translation({1.0 + 1e-3, 0, -1})));
    const FrameAnnotation half = annotate_frame(s, render_frame(s, RenderProfile::preview(), 0, 1));
    const double vf = half.instances[0].visib_fract;
    o.require(std::abs(vf - 0.5) <= 0.03, fmt::format("half-occluded visib_fract {:.4f}", vf));
    o.note(fmt::format("100 frames, {} centroids inside bbox_obj + 2 px, partition exact; occlusion visib_fract {:.4f}",
                       checked, vf));
    return o;
}

// 9. Determinism

json generate_doc() {
    return {{"seed", 2024},
            {"num_images", 6},
            {"resolution", {80, 60}},
            {"profile", {{"mode", "path_traced"}, {"spp", 8}}},
            {"camera", {{"r", {0.4, 0.6}}}},
            {"spawn", {{"models", {"block.ply", "ball.ply", "rod.ply"}}, {"count", {2, 5}}}},
            {"lights", {{"environments", {{{"constant", {0.8, 0.8, 0.8}}}, "sky.png"}}, {"extra_light_count", {0, 2}},
                        {"exposure_ev", {-0.5, 0.5}}}},
            {"materials", {{"catalog", {{{"albedo", "metal.png"}, {"roughness", 0.3}, {"metallic", 1.0}},
                                        {{"albedo", {0.2, 0.4, 0.7}}}}},
                           {"hsv", {{"hue", {-20, 20}}, {"saturation", {-0.1, 0.1}}}},
                           {"probabilities", {{"rust", 0.5}, {"scratches", 0.5}, {"polish", 0.5}, {"resample", 0.5}}},
                           {"resample", {{"iterations", 3}, {"patch_size", 16}}},
                           {"defect_texture_size", 64}}}};
}

std::map<std::string, std::string> tree_without_report(const fs::path &root) {
    std::map<std::string, std::string> files;
    for (const auto &e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
    files.erase("report.json");
    return files;
}

Outcome determinism() {
    Outcome o;
    TempDir dir("det");
    write_meshes(dir);
    Image8 tex(64, 64, 3);
    const TextureMap metal = structured_rgb(64, 64, 31);
    for (std::size_t i = 0; i < tex.pixels.size(); ++i)
        tex.pixels[i] = static_cast<std::uint8_t>(std::lround(metal.data()[i] * 255));
    write_png(dir / "metal.png", tex);
    write_png(dir / "sky.png", Image8(32, 16, 3, 180));
    write_file(dir / "config.json", generate_doc().dump(2));

    std::vector<std::map<std::string, std::string>> trees;
    for (const auto &[threads, out] : std::vector<std::pair<int, std::string>>{{1, "a"}, {1, "b"}, {8, "c"}, {8, "d"}}) {
        ScopedThreadCount tc(threads);
        DatasetConfig cfg = validate_config(dir / "config.json");
        cfg.output_root = dir / out;
        run_generate(cfg);
        trees.push_back(tree_without_report(dir / out));
    }
    o.require(trees[0] == trees[1], "two 1-thread runs differ");
    o.require(trees[2] == trees[3], "two 8-thread runs differ");
    o.require(trees[0] == trees[2], "1-thread and 8-thread runs differ");
    o.require(trees[0].contains("train_pbr/000000/rgb/000005.png"), "frames missing");
    o.note(fmt::format("{} files byte-identical across 2x1 and 2x8 thread runs", trees[0].size()));
    return o;
}

// 10. Scaling

Scene scaling_scene(int w, int h) {
    Scene s;
    s.support_plane = SupportPlane{};
    s.environment = EnvironmentLight::constant(Vec3(0.6));
    s.point_lights.push_back({{0.3, 1.2, -0.4}, Vec3(3.0), 0.0});
    RandomStream rng(77);
    for (int i = 0; i < 6; ++i) {
        RigidTransform m2w;
        m2w.rotation = sample_uniform_rotation(rng);
        m2w.translation = {rng.uniform(-0.25, 0.25), 0.06, rng.uniform(-0.25, 0.25)};
        const Mesh mesh = i % 2 ? make_sphere(0.06, 48, 24) : make_box(Vec3(0.05, 0.04, 0.06));
        s.instances.push_back(instance_of(mesh, m2w, MaterialMaps::uniform(Vec3(0.3 + 0.1 * i), 0.2 + 0.1 * i, i % 3 == 0 ? 1.0 : 0.0)));
    }
    s.camera = Camera{CameraIntrinsics::from_fov(w, h, 1.0), look_at({0.0, 0.6, -0.8}, {}, {0, 1, 0})};
    return s;
}

Outcome scaling() {
    Outcome o;
    struct Run {
        int w, h, spp;
        double secs;
    };
    std::vector<Run> runs;
    for (const auto &[w, h] : std::vector<std::pair<int, int>>{{160, 90}, {320, 180}})
        for (int spp : {64, 256}) runs.push_back({w, h, spp, std::numeric_limits<double>::infinity()});
    render_frame(scaling_scene(16, 9), RenderProfile::path_traced(1), 0, 1);  // warm up lookup tables
    // interleaved rounds, minimum per configuration
    for (int round = 0; round < 3; ++round)
        for (Run &r : runs) {
            const Scene s = scaling_scene(r.w, r.h);
            const auto t0 = Clock::now();
            render_frame(s, RenderProfile::path_traced(r.spp), 0, 1);
            r.secs = std::min(r.secs, seconds_since(t0));
        }
    // least-squares fit of t = k * spp * pixels
    double num = 0, den = 0;
    for (const Run &r : runs) {
        const double work = double(r.w) * r.h * r.spp;
        num += work * r.secs;
        den += work * work;
    }
    const double k = num / den;
    double worst = 0;
    std::string table;
    for (const Run &r : runs) {
        const double predicted = k * r.w * r.h * r.spp;
        const double rel = r.secs / predicted - 1;
        worst = std::max(worst, std::abs(rel));
        table += fmt::format(" {}x{}@{}={:.2f}s({:+.0f}%)", r.w, r.h, r.spp, r.secs, 100 * rel);
    }
    o.require(worst <= 0.25, fmt::format("deviation from linear {:.1f}% >", 100 * worst) + table);
    o.note(fmt::format("max deviation from linear {:.1f}%;", 100 * worst) + table);
    return o;
}

// 11. Profile contrast

Outcome profile_contrast() {
    Outcome o;
    Scene s;
    s.environment = EnvironmentLight::constant(Vec3(0.0));
    s.instances.push_back(instance_of(make_sphere(0.5, 96, 48, 1), translation({-0.55, 0, 0}),
                                      MaterialMaps::uniform(Vec3(0.95), 0.05, 1.0)));
    s.instances.push_back(instance_of(make_sphere(0.5, 96, 48, 2), translation({0.55, 0, 0}),
                                      MaterialMaps::uniform(Vec3(0.8), 0.9, 0.0, 0.0)));
    s.point_lights.push_back({{1.5, 1.0, -1.5}, Vec3(6.0), 0.0});
    s.camera = Camera{CameraIntrinsics::from_fov(96, 64, 0.9), look_at({0, 0.2, -2.4}, {}, {0, 1, 0})};

    // probe: the mirror pixel whose reflection lands on the most directly lit point of the diffuse sphere
    const RenderScene rs(s);
    int px = -1, py = -1;
    double best = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 96; ++x) {
            const Ray ray = rs.camera_ray(x, y);
            const auto hit = rs.intersect(ray);
            if (!hit || hit->instance != std::optional<std::size_t>(0)) continue;
            const Vec3 n = hit->shading_normal;
            const Vec3 r = ray.dir - n * (2 * dot(ray.dir, n));
            const auto second = rs.intersect(Ray{hit->position + n * 1e-6, r});
            if (!second || second->instance != std::optional<std::size_t>(1)) continue;
            const double lit = direct_lighting(rs, *second, -r, nullptr).y;
            if (lit > best) {
                best = lit;
                px = x;
                py = y;
            }
        }
    o.require(px >= 0, "no mirror pixel reflects the lit diffuse sphere");
    if (px < 0) return o;

    const FrameBuffers preview = render_frame(s, RenderProfile::preview(), 0, 1);
    std::vector<double> samples;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const FrameBuffers f = render_frame(s, RenderProfile::path_traced(64), 0, seed);
        samples.push_back(f.radiance[f.index(px, py)].y);
    }
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    double var = 0;
    for (double v : samples) var += (v - mean) * (v - mean);
    const double sigma = std::sqrt(var / (samples.size() - 1));
    const double pv = preview.radiance[preview.index(px, py)].y;
    const double diff = mean - pv;
    // noise floor: standard deviation of one path-traced estimate, floored at one 8-bit quantization step
    const double floor = std::max(sigma, 1.0 / 255);
    o.require(diff > 5 * floor, fmt::format("difference {:.4f} <= 5 x noise floor {:.4f}", diff, floor));
    o.note(fmt::format("pixel ({}, {}): path traced {:.4f}, preview {:.4f}, noise floor {:.4f}, ratio {:.1f}", px, py,
                       mean, pv, floor, diff / floor));
    return o;
}

// 12. Sampling ranges

Outcome sampling() {
    Outcome o;
    CameraRangeSpec spec;
    spec.theta = {0.4, 1.1};
    spec.phi = {0.5, 2.5};
    spec.r = {0.6, 1.3};
    int outside = 0;
    for (int i = 0; i < 10000; ++i) {
        RandomStream rng = frame_stream(99, i).child(1);
        const CameraSample c = sample_camera_pose(spec, rng);
        outside += !spec.theta.contains(c.theta) || !spec.phi.contains(c.phi) || !spec.r.contains(c.r);
        outside += std::abs(length(c.eye - spec.target) - c.r) > 1e-9;
    }
    o.require(outside == 0, fmt::format("{} camera samples outside their ranges", outside));

    LightSpec lights;
    for (int i = 0; i < 5; ++i)
        lights.env_catalog.push_back(std::make_shared<const TextureMap>(TextureMap::constant_rgb(Vec3(0.1 * (i + 1)), ColorSpace::linear, 2, 1)));
    std::vector<int> hist(5, 0);
    for (int i = 0; i < 10000; ++i) {
        RandomStream rng = frame_stream(99, i).child(3);
        ++hist[sample_lights(lights, rng).env_index];
    }
    double worst = 0;
    for (int h : hist) worst = std::max(worst, std::abs(h / 10000.0 - 0.2));
    o.require(worst <= 0.02, fmt::format("environment frequency off by {:.4f}", worst));
    o.note(fmt::format("1e4 camera draws in range; env frequencies within {:.4f} of 0.2", worst));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"furnace", furnace},
        {"lambert point light", lambert},
        {"bvh vs brute force", bvh},
        {"resampler", resampler},
        {"defect generators", defects},
        {"noise range and reference", noise},
        {"bop round trip", bop_round_trip},
        {"annotation consistency", annotation},
        {"end-to-end determinism", determinism},
        {"render time scaling", scaling},
        {"profile contrast", profile_contrast},
        {"sampling ranges", sampling},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %2zu %-26s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
