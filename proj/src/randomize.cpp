#include "cadsynth/randomize.hpp"

#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "cadsynth/defects.hpp"
#include "cadsynth/errors.hpp"
#include "cadsynth/resample.hpp"

namespace cadsynth {

namespace {

void require_ordered(const Interval &i, const char *name) {
    if (!std::isfinite(i.lo) || !std::isfinite(i.hi)) throw SpecError(std::string(name) + ": bounds must be finite");
    if (!i.ordered()) throw SpecError(std::string(name) + ": min > max");
}

void require_ordered(const IntRange &i, const char *name) {
    if (!i.ordered()) throw SpecError(std::string(name) + ": min > max");
}

void require_probability(double p, const char *name) {
    if (!(p >= 0.0 && p <= 1.0)) throw SpecError(std::string(name) + ": probability must be in [0,1]");
}

Vec3 uniform_in(const Aabb &box, RandomStream &rng) {
    const double x = rng.uniform(box.lo.x, box.hi.x);
    const double y = rng.uniform(box.lo.y, box.hi.y);
    const double z = rng.uniform(box.lo.z, box.hi.z);
    return {x, y, z};
}

Aabb world_bounds(const Mesh &mesh, const RigidTransform &xf) {
    Aabb b;
    for (const Vec3 &v : mesh.vertices) b.expand(xf.apply(v));
    return b;
}

// purpose tags for per-instance sub-streams
enum : std::uint64_t { kBase = 1, kResample, kHsv, kRust, kScratch, kPolish };

}  // namespace

void CameraRangeSpec::validate() const {
    require_ordered(theta, "camera.theta");
    require_ordered(phi, "camera.phi");
    require_ordered(r, "camera.r");
    if (theta.lo < 0 || theta.hi > kPi) throw SpecError("camera.theta: range must lie inside [0, pi]");
    if (!(r.lo > 0)) throw SpecError("camera.r: minimum must be > 0");
}

CameraSample sample_camera_pose(const CameraRangeSpec &spec, RandomStream &rng) {
    spec.validate();
    CameraSample s;
    s.theta = rng.uniform(spec.theta.lo, spec.theta.hi);
    s.phi = rng.uniform(spec.phi.lo, spec.phi.hi);
    s.r = rng.uniform(spec.r.lo, spec.r.hi);
    s.eye = spherical_to_cartesian(s.theta, s.phi, s.r, spec.target);
    s.world_to_camera = look_at(s.eye, spec.target, Vec3(0, 1, 0));
    return s;
}

Mat3 sample_uniform_rotation(RandomStream &rng) {
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const double x = a * std::sin(2 * kPi * u2), y = a * std::cos(2 * kPi * u2);
    const double z = b * std::sin(2 * kPi * u3), w = b * std::cos(2 * kPi * u3);
    return Mat3::from_rows({1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
                           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
                           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)});
}

void SpawnSpec::validate() const {
    require_ordered(count, "spawn.count");
    if (count.lo < 0) throw SpecError("spawn.count: minimum must be >= 0");
    if (volume.empty()) throw SpecError("spawn.volume: empty box");
    if (max_placement_attempts < 1) throw SpecError("spawn.max_placement_attempts: must be >= 1");
    if (count.hi > 0 && catalog.empty()) throw SpecError("spawn.catalog: no models");
    if (unique_models && static_cast<std::size_t>(count.hi) > catalog.size())
        throw SpecError("spawn.count: maximum " + std::to_string(count.hi) + " exceeds catalog size " +
                        std::to_string(catalog.size()) + " with unique_models");
    for (const auto &m : catalog)
        if (!m || m->vertices.empty()) throw SpecError("spawn.catalog: empty mesh");
}

SpawnResult spawn_objects(const SpawnSpec &spec, RandomStream &rng) {
    spec.validate();
    SpawnResult result;
    const int n = static_cast<int>(rng.uniform_int(spec.count.lo, spec.count.hi));
    if (n == 0) return result;

    std::vector<std::size_t> models(static_cast<std::size_t>(n));
    if (spec.unique_models) {
        std::vector<std::size_t> pool(spec.catalog.size());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (int i = 0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(i, static_cast<std::int64_t>(pool.size()) - 1));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            models[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
        }
    } else {
        for (auto &m : models)
            m = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(spec.catalog.size()) - 1));
    }

    std::vector<Aabb> placed;
    for (int i = 0; i < n; ++i) {
        const std::size_t model = models[static_cast<std::size_t>(i)];
        const Mesh &mesh = *spec.catalog[model];
        const Vec3 center = mesh.bounds().center();
        RandomStream obj = rng.child(static_cast<std::uint64_t>(i));
        RigidTransform xf;
        Aabb box;
        for (int attempt = 0;; ++attempt) {
            xf.rotation = sample_uniform_rotation(obj);
            xf.translation = uniform_in(spec.volume, obj) - xf.rotation * center;
            if (spec.rest_on_plane) {
                double lowest = std::numeric_limits<double>::infinity();
                for (const Vec3 &v : mesh.vertices) lowest = std::min(lowest, xf.apply(v).y);
                xf.translation.y -= lowest - spec.plane_height;
            }
            box = world_bounds(mesh, xf);
            bool overlap = false;
            for (const Aabb &p : placed) overlap = overlap || p.overlaps(box);
            if (!overlap) break;
            if (attempt + 1 >= spec.max_placement_attempts) {
                ++result.accepted_overlaps;
                spdlog::warn("spawn: object {} still overlaps after {} attempts, keeping it", i,
                             spec.max_placement_attempts);
                break;
            }
            ++result.redraws;
        }
        placed.push_back(box);
        result.objects.push_back({model, spec.catalog[model], xf});
    }
    return result;
}

void LightSpec::validate() const {
    if (env_catalog.empty()) throw SpecError("lights.environments: catalog is empty");
    for (const auto &e : env_catalog)
        if (!e || e->empty()) throw SpecError("lights.environments: empty image");
    require_ordered(exposure_ev, "lights.exposure_ev");
    require_ordered(rotation, "lights.rotation");
    require_ordered(extra_light_count, "lights.extra_light_count");
    if (extra_light_count.lo < 0) throw SpecError("lights.extra_light_count: minimum must be >= 0");
    require_ordered(intensity, "lights.intensity");
    if (intensity.lo < 0) throw SpecError("lights.intensity: must be >= 0");
    require_ordered(radius, "lights.radius");
    if (radius.lo < 0) throw SpecError("lights.radius: must be >= 0");
    if (position_volume.empty()) throw SpecError("lights.position_volume: empty box");
}

LightSample sample_lights(const LightSpec &spec, RandomStream &rng) {
    spec.validate();
    LightSample s;
    s.env_index =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(spec.env_catalog.size()) - 1));
    s.environment.image = spec.env_catalog[s.env_index];
    s.environment.exposure_ev = rng.uniform(spec.exposure_ev.lo, spec.exposure_ev.hi);
    s.environment.rotation_y = rng.uniform(spec.rotation.lo, spec.rotation.hi);
    const int n = static_cast<int>(rng.uniform_int(spec.extra_light_count.lo, spec.extra_light_count.hi));
    for (int i = 0; i < n; ++i) {
        PointLight l;
        l.position = uniform_in(spec.position_volume, rng);
        l.intensity = Vec3(rng.uniform(spec.intensity.lo, spec.intensity.hi));
        l.radius = rng.uniform(spec.radius.lo, spec.radius.hi);
        s.lights.push_back(l);
    }
    return s;
}

void MaterialSpec::validate() const {
    if (catalog.empty()) throw SpecError("materials.catalog: no materials");
    for (const auto &m : catalog) {
        if (!m) throw SpecError("materials.catalog: null material");
        m->validate();
    }
    require_ordered(hue, "materials.hsv.hue");
    require_ordered(saturation, "materials.hsv.saturation");
    require_ordered(value, "materials.hsv.value");
    require_probability(probabilities.rust, "materials.probabilities.rust");
    require_probability(probabilities.scratches, "materials.probabilities.scratches");
    require_probability(probabilities.polish, "materials.probabilities.polish");
    require_probability(probabilities.resample, "materials.probabilities.resample");
    require_ordered(rust.threshold, "materials.rust.threshold");
    require_ordered(rust.frequency, "materials.rust.frequency");
    if (rust.frequency.lo <= 0) throw SpecError("materials.rust.frequency: must be > 0");
    if (rust.threshold.lo < -2 || rust.threshold.hi > 2) throw SpecError("materials.rust.threshold: outside [-2,2]");
    if (rust.octaves < 1) throw SpecError("materials.rust.octaves: must be >= 1");
    require_ordered(scratches.count, "materials.scratches.count");
    if (scratches.count.lo < 0) throw SpecError("materials.scratches.count: must be >= 0");
    require_ordered(scratches.width_px, "materials.scratches.width_px");
    require_ordered(scratches.depth, "materials.scratches.depth");
    require_ordered(scratches.length_uv, "materials.scratches.length_uv");
    require_ordered(polish.direction, "materials.polish.direction");
    require_ordered(polish.anisotropy, "materials.polish.anisotropy");
    if (polish.anisotropy.lo < 1) throw SpecError("materials.polish.anisotropy: must be >= 1");
    require_ordered(polish.strength, "materials.polish.strength");
    require_ordered(polish.frequency, "materials.polish.frequency");
    if (polish.frequency.lo <= 0) throw SpecError("materials.polish.frequency: must be > 0");
    if (resample.iterations < 0) throw SpecError("materials.resample.iterations: must be >= 0");
    if (resample.patch_size < 1) throw SpecError("materials.resample.patch_size: must be >= 1");
    if (resample.radius0 < 1) throw SpecError("materials.resample.radius0: must be >= 1");
    if (defect_texture_size < 1) throw SpecError("materials.defect_texture_size: must be >= 1");
}

std::vector<MaterialAssignment> assign_materials(std::size_t instance_count, const MaterialSpec &spec,
                                                 const RandomStream &rng) {
    spec.validate();
    std::vector<MaterialAssignment> out(instance_count);
    for (std::size_t i = 0; i < instance_count; ++i) {
        const RandomStream inst = rng.child(i);
        MaterialAssignment &a = out[i];

        RandomStream base = inst.child(kBase);
        a.catalog_index =
            static_cast<std::size_t>(base.uniform_int(0, static_cast<std::int64_t>(spec.catalog.size()) - 1));
        MaterialMaps m = *spec.catalog[a.catalog_index];

        RandomStream rs = inst.child(kResample), hs = inst.child(kHsv), ru = inst.child(kRust),
                     sc = inst.child(kScratch), po = inst.child(kPolish);
        a.resampled = rs.uniform() < spec.probabilities.resample;
        a.rust = ru.uniform() < spec.probabilities.rust;
        a.scratches = sc.uniform() < spec.probabilities.scratches;
        a.polish = po.uniform() < spec.probabilities.polish;

        if (a.rust || a.scratches || a.polish) {
            const int s = spec.defect_texture_size;
            if (m.albedo.width() < s || m.albedo.height() < s)
                m.albedo = m.albedo.resized(std::max(s, m.albedo.width()), std::max(s, m.albedo.height()));
        }
        if (a.resampled) {
            const ResampleOptions opts{spec.resample.iterations, spec.resample.patch_size, spec.resample.radius0};
            m = resample_material(m, m.albedo.width(), m.albedo.height(), opts, rs);
        }

        a.hue = hs.uniform(spec.hue.lo, spec.hue.hi);
        a.saturation = hs.uniform(spec.saturation.lo, spec.saturation.hi);
        a.value = hs.uniform(spec.value.lo, spec.value.hi);
        m.albedo = hsv_shift(m.albedo, a.hue, a.saturation, a.value);

        if (a.rust) {
            NoiseParams mask_params;
            mask_params.seed = ru.next_u64();
            mask_params.frequency = ru.uniform(spec.rust.frequency.lo, spec.rust.frequency.hi);
            mask_params.octaves = spec.rust.octaves;
            mask_params.threshold = ru.uniform(spec.rust.threshold.lo, spec.rust.threshold.hi);
            NoiseParams color_params = mask_params;
            color_params.seed = ru.next_u64();
            color_params.threshold = 0;
            const TextureMap mask = defect_mask(m.albedo.width(), m.albedo.height(), mask_params);
            m = apply_rust(m, mask, spec.rust.color_a, spec.rust.color_b, color_params);
        }
        if (a.scratches) {
            const int count = static_cast<int>(sc.uniform_int(spec.scratches.count.lo, spec.scratches.count.hi));
            m = apply_scratches(m, count, spec.scratches.width_px, spec.scratches.depth, sc, spec.scratches.length_uv);
        }
        if (a.polish) {
            NoiseParams p;
            p.seed = po.next_u64();
            p.frequency = po.uniform(spec.polish.frequency.lo, spec.polish.frequency.hi);
            const double dir = po.uniform(spec.polish.direction.lo, spec.polish.direction.hi);
            const double aniso = po.uniform(spec.polish.anisotropy.lo, spec.polish.anisotropy.hi);
            const double strength = po.uniform(spec.polish.strength.lo, spec.polish.strength.hi);
            m = apply_polish_lines(m, dir, aniso, p, strength);
        }
        a.material = std::move(m);
    }
    return out;
}

}  // namespace cadsynth
