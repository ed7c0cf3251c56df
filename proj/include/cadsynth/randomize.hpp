#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cadsynth/random.hpp"
#include "cadsynth/scene.hpp"

namespace cadsynth {

struct IntRange {
    int lo = 0, hi = 0;
    constexpr bool ordered() const { return lo <= hi; }
    constexpr bool contains(int v) const { return v >= lo && v <= hi; }
    constexpr bool operator==(const IntRange &) const = default;
};

struct CameraRangeSpec {
    Interval theta{0.35, 1.2};  // polar angle from +Y
    Interval phi{0.0, 2.0 * kPi};
    Interval r{0.6, 1.2};
    Vec3 target;

    void validate() const;
};

struct CameraSample {
    RigidTransform world_to_camera;
    Vec3 eye;
    double theta = 0, phi = 0, r = 0;
};

/// θ, φ, r uniform and independent in their ranges, camera at spherical_to_cartesian looking at the target.
CameraSample sample_camera_pose(const CameraRangeSpec &spec, RandomStream &rng);

/// Rotation from a uniform unit quaternion (Shoemake's subgroup construction), uniform on SO(3).
Mat3 sample_uniform_rotation(RandomStream &rng);

struct SpawnSpec {
    Aabb volume{Vec3(-0.2, 0.0, -0.2), Vec3(0.2, 0.2, 0.2)};
    std::vector<std::shared_ptr<const Mesh>> catalog;
    IntRange count{1, 1};
    bool unique_models = false;
    bool rest_on_plane = true;
    double plane_height = 0.0;
    int max_placement_attempts = 20;

    void validate() const;
};

struct SpawnedObject {
    std::size_t model_index = 0;
    std::shared_ptr<const Mesh> mesh;
    RigidTransform model_to_world;
};

struct SpawnResult {
    std::vector<SpawnedObject> objects;
    int redraws = 0;               // placements rejected for AABB overlap
    int accepted_overlaps = 0;     // placements kept overlapping after the attempt budget
};

/// Uniform count, models with replacement (without when unique_models), uniform position of the mesh bounds
/// center in the volume, uniform rotation. With rest_on_plane the lowest transformed vertex is moved onto
/// the plane. World AABBs overlapping an earlier object are redrawn up to max_placement_attempts times.
SpawnResult spawn_objects(const SpawnSpec &spec, RandomStream &rng);

struct LightSpec {
    std::vector<std::shared_ptr<const TextureMap>> env_catalog;
    Interval exposure_ev{0, 0};
    Interval rotation{0, 2.0 * kPi};
    IntRange extra_light_count{0, 0};
    Interval intensity{1.0, 5.0};  // W/sr, applied to all three channels
    Interval radius{0.0, 0.05};
    Aabb position_volume{Vec3(-1.0, 1.0, -1.0), Vec3(1.0, 2.0, 1.0)};

    void validate() const;
};

struct LightSample {
    EnvironmentLight environment;
    std::size_t env_index = 0;
    std::vector<PointLight> lights;
};

LightSample sample_lights(const LightSpec &spec, RandomStream &rng);

struct DefectProbabilities {
    double rust = 0, scratches = 0, polish = 0, resample = 0;
};

struct RustRanges {
    Interval threshold{-0.1, 0.4};
    Interval frequency{2.0, 8.0};
    int octaves = 4;
    Vec3 color_a{0.25, 0.07, 0.02};  // linear RGB
    Vec3 color_b{0.45, 0.18, 0.05};
};

struct ScratchRanges {
    IntRange count{1, 6};
    Interval width_px{1.0, 3.0};
    Interval depth{0.2, 0.6};
    Interval length_uv{0.1, 0.5};
};

struct PolishRanges {
    Interval direction{0.0, kPi};
    Interval anisotropy{4.0, 16.0};
    Interval strength{0.1, 0.3};
    Interval frequency{4.0, 16.0};
};

struct ResampleRanges {
    int iterations = 15;
    int patch_size = 32;
    int radius0 = 8;
};

struct MaterialSpec {
    std::vector<std::shared_ptr<const MaterialMaps>> catalog;
    Interval hue{0, 0};  // degrees
    Interval saturation{0, 0};
    Interval value{0, 0};
    DefectProbabilities probabilities;
    RustRanges rust;
    ScratchRanges scratches;
    PolishRanges polish;
    ResampleRanges resample;
    /// Albedo maps smaller than this are upsampled before texture-space defects are drawn.
    int defect_texture_size = 256;

    void validate() const;
};

struct MaterialAssignment {
    MaterialMaps material;
    std::size_t catalog_index = 0;
    bool rust = false, scratches = false, polish = false, resampled = false;
    double hue = 0, saturation = 0, value = 0;
};

/// One material per instance. Instance i draws from rng.child(i); each generator has its own sub-stream, so
/// toggling one generator never shifts another's parameters. Catalog entries are never modified.
std::vector<MaterialAssignment> assign_materials(std::size_t instance_count, const MaterialSpec &spec,
                                                 const RandomStream &rng);

}  // namespace cadsynth
