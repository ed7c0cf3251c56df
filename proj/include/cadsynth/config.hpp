#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cadsynth/errors.hpp"
#include "cadsynth/randomize.hpp"
#include "cadsynth/render.hpp"

namespace cadsynth {

/// Validation failure carrying every problem found, one message per entry.
class ConfigError : public SpecError {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string> &errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

struct ModelSource {
    std::filesystem::path path;
    int obj_id = 1;
    double scale = 1.0;  // applied on load, e.g. 0.001 for millimeter meshes
};

/// Either an image file (.hdr or PNG) or a constant radiance.
struct EnvironmentSource {
    std::optional<std::filesystem::path> path;
    Vec3 constant{0.0};
};

/// Either a texture file or a constant value (1 or 3 components).
struct MapSource {
    std::optional<std::filesystem::path> path;
    std::vector<double> value;
};

struct MaterialSource {
    MapSource albedo{std::nullopt, {0.5, 0.5, 0.5}};  // constant values are linear RGB
    MapSource normal;
    MapSource roughness{std::nullopt, {0.5}};
    MapSource metallic{std::nullopt, {0.0}};
    MapSource displacement;
    double displacement_scale = 0.0;
    double specular = 1.0;
};

struct SupportPlaneConfig {
    double height = 0.0;
    Vec3 albedo{0.5};
    double roughness = 0.8;
    double metallic = 0.0;
};

struct DatasetConfig {
    std::uint64_t seed = 0;
    int num_images = 1;
    int width = 640;
    int height = 480;
    double hfov_deg = 60.0;
    std::optional<CameraIntrinsics> intrinsics;  // overrides hfov_deg
    RenderProfile profile;
    CameraRangeSpec camera;

    std::vector<ModelSource> models;
    IntRange count{1, 1};
    bool unique_models = false;
    bool rest_on_plane = true;
    Aabb spawn_volume{Vec3(-0.2, 0.0, -0.2), Vec3(0.2, 0.2, 0.2)};
    int max_placement_attempts = 20;
    std::optional<SupportPlaneConfig> support_plane = SupportPlaneConfig{};

    std::vector<EnvironmentSource> environments;
    LightSpec lights;  // env_catalog filled from `environments` when assets load

    std::vector<MaterialSource> materials;
    MaterialSpec material_params;  // catalog filled from `materials` when assets load

    std::filesystem::path output_root = "output";
    int scene_id = 0;
    double depth_scale = 0.1;

    /// Intrinsics actually used for rendering.
    CameraIntrinsics camera_intrinsics() const;
};

/// Parses a config document. Relative paths resolve against `base_dir`. Unknown keys, wrong types, unordered
/// ranges and missing files are all collected and thrown together as ConfigError.
DatasetConfig parse_config(const nlohmann::json &doc, const std::filesystem::path &base_dir);

/// Reads and parses a config file; relative paths resolve against its directory.
DatasetConfig validate_config(const std::filesystem::path &file);

}  // namespace cadsynth
