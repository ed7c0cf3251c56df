#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cadsynth/config.hpp"
#include "cadsynth/resample.hpp"

namespace cadsynth {

/// Meshes, environment maps and materials referenced by a config, loaded once per run.
struct Assets {
    std::vector<std::shared_ptr<const Mesh>> models;  // object_id set from the config
    std::vector<std::shared_ptr<const TextureMap>> environments;
    std::vector<std::shared_ptr<const MaterialMaps>> materials;
};

Assets load_assets(const DatasetConfig &config);

/// Material from constant values and/or texture files; albedo files are read as sRGB.
MaterialMaps load_material(const MaterialSource &source);
/// Linear radiance map; PNG files are decoded from sRGB.
TextureMap load_environment(const EnvironmentSource &source);

enum class Stage { load_assets, randomize, texture_synthesis, render, annotate, export_frame };
inline constexpr std::size_t kStageCount = 6;
const char *stage_name(Stage s);

struct FrameScene {
    Scene scene;
    std::vector<std::size_t> model_indices;
    std::vector<MaterialAssignment> materials;
    std::size_t env_index = 0;
    int spawn_redraws = 0;
    int accepted_overlaps = 0;
};

/// Per-frame streams: RandomStream(seed).child(frame), then child 1 camera, 2 objects, 3 lights, 4 materials.
RandomStream frame_stream(std::uint64_t seed, int frame);

/// Samples camera, objects and lights (randomize stage).
FrameScene randomize_frame(const DatasetConfig &config, const Assets &assets, int frame);
/// Assigns and synthesizes materials for every instance (texture synthesis stage).
void synthesize_materials(FrameScene &fs, const DatasetConfig &config, const Assets &assets, int frame);

struct RunReport {
    std::uint64_t seed = 0;
    int num_images = 0;
    int frames_completed = 0;
    int threads = 1;
    bool complete = false;
    std::optional<int> failed_frame;
    std::string failed_stage;
    std::string error;
    std::array<double, kStageCount> stage_seconds{};
    double total_seconds = 0;  // load time plus per-frame busy time measured around the stages
    double wall_seconds = 0;
    std::uint64_t spawn_redraws = 0;
    std::uint64_t accepted_overlaps = 0;
    std::uint64_t samples = 0;
    std::uint64_t rejected_samples = 0;
    std::vector<int> instance_counts;  // per written frame

    nlohmann::ordered_json to_json() const;
};

/// Raised after partial outputs, report.json and an incomplete MANIFEST are on disk.
class FrameError : public Error {
public:
    FrameError(const RunReport &report);
    const RunReport &report() const { return report_; }

private:
    RunReport report_;
};

struct GenerateHooks {
    /// Called when a frame enters a stage; throwing simulates a failure there.
    std::function<void(int frame, Stage stage)> on_stage;
};

/// Writes the BOP tree, report.json and MANIFEST under config.output_root.
RunReport run_generate(const DatasetConfig &config, const GenerateHooks &hooks = {});

struct TwinOptions {
    std::filesystem::path source_root;
    int scene_id = 0;
    std::filesystem::path output_root;
    RenderProfile profile = RenderProfile::path_traced();
    /// Supplies environments and the material catalog; without it a gray material and unit environment are used.
    std::optional<DatasetConfig> config;
    std::uint64_t seed = 0;
};

/// Re-renders every frame of an imported scene with the same poses, intrinsics and image ids. scene_gt.json and
/// the camera poses are passed through verbatim, model files are copied, gt_info and images are recomputed.
RunReport run_import_digital_twin(const TwinOptions &options);

/// Resamples an exemplar image file into a new texture of the given size (PNG or .hdr by extension).
void resample_texture_file(const std::filesystem::path &exemplar, const std::filesystem::path &out, int width,
                           int height, const ResampleOptions &options, std::uint64_t seed = 0);

/// Deterministic listing of an output tree: status lines then every file path relative to root, sorted.
std::string manifest_text(const std::filesystem::path &root, const RunReport &report);

}  // namespace cadsynth
