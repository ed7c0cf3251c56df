#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "cadsynth/annotate.hpp"
#include "cadsynth/camera.hpp"
#include "cadsynth/image_io.hpp"
#include "cadsynth/mesh.hpp"

namespace cadsynth {

inline constexpr double kDefaultDepthScale = 0.1;  // mm per stored unit

/// One scene_gt.json record. Translation in millimeters, as stored.
struct BopGt {
    Mat3 cam_R_m2c = Mat3::identity();
    Vec3 cam_t_m2c;
    int obj_id = 0;
    bool operator==(const BopGt &) const = default;
};

/// One scene_gt_info.json record.
struct BopGtInfo {
    BBox bbox_obj{};
    BBox bbox_visib{};
    int px_count_all = 0;
    int px_count_valid = 0;
    int px_count_visib = 0;
    double visib_fract = 0;
    bool operator==(const BopGtInfo &) const = default;
};

struct BopFrame {
    CameraIntrinsics intrinsics;  // cam_K; width/height follow the scene
    double depth_scale = kDefaultDepthScale;
    std::optional<Mat3> cam_R_w2c;
    std::optional<Vec3> cam_t_w2c;  // millimeters
    std::vector<BopGt> gt;
    std::vector<BopGtInfo> gt_info;  // empty or one per gt
    std::optional<Image8> rgb;
    std::optional<Image16> depth;
    std::vector<Image8> masks;        // amodal, 0/255, one per gt (or empty)
    std::vector<Image8> masks_visib;  // 0/255

    bool operator==(const BopFrame &) const = default;
};

/// In-memory mirror of one BOP scene directory plus the dataset's models (meters).
struct BopScene {
    int scene_id = 0;
    CameraIntrinsics intrinsics;
    double depth_scale = kDefaultDepthScale;
    std::map<int, BopFrame> frames;  // image_id -> frame
    std::map<int, std::shared_ptr<const Mesh>> models;
};

BopGt to_bop_gt(const InstanceAnnotation &a);
BopGtInfo to_bop_gt_info(const InstanceAnnotation &a);
/// Model-to-camera (or world-to-camera) transform in meters from a BOP rotation and mm translation.
RigidTransform pose_from_bop(const Mat3 &r, const Vec3 &t_mm);

/// stored = round(z_mm / depth_scale); background stays 0. Throws Error when a value exceeds 65535.
Image16 encode_depth(const FrameBuffers &frame, double depth_scale);
inline double decode_depth_mm(std::uint16_t stored, double depth_scale) { return stored * depth_scale; }

/// Frame of a rendered and annotated image, ready for export.
BopFrame make_bop_frame(const Scene &scene, const FrameBuffers &buffers, const FrameAnnotation &ann,
                        const Image8 &rgb, double depth_scale);

namespace bop_paths {
std::filesystem::path scene_dir(const std::filesystem::path &root, int scene_id);
std::filesystem::path model(const std::filesystem::path &root, int obj_id);
std::filesystem::path rgb(const std::filesystem::path &scene_dir, int image_id);
std::filesystem::path depth(const std::filesystem::path &scene_dir, int image_id);
std::filesystem::path mask(const std::filesystem::path &scene_dir, int image_id, int gt_index);
std::filesystem::path mask_visib(const std::filesystem::path &scene_dir, int image_id, int gt_index);
}  // namespace bop_paths

/// Writes a BOP tree incrementally: image files per frame, the three per-scene JSON files on flush.
/// JSON keys are ascending image ids; records keep their list order.
class BopWriter {
public:
    BopWriter(std::filesystem::path root, int scene_id, const CameraIntrinsics &intrinsics,
              double depth_scale = kDefaultDepthScale);

    /// models/obj_{id:06}.ply in millimeters plus models_info.json.
    void write_models(const std::map<int, std::shared_ptr<const Mesh>> &models);
    /// Image files immediately; JSON records are kept until flush().
    void write_frame(int image_id, const BopFrame &frame);
    /// camera.json, scene_camera.json, scene_gt.json, scene_gt_info.json for all frames written so far.
    void flush() const;

    const std::filesystem::path &scene_dir() const { return scene_dir_; }

private:
    std::filesystem::path root_;
    std::filesystem::path scene_dir_;
    CameraIntrinsics intrinsics_;
    double depth_scale_;
    std::map<int, BopFrame> records_;  // image payloads stripped
};

void export_scene(const BopScene &scene, const std::filesystem::path &root);

/// Throws IoError naming the missing file or directory, FormatError with the JSON key path on bad content.
BopScene import_scene(const std::filesystem::path &root, int scene_id);

/// The three per-scene JSON documents exactly as export writes them.
std::string scene_camera_json(const std::map<int, BopFrame> &frames);
std::string scene_gt_json(const std::map<int, BopFrame> &frames);
std::string scene_gt_info_json(const std::map<int, BopFrame> &frames);

}  // namespace cadsynth
