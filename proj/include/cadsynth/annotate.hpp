#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cadsynth/image_io.hpp"
#include "cadsynth/render.hpp"
#include "cadsynth/scene.hpp"

namespace cadsynth {

/// [x, y, w, h] in pixels; all zero for an empty mask.
using BBox = std::array<int, 4>;

struct InstanceAnnotation {
    int obj_id = 0;
    RigidTransform pose_m2c;
    BBox bbox_obj{};
    BBox bbox_visib{};
    int px_count_all = 0;
    int px_count_visib = 0;
    double visib_fract = 0;

    bool operator==(const InstanceAnnotation &) const = default;
};

/// Single-channel masks hold 0 or 255.
inline constexpr std::uint8_t kMaskOn = 255;

/// Pixel-center rays against the geometry of one instance alone (occluders and support plane ignored).
Image8 render_amodal_mask(const Scene &scene, std::size_t instance);

/// Pixels whose instance_id buffer entry belongs to `instance`.
Image8 extract_visible_mask(const FrameBuffers &frame, std::size_t instance);

BBox mask_bbox(const Image8 &mask);
int mask_count(const Image8 &mask);

struct FrameAnnotation {
    std::vector<InstanceAnnotation> instances;
    std::vector<Image8> amodal_masks;
    std::vector<Image8> visible_masks;
};

/// One record per instance, in scene order; instances with empty masks are kept with zero boxes.
FrameAnnotation annotate_frame(const Scene &scene, const FrameBuffers &frame);

}  // namespace cadsynth
