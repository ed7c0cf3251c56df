#include "cadsynth/annotate.hpp"

#include "cadsynth/bvh.hpp"
#include "cadsynth/parallel.hpp"

namespace cadsynth {

Image8 render_amodal_mask(const Scene &scene, std::size_t instance) {
    const CameraIntrinsics &k = scene.camera.intrinsics;
    Image8 mask(k.width, k.height, 1, 0);
    const Bvh bvh = Bvh::from_instance(scene, instance);
    if (bvh.empty()) return mask;
    const RigidTransform c2w = scene.camera.world_to_camera.inverse();
    parallel_for(0, k.height, [&](int y) {
        for (int x = 0; x < k.width; ++x) {
            const Vec3 d = normalize(c2w.apply_vector(camera_ray_direction(k, x, y)));
            if (bvh.occluded(Ray{c2w.translation, d})) mask.at(x, y) = kMaskOn;
        }
    });
    return mask;
}

Image8 extract_visible_mask(const FrameBuffers &frame, std::size_t instance) {
    Image8 mask(frame.width, frame.height, 1, 0);
    const auto id = static_cast<std::uint32_t>(instance + 1);
    for (std::size_t i = 0; i < frame.instance_id.size(); ++i)
        if (frame.instance_id[i] == id) mask.pixels[i] = kMaskOn;
    return mask;
}

BBox mask_bbox(const Image8 &mask) {
    int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) return {0, 0, 0, 0};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

int mask_count(const Image8 &mask) {
    int n = 0;
    for (std::uint8_t v : mask.pixels) n += v != 0;
    return n;
}

FrameAnnotation annotate_frame(const Scene &scene, const FrameBuffers &frame) {
    FrameAnnotation out;
    for (std::size_t i = 0; i < scene.instances.size(); ++i) {
        const MeshInstance &inst = scene.instances[i];
        Image8 amodal = render_amodal_mask(scene, i);
        Image8 visible = extract_visible_mask(frame, i);
        InstanceAnnotation a;
        a.obj_id = inst.mesh ? inst.mesh->object_id : 0;
        a.pose_m2c = scene.camera.world_to_camera * inst.model_to_world;
        a.bbox_obj = mask_bbox(amodal);
        a.bbox_visib = mask_bbox(visible);
        a.px_count_all = mask_count(amodal);
        a.px_count_visib = mask_count(visible);
        a.visib_fract = a.px_count_all > 0 ? static_cast<double>(a.px_count_visib) / a.px_count_all : 0.0;
        out.instances.push_back(a);
        out.amodal_masks.push_back(std::move(amodal));
        out.visible_masks.push_back(std::move(visible));
    }
    return out;
}

}  // namespace cadsynth
