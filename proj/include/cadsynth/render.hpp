#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cadsynth/brdf.hpp"
#include "cadsynth/bvh.hpp"
#include "cadsynth/image_io.hpp"
#include "cadsynth/random.hpp"
#include "cadsynth/scene.hpp"

namespace cadsynth {

enum class RenderMode { path_traced, preview };
enum class Tonemap { none, reinhard };

struct RenderProfile {
    RenderMode mode = RenderMode::path_traced;
    int spp = 500;
    int max_depth = 5;  // scattering events per path
    int rr_start_depth = 3;
    double exposure_ev = 0;
    Vec3 white_balance_gains{1.0};
    Tonemap tonemap = Tonemap::reinhard;
    double gamma = 2.2;

    static RenderProfile path_traced(int spp = 500);
    static RenderProfile preview();

    /// Throws SpecError on spp < 1, max_depth < 1, negative gains or gamma <= 0.
    void validate() const;
};

/// Per-pixel outputs of one render. instance_id is the instance index + 1 (0 = background) and
/// depth is camera-space z in meters (0 = background).
struct FrameBuffers {
    int width = 0;
    int height = 0;
    std::vector<Vec3> radiance;
    std::vector<std::uint32_t> instance_id;
    std::vector<double> depth;

    FrameBuffers() = default;
    FrameBuffers(int w, int h);

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool operator==(const FrameBuffers &) const = default;
};

struct RenderStats {
    std::uint64_t samples = 0;
    std::uint64_t rejected_samples = 0;  // non-finite or negative path estimates
};

/// Nearest surface along a ray, with the shading frame resolved.
struct SurfaceHit {
    double t = 0;
    Vec3 position;
    Vec3 geometric_normal;  // faces the incoming ray
    Vec3 shading_normal;    // same hemisphere as geometric_normal w.r.t. the viewer
    SurfaceParams material;
    std::optional<std::size_t> instance;  // empty for the support plane
};

struct PrimaryHit {
    std::uint32_t instance_id = 0;
    double depth = 0;
};

struct PathSample {
    Vec3 radiance;
    PrimaryHit primary;
};

/// Scene plus acceleration structure; immutable and shareable across threads.
class RenderScene {
public:
    explicit RenderScene(const Scene &scene);

    const Scene &scene() const { return scene_; }
    const Bvh &bvh() const { return bvh_; }

    /// Closest hit among instances and the support plane.
    std::optional<SurfaceHit> intersect(const Ray &ray) const;
    bool occluded(const Ray &ray) const;

    /// Camera ray through image position (u, v), world space.
    Ray camera_ray(double u, double v) const;
    /// Instance id and depth of the unjittered ray through the center of pixel (x, y).
    PrimaryHit primary_hit(int x, int y) const;

private:
    std::optional<double> plane_t(const Ray &ray) const;

    const Scene &scene_;
    Bvh bvh_;
    RigidTransform camera_to_world_;
};

/// Radiance reflected toward `wo` from all point lights, with shadow rays.
Vec3 direct_lighting(const RenderScene &rs, const SurfaceHit &hit, const Vec3 &wo, RandomStream *rng);

/// One path-traced sample through a jittered position inside pixel (x, y).
PathSample trace_path(const RenderScene &rs, int x, int y, const RenderProfile &profile, RandomStream &rng);

/// Direct lighting with shadows plus an ambient term (mean environment radiance x albedo).
/// No indirect bounces and no inter-reflections.
PathSample shade_preview(const RenderScene &rs, double u, double v);

/// Per-sample stream, a pure function of (seed, frame, pixel, sample).
RandomStream pixel_stream(std::uint64_t seed, std::uint64_t frame, int x, int y, int sample);

/// Renders all pixels in parallel. Annotation buffers come from unjittered pixel-center rays, so they do not
/// depend on spp or mode. Throws RenderError if every sample of a pixel is rejected.
FrameBuffers render_frame(const Scene &scene, const RenderProfile &profile, std::uint64_t frame_index,
                          std::uint64_t seed, RenderStats *stats = nullptr);

/// Exposure, white balance, optional Reinhard, gamma, round-half-up quantization to 8-bit RGB.
Image8 post_process(const FrameBuffers &frame, const RenderProfile &profile);
std::array<std::uint8_t, 3> post_process_pixel(const Vec3 &radiance, const RenderProfile &profile);

}  // namespace cadsynth
