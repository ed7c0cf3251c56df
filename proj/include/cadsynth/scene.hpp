#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cadsynth/camera.hpp"
#include "cadsynth/mesh.hpp"
#include "cadsynth/texture.hpp"

namespace cadsynth {

/// Metallic-roughness material. Normal maps store tangent-space normals encoded as n * 0.5 + 0.5.
struct MaterialMaps {
    TextureMap albedo;        // RGB, sRGB-tagged
    TextureMap normal;        // RGB, linear
    TextureMap roughness;     // scalar in [0,1]
    TextureMap metallic;      // scalar in [0,1]
    TextureMap displacement;  // scalar, perturbs shading normals only
    double displacement_scale = 0.0;
    /// Weight of the dielectric specular layer; 0 gives a pure Lambertian dielectric.
    double specular = 1.0;

    /// Constant material from 1x1 maps; `albedo` is linear RGB.
    static MaterialMaps uniform(const Vec3 &albedo, double roughness, double metallic, double specular = 1.0);

    /// Throws SpecError when a map is empty or a scalar map leaves [0,1].
    void validate() const;

    bool operator==(const MaterialMaps &) const = default;
};

/// Equirectangular HDR map: u follows azimuth atan2(z, x), v the polar angle from +Y.
struct EnvironmentLight {
    std::shared_ptr<const TextureMap> image;
    double rotation_y = 0;   // radians
    double exposure_ev = 0;  // radiance multiplier 2^ev

    static EnvironmentLight constant(const Vec3 &radiance);

    /// Radiance arriving from world direction `dir` (travelling opposite to it), bilinear, rotated, exposed.
    Vec3 radiance(const Vec3 &dir) const;
    /// Solid-angle weighted mean radiance (exposure applied, rotation-invariant).
    Vec3 mean_radiance() const;
};

/// Spherical emitter; radius 0 degenerates to a point light.
struct PointLight {
    Vec3 position;
    Vec3 intensity;  // W/sr, linear RGB
    double radius = 0;
};

struct MeshInstance {
    std::shared_ptr<const Mesh> mesh;
    RigidTransform model_to_world;
    MaterialMaps material;
};

struct Camera {
    CameraIntrinsics intrinsics;
    RigidTransform world_to_camera;
};

/// Horizontal plane y = height. Shaded and shadowing, but reported as background in annotation buffers.
struct SupportPlane {
    double height = 0;
    MaterialMaps material = MaterialMaps::uniform(Vec3(0.5), 0.8, 0.0);
};

struct Scene {
    std::vector<MeshInstance> instances;
    EnvironmentLight environment = EnvironmentLight::constant(Vec3(0.0));
    std::vector<PointLight> point_lights;
    Camera camera;
    std::optional<SupportPlane> support_plane;
};

}  // namespace cadsynth
