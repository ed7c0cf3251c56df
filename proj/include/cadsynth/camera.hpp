#pragma once

#include "cadsynth/math.hpp"

namespace cadsynth {

/// Pinhole intrinsics. Pixel centers sit at integer coordinates, v grows downward.
struct CameraIntrinsics {
    double fx = 1, fy = 1;
    double cx = 0, cy = 0;
    int width = 1, height = 1;

    bool valid() const {
        return fx > 0 && fy > 0 && width > 0 && height > 0 && cx >= 0 && cx < width && cy >= 0 && cy < height;
    }

    /// Row-major 3x3 K matrix.
    Mat3 matrix() const { return Mat3{{fx, 0, cx, 0, fy, cy, 0, 0, 1}}; }

    /// Square-pixel intrinsics with the given horizontal field of view, principal point at the image center.
    static CameraIntrinsics from_fov(int width, int height, double horizontal_fov);

    bool operator==(const CameraIntrinsics &) const = default;
};

/// center + r * (sinθ cosφ, cosθ, sinθ sinφ); θ measured from +Y, φ in the XZ plane from +X.
Vec3 spherical_to_cartesian(double theta, double phi, double r, const Vec3 &center);

/// World-to-camera transform with the camera at `eye` looking along its +Z at `target`, camera +Y pointing
/// image-down. Falls back to up (0,0,1) when `up_hint` is parallel to the view direction.
/// Throws DegenerateViewError when eye == target.
RigidTransform look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up_hint);

/// Throws BehindCameraError for z <= 0.
Vec2 project_point(const CameraIntrinsics &k, const Vec3 &cam_point);

/// Unit direction (camera space) through image position (u, v).
Vec3 camera_ray_direction(const CameraIntrinsics &k, double u, double v);

}  // namespace cadsynth
