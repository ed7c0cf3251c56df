#include "cadsynth/camera.hpp"

#include "cadsynth/errors.hpp"

namespace cadsynth {

CameraIntrinsics CameraIntrinsics::from_fov(int width, int height, double horizontal_fov) {
    CameraIntrinsics k;
    k.width = width;
    k.height = height;
    k.fx = k.fy = 0.5 * width / std::tan(0.5 * horizontal_fov);
    k.cx = 0.5 * width;
    k.cy = 0.5 * height;
    return k;
}

Vec3 spherical_to_cartesian(double theta, double phi, double r, const Vec3 &center) {
    const double s = std::sin(theta);
    return center + Vec3(s * std::cos(phi), std::cos(theta), s * std::sin(phi)) * r;
}

RigidTransform look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up_hint) {
    const Vec3 d = target - eye;
    const double dist = length(d);
    if (!(dist > 0)) throw DegenerateViewError("look_at: eye and target coincide");
    const Vec3 forward = d / dist;

    auto orthogonal_down = [&](const Vec3 &up) -> Vec3 {
        const Vec3 down = -up;
        const Vec3 y = down - forward * dot(down, forward);
        const double len = length(y);
        return len > 1e-9 * std::max(1.0, length(up)) ? y / len : Vec3();
    };
    Vec3 y = orthogonal_down(up_hint);
    if (y == Vec3()) y = orthogonal_down({0, 0, 1});
    if (y == Vec3()) y = orthogonal_down({1, 0, 0});
    const Vec3 x = cross(y, forward);

    RigidTransform t;
    t.rotation = Mat3::from_rows(x, y, forward);
    t.translation = -(t.rotation * eye);
    return t;
}

Vec2 project_point(const CameraIntrinsics &k, const Vec3 &p) {
    if (!(p.z > 0)) throw BehindCameraError("project_point: point is not in front of the camera");
    return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

Vec3 camera_ray_direction(const CameraIntrinsics &k, double u, double v) {
    return normalize(Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0));
}

}  // namespace cadsynth
