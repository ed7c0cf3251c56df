#include "cadsynth/bvh.hpp"

#include <algorithm>

namespace cadsynth {

namespace {

bool closer(const Hit &a, const Hit &b) {
    if (a.t != b.t) return a.t < b.t;
    return a.instance != b.instance ? a.instance < b.instance : a.triangle < b.triangle;
}

/// Slab test against the closed interval [tmin, tmax].
bool box_hit(const Aabb &b, const Vec3 &origin, const Vec3 &inv_dir, double tmin, double tmax) {
    for (int a = 0; a < 3; ++a) {
        double t0 = (b.lo[a] - origin[a]) * inv_dir[a];
        double t1 = (b.hi[a] - origin[a]) * inv_dir[a];
        if (t0 > t1) std::swap(t0, t1);
        t1 *= 1.0 + 1e-12;  // keep rounding from culling hits on the box boundary
        tmin = t0 > tmin ? t0 : tmin;  // NaN from 0*inf leaves the bound untouched
        tmax = t1 < tmax ? t1 : tmax;
        if (tmin > tmax) return false;
    }
    return true;
}

}  // namespace

std::optional<Hit> intersect_triangle(const BvhTriangle &tri, const Ray &ray) {
    const Vec3 e1 = tri.v1 - tri.v0;
    const Vec3 e2 = tri.v2 - tri.v0;
    const Vec3 p = cross(ray.dir, e2);
    const double det = dot(e1, p);
    if (det == 0.0) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = ray.origin - tri.v0;
    const double b1 = dot(s, p) * inv;
    if (b1 < 0.0 || b1 > 1.0) return std::nullopt;
    const Vec3 q = cross(s, e1);
    const double b2 = dot(ray.dir, q) * inv;
    if (b2 < 0.0 || b1 + b2 > 1.0) return std::nullopt;
    const double t = dot(e2, q) * inv;
    if (!(t > ray.tmin && t < ray.tmax)) return std::nullopt;
    return Hit{t, tri.instance, tri.triangle, b1, b2};
}

std::optional<Hit> brute_force_intersect(std::span<const BvhTriangle> tris, const Ray &ray) {
    std::optional<Hit> best;
    for (const BvhTriangle &tri : tris)
        if (auto h = intersect_triangle(tri, ray); h && (!best || closer(*h, *best))) best = h;
    return best;
}

std::vector<BvhTriangle> world_triangles(const Scene &scene, std::size_t instance) {
    const MeshInstance &inst = scene.instances[instance];
    std::vector<BvhTriangle> out;
    if (!inst.mesh) return out;
    std::vector<Vec3> world(inst.mesh->vertices.size());
    for (std::size_t i = 0; i < world.size(); ++i) world[i] = inst.model_to_world.apply(inst.mesh->vertices[i]);
    out.reserve(inst.mesh->triangles.size());
    for (std::size_t t = 0; t < inst.mesh->triangles.size(); ++t) {
        const auto &tri = inst.mesh->triangles[t];
        out.push_back({world[tri[0]], world[tri[1]], world[tri[2]], static_cast<std::uint32_t>(instance),
                       static_cast<std::uint32_t>(t)});
    }
    return out;
}

Bvh::Bvh(std::vector<BvhTriangle> triangles) : tris_(std::move(triangles)) {
    if (tris_.empty()) return;
    nodes_.reserve(2 * tris_.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(tris_.size()));
}

Bvh Bvh::from_scene(const Scene &scene) {
    std::vector<BvhTriangle> all;
    for (std::size_t i = 0; i < scene.instances.size(); ++i) {
        auto t = world_triangles(scene, i);
        all.insert(all.end(), t.begin(), t.end());
    }
    return Bvh(std::move(all));
}

Bvh Bvh::from_instance(const Scene &scene, std::size_t instance) { return Bvh(world_triangles(scene, instance)); }

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb bounds, centroids;
    for (std::uint32_t i = begin; i < end; ++i) {
        const Aabb b = tris_[i].bounds();
        bounds.expand(b);
        centroids.expand(b.center());
    }
    nodes_[index].bounds = bounds;
    const std::uint32_t n = end - begin;
    if (n <= kLeafSize || max_component(centroids.extent()) <= 0.0) {
        nodes_[index].first = begin;
        nodes_[index].count = n;
        return index;
    }
    const int axis = centroids.largest_axis();
    const std::uint32_t mid = begin + n / 2;
    std::nth_element(tris_.begin() + begin, tris_.begin() + mid, tris_.begin() + end,
                     [axis](const BvhTriangle &a, const BvhTriangle &b) {
                         const double ca = a.v0[axis] + a.v1[axis] + a.v2[axis];
                         const double cb = b.v0[axis] + b.v1[axis] + b.v2[axis];
                         if (ca != cb) return ca < cb;
                         return a.instance != b.instance ? a.instance < b.instance : a.triangle < b.triangle;
                     });
    build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[index].first = right;
    nodes_[index].count = 0;
    return index;
}

std::optional<Hit> Bvh::intersect(const Ray &ray) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
    std::optional<Hit> best;
    std::uint32_t stack[96];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node &node = nodes_[stack[--sp]];
        const double limit = best ? best->t : ray.tmax;
        // equal-distance boxes are still visited so exact ties resolve like the brute-force scan
        if (!box_hit(node.bounds, ray.origin, inv, ray.tmin, limit)) continue;
        if (node.leaf()) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
                if (auto h = intersect_triangle(tris_[i], ray); h && (!best || closer(*h, *best))) best = h;
        } else {
            const auto self = static_cast<std::uint32_t>(&node - nodes_.data());
            stack[sp++] = node.first;
            stack[sp++] = self + 1;
        }
    }
    return best;
}

bool Bvh::occluded(const Ray &ray) const {
    if (nodes_.empty()) return false;
    const Vec3 inv{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
    std::uint32_t stack[96];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node &node = nodes_[stack[--sp]];
        if (!box_hit(node.bounds, ray.origin, inv, ray.tmin, ray.tmax)) continue;
        if (node.leaf()) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
                if (intersect_triangle(tris_[i], ray)) return true;
        } else {
            const auto self = static_cast<std::uint32_t>(&node - nodes_.data());
            stack[sp++] = node.first;
            stack[sp++] = self + 1;
        }
    }
    return false;
}

}  // namespace cadsynth
