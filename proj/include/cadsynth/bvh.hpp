#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cadsynth/math.hpp"
#include "cadsynth/scene.hpp"

namespace cadsynth {

struct Ray {
    Vec3 origin;
    Vec3 dir;
    double tmin = 0;
    double tmax = std::numeric_limits<double>::infinity();
};

/// World-space triangle tagged with its source instance and triangle index.
struct BvhTriangle {
    Vec3 v0, v1, v2;
    std::uint32_t instance = 0;
    std::uint32_t triangle = 0;

    Aabb bounds() const {
        Aabb b;
        b.expand(v0);
        b.expand(v1);
        b.expand(v2);
        return b;
    }
};

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    std::uint32_t instance = 0;
    std::uint32_t triangle = 0;
    double b1 = 0, b2 = 0;  // barycentrics of v1, v2
};

/// Möller-Trumbore, two-sided. Hits strictly inside (tmin, tmax).
std::optional<Hit> intersect_triangle(const BvhTriangle &tri, const Ray &ray);

/// Nearest hit over all triangles; exact t ties go to the lower (instance, triangle).
std::optional<Hit> brute_force_intersect(std::span<const BvhTriangle> tris, const Ray &ray);

/// Median-split bounding volume hierarchy.
class Bvh {
public:
    struct Node {
        Aabb bounds;
        std::uint32_t first = 0;  // leaf: first triangle; interior: index of right child (left is this + 1)
        std::uint32_t count = 0;  // triangles in leaf, 0 for interior
        bool leaf() const { return count > 0; }
    };

    static constexpr std::uint32_t kLeafSize = 4;

    Bvh() = default;
    explicit Bvh(std::vector<BvhTriangle> triangles);

    /// All instance triangles of `scene`, transformed to world space.
    static Bvh from_scene(const Scene &scene);
    /// Triangles of a single instance (instance index preserved in hits).
    static Bvh from_instance(const Scene &scene, std::size_t instance);

    std::optional<Hit> intersect(const Ray &ray) const;
    bool occluded(const Ray &ray) const;

    std::span<const Node> nodes() const { return nodes_; }
    std::span<const BvhTriangle> triangles() const { return tris_; }
    bool empty() const { return tris_.empty(); }

private:
    std::uint32_t build(std::uint32_t begin, std::uint32_t end);

    std::vector<BvhTriangle> tris_;
    std::vector<Node> nodes_;
};

std::vector<BvhTriangle> world_triangles(const Scene &scene, std::size_t instance);

}  // namespace cadsynth
